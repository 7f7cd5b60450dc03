"""Numerical invariant suite: fast self-contained checks of the core identities.

Each check returns its worst observed error so failures say how far off the
implementation is, not just that it is off.  The suite is deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .augmentation import Augmentation, potential, wall_jump
from .bps import bounce_time_exponential, bounce_time_gaussian, reflect_off_gradient, wall_event
from .hmc import _sweep
from .model import MrfModel, mrf_sample

__all__ = ["CheckResult", "run_selftest"]


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def check_reflection(trials: int = 1000) -> CheckResult:
    """Reflections must preserve speed, flip the gradient component, and undo themselves."""
    rng = np.random.default_rng(2024_01)
    worst_inv = 0.0
    worst_norm = 0.0
    worst_flip = 0.0
    for _ in range(trials):
        d = int(rng.integers(1, 9))
        v = rng.standard_normal(d)
        g = rng.standard_normal(d)
        while float(g @ g) == 0.0:
            g = rng.standard_normal(d)
        r = reflect_off_gradient(v, g)
        rr = reflect_off_gradient(r, g)
        worst_inv = max(worst_inv, float(np.max(np.abs(rr - v))))
        worst_norm = max(worst_norm, abs(math.sqrt(float(r @ r)) - math.sqrt(float(v @ v))))
        worst_flip = max(worst_flip, abs(float(r @ g) + float(v @ g)))
    passed = worst_inv <= 1e-12 and worst_norm <= 1e-12 and worst_flip <= 1e-12
    return CheckResult(
        "reflection involution, speed, gradient flip",
        passed,
        f"worst involution {worst_inv:.3e}, speed drift {worst_norm:.3e}, "
        f"dot flip {worst_flip:.3e} (tol 1e-12)",
    )


def check_bounce_inversion(trials: int = 1000) -> CheckResult:
    """Integrated bounce rate up to the inverted time must equal the draw."""
    rng = np.random.default_rng(2024_02)
    worst = 0.0
    for _ in range(trials):
        e_draw = float(rng.exponential())
        c = float(rng.normal(0.0, 2.0))
        t = bounce_time_gaussian(c, e_draw)
        pts = [-c] if 0.0 < -c < t else None
        integral, _ = quad(lambda u: max(c + u, 0.0), 0.0, t, points=pts, epsabs=1e-13, epsrel=1e-13)
        worst = max(worst, abs(integral - e_draw))

        rate = float(rng.exponential()) + 1e-3
        t = bounce_time_exponential(rate, e_draw)
        integral, _ = quad(lambda u: rate, 0.0, t, epsabs=1e-13, epsrel=1e-13)
        worst = max(worst, abs(integral - e_draw))
    return CheckResult(
        "bounce time inversion vs quadrature",
        worst <= 1e-8,
        f"worst |integrated rate - draw| {worst:.3e} (tol 1e-8)",
    )


def check_detailed_balance(trials: int = 1000) -> CheckResult:
    """Wall crossings must balance: w(s) p(s -> s') == w(s') p(s' -> s).

    Checked in log space against the crossing probability min(1, exp(-jump)).
    """
    rng = np.random.default_rng(2024_03)
    worst = 0.0
    for _ in range(trials):
        d = int(rng.integers(1, 7))
        model = mrf_sample(d, 1.0, 1.0, int(rng.integers(1 << 30)))
        s = rng.integers(0, 2, size=d) * 2.0 - 1.0
        i = int(rng.integers(d))
        flipped = s.copy()
        flipped[i] = -flipped[i]
        forward = model.log_weight(s) + min(0.0, -wall_jump(model, s, i))
        backward = model.log_weight(flipped) + min(0.0, -wall_jump(model, flipped, i))
        scale = max(1.0, abs(forward), abs(backward))
        worst = max(worst, abs(forward - backward) / scale)
    return CheckResult(
        "wall crossing detailed balance",
        worst <= 1e-12,
        f"worst log flow imbalance {worst:.3e} (tol 1e-12)",
    )


def check_wall_acceptance(draws: int = 100_000) -> CheckResult:
    """Empirical crossing frequency at a potential jump of log 2 must be 1/2."""
    rng = np.random.default_rng(2024_04)
    model = MrfModel(dim=1, couplings=np.zeros((1, 1)), fields=np.array([0.5 * math.log(2.0)]))
    s = np.array([-1.0])  # jump out of this orthant is +log 2
    crossings = 0
    for u in rng.random(draws):
        crossed, _ = wall_event(model, s, 0, float(u))
        crossings += crossed
    freq = crossings / draws
    return CheckResult(
        "wall acceptance frequency at jump log 2",
        abs(freq - 0.5) <= 0.005,
        f"frequency {freq:.4f} over {draws} draws (want 0.5 +- 0.005)",
    )


def check_hmc_energy(iterations: int = 1000) -> CheckResult:
    """Total energy must survive a full travel leg, wall events included."""
    rng = np.random.default_rng(2024_05)
    model = mrf_sample(5, 0.7, 0.5, 99)
    s = [float(x) for x in rng.integers(0, 2, size=5) * 2 - 1]
    y = [abs(float(x)) * s[i] for i, x in enumerate(rng.standard_normal(5))]
    worst = 0.0
    for _ in range(iterations):
        v = [float(x) for x in rng.standard_normal(5)]
        before = 0.5 * sum(x * x for x in v) + potential(Augmentation.GAUSSIAN, model, y, s)
        _sweep(y, v, s, 5, 6.5 * math.pi, model)
        after = 0.5 * sum(x * x for x in v) + potential(Augmentation.GAUSSIAN, model, y, s)
        worst = max(worst, abs(after - before) / max(1.0, abs(before)))
    return CheckResult(
        "exact dynamics energy conservation",
        worst <= 1e-9,
        f"worst relative energy drift {worst:.3e} over {iterations} legs (tol 1e-9)",
    )


def run_selftest() -> list[CheckResult]:
    return [
        check_reflection(),
        check_bounce_inversion(),
        check_detailed_balance(),
        check_wall_acceptance(),
        check_hmc_energy(),
    ]
