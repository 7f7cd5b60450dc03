"""Bouncy particle sampler over orthant-augmented binary distributions.

The particle moves in straight lines at unit speed.  Three things can
interrupt a segment: a bounce (velocity reflects off the potential gradient,
scheduled by inverting the integrated rate [v . grad U]_+ against a standard
exponential draw), a wall arrival (some coordinate reaches zero, where a
Metropolis test either lets the particle cross into the neighboring orthant
or inverts that velocity coordinate), and an optional velocity refreshment.
Time spent in each orthant, weighted by duration, estimates the moments of
the underlying binary distribution.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .augmentation import Augmentation, orthant_gradient
from .estimators import MomentAccumulator
from .oracle import MomentTable

__all__ = [
    "EventKind",
    "Event",
    "OrthantState",
    "BpsConfig",
    "BpsResult",
    "bounce_time_gaussian",
    "bounce_time_exponential",
    "wall_times",
    "reflect_off_gradient",
    "wall_event",
    "bps_step",
    "bps_run",
    "discrete_time_reference_step",
]

_INF = math.inf

# consecutive events closer than min_event_gap tolerated before declaring a stall
_STALL_LIMIT = 1000


class EventKind(enum.Enum):
    BOUNCE = "bounce"
    WALL_CROSS = "wall-cross"
    WALL_REFLECT = "wall-reflect"
    REFRESH = "refresh"


@dataclass(frozen=True, slots=True)
class Event:
    """One sampler event: when it happened, what it was, which coordinate."""

    time: float
    kind: EventKind
    coord: int | None = None


@dataclass
class OrthantState:
    """Particle state: position ``y``, spin signs ``s``, velocity ``v``.

    The spins are tracked explicitly rather than read off sign(y) so that a
    position sitting exactly on a wall still belongs to a definite orthant.
    """

    y: np.ndarray
    s: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        self.y = np.array(self.y, dtype=float)
        self.s = np.array(self.s, dtype=float)
        self.v = np.array(self.v, dtype=float)
        if not (self.y.shape == self.s.shape == self.v.shape and self.y.ndim == 1):
            raise ValueError("y, s, v must be one-dimensional arrays of equal length")
        if np.any(np.abs(self.s) != 1.0):
            raise ValueError("spin entries must be +-1")


@dataclass
class BpsConfig:
    """Knobs for a bouncy particle run.

    ``min_event_gap`` guards against a stalled event loop: the run aborts if
    too many consecutive events advance time by less than this gap.
    """

    augmentation: Augmentation
    max_events: int
    refresh_rate: float = 0.0
    burn_in_fraction: float = 0.1
    min_event_gap: float = 1e-12
    include_second_moments: bool = True

    def __post_init__(self):
        if not isinstance(self.augmentation, Augmentation):
            raise ValueError(f"unknown augmentation: {self.augmentation!r}")
        if self.max_events < 1:
            raise ValueError(f"max_events must be a positive integer, got {self.max_events}")
        if not (self.refresh_rate >= 0.0 and math.isfinite(self.refresh_rate)):
            raise ValueError(f"refresh_rate must be finite and nonnegative, got {self.refresh_rate}")
        if not 0.0 <= self.burn_in_fraction < 1.0:
            raise ValueError(f"burn_in_fraction must lie in [0, 1), got {self.burn_in_fraction}")
        if self.min_event_gap < 0.0:
            raise ValueError(f"min_event_gap must be nonnegative, got {self.min_event_gap}")


@dataclass
class BpsResult:
    """Outcome of a run: the moment estimate plus event bookkeeping.

    ``moments`` is None when the caller supplied its own estimator sink.
    """

    moments: MomentTable | None
    counts: dict[EventKind, int]
    events: int
    total_time: float


def bounce_time_gaussian(c: float, exp_draw: float) -> float:
    """First bounce time under the linearly growing rate [c + t]_+.

    ``c`` is the alignment v . y at the segment start for a unit-speed ray in
    the gaussian augmentation, and ``exp_draw`` a standard exponential
    variate.  Returns the time t at which the integrated rate reaches
    ``exp_draw``.
    """
    if exp_draw < 0.0:
        raise ValueError(f"exponential draw must be nonnegative, got {exp_draw}")
    if c >= 0.0:
        # algebraically sqrt(c^2 + 2E) - c, rearranged to avoid cancellation
        root = math.sqrt(c * c + 2.0 * exp_draw) + c
        return 2.0 * exp_draw / root if root > 0.0 else 0.0
    return -c + math.sqrt(2.0 * exp_draw)


def bounce_time_exponential(rate: float, exp_draw: float) -> float:
    """First bounce time under a constant rate; infinite when the rate is zero."""
    if rate < 0.0:
        raise ValueError(f"rate must be nonnegative, got {rate}")
    if exp_draw < 0.0:
        raise ValueError(f"exponential draw must be nonnegative, got {exp_draw}")
    if rate == 0.0:
        return _INF
    return exp_draw / rate


def wall_times(y, v) -> tuple[list[float], int | None]:
    """Hitting time of each coordinate wall along the ray y + t v.

    A coordinate moving away from (or parallel to) its wall never hits it and
    gets time infinity.  Returns the per-coordinate times and the index of
    the smallest, with ties going to the lowest index; the index is None when
    no wall is ever hit.
    """
    times: list[float] = []
    best = _INF
    hit = -1
    for i in range(len(y)):
        yi = y[i]
        vi = v[i]
        t = -yi / vi if yi * vi < 0.0 else _INF
        times.append(t)
        if t < best:
            best = t
            hit = i
    return times, (hit if hit >= 0 else None)


def reflect_off_gradient(v, g) -> np.ndarray:
    """Reflect velocity ``v`` in the hyperplane orthogonal to gradient ``g``.

    Flips the component of v along g and preserves the rest, so speed is
    conserved and applying the reflection twice restores v.
    """
    vv = np.asarray(v, dtype=float)
    gv = np.asarray(g, dtype=float)
    gg = float(gv @ gv)
    if gg == 0.0:
        raise ValueError("cannot reflect off a zero gradient")
    return vv - (2.0 * float(vv @ gv) / gg) * gv


def _wall_accepts(jump: float, u: float) -> bool:
    # crossing probability min(1, exp(-jump))
    return jump <= 0.0 or u < math.exp(-jump)


def wall_event(model, s, i: int, uniform_draw: float) -> tuple[bool, np.ndarray]:
    """Resolve an arrival at wall ``i``: cross into the neighboring orthant or not.

    The crossing is accepted with probability min(1, exp(-jump)) where jump
    is the potential increase on the far side.  Returns (crossed, new spins);
    the spin vector is flipped at ``i`` on a crossing and unchanged otherwise.
    The caller inverts the velocity coordinate on a rejection.
    """
    if not 0 <= i < model.dim:
        raise IndexError(f"wall index {i} out of range for dimension {model.dim}")
    if not 0.0 <= uniform_draw < 1.0:
        raise ValueError(f"uniform draw must lie in [0, 1), got {uniform_draw}")
    jump = -model.flip_delta(i, s)
    out = np.array(s, dtype=float)
    if _wall_accepts(jump, uniform_draw):
        out[i] = -out[i]
        return True, out
    return False, out


def _unit_velocity(d: int, rng) -> list[float]:
    while True:
        g = rng.standard_normal(d)
        norm = math.sqrt(float(g @ g))
        if norm > 0.0:
            return [float(g[i]) / norm for i in range(d)]


def _wall_outcome(model, s, i, v, rng) -> EventKind:
    """Metropolis test at wall ``i``; inverts v_i on rejection, never touches s."""
    jump = -model.flip_delta(i, s)
    if _wall_accepts(jump, rng.random()):
        return EventKind.WALL_CROSS
    v[i] = -v[i]
    return EventKind.WALL_REFLECT


def _advance_once(y, v, s, d, model, gaussian, refresh_rate, rng):
    """Advance to the next event, mutating the position and velocity lists.

    Returns (kind, coord, elapsed).  On a WALL_CROSS the spin flip is left to
    the caller, so estimator sinks can read the pre-crossing state.

    Draw order per event: one exponential for the bounce clock, one
    exponential for the refresh clock when refreshment is on, then one
    uniform if the event is a wall arrival or fresh normals if it is a
    refreshment.
    """
    e_draw = rng.exponential()
    if gaussian:
        c = 0.0
        for i in range(d):
            c += v[i] * y[i]
        t_bounce = bounce_time_gaussian(c, e_draw)
    else:
        rate = 0.0
        for i in range(d):
            rate += v[i] * s[i]
        t_bounce = bounce_time_exponential(rate if rate > 0.0 else 0.0, e_draw)

    t_refresh = rng.exponential() / refresh_rate if refresh_rate > 0.0 else _INF

    t_wall = _INF
    hit = -1
    for i in range(d):
        yi = y[i]
        vi = v[i]
        if yi * vi < 0.0:
            t = -yi / vi
            if t < t_wall:
                t_wall = t
                hit = i

    # wall arrivals take priority on exact ties: the orthant must be settled
    # before anything else can use the state
    if t_wall <= t_bounce and t_wall <= t_refresh:
        for i in range(d):
            y[i] += v[i] * t_wall
        y[hit] = 0.0
        return _wall_outcome(model, s, hit, v, rng), hit, t_wall

    if t_bounce <= t_refresh:
        for i in range(d):
            y[i] += v[i] * t_bounce
        # a float-exact landing on a wall is a wall event, not a bounce
        for i in range(d):
            if y[i] == 0.0:
                return _wall_outcome(model, s, i, v, rng), i, t_bounce
        if gaussian:
            vg = 0.0
            gg = 0.0
            for i in range(d):
                gi = y[i]
                vg += v[i] * gi
                gg += gi * gi
            coef = 2.0 * vg / gg
            for i in range(d):
                v[i] -= coef * y[i]
        else:
            vg = 0.0
            for i in range(d):
                vg += v[i] * s[i]
            coef = 2.0 * vg / d
            for i in range(d):
                v[i] -= coef * s[i]
        return EventKind.BOUNCE, None, t_bounce

    for i in range(d):
        y[i] += v[i] * t_refresh
    for i in range(d):
        if y[i] == 0.0:
            return _wall_outcome(model, s, i, v, rng), i, t_refresh
    v[:] = _unit_velocity(d, rng)
    return EventKind.REFRESH, None, t_refresh


def bps_step(state: OrthantState, model, config: BpsConfig, rng, now: float = 0.0):
    """Advance one event from ``state``; returns (event, new state, elapsed).

    The event's timestamp is ``now`` plus the elapsed segment, so chained
    calls carry a global clock.  The input state is not modified.
    """
    d = model.dim
    if state.y.shape != (d,):
        raise ValueError(f"state dimension {state.y.shape[0]} does not match model dimension {d}")
    y = [float(x) for x in state.y]
    v = [float(x) for x in state.v]
    s = [float(x) for x in state.s]
    gaussian = config.augmentation is Augmentation.GAUSSIAN
    kind, coord, tau = _advance_once(y, v, s, d, model, gaussian, config.refresh_rate, rng)
    if kind is EventKind.WALL_CROSS:
        s[coord] = -s[coord]
    new_state = OrthantState(np.array(y), np.array(s), np.array(v))
    return Event(now + tau, kind, coord), new_state, tau


class _OrthantTally:
    """Duration tally per visited orthant; replays into an accumulator at the end.

    Orders of magnitude cheaper than per-segment moment updates when runs
    revisit few distinct orthants, and the time-weighted moments are
    order-independent, so the replay loses nothing.
    """

    def __init__(self):
        self.masses: dict[tuple, float] = {}

    def add_segment(self, s, duration: float) -> None:
        key = tuple(s)
        self.masses[key] = self.masses.get(key, 0.0) + duration

    def replay_into(self, acc: MomentAccumulator) -> None:
        for key, mass in self.masses.items():
            acc.add_segment(key, mass)


def _initial_state(d: int, rng) -> tuple[list, list, list]:
    # uniform spins, folded normal magnitudes, sphere velocity; burn-in
    # absorbs whatever this start gets wrong
    s = [float(x) for x in rng.integers(0, 2, size=d) * 2 - 1]
    mag = np.abs(rng.standard_normal(d))
    y = [float(mag[i]) * s[i] for i in range(d)]
    v = _unit_velocity(d, rng)
    return y, s, v


def bps_run(model, config: BpsConfig, rng, sink=None, trajectory=None) -> BpsResult:
    """Run the sampler for ``config.max_events`` events.

    The initial spins are uniform, positions are drawn from the
    augmentation's orthant marginal, and the velocity is uniform on the unit
    sphere.  After the burn-in prefix, every stretch of constant spins is fed
    to the estimator ``sink`` (anything with ``add_segment``); when no sink is
    given an internal accumulator produces ``result.moments``.  ``trajectory``
    accepts a writable text stream receiving one line per event:
    "time kind coord spins" with spins as a +- string.
    """
    d = model.dim
    gaussian = config.augmentation is Augmentation.GAUSSIAN
    y, s, v = _initial_state(d, rng)
    burn = int(config.burn_in_fraction * config.max_events)
    counts = {kind: 0 for kind in EventKind}
    own: MomentAccumulator | None = None
    active_sink = sink
    if active_sink is None:
        own = MomentAccumulator(d, include_second=config.include_second_moments)
        active_sink = _OrthantTally()
    refresh_rate = config.refresh_rate
    min_gap = config.min_event_gap
    clock = 0.0
    pending = 0.0
    stall = 0
    for k in range(config.max_events):
        kind, coord, tau = _advance_once(y, v, s, d, model, gaussian, refresh_rate, rng)
        counts[kind] += 1
        clock += tau
        if tau < min_gap:
            stall += 1
            if stall > _STALL_LIMIT:
                raise RuntimeError(
                    f"event loop stalled: {_STALL_LIMIT} consecutive events "
                    f"advanced time by less than {min_gap}"
                )
        else:
            stall = 0
        if k >= burn:
            pending += tau
        if kind is EventKind.WALL_CROSS:
            if pending > 0.0:
                active_sink.add_segment(s, pending)
                pending = 0.0
            s[coord] = -s[coord]
        if trajectory is not None:
            spins = "".join("+" if x > 0.0 else "-" for x in s)
            where = coord if coord is not None else "-"
            trajectory.write(f"{clock:.12g} {kind.value} {where} {spins}\n")
    if pending > 0.0:
        active_sink.add_segment(s, pending)
    moments = None
    if own is not None:
        active_sink.replay_into(own)
        if own.total_weight > 0.0:
            moments = own.finalize()
    return BpsResult(moments=moments, counts=counts, events=config.max_events, total_time=clock)


def discrete_time_reference_step(state: OrthantState, dt: float, model, config: BpsConfig, rng) -> OrthantState:
    """One Euler step of the discrete-time chain the sampler is the limit of.

    With probability dt * [v . grad U]_+ the velocity reflects off the
    gradient at the current position; the position then advances by v * dt
    using the pre-reflection velocity.  The state is updated in place and
    returned.  Raises ValueError if dt times the rate exceeds one.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    y = state.y
    v = state.v
    d = y.shape[0]
    if config.augmentation is Augmentation.GAUSSIAN:
        rate = 0.0
        for i in range(d):
            rate += v[i] * y[i]
    else:
        s = state.s
        rate = 0.0
        for i in range(d):
            rate += v[i] * s[i]
    if rate < 0.0:
        rate = 0.0
    p = dt * rate
    if p > 1.0:
        raise ValueError(f"dt * bounce rate = {p} exceeds 1; use a smaller dt")
    reflected = None
    if p > 0.0 and rng.random() < p:
        grad = orthant_gradient(config.augmentation, y, state.s)
        reflected = reflect_off_gradient(v, grad)
    for i in range(d):
        y[i] += v[i] * dt
    if reflected is not None:
        v[:] = reflected
    return state
