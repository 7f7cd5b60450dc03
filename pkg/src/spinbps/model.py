"""Binary target distributions: pairwise MRF instances and their local energies."""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = ["MrfModel", "mrf_sample"]


@dataclass(frozen=True)
class MrfModel:
    """Pairwise Markov random field over spin vectors in {-1, +1}^d.

    The unnormalized log probability of a spin vector ``s`` is

        log w(s) = -s @ fields - 0.5 * s @ couplings @ s

    ``couplings`` must be symmetric with a zero diagonal: with s_i^2 == 1 a
    diagonal term shifts every state's energy by the same constant, so it is
    normalized away rather than carried around.

    Instances are immutable after construction.  Any object exposing ``dim``,
    ``log_weight`` and ``flip_delta`` with the same semantics works as a
    drop-in target for the samplers in this package.
    """

    dim: int
    couplings: np.ndarray
    fields: np.ndarray
    sigma_m: float = 0.0
    sigma_r: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"model dimension must be a positive integer, got {self.dim}")
        m = np.array(self.couplings, dtype=float)
        r = np.array(self.fields, dtype=float)
        if m.shape != (self.dim, self.dim):
            raise ValueError(f"couplings must have shape {(self.dim, self.dim)}, got {m.shape}")
        if r.shape != (self.dim,):
            raise ValueError(f"fields must have shape {(self.dim,)}, got {r.shape}")
        if not (np.all(np.isfinite(m)) and np.all(np.isfinite(r))):
            raise ValueError("model coefficients must be finite")
        if not np.array_equal(m, m.T):
            raise ValueError("couplings must be symmetric")
        if np.any(np.diagonal(m) != 0.0):
            raise ValueError("couplings must have a zero diagonal")
        m.setflags(write=False)
        r.setflags(write=False)
        object.__setattr__(self, "couplings", m)
        object.__setattr__(self, "fields", r)

    @cached_property
    def _coupling_rows(self) -> list[list[float]]:
        # plain float rows keep the O(d) flip loop free of array overhead
        return [list(row) for row in self.couplings]

    @cached_property
    def _field_list(self) -> list[float]:
        return list(self.fields)

    def log_weight(self, s) -> float:
        """Unnormalized log probability of the spin vector ``s``."""
        sv = np.asarray(s, dtype=float)
        if sv.shape != (self.dim,):
            raise ValueError(f"spin vector must have shape {(self.dim,)}, got {sv.shape}")
        return float(-sv @ self.fields - 0.5 * (sv @ self.couplings @ sv))

    def flip_delta(self, i: int, s) -> float:
        """Change in log_weight from flipping spin ``i``, computed in O(d).

        Equals ``log_weight(s with s_i negated) - log_weight(s)``.  ``s`` may
        be any indexable of +-1 values; lists avoid boxing overhead in hot
        loops.
        """
        if not 0 <= i < self.dim:
            raise IndexError(f"spin index {i} out of range for dimension {self.dim}")
        row = self._coupling_rows[i]
        acc = 0.0
        for j in range(self.dim):
            acc += row[j] * s[j]
        return 2.0 * s[i] * (self._field_list[i] + acc)

    def to_json(self) -> str:
        """Serialize to a JSON document with row-major couplings."""
        return json.dumps(
            {
                "dim": self.dim,
                "seed": self.seed,
                "sigma_m": self.sigma_m,
                "sigma_r": self.sigma_r,
                "couplings": [float(x) for x in self.couplings.ravel()],
                "fields": [float(x) for x in self.fields],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "MrfModel":
        doc = json.loads(text)
        d = int(doc["dim"])
        return cls(
            dim=d,
            couplings=np.asarray(doc["couplings"], dtype=float).reshape(d, d),
            fields=np.asarray(doc["fields"], dtype=float),
            sigma_m=float(doc.get("sigma_m", 0.0)),
            sigma_r=float(doc.get("sigma_r", 0.0)),
            seed=int(doc.get("seed", 0)),
        )


def mrf_sample(d: int, sigma_m: float, sigma_r: float, seed: int) -> MrfModel:
    """Draw a random MRF instance with Gaussian couplings and fields.

    Off-diagonal couplings are N(0, sigma_m^2), drawn once per unordered pair
    (upper triangle, row-major) and mirrored; fields are N(0, sigma_r^2),
    drawn after the couplings.  The same seed always yields the same model.
    """
    if d < 1:
        raise ValueError(f"model dimension must be a positive integer, got {d}")
    if sigma_m < 0.0 or sigma_r < 0.0:
        raise ValueError("sigma_m and sigma_r must be nonnegative")
    rng = np.random.default_rng(seed)
    m = np.zeros((d, d))
    upper = np.triu_indices(d, k=1)
    m[upper] = rng.normal(0.0, sigma_m, size=len(upper[0]))
    m = m + m.T
    r = rng.normal(0.0, sigma_r, size=d)
    return MrfModel(dim=d, couplings=m, fields=r, sigma_m=sigma_m, sigma_r=sigma_r, seed=seed)
