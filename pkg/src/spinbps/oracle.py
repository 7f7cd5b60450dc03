"""Exact moments by exhaustive enumeration, plus the benchmark's error metric."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

__all__ = [
    "MAX_ENUM_DIM",
    "EnumerationInfeasibleError",
    "MomentTable",
    "enumerate_moments",
    "summed_mse",
]

# beyond this, 2^d state sums stop being a practical ground truth
MAX_ENUM_DIM = 25

_CHUNK_BITS = 16


class EnumerationInfeasibleError(ValueError):
    """Exhaustive enumeration was requested for an intractably large model."""


@dataclass
class MomentTable:
    """First and (optionally) second spin moments of a binary distribution.

    ``first[i]`` is E[s_i]; ``second[i, j]`` is E[s_i s_j], symmetric with a
    unit diagonal since s_i^2 == 1.  ``second`` is None when only first
    moments were tracked.  ``total_weight`` records the mass behind the
    estimate: the partition function for exact tables, the accumulated
    duration or sample count for empirical ones.
    """

    first: np.ndarray
    second: np.ndarray | None
    total_weight: float = 1.0

    def __post_init__(self):
        self.first = np.asarray(self.first, dtype=float)
        if self.second is not None:
            self.second = np.asarray(self.second, dtype=float)

    @property
    def dim(self) -> int:
        return self.first.shape[0]

    def to_json(self) -> str:
        doc = {
            "first": [float(x) for x in self.first],
            "second": None
            if self.second is None
            else [[float(x) for x in row] for row in self.second],
            "total_weight": float(self.total_weight),
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "MomentTable":
        doc = json.loads(text)
        second = doc.get("second")
        return cls(
            first=np.asarray(doc["first"], dtype=float),
            second=None if second is None else np.asarray(second, dtype=float),
            total_weight=float(doc.get("total_weight", 1.0)),
        )


def _spin_block(start: int, stop: int, d: int) -> np.ndarray:
    """Spin vectors for state indices [start, stop): bit j set means s_j = +1."""
    idx = np.arange(start, stop, dtype=np.uint32)
    bits = (idx[:, None] >> np.arange(d, dtype=np.uint32)) & 1
    return bits.astype(float) * 2.0 - 1.0


def enumerate_moments(model) -> MomentTable:
    """Exact moments of a binary model by summing over all 2^d states.

    Streams the state space in chunks with a running log-scale rescale, so
    arbitrarily large or small weights never overflow.  Models carrying
    ``couplings`` and ``fields`` arrays get a vectorized energy evaluation;
    anything else falls back to per-state ``log_weight`` calls.

    Raises EnumerationInfeasibleError when ``model.dim`` exceeds
    MAX_ENUM_DIM.
    """
    d = model.dim
    if d > MAX_ENUM_DIM:
        raise EnumerationInfeasibleError(
            f"enumeration over 2^{d} states is infeasible (limit is d <= {MAX_ENUM_DIM})"
        )

    couplings = getattr(model, "couplings", None)
    fields = getattr(model, "fields", None)
    vectorized = (
        isinstance(couplings, np.ndarray)
        and isinstance(fields, np.ndarray)
        and couplings.shape == (d, d)
        and fields.shape == (d,)
    )

    def block_log_weights(block: np.ndarray) -> np.ndarray:
        if vectorized:
            return -(block @ fields) - 0.5 * np.einsum("ki,ki->k", block @ couplings, block)
        return np.array([model.log_weight(row) for row in block])

    n = 1 << d
    chunk = min(n, 1 << _CHUNK_BITS)
    log_scale = -np.inf
    z = 0.0
    first = np.zeros(d)
    second = np.zeros((d, d))
    for start in range(0, n, chunk):
        block = _spin_block(start, min(start + chunk, n), d)
        logw = block_log_weights(block)
        peak = float(logw.max())
        if peak > log_scale:
            if np.isfinite(log_scale):
                shrink = np.exp(log_scale - peak)
                z *= shrink
                first *= shrink
                second *= shrink
            log_scale = peak
        w = np.exp(logw - log_scale)
        z += float(w.sum())
        first += block.T @ w
        second += (block * w[:, None]).T @ block

    first = np.clip(first / z, -1.0, 1.0)
    second = np.clip(second / z, -1.0, 1.0)
    second = 0.5 * (second + second.T)
    np.fill_diagonal(second, 1.0)
    return MomentTable(first=first, second=second, total_weight=float(np.exp(log_scale) * z))


def summed_mse(estimate: MomentTable, exact: MomentTable, include_second: bool = True) -> float:
    """Summed squared error between two moment tables.

    Adds the squared differences of all first moments and, when
    ``include_second`` is true, of the second moments over unordered pairs
    i < j (the diagonal is identically one and the matrix symmetric, so the
    upper triangle carries all the information).  Symmetric in its inputs.
    """
    if estimate.dim != exact.dim:
        raise ValueError(f"dimension mismatch: {estimate.dim} vs {exact.dim}")
    total = float(np.sum((estimate.first - exact.first) ** 2))
    if include_second:
        if estimate.second is None or exact.second is None:
            raise ValueError("second moments requested but not present in both tables")
        iu = np.triu_indices(estimate.dim, k=1)
        total += float(np.sum((estimate.second[iu] - exact.second[iu]) ** 2))
    return total
