"""Continuous augmentations of binary distributions over orthants of R^d.

A binary distribution p(s) on {-1, +1}^d extends to a density on R^d by
spreading each state's mass over its orthant: positions y with sign pattern
s get density proportional to exp(-U(y)) with

    gaussian:     U(y) = 0.5 * y @ y - log w(s)
    exponential:  U(y) = sum(|y_i|) - log w(s)

Marginalizing an orthant recovers p(s) exactly, so sampling y and reading
off its sign pattern samples the binary target.
"""

from __future__ import annotations

import enum

import numpy as np

__all__ = ["Augmentation", "OnWallError", "potential", "orthant_gradient", "wall_jump"]


class Augmentation(enum.Enum):
    GAUSSIAN = "gaussian"
    EXPONENTIAL = "exponential"


class OnWallError(ValueError):
    """A position sits exactly on a coordinate wall, where the orthant is ambiguous."""


def potential(kind: Augmentation, model, y, s) -> float:
    """Energy U(y) of position ``y`` inside the orthant with sign pattern ``s``."""
    yv = np.asarray(y, dtype=float)
    if yv.shape != (model.dim,):
        raise ValueError(f"position must have shape {(model.dim,)}, got {yv.shape}")
    if kind is Augmentation.GAUSSIAN:
        smooth = 0.5 * float(yv @ yv)
    else:
        smooth = float(np.abs(yv).sum())
    return smooth - model.log_weight(s)


def orthant_gradient(kind: Augmentation, y, s) -> np.ndarray:
    """Gradient of the potential in the interior of an orthant.

    For the gaussian augmentation this is y itself; for the exponential it is
    the sign vector s.  Raises OnWallError if any coordinate of ``y`` is
    exactly zero, since the gradient is undefined on a wall.
    """
    yv = np.asarray(y, dtype=float)
    if np.any(yv == 0.0):
        raise OnWallError("gradient undefined on a coordinate wall (some y_i == 0)")
    if kind is Augmentation.GAUSSIAN:
        return yv.copy()
    return np.asarray(s, dtype=float).copy()


def wall_jump(model, s, i: int) -> float:
    """Potential jump when crossing wall ``i`` out of the orthant with signs ``s``.

    The smooth part of the potential is continuous across a wall, so the jump
    is just the drop in log weight: -flip_delta(i, s).
    """
    return -model.flip_delta(i, s)
