"""Per-node affine regressors and their stochastic-gradient updates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .separators import Separator


@dataclass
class NodeRegressor:
    """Affine regressor over the extended input (offset in the last weight)."""

    v: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float)
        if v.ndim != 1 or not np.all(np.isfinite(v)):
            raise ValueError("regressor weights must be a finite vector")
        self.v = v


@dataclass
class NodeState:
    """Learnable state of one tree node.

    Leaves carry no separator; internal nodes gate their two subtrees
    through ``sep``.
    """

    w: float
    reg: NodeRegressor
    sep: Separator | None = None


def node_estimate(reg: NodeRegressor, x_ext: np.ndarray) -> float:
    """Inner product of the node's weights with the extended input."""
    x_ext = np.asarray(x_ext, dtype=float)
    if x_ext.shape != reg.v.shape:
        raise ValueError(f"dimension mismatch: weights {reg.v.shape}, input {x_ext.shape}")
    return float(reg.v @ x_ext)


def scaled_estimate(d_hat: float, alpha: float) -> float:
    """Node estimate scaled by the node's path activation."""
    return alpha * d_hat


def update_regressor(reg: NodeRegressor, x_ext, e: float, step: float, alpha: float) -> NodeRegressor:
    """One stochastic-gradient step ``v + step * e * alpha * x``.

    With activation 1 this is the plain LMS update; activation 0 leaves
    the regressor untouched (hard separators off the active path).
    """
    return NodeRegressor(reg.v + step * e * alpha * np.asarray(x_ext, dtype=float))
