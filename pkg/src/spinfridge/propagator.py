"""Affine segment propagators acting on the column (E, L, C, D, 1)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .medium import FieldPoint, ObservableState


@dataclass(frozen=True)
class AffinePropagator:
    """5x5 real matrix mapping (E, L, C, D, 1) at field_start to field_end.

    The last row is always (0, 0, 0, 0, 1).
    """

    M: np.ndarray
    field_start: FieldPoint
    field_end: FieldPoint

    def __post_init__(self):
        M = np.asarray(self.M, dtype=float)
        if M.shape != (5, 5):
            raise ValueError(f"propagator matrix must be 5x5, got {M.shape}")
        object.__setattr__(self, "M", M)

    def apply(self, state: ObservableState) -> ObservableState:
        out = self.M @ state.vector()
        return ObservableState(out[0], out[1], out[2], out[3], self.field_end)

    def after(self, other: "AffinePropagator") -> "AffinePropagator":
        """Composition self o other (other acts first)."""
        return AffinePropagator(self.M @ other.M, other.field_start, self.field_end)

    @property
    def linear_block(self) -> np.ndarray:
        return self.M[:4, :4]

    @property
    def affine_column(self) -> np.ndarray:
        return self.M[:4, 4]

    @staticmethod
    def identity(fp: FieldPoint) -> "AffinePropagator":
        return AffinePropagator(np.eye(5), fp, fp)


def assemble(block3: np.ndarray, d_scale: float, affine3=None,
             d_affine: float = 0.0) -> np.ndarray:
    """Build the 5x5 matrix from a 3x3 (E, L, C) block and the D-row scaling."""
    M = np.zeros((5, 5))
    M[:3, :3] = block3
    M[3, 3] = d_scale
    if affine3 is not None:
        M[:3, 4] = affine3
    M[3, 4] = d_affine
    M[4, 4] = 1.0
    return M
