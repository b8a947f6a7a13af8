"""Weyl-Heisenberg grid and the matrix containers shared across the package.

Orientation convention used everywhere:

* time-frequency matrices are N x M, indexed ``[time slot n, sub-carrier m]``;
* delay-Doppler matrices are M x N, indexed ``[delay bin, Doppler bin]``,
  sampling delay at ``m/B`` and Doppler at ``n/S``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["TFGrid", "TFMatrix", "DDMatrix", "ceil_count"]


def ceil_count(x: float, tol: float = 1e-9) -> int:
    """Integer ceiling robust to float dust just above an integer.

    Bin-count formulas like ceil(tau_D*B + 2) are routinely fed products that
    should be exact integers but land a few ulp high; values within ``tol``
    of an integer round to it instead of up.
    """
    return int(np.ceil(x - tol))


@dataclass(frozen=True)
class TFGrid:
    """Critically sampled time-frequency lattice.

    Parameters
    ----------
    T : float
        Symbol duration in seconds.
    F : float
        Sub-carrier spacing in Hz.  ``T * F`` must equal 1 (to within one
        ulp of the product); there is no cyclic prefix in this model.
    N, M : int
        Number of time slots / sub-carriers, both at least 2.
    """

    T: float
    F: float
    N: int
    M: int

    def __post_init__(self) -> None:
        if not (self.T > 0.0 and self.F > 0.0):
            raise ValueError(f"T and F must be positive, got T={self.T}, F={self.F}")
        if self.N < 2 or self.M < 2:
            raise ValueError(f"need N >= 2 and M >= 2, got N={self.N}, M={self.M}")
        if abs(self.T * self.F - 1.0) > np.finfo(float).eps:
            raise ValueError(f"T*F must equal 1, got {self.T * self.F!r}")

    @classmethod
    def from_subcarrier_spacing(cls, F: float, N: int, M: int) -> "TFGrid":
        return cls(1.0 / F, F, N, M)

    @classmethod
    def from_symbol_duration(cls, T: float, N: int, M: int) -> "TFGrid":
        return cls(T, 1.0 / T, N, M)

    @property
    def S(self) -> float:
        """Frame length N*T in seconds."""
        return self.N * self.T

    @property
    def B(self) -> float:
        """Bandwidth M*F in Hz."""
        return self.M * self.F


def _coerce(values, shape: tuple[int, int], what: str) -> np.ndarray:
    v = np.asarray(values, dtype=complex)
    if v.shape != shape:
        raise ValueError(f"{what} must have shape {shape}, got {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{what} contains non-finite entries")
    return v


@dataclass(frozen=True)
class TFMatrix:
    """Complex N x M matrix on the time-frequency grid, row = time slot."""

    grid: TFGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "values", _coerce(self.values, (self.grid.N, self.grid.M), "TFMatrix")
        )


@dataclass(frozen=True)
class DDMatrix:
    """Complex M x N matrix in the delay-Doppler domain, row = delay bin."""

    grid: TFGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "values", _coerce(self.values, (self.grid.M, self.grid.N), "DDMatrix")
        )
