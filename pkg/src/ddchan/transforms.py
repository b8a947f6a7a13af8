"""Discrete symplectic Fourier transforms, window kernels and grid rotations.

The discrete symplectic transform used throughout maps an ``in_rows x in_cols``
matrix ``A`` (rows time-like, columns frequency-like) to the ``out_m x out_n``
matrix

    ``out[mt, nt] = sum_{n,m} A[n, m] * exp(-2j*pi*(n*nt/out_n - m*mt/out_m))``

i.e. a forward DFT along the time axis paired with an inverse-sign DFT along
the frequency axis, unnormalized.  Applying it twice returns ``out_n*out_m``
times the original matrix, which is why the same routine serves both
directions of the T-F <-> D-D mapping.
"""

from __future__ import annotations

import numpy as np

from .grid import TFGrid

__all__ = [
    "sfft",
    "isfft",
    "diric",
    "window_w",
    "periodic_window",
    "rotate_dd",
    "derotate_dd",
    "phase_rotate_tf",
    "phase_derotate_tf",
]

# |sin(omega/2)| below this switches diric() to its removable-singularity limit
_DIRIC_SING = 1e-9


def sfft(a: np.ndarray, out_n: int, out_m: int) -> np.ndarray:
    """Discrete symplectic transform of ``a``, zero-padded to out_n x out_m.

    ``a`` is indexed [time-like, frequency-like] and must not exceed the
    transform size in either dimension.  The result is out_m x out_n,
    indexed [delay-like, Doppler-like].
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={a.ndim}")
    if a.shape[0] > out_n or a.shape[1] > out_m:
        raise ValueError(f"input {a.shape} exceeds transform size ({out_n}, {out_m})")
    t = np.fft.fft(a, n=out_n, axis=0)
    t = np.fft.ifft(t, n=out_m, axis=1) * out_m
    return t.T


def isfft(a: np.ndarray, n: int, m: int) -> np.ndarray:
    """Inverse of :func:`sfft`, carrying the 1/(n*m) normalization.

    ``a`` must be exactly m x n; the result is n x m and satisfies
    ``isfft(sfft(x, n, m), n, m) == x`` for any n x m input ``x``.
    """
    a = np.asarray(a, dtype=complex)
    if a.shape != (m, n):
        raise ValueError(f"expected shape ({m}, {n}), got {a.shape}")
    return sfft(a, m, n) / (n * m)


def diric(order: int, omega) -> np.ndarray:
    """Dirichlet kernel sin(K*w/2) / (K*sin(w/2)) for K = ``order``.

    The removable singularities at w = 0 mod 2*pi evaluate to their limit
    (+1, or -1 at odd multiples of 2*pi when ``order`` is even).  Periodic
    in 2*pi for odd ``order``, antiperiodic for even ``order``.
    """
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    omega = np.asarray(omega, dtype=float)
    half = 0.5 * omega
    den = np.sin(half)
    singular = np.abs(den) < _DIRIC_SING
    safe = np.where(singular, 1.0, den)
    regular = np.sin(order * half) / (order * safe)
    # at the singularity sin(K*w/2)/(K*sin(w/2)) -> cos(K*w/2)/cos(w/2)
    limit = np.cos(order * half) / np.cos(half)
    out = np.where(singular, limit, regular)
    return out if out.ndim else float(out)


def window_w(grid: TFGrid, tau, nu) -> np.ndarray:
    """Delay-Doppler image of the rectangular T-F observation window.

    A 2-D sinc with mainlobe widths 2/B in delay and 2/S in Doppler:
    ``[sin(pi*S*nu)/(pi*nu)] * [sin(pi*B*tau)/(pi*tau)]`` times the linear
    phase ``exp(-j*pi*((N-1)*T*nu - (M-1)*F*tau))``.  The removable
    singularities at tau = 0 / nu = 0 take the limit values B and S.
    """
    tau = np.asarray(tau, dtype=float)
    nu = np.asarray(nu, dtype=float)
    mag = grid.S * np.sinc(grid.S * nu) * grid.B * np.sinc(grid.B * tau)
    phase = np.exp(-1j * np.pi * ((grid.N - 1) * grid.T * nu - (grid.M - 1) * grid.F * tau))
    out = mag * phase
    return out if out.ndim else complex(out)


def periodic_window(grid: TFGrid, tau, nu) -> np.ndarray:
    """Periodic extension of :func:`window_w`, sampled analytically.

    Equals ``diric(N, 2*pi*T*nu) * exp(-j*pi*(N-1)*T*nu) *
    diric(M, 2*pi*F*tau) * exp(+j*pi*(M-1)*F*tau)`` and vanishes on every
    nonzero delay-Doppler grid point (k/B, l/S), k in 1..M-1, l in 1..N-1.
    """
    tau = np.asarray(tau, dtype=float)
    nu = np.asarray(nu, dtype=float)
    doppler = diric(grid.N, 2.0 * np.pi * grid.T * nu) * np.exp(
        -1j * np.pi * (grid.N - 1) * grid.T * nu
    )
    delay = diric(grid.M, 2.0 * np.pi * grid.F * tau) * np.exp(
        1j * np.pi * (grid.M - 1) * grid.F * tau
    )
    out = doppler * delay
    return out if np.ndim(out) else complex(out)


def _check_rotation(a: np.ndarray, n_pilot: int) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={a.ndim}")
    if n_pilot % 2 != 0:
        raise ValueError(f"pilot count must be even, got {n_pilot} (round up)")
    if n_pilot > a.shape[1]:
        raise ValueError(f"pilot count {n_pilot} exceeds Doppler size {a.shape[1]}")
    return a


def rotate_dd(a: np.ndarray, n_pilot: int, delay_shift: int = 1) -> np.ndarray:
    """Circularly shift a delay-Doppler matrix so its support sits at [0, 0].

    ``out[m, n] = a[(m - delay_shift) mod M, (n - n_pilot/2) mod N]``.  The
    one-bin default delay shift pulls the wrapped bin M-1 (sidelobe spill of
    nonnegative delays) to row 0; the half-pilot Doppler shift centres the
    two-sided Doppler support.
    """
    a = _check_rotation(a, n_pilot)
    return np.roll(a, shift=(delay_shift, n_pilot // 2), axis=(0, 1))


def derotate_dd(a: np.ndarray, n_pilot: int, delay_shift: int = 1) -> np.ndarray:
    """Inverse of :func:`rotate_dd`."""
    a = _check_rotation(a, n_pilot)
    return np.roll(a, shift=(-delay_shift, -n_pilot // 2), axis=(0, 1))


def phase_rotate_tf(a: np.ndarray, n_pilot: int, delay_shift: int = 1) -> np.ndarray:
    """T-F domain twin of :func:`rotate_dd` via the DFT shift theorem.

    ``out[n, m] = exp(j*n*w_N) * a[n, m] * exp(-j*m*w_M)`` with
    ``w_N = pi*n_pilot/rows`` and ``w_M = 2*pi*delay_shift/cols``, so that
    ``sfft(phase_rotate_tf(H)) == rotate_dd(sfft(H))``.  The same phase law
    applies unchanged to the down-sampled pilot grid (rows = n_pilot), where
    the time-axis factor reduces to (-1)**row.
    """
    a = np.asarray(a, dtype=complex)
    rows, cols = a.shape
    row_phase = np.exp(1j * np.pi * n_pilot * np.arange(rows) / rows)
    col_phase = np.exp(-2j * np.pi * delay_shift * np.arange(cols) / cols)
    return row_phase[:, None] * a * col_phase[None, :]


def phase_derotate_tf(a: np.ndarray, n_pilot: int, delay_shift: int = 1) -> np.ndarray:
    """Inverse of :func:`phase_rotate_tf`."""
    a = np.asarray(a, dtype=complex)
    rows, cols = a.shape
    row_phase = np.exp(-1j * np.pi * n_pilot * np.arange(rows) / rows)
    col_phase = np.exp(2j * np.pi * delay_shift * np.arange(cols) / cols)
    return row_phase[:, None] * a * col_phase[None, :]
