"""Frame construction, transmission through the discrete channel, detection.

The signal model operates directly on the T-F grid: the received frame is
``Y = X (.) H_00 + sum_{tap != 0} X_shifted (.) H_tap + noise``, where the
shifted data copies are zero-filled at the frame edges (the frame is finite
and non-cyclic).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .channel import DDChannel, Pulse, channel_matrices, rect_pulse_pair
from .grid import TFGrid, ceil_count

__all__ = [
    "PilotPattern",
    "Frame",
    "RxFrame",
    "DetectionReport",
    "minimal_pattern",
    "default_taps",
    "build_frame",
    "build_ofdm_frame",
    "shift2d",
    "transmit",
    "equalize_detect",
    "qpsk_symbols",
]

_QPSK = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j]) / np.sqrt(2.0)

# |H| below this is treated as an erasure during one-tap equalization
_ERASURE = 1e-12


def qpsk_symbols(rng: np.random.Generator, shape) -> np.ndarray:
    """I.i.d. unit-power QPSK symbols."""
    return _QPSK[rng.integers(0, 4, size=shape)]


@dataclass(frozen=True)
class PilotPattern:
    """Regular pilot lattice: every l_n-th slot x every l_m-th sub-carrier.

    ``n_pilot = N/l_n`` and ``m_pilot = M/l_m`` double as the delay-Doppler
    support budget of the interpolator, so when bound to a channel they must
    cover ``ceil(nu_D*S + 2)`` Doppler bins (n_pilot, kept even for the
    half-shift rotation) and ``ceil(tau_D*B + 2)`` delay bins (m_pilot).
    """

    l_n: int
    l_m: int
    n_pilot: int
    m_pilot: int

    @classmethod
    def from_grid(cls, grid: TFGrid, l_n: int, l_m: int) -> "PilotPattern":
        if l_n < 1 or l_m < 1:
            raise ValueError("down-sampling factors must be >= 1")
        if grid.N % l_n != 0:
            raise ValueError(f"l_n={l_n} does not divide N={grid.N}")
        if grid.M % l_m != 0:
            raise ValueError(f"l_m={l_m} does not divide M={grid.M}")
        n_pilot = grid.N // l_n
        if n_pilot % 2 != 0:
            raise ValueError(
                f"pilot count N/l_n = {n_pilot} must be even (choose a smaller l_n)"
            )
        return cls(l_n, l_m, n_pilot, grid.M // l_m)

    @property
    def overhead(self) -> float:
        return 1.0 / (self.l_n * self.l_m)

    def pilot_rows(self) -> np.ndarray:
        return self.l_n * np.arange(self.n_pilot)

    def pilot_cols(self) -> np.ndarray:
        return self.l_m * np.arange(self.m_pilot)

    def required_counts(self, ch: DDChannel, grid: TFGrid) -> tuple[int, int]:
        """Minimum (Doppler, delay) pilot counts for this channel; Doppler even."""
        need_n = ceil_count(ch.doppler_spread * grid.S + 2.0)
        need_n += need_n % 2
        need_m = ceil_count(ch.delay_spread * grid.B + 2.0)
        return need_n, need_m

    def supports(self, ch: DDChannel, grid: TFGrid) -> bool:
        need_n, need_m = self.required_counts(ch, grid)
        return self.n_pilot >= need_n and self.m_pilot >= need_m

    def validate_against(self, ch: DDChannel, grid: TFGrid) -> None:
        """Warn when the pilot grid cannot contain the channel's D-D support."""
        if not self.supports(ch, grid):
            need_n, need_m = self.required_counts(ch, grid)
            warnings.warn(
                f"pilot grid {self.n_pilot}x{self.m_pilot} below the required "
                f"{need_n}x{need_m}; expect aliasing in the recovered response",
                stacklevel=2,
            )


def minimal_pattern(grid: TFGrid, ch: DDChannel) -> PilotPattern:
    """Smallest lawful pilot pattern for ``ch`` on ``grid``.

    Picks the smallest even divisor of N at or above ceil(nu_D*S + 2) and the
    smallest divisor of M at or above ceil(tau_D*B + 2).
    """
    need_n = ceil_count(ch.doppler_spread * grid.S + 2.0)
    need_n += need_n % 2
    need_m = ceil_count(ch.delay_spread * grid.B + 2.0)
    n_pilot = next((d for d in range(need_n, grid.N + 1) if grid.N % d == 0 and d % 2 == 0), None)
    m_pilot = next((d for d in range(need_m, grid.M + 1) if grid.M % d == 0), None)
    if n_pilot is None or m_pilot is None:
        raise ValueError(
            f"no lawful pilot grid on {grid.N}x{grid.M} for support {need_n}x{need_m}"
        )
    return PilotPattern.from_grid(grid, grid.N // n_pilot, grid.M // m_pilot)


def default_taps(grid: TFGrid, max_dn: int = 2, max_dm: int | None = None) -> list[tuple[int, int]]:
    """Interference tap truncation window, (0, 0) included.

    Rectangular-pulse ICI decays like 1/dm, so the frequency range defaults
    to min(M-1, 50); time offsets beyond |dn| = 1 vanish exactly for
    rectangular pulses but the window keeps |dn| <= max_dn for generality.
    """
    if max_dm is None:
        max_dm = min(grid.M - 1, 50)
    max_dm = min(max_dm, grid.M - 1)
    max_dn = min(max_dn, grid.N - 1)
    return [
        (dn, dm)
        for dn in range(-max_dn, max_dn + 1)
        for dm in range(-max_dm, max_dm + 1)
    ]


@dataclass(frozen=True)
class Frame:
    """Transmit frame: unit-power symbols plus the pilot bookkeeping.

    ``pattern`` is set for lattice (OTFS-style) pilots, ``ofdm_block`` for
    full-row pilots every ``ofdm_block`` slots; exactly one of the two.
    """

    grid: TFGrid
    symbols: np.ndarray
    pilot_mask: np.ndarray
    pattern: PilotPattern | None = None
    ofdm_block: int | None = None

    def __post_init__(self) -> None:
        sym = np.asarray(self.symbols, dtype=complex)
        mask = np.asarray(self.pilot_mask, dtype=bool)
        shape = (self.grid.N, self.grid.M)
        if sym.shape != shape or mask.shape != shape:
            raise ValueError(f"frame arrays must have shape {shape}")
        if np.any(np.abs(np.abs(sym[mask]) - 1.0) > 1e-12):
            raise ValueError("pilot symbols must be unit-modulus")
        object.__setattr__(self, "symbols", sym)
        object.__setattr__(self, "pilot_mask", mask)

    @property
    def data_mask(self) -> np.ndarray:
        return ~self.pilot_mask


def build_frame(grid: TFGrid, pattern: PilotPattern, rng_seed: int) -> Frame:
    """QPSK data frame with seeded QPSK pilots on the pattern lattice."""
    if pattern.l_n * pattern.n_pilot != grid.N or pattern.l_m * pattern.m_pilot != grid.M:
        raise ValueError(f"pattern {pattern} does not match grid {grid.N}x{grid.M}")
    rng = np.random.default_rng(rng_seed)
    symbols = qpsk_symbols(rng, (grid.N, grid.M))
    mask = np.zeros((grid.N, grid.M), dtype=bool)
    mask[np.ix_(pattern.pilot_rows(), pattern.pilot_cols())] = True
    return Frame(grid, symbols, mask, pattern=pattern)


def build_ofdm_frame(grid: TFGrid, n_block: int, rng_seed: int) -> Frame:
    """QPSK frame with full pilot rows at the first slot of each n_block slots."""
    if grid.N % n_block != 0:
        raise ValueError(f"block length {n_block} does not divide N={grid.N}")
    rng = np.random.default_rng(rng_seed)
    symbols = qpsk_symbols(rng, (grid.N, grid.M))
    mask = np.zeros((grid.N, grid.M), dtype=bool)
    mask[::n_block, :] = True
    return Frame(grid, symbols, mask, ofdm_block=n_block)


def shift2d(x: np.ndarray, dn: int, dm: int) -> np.ndarray:
    """``out[n, m] = x[n - dn, m - dm]`` with zero fill outside the frame."""
    out = np.zeros_like(x)
    N, M = x.shape
    if abs(dn) >= N or abs(dm) >= M:
        return out
    dst_n = slice(max(dn, 0), N + min(dn, 0))
    src_n = slice(max(-dn, 0), N + min(-dn, 0))
    dst_m = slice(max(dm, 0), M + min(dm, 0))
    src_m = slice(max(-dm, 0), M + min(-dm, 0))
    out[dst_n, dst_m] = x[src_n, src_m]
    return out


@dataclass(frozen=True)
class RxFrame:
    """Received frame, its noise variance, and optional ground-truth hooks."""

    grid: TFGrid
    y: np.ndarray
    noise_var: float
    h_flat: np.ndarray | None = None
    noise: np.ndarray | None = None

    def __post_init__(self) -> None:
        y = np.asarray(self.y, dtype=complex)
        if y.shape != (self.grid.N, self.grid.M):
            raise ValueError(f"received frame must be {self.grid.N}x{self.grid.M}")
        object.__setattr__(self, "y", y)


def transmit(
    frame: Frame,
    ch: DDChannel,
    taps,
    noise_var: float = 0.0,
    rng_seed: int = 0,
    pulses: tuple[Pulse, Pulse] | None = None,
    tap_matrices: dict[tuple[int, int], np.ndarray] | None = None,
    n_start: int = 0,
) -> RxFrame:
    """Push a frame through the channel: desired + shifted-tap ISCI + noise.

    ``taps`` must contain (0, 0).  Noise is circularly-symmetric Gaussian
    with variance ``noise_var`` per entry; the draw is deterministic for a
    fixed seed and is retained on the returned frame for error bookkeeping.
    Precomputed ``tap_matrices`` may be passed to amortize repeated calls.
    """
    taps = [tuple(t) for t in taps]
    if (0, 0) not in taps:
        raise ValueError("tap set must include (0, 0)")
    if tap_matrices is None:
        if pulses is None:
            pulses = rect_pulse_pair(frame.grid)
        tap_matrices = channel_matrices(ch, pulses, frame.grid, taps, n_start=n_start)
    y = np.zeros((frame.grid.N, frame.grid.M), dtype=complex)
    for tap in taps:
        y += shift2d(frame.symbols, *tap) * tap_matrices[tap]
    noise = None
    if noise_var > 0.0:
        rng = np.random.default_rng(rng_seed)
        noise = np.sqrt(noise_var / 2.0) * (
            rng.standard_normal(y.shape) + 1j * rng.standard_normal(y.shape)
        )
        y = y + noise
    return RxFrame(frame.grid, y, noise_var, h_flat=tap_matrices[(0, 0)], noise=noise)


@dataclass(frozen=True)
class DetectionReport:
    """One-tap detection output over the data positions."""

    decisions: np.ndarray
    ser: float
    n_erasures: int


def equalize_detect(rx: RxFrame, h_hat: np.ndarray, frame: Frame) -> DetectionReport:
    """One-tap equalization Y / H_hat followed by a QPSK slicer.

    Entries where |H_hat| < 1e-12 are erasures and always count as symbol
    errors.  The reported SER covers data positions only.
    """
    h_hat = np.asarray(h_hat, dtype=complex)
    erasure = np.abs(h_hat) < _ERASURE
    safe = np.where(erasure, 1.0, h_hat)
    eq = rx.y / safe
    sliced = (np.sign(eq.real) + 1j * np.sign(eq.imag)) / np.sqrt(2.0)
    decisions = np.where(erasure, 0.0, sliced)
    data = frame.data_mask
    n_erasures = int(np.count_nonzero(erasure & data))
    if n_erasures:
        warnings.warn(f"{n_erasures} data positions erased (|H| < {_ERASURE})", stacklevel=2)
    errors = np.abs(decisions[data] - frame.symbols[data]) > 1e-6
    return DetectionReport(decisions, float(np.mean(errors)), n_erasures)
