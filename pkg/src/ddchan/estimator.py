"""CSI acquisition: pilot LS, FFT interpolation, pipelining, extrapolation.

The interpolator recovers the full N x M channel response from an
n_pilot x m_pilot grid of LS estimates in four steps: phase-rotate the pilot
matrix (the down-sampled twin of the D-D corner rotation), transform to the
delay-Doppler corner, zero-pad and transform back to the full grid, undo the
phase rotation.  All steps are linear, which is what makes the exact error
decomposition into truncation / aliasing / ISCI / noise images possible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import DDChannel, Pulse, channel_matrices, rect_pulse_pair
from .grid import TFGrid
from .modem import Frame, PilotPattern, RxFrame, shift2d, transmit
from .transforms import isfft, phase_derotate_tf, phase_rotate_tf, sfft

__all__ = [
    "PilotObservation",
    "CsiEstimate",
    "PipelineState",
    "ErrorDecomposition",
    "ls_pilot_estimate",
    "interpolate",
    "pipeline_update",
    "extrapolate",
    "ofdm_baseline_estimate",
    "decompose_error",
]


@dataclass(frozen=True)
class PilotObservation:
    """LS channel estimates on the pilot lattice of one interpolation window.

    ``window_start`` is the absolute slot of the first pilot row, so the
    window covers slots [window_start, window_start + N).
    """

    values: np.ndarray
    pattern: PilotPattern
    grid: TFGrid
    window_start: int = 0

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=complex)
        expected = (self.pattern.n_pilot, self.pattern.m_pilot)
        if v.shape != expected:
            raise ValueError(f"pilot observation must be {expected}, got {v.shape}")
        if self.window_start < 0:
            raise ValueError("window_start must be nonnegative")
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class CsiEstimate:
    """Recovered CSI for the window [window_start, window_start + rows)."""

    values: np.ndarray
    grid: TFGrid
    window_start: int = 0
    method: str = "batch"

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=complex)
        if not np.all(np.isfinite(v)):
            raise ValueError("CSI estimate contains non-finite entries")
        if self.window_start < 0:
            raise ValueError("window_start must be nonnegative")
        object.__setattr__(self, "values", v)

    @property
    def slots(self) -> np.ndarray:
        """Absolute time slots covered by this estimate."""
        return self.window_start + np.arange(self.values.shape[0])


def ls_pilot_estimate(
    rx: RxFrame, frame: Frame, pattern: PilotPattern | None = None
) -> PilotObservation:
    """Least-squares estimates Y/X at the pilot positions."""
    if pattern is None:
        pattern = frame.pattern
    if pattern is None:
        raise ValueError("frame carries no pilot pattern")
    rows, cols = pattern.pilot_rows(), pattern.pilot_cols()
    sel = np.ix_(rows, cols)
    if not frame.pilot_mask[sel].all():
        raise ValueError("frame pilot mask does not cover the pattern lattice")
    return PilotObservation(rx.y[sel] / frame.symbols[sel], pattern, rx.grid)


def _interp_core(
    pilot_values: np.ndarray, grid: TFGrid, pattern: PilotPattern, delay_shift: int = 1
) -> np.ndarray:
    """Four-step reconstruction from an n_pilot x m_pilot matrix to N x M."""
    nb, mb = pattern.n_pilot, pattern.m_pilot
    rotated = phase_rotate_tf(pilot_values, nb, delay_shift)
    corner = sfft(rotated, nb, mb) / (nb * mb)
    full = sfft(corner, grid.M, grid.N)
    return phase_derotate_tf(full, nb, delay_shift)


def interpolate(obs: PilotObservation, delay_shift: int = 1) -> CsiEstimate:
    """Recover the full-grid CSI from one pilot observation.

    Exact (to rounding) whenever the rotated D-D response lives on grid bins
    inside the n_pilot x m_pilot corner and only the flat tap is active;
    otherwise the result carries truncation/aliasing/ISCI error, see
    :func:`decompose_error`.
    """
    values = _interp_core(obs.values, obs.grid, obs.pattern, delay_shift)
    return CsiEstimate(values, obs.grid, obs.window_start, method="batch")


@dataclass
class PipelineState:
    """Sliding buffer of the last n_pilot pilot-slot observations.

    Single-owner mutable state: one stream per instance.  Slots must arrive
    strictly increasing with spacing l_n (the pilot period).
    """

    grid: TFGrid
    pattern: PilotPattern
    delay_shift: int = 1
    slots: list = field(default_factory=list)
    rows: list = field(default_factory=list)

    @property
    def warmed_up(self) -> bool:
        return len(self.rows) == self.pattern.n_pilot


def pipeline_update(
    state: PipelineState, slot: int, pilot_row: np.ndarray
) -> CsiEstimate | None:
    """Feed one pilot-slot observation; emit CSI once the buffer is full.

    ``pilot_row`` holds the m_pilot LS estimates of the pilot slot ``slot``.
    After warm-up every update emits an estimate for the window
    [slot - (n_pilot-1)*l_n, slot - (n_pilot-1)*l_n + N) by running the batch
    interpolator on the buffered pilots; the window offset needs no extra
    correction because it only multiplies the D-D response by a Doppler phase
    that re-indexing the output at absolute slots already accounts for.
    """
    row = np.asarray(pilot_row, dtype=complex)
    if row.shape != (state.pattern.m_pilot,):
        raise ValueError(f"pilot row must have length {state.pattern.m_pilot}")
    if state.slots:
        if slot != state.slots[-1] + state.pattern.l_n:
            raise ValueError(
                f"pilot slots must advance by l_n={state.pattern.l_n}, "
                f"got {state.slots[-1]} -> {slot}"
            )
    elif slot < 0:
        raise ValueError("slot indices must be nonnegative")
    state.slots.append(slot)
    state.rows.append(row)
    if len(state.rows) > state.pattern.n_pilot:
        state.slots.pop(0)
        state.rows.pop(0)
    if not state.warmed_up:
        return None
    obs = PilotObservation(
        np.stack(state.rows), state.pattern, state.grid, window_start=state.slots[0]
    )
    est = interpolate(obs, state.delay_shift)
    return CsiEstimate(est.values, est.grid, est.window_start, method="pipelined")


def _extrapolate_one(
    est: CsiEstimate, pattern: PilotPattern, dn: int, delay_shift: int
) -> CsiEstimate:
    rows = dn + pattern.l_n * np.arange(pattern.n_pilot)
    if dn < 1 or rows[-1] >= est.values.shape[0]:
        raise ValueError(
            f"insufficient history: need source slots {rows.tolist()} inside "
            f"a {est.values.shape[0]}-row estimate"
        )
    sources = est.values[np.ix_(rows, pattern.pilot_cols())]
    obs = PilotObservation(sources, pattern, est.grid, est.window_start + dn)
    out = interpolate(obs, delay_shift)
    return CsiEstimate(out.values, out.grid, out.window_start, method="extrapolated")


def extrapolate(
    est: CsiEstimate,
    pattern: PilotPattern,
    dn: int | None = None,
    average: bool = False,
    delay_shift: int = 1,
) -> CsiEstimate:
    """Predict beyond the estimated window using estimated CSI as pilots.

    Rows of ``est`` at slots dn + l_n*{0..n_pilot-1} (pilot columns only) are
    treated as a pilot observation for the shifted window, which extends the
    CSI dn slots past the original window without waiting for a new pilot.
    With ``average=True`` the predictions for dn = 1..l_n-1 are combined by
    arithmetic mean on the slots they all cover.
    """
    if average:
        dns = list(range(1, pattern.l_n))
        if not dns:
            raise ValueError("averaging needs l_n >= 2")
        preds = [_extrapolate_one(est, pattern, d, delay_shift) for d in dns]
        start = max(p.window_start for p in preds)
        end = min(p.window_start + p.values.shape[0] for p in preds)
        stack = np.stack(
            [p.values[start - p.window_start : end - p.window_start] for p in preds]
        )
        return CsiEstimate(stack.mean(axis=0), est.grid, start, method="extrapolated")
    if dn is None:
        raise ValueError("pass dn or average=True")
    return _extrapolate_one(est, pattern, dn, delay_shift)


def ofdm_baseline_estimate(
    rx: RxFrame, frame: Frame, n_block: int | None = None
) -> CsiEstimate:
    """Block LS with zero-order hold: the LTI-assumption comparator.

    Pilot rows sit at the first slot of each block of ``n_block`` slots; the
    LS row estimate is held constant across its block.
    """
    if n_block is None:
        n_block = frame.ofdm_block
    if n_block is None:
        raise ValueError("frame carries no OFDM block length")
    if rx.grid.N % n_block != 0:
        raise ValueError(f"block length {n_block} does not divide N={rx.grid.N}")
    pilot_rows = np.arange(0, rx.grid.N, n_block)
    if not frame.pilot_mask[pilot_rows, :].all():
        raise ValueError("frame pilot mask does not cover full rows at block starts")
    ls = rx.y[pilot_rows, :] / frame.symbols[pilot_rows, :]
    held = np.repeat(ls, n_block, axis=0)
    return CsiEstimate(held, rx.grid, 0, method="ofdm-baseline")


@dataclass(frozen=True)
class ErrorDecomposition:
    """Exact split of the interpolated estimate, all in the recovered T-F domain.

    ``estimate = desired + truncation + aliasing + isci + noise`` holds to
    rounding error: truncation is the D-D content outside the pilot corner,
    aliasing the fold-in of that content under pilot down-sampling, isci the
    interpolation image of the LS contamination from non-flat taps, and noise
    the image of the additive noise at the pilots (zero when noise_var = 0).
    """

    desired: np.ndarray
    truncation: np.ndarray
    aliasing: np.ndarray
    isci: np.ndarray
    noise: np.ndarray
    estimate: np.ndarray

    def residual(self) -> float:
        """Relative reconstruction residual of the decomposition identity."""
        total = self.desired + self.truncation + self.aliasing + self.isci + self.noise
        scale = np.linalg.norm(self.estimate)
        if scale == 0.0:
            return float(np.linalg.norm(self.estimate - total))
        return float(np.linalg.norm(self.estimate - total) / scale)

    def _power(self, a: np.ndarray) -> float:
        return float(np.mean(np.abs(a) ** 2))

    @property
    def desired_power(self) -> float:
        return self._power(self.desired)

    @property
    def truncation_power(self) -> float:
        return self._power(self.truncation)

    @property
    def aliasing_power(self) -> float:
        return self._power(self.aliasing)

    @property
    def isci_power(self) -> float:
        return self._power(self.isci)

    @property
    def noise_power(self) -> float:
        return self._power(self.noise)


def decompose_error(
    ch: DDChannel,
    grid: TFGrid,
    pattern: PilotPattern,
    taps,
    frame: Frame,
    noise_var: float = 0.0,
    rng_seed: int = 0,
    pulses: tuple[Pulse, Pulse] | None = None,
    delay_shift: int = 1,
) -> ErrorDecomposition:
    """Run the estimator on a synthesized frame and split its error exactly.

    The truncation and aliasing images come from the ground-truth rotated
    D-D response (corner mask and fold), the ISCI image from pushing the
    known LS contamination of the non-flat taps through the interpolator,
    and the noise image from the recorded noise draw.
    """
    if pulses is None:
        pulses = rect_pulse_pair(grid)
    taps = [tuple(t) for t in taps]
    tap_matrices = channel_matrices(ch, pulses, grid, taps)
    rx = transmit(frame, ch, taps, noise_var, rng_seed, tap_matrices=tap_matrices)
    obs = ls_pilot_estimate(rx, frame, pattern)
    estimate = interpolate(obs, delay_shift).values

    desired = tap_matrices[(0, 0)]
    nb, mb = pattern.n_pilot, pattern.m_pilot
    rotated_dd = sfft(phase_rotate_tf(desired, nb, delay_shift), grid.N, grid.M)

    corner = np.zeros((grid.M, grid.N))
    corner[:mb, :nb] = 1.0
    trunc_dd = (corner - 1.0) * rotated_dd
    alias_dd = np.zeros_like(rotated_dd)
    for a in range(pattern.l_m):
        for b in range(pattern.l_n):
            if (a, b) != (0, 0):
                alias_dd[:mb, :nb] += rotated_dd[a * mb : (a + 1) * mb, b * nb : (b + 1) * nb]

    def _to_recovered(dd: np.ndarray) -> np.ndarray:
        return phase_derotate_tf(isfft(dd, grid.N, grid.M), nb, delay_shift)

    truncation = _to_recovered(trunc_dd)
    aliasing = _to_recovered(alias_dd)

    sel = np.ix_(pattern.pilot_rows(), pattern.pilot_cols())
    pilot_sym = frame.symbols[sel]
    contamination = np.zeros((nb, mb), dtype=complex)
    for tap in taps:
        if tap == (0, 0):
            continue
        contamination += tap_matrices[tap][sel] * shift2d(frame.symbols, *tap)[sel] / pilot_sym
    isci = _interp_core(contamination, grid, pattern, delay_shift)

    if rx.noise is None:
        noise = np.zeros_like(estimate)
    else:
        noise = _interp_core(rx.noise[sel] / pilot_sym, grid, pattern, delay_shift)

    return ErrorDecomposition(desired, truncation, aliasing, isci, noise, estimate)
