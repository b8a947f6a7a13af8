"""Scalar figures of merit: interference powers, NMSE, overhead, rate, CDFs."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import DDChannel, Pulse, channel_matrices, cross_ambiguity, rect_pulse_pair
from .grid import TFGrid, ceil_count
from .modem import shift2d

__all__ = [
    "InterferenceReport",
    "TrainingOverhead",
    "RateReport",
    "CdfSeries",
    "isci_power",
    "nmse_db",
    "training_overhead",
    "achievable_rate",
    "cdf",
    "DB_FLOOR",
]

# dB floor so perfect estimates keep CDFs finite
DB_FLOOR = -300.0


def to_db(ratio: float, floor: float = DB_FLOOR) -> float:
    """10*log10 with the package dB floor for vanishing ratios."""
    if ratio <= 10.0 ** (floor / 10.0):
        return floor
    return 10.0 * math.log10(ratio)


@dataclass(frozen=True)
class InterferenceReport:
    """ISI/ICI power ratios relative to the desired-signal power per slot.

    The partition follows the time axis: any tap with dn != 0 counts as ISI,
    taps with dn = 0 and dm != 0 as ICI.  ``per_tap`` keeps the full
    breakdown so the bookkeeping identity isi + ici = sum(per_tap) is exact.
    """

    isi_power: float
    ici_power: float
    per_tap: dict

    @property
    def isci_power(self) -> float:
        return self.isi_power + self.ici_power

    @property
    def isi_db(self) -> float:
        return to_db(self.isi_power)

    @property
    def ici_db(self) -> float:
        return to_db(self.ici_power)

    @property
    def isci_db(self) -> float:
        return to_db(self.isci_power)


def _split(per_tap: dict) -> InterferenceReport:
    isi = sum(p for (dn, _), p in per_tap.items() if dn != 0)
    ici = sum(p for (dn, dm), p in per_tap.items() if dn == 0 and dm != 0)
    return InterferenceReport(float(isi), float(ici), per_tap)


def _gauss_nodes(lo: float, hi: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and expectation weights for a uniform variable."""
    if hi <= lo:
        return np.array([lo]), np.array([1.0])
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (hi - lo) * x + 0.5 * (hi + lo), w / 2.0


def isci_power(
    channel_or_spreads,
    grid: TFGrid,
    taps,
    pulses: tuple[Pulse, Pulse] | None = None,
    edge_correction: bool = False,
    quad_nodes: int = 96,
    tap_matrices: dict | None = None,
) -> InterferenceReport:
    """Interference-to-signal power of the given taps.

    Pass a :class:`DDChannel` for the exact slot-averaged ratios of one
    realization (data-averaged over i.i.d. unit-power symbols, with
    frame-edge zero fill accounted for), or a ``(delay_spread,
    doppler_spread)`` pair for the WSSUS ensemble average evaluated by
    Gauss-Legendre quadrature over the uniform spread rectangle.  For the
    ensemble, ``edge_correction=True`` scales each tap by the fraction of
    frame slots its shifted data actually covers, which is what a
    Monte-Carlo average over finite frames measures.
    """
    if pulses is None:
        pulses = rect_pulse_pair(grid)
    taps = [tuple(t) for t in taps]
    interfering = [t for t in taps if t != (0, 0)]

    if isinstance(channel_or_spreads, DDChannel):
        ch = channel_or_spreads
        if tap_matrices is None:
            tap_matrices = channel_matrices(ch, pulses, grid, taps)
        desired = float(np.mean(np.abs(tap_matrices[(0, 0)]) ** 2))
        if desired == 0.0:
            raise ValueError("desired-signal power is zero")
        ones = np.ones((grid.N, grid.M))
        per_tap = {}
        for tap in interfering:
            coverage = shift2d(ones, *tap)
            power = float(np.sum(np.abs(tap_matrices[tap]) ** 2 * coverage)) / (grid.N * grid.M)
            per_tap[tap] = power / desired
        return _split(per_tap)

    tau_d, nu_d = channel_or_spreads
    g_t, g_r = pulses
    tau, w_tau = _gauss_nodes(0.0, tau_d, quad_nodes)
    nu, w_nu = _gauss_nodes(-nu_d / 2.0, nu_d / 2.0, quad_nodes)
    weights = w_tau[None, :, None] * w_nu[None, None, :]

    def tap_powers(dn: int, dms: np.ndarray) -> np.ndarray:
        # broadcast to (len(dms), K_tau, K_nu); the delay offset is shared per dn
        tau_arg = (dn * grid.T - tau)[None, :, None]
        nu_arg = dms[:, None, None] * grid.F - nu[None, None, :]
        amb = cross_ambiguity(g_t, g_r, tau_arg, nu_arg)
        return np.sum(weights * np.abs(amb) ** 2, axis=(1, 2))

    desired = float(tap_powers(0, np.array([0]))[0])
    if desired == 0.0:
        raise ValueError("desired-signal power is zero")
    by_dn: dict[int, list[int]] = {}
    for dn, dm in interfering:
        by_dn.setdefault(dn, []).append(dm)
    per_tap = {}
    for dn, dms in by_dn.items():
        dm_arr = np.array(dms)
        powers = tap_powers(dn, dm_arr)
        for dm, power in zip(dms, powers):
            if edge_correction:
                power *= (grid.N - abs(dn)) * (grid.M - abs(dm)) / (grid.N * grid.M)
            per_tap[(dn, dm)] = float(power) / desired
    return _split(per_tap)


def nmse_db(h_hat: np.ndarray, h_ref: np.ndarray, floor: float = DB_FLOOR) -> float:
    """Normalized MSE 10*log10(||h_hat - h_ref||^2 / ||h_ref||^2) in dB."""
    h_hat = np.asarray(h_hat, dtype=complex)
    h_ref = np.asarray(h_ref, dtype=complex)
    if h_hat.shape != h_ref.shape:
        raise ValueError(f"shape mismatch {h_hat.shape} vs {h_ref.shape}")
    ref = float(np.sum(np.abs(h_ref) ** 2))
    if ref == 0.0:
        raise ValueError("reference has zero energy")
    return to_db(float(np.sum(np.abs(h_hat - h_ref) ** 2)) / ref, floor)


@dataclass(frozen=True)
class TrainingOverhead:
    """Pilot budget for a channel on a grid.

    ``min_slots`` is the exact ceiling product ceil(tau_D*B + 2) *
    ceil(nu_D*S + 2); ``ratio`` the asymptotic fraction tau_D*nu_D + 4/(B*S);
    ``exact_ratio`` the ceiling product over the B*S grid slots.
    """

    min_slots: int
    ratio: float
    exact_ratio: float


def training_overhead(grid: TFGrid, ch: DDChannel) -> TrainingOverhead:
    """Minimum training slots and overhead ratio for ``ch`` on ``grid``."""
    bs = grid.B * grid.S
    min_slots = ceil_count(ch.delay_spread * grid.B + 2.0) * ceil_count(
        ch.doppler_spread * grid.S + 2.0
    )
    ratio = ch.delay_spread * ch.doppler_spread + 4.0 / bs
    return TrainingOverhead(min_slots, ratio, min_slots / bs)


@dataclass(frozen=True)
class RateReport:
    """Overhead-discounted achievable rate under Gaussian-interference SINR."""

    overhead: float
    sinr: float
    rate: float


def achievable_rate(
    signal_power: float,
    interference_power: float,
    noise_var: float,
    est_error_power: float,
    overhead: float,
) -> RateReport:
    """(1 - overhead) * log2(1 + SINR), with estimation error counted as noise."""
    for name, val in (
        ("signal_power", signal_power),
        ("interference_power", interference_power),
        ("noise_var", noise_var),
        ("est_error_power", est_error_power),
    ):
        if val < 0.0:
            raise ValueError(f"{name} must be nonnegative, got {val}")
    if not 0.0 <= overhead < 1.0:
        raise ValueError(f"overhead must be in [0, 1), got {overhead}")
    denom = interference_power + noise_var + est_error_power
    sinr = math.inf if denom == 0.0 else signal_power / denom
    rate = (1.0 - overhead) * math.log2(1.0 + sinr)
    return RateReport(overhead, sinr, rate)


@dataclass(frozen=True)
class CdfSeries:
    """Empirical CDF: sorted samples with P(X <= x) ordinates (ties shared)."""

    values: np.ndarray
    ordinates: np.ndarray


def cdf(samples) -> CdfSeries:
    """Empirical CDF of the samples; raises on empty input."""
    v = np.sort(np.asarray(samples, dtype=float), kind="stable")
    if v.size == 0:
        raise ValueError("need at least one sample")
    ordinates = np.searchsorted(v, v, side="right") / v.size
    return CdfSeries(v, ordinates)
