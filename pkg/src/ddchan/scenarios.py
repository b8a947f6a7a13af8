"""Experiment presets, the scenario runner, and report persistence.

Every preset runs at desk scale (minutes on a laptop) by default; ``full``
switches to the larger operating points (10 MHz bandwidth, 200 x 50 grid).
Runs are deterministic for a fixed (config, seed): every Monte-Carlo trial
owns a private RNG stream derived from (seed, trial index), and aggregation
reduces in trial order regardless of the worker-thread count.
"""

from __future__ import annotations

import csv
import datetime
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .channel import (
    DDChannel,
    DDPath,
    channel_from_dict,
    channel_matrices,
    channel_matrix,
    channel_to_dict,
    generate_wssus,
    rect_pulse_pair,
)
from .estimator import (
    PipelineState,
    extrapolate,
    interpolate,
    ls_pilot_estimate,
    ofdm_baseline_estimate,
    pipeline_update,
)
from .grid import TFGrid
from .metrics import achievable_rate, isci_power, nmse_db, to_db
from .modem import (
    PilotPattern,
    build_frame,
    build_ofdm_frame,
    default_taps,
    minimal_pattern,
    transmit,
)

__all__ = [
    "SPEED_OF_LIGHT",
    "ExperimentConfig",
    "RunReport",
    "doppler_spread_from_speed",
    "list_scenarios",
    "get_preset",
    "run_scenario",
    "save_channel",
    "load_channel",
]

SPEED_OF_LIGHT = 3.0e8  # m/s; tau_D = 300 m / c = 1 us in the reference scenarios


def doppler_spread_from_speed(speed: float, carrier_freq: float) -> float:
    """Two-sided Doppler spread 2*v*f_c/c of radial components at +-v."""
    return 2.0 * speed * carrier_freq / SPEED_OF_LIGHT


@dataclass
class ExperimentConfig:
    """Resolved settings of one experiment run; mirrors the config-file keys."""

    scenario: str
    n: int = 64
    m: int = 64
    subcarrier_spacing: float | None = 200e3  # None: derive T/F = tau_D/nu_D
    delay_spread: float = 1e-6
    doppler_spread: float | None = None  # two-sided Hz; None: derive from speed
    speed: float | None = None  # m/s
    carrier_freq: float = 30e9
    n_paths: int = 8
    l_n: int = 8
    l_m: int = 4
    max_dn: int = 2
    max_dm: int | None = None
    snr_db: tuple = (15.0,)
    trials: int = 100
    seed: int = 1
    out: str | None = None
    full: bool = False
    threads: int = 1
    # scenario-specific sweeps (unused fields stay None)
    bandwidths_hz: tuple | None = None
    delay_spreads: tuple | None = None
    doppler_spreads: tuple | None = None
    bs_grids: tuple | None = None
    speeds: tuple | None = None
    ofdm_block: int | None = None

    def __post_init__(self) -> None:
        for name in ("n", "m", "n_paths", "l_n", "l_m", "seed", "threads"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be positive")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.delay_spread < 0:
            raise ValueError("delay_spread must be nonnegative")
        for name in ("snr_db", "bandwidths_hz", "delay_spreads", "doppler_spreads", "speeds"):
            val = getattr(self, name)
            if val is not None:
                setattr(self, name, tuple(float(v) for v in val))
        if self.bs_grids is not None:
            self.bs_grids = tuple((int(a), int(b)) for a, b in self.bs_grids)

    def resolved_doppler(self, speed: float | None = None) -> float:
        if speed is None:
            speed = self.speed
        if self.doppler_spread is not None and speed is None:
            return self.doppler_spread
        if speed is not None:
            return doppler_spread_from_speed(speed, self.carrier_freq)
        raise ValueError("set doppler_spread or speed")

    def base_grid(self) -> TFGrid:
        if self.subcarrier_spacing is not None:
            return TFGrid.from_subcarrier_spacing(self.subcarrier_spacing, self.n, self.m)
        # matched pulse rule T/F = tau_D/nu_D with T*F = 1
        T = math.sqrt(self.delay_spread / self.resolved_doppler())
        return TFGrid.from_symbol_duration(T, self.n, self.m)


def _matched_grid(tau_d: float, nu_d: float, n: int, bandwidth: float) -> TFGrid:
    """Grid under the matched rule T/F = tau_D/nu_D hitting ~bandwidth Hz."""
    T = math.sqrt(tau_d / nu_d)
    F = 1.0 / T
    m = max(2, round(bandwidth / F))
    return TFGrid.from_symbol_duration(T, n, m)


# ---------------------------------------------------------------------------
# presets


def _preset_isci_vs_bandwidth(full: bool) -> ExperimentConfig:
    points = tuple(float(b) * 1e6 for b in range(1, 16)) if full else (
        1e6, 1.875e6, 3.75e6, 7.5e6, 15e6)
    return ExperimentConfig(
        scenario="isci-vs-bandwidth",
        subcarrier_spacing=None,
        delay_spread=1e-6,
        doppler_spread=20e3,
        bandwidths_hz=points,
        trials=1,
        full=full,
    )


def _preset_isr_vs_spreads(full: bool) -> ExperimentConfig:
    taus = tuple(t * 1e-7 for t in range(1, 11)) if full else (1e-7, 4e-7, 7e-7, 1e-6)
    nus = tuple(v * 1e3 for v in range(2, 19, 2)) if full else (2e3, 6e3, 10e3, 14e3, 18e3)
    # adjacent-tap window: the dominant leakage, which is what the spread
    # sweep tracks (the full tap sum saturates at the pulse energy spill)
    return ExperimentConfig(
        scenario="isr-vs-spreads",
        subcarrier_spacing=None,
        delay_spreads=taus,
        doppler_spreads=nus,
        bandwidths_hz=(10e6,),
        max_dn=2,
        max_dm=2,
        trials=1,
        full=full,
    )


def _preset_aliasing_vs_bs(full: bool) -> ExperimentConfig:
    grids = ((32, 32), (100, 100), (320, 320))
    if full:
        grids = grids + ((1000, 1000),)
    return ExperimentConfig(
        scenario="aliasing-vs-bs",
        subcarrier_spacing=None,
        delay_spread=1e-6,
        doppler_spread=20e3,
        n_paths=8,
        bs_grids=grids,
        trials=100,
        full=full,
    )


def _preset_nmse_cdf(full: bool) -> ExperimentConfig:
    cfg = ExperimentConfig(
        scenario="nmse-cdf",
        n=64,
        m=64,
        l_n=8,
        l_m=4,
        delay_spread=1e-6,
        speeds=(10.0, 90.0),
        snr_db=(15.0,),
        trials=200,
        full=full,
    )
    if full:
        cfg.n, cfg.m = 200, 50
        cfg.l_n, cfg.l_m = 20, 2
    return cfg


def _preset_rate_cdf(full: bool) -> ExperimentConfig:
    cfg = _preset_nmse_cdf(full)
    cfg.scenario = "rate-cdf"
    cfg.snr_db = (5.0, 15.0, 25.0)
    cfg.trials = 100 if not full else 200
    return cfg


def _preset_pipeline_demo(full: bool) -> ExperimentConfig:
    return ExperimentConfig(
        scenario="pipeline-demo",
        n=16,
        m=6,
        l_n=2,
        l_m=3,
        delay_spread=0.0,
        doppler_spread=1e5,
        trials=1,
        full=full,
    )


def _preset_extrapolation_demo(full: bool) -> ExperimentConfig:
    return ExperimentConfig(
        scenario="extrapolation-demo",
        n=4,
        m=6,
        l_n=2,
        l_m=3,
        delay_spread=0.0,
        doppler_spread=1e5,
        trials=1,
        full=full,
    )


_PRESETS = {
    "isci-vs-bandwidth": ("ISI/ICI vs bandwidth, matched T/F rule", _preset_isci_vs_bandwidth),
    "isr-vs-spreads": ("ensemble ISCI over the delay/Doppler spread grid", _preset_isr_vs_spreads),
    "aliasing-vs-bs": ("interpolation error vs time-bandwidth product", _preset_aliasing_vs_bs),
    "nmse-cdf": ("channel-estimation NMSE CDFs, lattice pilots vs block LS", _preset_nmse_cdf),
    "rate-cdf": ("achievable-rate CDFs at matched training overhead", _preset_rate_cdf),
    "pipeline-demo": ("sliding-window interpolation walkthrough", _preset_pipeline_demo),
    "extrapolation-demo": ("data-aided extrapolation walkthrough", _preset_extrapolation_demo),
}


def list_scenarios() -> list[tuple[str, str]]:
    """Stable (id, description) pairs of the available presets."""
    return [(name, desc) for name, (desc, _) in _PRESETS.items()]


def get_preset(scenario: str, full: bool = False) -> ExperimentConfig:
    if scenario not in _PRESETS:
        known = ", ".join(sorted(_PRESETS))
        raise ValueError(f"unknown scenario {scenario!r}; available: {known}")
    return _PRESETS[scenario][1](full)


# ---------------------------------------------------------------------------
# persistence


def save_channel(ch: DDChannel, path) -> None:
    """Write a channel realization as schema-tagged JSON."""
    Path(path).write_text(json.dumps(channel_to_dict(ch), indent=2) + "\n")


def load_channel(path) -> DDChannel:
    """Load and validate a channel realization written by :func:`save_channel`."""
    return channel_from_dict(json.loads(Path(path).read_text()))


@dataclass
class RunReport:
    """Everything one run produced: per-trial rows, aggregates, config echo."""

    scenario: str
    rows: list
    aggregates: dict
    config: dict
    version: str
    wall_clock_s: float

    def write(self, out_root) -> Path:
        """Write results.csv, summary.json and config-echo.toml; return the dir."""
        stamp = datetime.datetime.now().strftime("%Y%m%dT%H%M%S.%f")
        out_dir = Path(out_root) / self.scenario / stamp
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "results.csv", "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            header = list(self.rows[0].keys()) if self.rows else []
            writer.writerow(header)
            for row in self.rows:
                writer.writerow([_csv_cell(row[k]) for k in header])
        summary = {
            "scenario": self.scenario,
            "version": self.version,
            "wall_clock_s": self.wall_clock_s,
            "config": self.config,
            "aggregates": self.aggregates,
            "n_rows": len(self.rows),
        }
        (out_dir / "summary.json").write_text(json.dumps(summary, indent=2, default=_jsonable) + "\n")
        (out_dir / "config-echo.toml").write_text(_to_toml(self.config))
        return out_dir


def _csv_cell(v):
    if isinstance(v, (np.floating, float)):
        return repr(float(v))
    if isinstance(v, (np.integer, int)):
        return str(int(v))
    return str(v)


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    raise TypeError(f"not JSON-serializable: {type(v)}")


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        f = float(v)
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        return repr(f)
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise TypeError(f"cannot emit TOML for {type(v)}")


def _to_toml(config: dict) -> str:
    lines = [f"{k} = {_toml_value(v)}" for k, v in config.items() if v is not None]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# runner machinery


def _trial_seeds(seed: int, shape) -> np.ndarray:
    """Deterministic per-trial integer seeds derived from the master seed."""
    return np.random.default_rng(seed).integers(0, 2**62, size=shape)


def _map_trials(fn, n_trials: int, threads: int) -> list:
    if threads <= 1:
        return [fn(t) for t in range(n_trials)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(n_trials)))


def run_scenario(cfg: ExperimentConfig) -> RunReport:
    """Execute one configured scenario and collect its report."""
    runners = {
        "isci-vs-bandwidth": _run_isci_vs_bandwidth,
        "isr-vs-spreads": _run_isr_vs_spreads,
        "aliasing-vs-bs": _run_aliasing_vs_bs,
        "nmse-cdf": _run_nmse_cdf,
        "rate-cdf": _run_rate_cdf,
        "pipeline-demo": _run_pipeline_demo,
        "extrapolation-demo": _run_extrapolation_demo,
    }
    if cfg.scenario not in runners:
        known = ", ".join(sorted(runners))
        raise ValueError(f"unknown scenario {cfg.scenario!r}; available: {known}")
    start = time.perf_counter()
    rows, aggregates = runners[cfg.scenario](cfg)
    wall = time.perf_counter() - start
    return RunReport(cfg.scenario, rows, aggregates, asdict(cfg), __version__, wall)


def _run_isci_vs_bandwidth(cfg: ExperimentConfig):
    tau_d = cfg.delay_spread
    nu_d = cfg.resolved_doppler()
    rows = []
    for bw in cfg.bandwidths_hz or (1e6, 1.875e6, 3.75e6, 7.5e6, 15e6):
        grid = _matched_grid(tau_d, nu_d, cfg.n, bw)
        # full ICI range: the sweep measures how interference accrues with M
        taps = default_taps(grid, cfg.max_dn, cfg.max_dm if cfg.max_dm is not None else grid.M - 1)
        rep = isci_power((tau_d, nu_d), grid, taps)
        rows.append(
            {
                "bandwidth_hz": grid.B,
                "n_subcarriers": grid.M,
                "isi_db": rep.isi_db,
                "ici_db": rep.ici_db,
                "isci_db": rep.isci_db,
            }
        )
    isci = [r["isci_db"] for r in rows]
    aggregates = {
        "isci_db_first": isci[0],
        "isci_db_last": isci[-1],
        "isi_nondecreasing": all(b["isi_db"] >= a["isi_db"] - 1e-9 for a, b in zip(rows, rows[1:])),
        "ici_nondecreasing": all(b["ici_db"] >= a["ici_db"] - 1e-9 for a, b in zip(rows, rows[1:])),
    }
    return rows, aggregates


def _run_isr_vs_spreads(cfg: ExperimentConfig):
    bw = (cfg.bandwidths_hz or (10e6,))[0]
    taus = cfg.delay_spreads or (1e-7, 4e-7, 7e-7, 1e-6)
    nus = cfg.doppler_spreads or (2e3, 6e3, 10e3, 14e3, 18e3)
    rows = []
    for tau_d in taus:
        for nu_d in nus:
            grid = _matched_grid(tau_d, nu_d, cfg.n, bw)
            taps = default_taps(
                grid, cfg.max_dn, cfg.max_dm if cfg.max_dm is not None else grid.M - 1
            )
            rep = isci_power((tau_d, nu_d), grid, taps)
            rows.append(
                {
                    "delay_spread_s": tau_d,
                    "doppler_spread_hz": nu_d,
                    "bandwidth_hz": grid.B,
                    "isi_db": rep.isi_db,
                    "ici_db": rep.ici_db,
                    "isci_db": rep.isci_db,
                }
            )
    levels = [r["isci_db"] for r in rows]
    aggregates = {"isci_db_min": min(levels), "isci_db_max": max(levels)}
    return rows, aggregates


def _run_aliasing_vs_bs(cfg: ExperimentConfig):
    tau_d = cfg.delay_spread
    nu_d = cfg.resolved_doppler()
    T = math.sqrt(tau_d / nu_d)
    grids = cfg.bs_grids or ((32, 32), (100, 100), (320, 320))
    seeds = _trial_seeds(cfg.seed, (len(grids), cfg.trials, 2))
    rows = []
    mean_errors = {}
    for gi, (n, m) in enumerate(grids):
        grid = TFGrid.from_symbol_duration(T, n, m)
        probe = DDChannel((), tau_d, nu_d)
        pattern = PilotPattern.from_grid(grid, *_minimal_factors(grid, probe))
        flat = [(0, 0)]

        def one(t, gi=gi, grid=grid, pattern=pattern, flat=flat):
            ch = generate_wssus(tau_d, nu_d, cfg.n_paths, int(seeds[gi, t, 0]))
            frame = build_frame(grid, pattern, int(seeds[gi, t, 1]))
            rx = transmit(frame, ch, flat)
            est = interpolate(ls_pilot_estimate(rx, frame))
            err = np.sum(np.abs(est.values - rx.h_flat) ** 2) / np.sum(np.abs(rx.h_flat) ** 2)
            return float(err)

        errors = _map_trials(one, cfg.trials, cfg.threads)
        bs = grid.B * grid.S
        mean_errors[bs] = float(np.mean(errors))
        rows.extend(
            {
                "bs": bs,
                "n": n,
                "m": m,
                "n_pilot": pattern.n_pilot,
                "m_pilot": pattern.m_pilot,
                "trial": t,
                "nmse_db": to_db(e),
            }
            for t, e in enumerate(errors)
        )
    aggregates = {
        "mean_error_by_bs": {repr(float(k)): v for k, v in mean_errors.items()},
        "mean_error_db_by_bs": {repr(float(k)): to_db(v) for k, v in mean_errors.items()},
        "strictly_decreasing": all(
            b < a for a, b in zip(list(mean_errors.values()), list(mean_errors.values())[1:])
        ),
    }
    return rows, aggregates


def _minimal_factors(grid: TFGrid, ch: DDChannel) -> tuple[int, int]:
    p = minimal_pattern(grid, ch)
    return p.l_n, p.l_m


def _cdf_trial_machinery(cfg: ExperimentConfig):
    grid = TFGrid.from_subcarrier_spacing(cfg.subcarrier_spacing or 200e3, cfg.n, cfg.m)
    pattern = PilotPattern.from_grid(grid, cfg.l_n, cfg.l_m)
    n_block = cfg.ofdm_block or cfg.l_n * cfg.l_m
    taps = default_taps(grid, cfg.max_dn, cfg.max_dm)
    pulses = rect_pulse_pair(grid)
    speeds = cfg.speeds or (10.0, 90.0)
    return grid, pattern, n_block, taps, pulses, speeds


def _run_nmse_cdf(cfg: ExperimentConfig):
    grid, pattern, n_block, taps, pulses, speeds = _cdf_trial_machinery(cfg)
    seeds = _trial_seeds(cfg.seed, (len(speeds), cfg.trials, 3))
    rows = []
    medians = {}
    for si, speed in enumerate(speeds):
        nu_d = cfg.resolved_doppler(speed)
        probe = DDChannel((), cfg.delay_spread, nu_d)
        pattern.validate_against(probe, grid)

        def one(t, si=si, nu_d=nu_d):
            out = []
            ch = generate_wssus(cfg.delay_spread, nu_d, cfg.n_paths, int(seeds[si, t, 0]))
            tap_m = channel_matrices(ch, pulses, grid, taps)
            h_flat = tap_m[(0, 0)]
            frame = build_frame(grid, pattern, int(seeds[si, t, 1]))
            frame_ofdm = build_ofdm_frame(grid, n_block, int(seeds[si, t, 1]))
            for snr in cfg.snr_db:
                noise_var = 0.0 if math.isinf(snr) else 10.0 ** (-snr / 10.0)
                rx = transmit(frame, ch, taps, noise_var, int(seeds[si, t, 2]), tap_matrices=tap_m)
                est = interpolate(ls_pilot_estimate(rx, frame))
                rx2 = transmit(
                    frame_ofdm, ch, taps, noise_var, int(seeds[si, t, 2]) + 1, tap_matrices=tap_m
                )
                est2 = ofdm_baseline_estimate(rx2, frame_ofdm)
                out.append((snr, nmse_db(est.values, h_flat), nmse_db(est2.values, h_flat)))
            return out

        per_trial = _map_trials(one, cfg.trials, cfg.threads)
        for t, results in enumerate(per_trial):
            for snr, otfs_db, ofdm_db in results:
                rows.append(
                    {
                        "speed_mps": speed,
                        "snr_db": snr,
                        "trial": t,
                        "method": "lattice-interp",
                        "nmse_db": otfs_db,
                    }
                )
                rows.append(
                    {
                        "speed_mps": speed,
                        "snr_db": snr,
                        "trial": t,
                        "method": "block-ls-hold",
                        "nmse_db": ofdm_db,
                    }
                )
        for snr in cfg.snr_db:
            sel = [
                r["nmse_db"]
                for r in rows
                if r["speed_mps"] == speed and r["snr_db"] == snr and r["method"] == "lattice-interp"
            ]
            sel2 = [
                r["nmse_db"]
                for r in rows
                if r["speed_mps"] == speed and r["snr_db"] == snr and r["method"] == "block-ls-hold"
            ]
            medians[f"lattice-interp@{speed:g}mps@{snr:g}dB"] = float(np.median(sel))
            medians[f"block-ls-hold@{speed:g}mps@{snr:g}dB"] = float(np.median(sel2))
    return rows, {"median_nmse_db": medians, "overhead": pattern.overhead}


def _run_rate_cdf(cfg: ExperimentConfig):
    grid, pattern, n_block, taps, pulses, speeds = _cdf_trial_machinery(cfg)
    seeds = _trial_seeds(cfg.seed, (len(speeds), cfg.trials, 3))
    overhead = pattern.overhead
    rows = []
    for si, speed in enumerate(speeds):
        nu_d = cfg.resolved_doppler(speed)

        def one(t, si=si, nu_d=nu_d):
            out = []
            ch = generate_wssus(cfg.delay_spread, nu_d, cfg.n_paths, int(seeds[si, t, 0]))
            tap_m = channel_matrices(ch, pulses, grid, taps)
            h_flat = tap_m[(0, 0)]
            sig_power = float(np.mean(np.abs(h_flat) ** 2))
            isci = isci_power(ch, grid, taps, pulses, tap_matrices=tap_m).isci_power * sig_power
            frame = build_frame(grid, pattern, int(seeds[si, t, 1]))
            frame_ofdm = build_ofdm_frame(grid, n_block, int(seeds[si, t, 1]))
            for snr in cfg.snr_db:
                noise_var = 0.0 if math.isinf(snr) else 10.0 ** (-snr / 10.0)
                rx = transmit(frame, ch, taps, noise_var, int(seeds[si, t, 2]), tap_matrices=tap_m)
                est = interpolate(ls_pilot_estimate(rx, frame))
                err = float(np.mean(np.abs(est.values - h_flat) ** 2))
                r1 = achievable_rate(sig_power, isci, noise_var, err, overhead)
                rx2 = transmit(
                    frame_ofdm, ch, taps, noise_var, int(seeds[si, t, 2]) + 1, tap_matrices=tap_m
                )
                est2 = ofdm_baseline_estimate(rx2, frame_ofdm)
                err2 = float(np.mean(np.abs(est2.values - h_flat) ** 2))
                r2 = achievable_rate(sig_power, isci, noise_var, err2, 1.0 / n_block)
                out.append((snr, r1.rate, r2.rate))
            return out

        per_trial = _map_trials(one, cfg.trials, cfg.threads)
        for t, results in enumerate(per_trial):
            for snr, rate1, rate2 in results:
                rows.append(
                    {
                        "speed_mps": speed,
                        "snr_db": snr,
                        "trial": t,
                        "method": "lattice-interp",
                        "rate_bps_hz": rate1,
                    }
                )
                rows.append(
                    {
                        "speed_mps": speed,
                        "snr_db": snr,
                        "trial": t,
                        "method": "block-ls-hold",
                        "rate_bps_hz": rate2,
                    }
                )
    medians = {}
    for speed in speeds:
        for snr in cfg.snr_db:
            for method in ("lattice-interp", "block-ls-hold"):
                sel = [
                    r["rate_bps_hz"]
                    for r in rows
                    if r["speed_mps"] == speed and r["snr_db"] == snr and r["method"] == method
                ]
                medians[f"{method}@{speed:g}mps@{snr:g}dB"] = float(np.median(sel))
    return rows, {"median_rate_bps_hz": medians, "overhead": overhead}


def _toy_stream_channel(grid: TFGrid) -> DDChannel:
    """On-grid single path the tiny demo grids can recover exactly."""
    doppler = -1.0 / (4 * grid.T)  # one Doppler bin of the 4-slot window
    return DDChannel((DDPath(0.0, doppler, 1.0 + 0.0j),), 0.0, 2.0 * abs(doppler))


def _run_pipeline_demo(cfg: ExperimentConfig):
    window_n = 4
    long_grid = TFGrid.from_subcarrier_spacing(cfg.subcarrier_spacing or 200e3, cfg.n, cfg.m)
    window_grid = TFGrid.from_subcarrier_spacing(long_grid.F, window_n, cfg.m)
    long_pattern = PilotPattern.from_grid(long_grid, cfg.l_n, cfg.l_m)
    window_pattern = PilotPattern.from_grid(window_grid, cfg.l_n, cfg.l_m)
    ch = _toy_stream_channel(window_grid)
    pulses = rect_pulse_pair(long_grid)
    frame = build_frame(long_grid, long_pattern, cfg.seed)
    rx = transmit(frame, ch, [(0, 0)], pulses=pulses)
    state = PipelineState(window_grid, window_pattern)
    cols = window_pattern.pilot_cols()
    rows = []
    for slot in long_pattern.pilot_rows():
        ls_row = rx.y[slot, cols] / frame.symbols[slot, cols]
        est = pipeline_update(state, int(slot), ls_row)
        if est is None:
            rows.append(
                {"update_slot": int(slot), "status": "warming-up", "window_start": -1,
                 "window_end": -1, "nmse_db": float("nan")}
            )
            continue
        truth = channel_matrix(ch, pulses, window_grid, (0, 0), n_start=est.window_start)
        rows.append(
            {
                "update_slot": int(slot),
                "status": "estimate",
                "window_start": est.window_start,
                "window_end": est.window_start + window_n,
                "nmse_db": nmse_db(est.values, truth.values),
            }
        )
    emitted = [r for r in rows if r["status"] == "estimate"]
    aggregates = {
        "n_estimates": len(emitted),
        "worst_nmse_db": max(r["nmse_db"] for r in emitted),
        "window_after_slot4": next(
            ((r["window_start"], r["window_end"]) for r in emitted if r["update_slot"] == 4), None
        ),
    }
    return rows, aggregates


def _run_extrapolation_demo(cfg: ExperimentConfig):
    grid = TFGrid.from_subcarrier_spacing(cfg.subcarrier_spacing or 200e3, 4, cfg.m)
    pattern = PilotPattern.from_grid(grid, cfg.l_n, cfg.l_m)
    ch = _toy_stream_channel(grid)
    pulses = rect_pulse_pair(grid)
    frame = build_frame(grid, pattern, cfg.seed)
    rx = transmit(frame, ch, [(0, 0)], pulses=pulses)
    batch = interpolate(ls_pilot_estimate(rx, frame))
    first = extrapolate(batch, pattern, dn=1)
    second = extrapolate(first, pattern, dn=1)
    rows = []
    for stage, est in (("batch", batch), ("extrapolated-1", first), ("extrapolated-2", second)):
        truth = channel_matrix(ch, pulses, grid, (0, 0), n_start=est.window_start)
        for local, slot in enumerate(est.slots):
            rows.append(
                {
                    "stage": stage,
                    "slot": int(slot),
                    "nmse_db": nmse_db(est.values[local], truth.values[local]),
                }
            )
    covered = sorted({r["slot"] for r in rows})
    aggregates = {
        "slots_covered": covered,
        "predicted_slots": sorted({r["slot"] for r in rows if r["stage"] != "batch" and r["slot"] >= 4}),
        "worst_nmse_db": max(r["nmse_db"] for r in rows),
    }
    return rows, aggregates
