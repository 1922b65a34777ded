"""Seeded Monte Carlo runners for the BS-PU (fig3) and PU-SU (fig5) error curves."""

from __future__ import annotations

import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .geometry import SINGULAR_GAP_M, pu_su_distance
from .map_estimator import estimate_L_bp
from .model import ScenarioConfig, path_loss
from .sim import (abs_db_error, make_rng, run_estimation, simulate_downlink_modes,
                  simulate_scenario, write_trace_csv)

log = logging.getLogger(__name__)

FIG3_DISTANCES = (50.0, 75.0, 100.0, 150.0, 200.0, 250.0, 300.0, 350.0, 400.0, 450.0, 500.0)
FIG5_R1 = (100.0, 400.0)
FIG5_R0 = (100.0, 250.0, 400.0)
FIG5_THETA_POINTS = 36
TRIAL_CHUNK = 50

# stream tags keep fig3 / fig5 / single randomness disjoint under one root seed
_FIG3, _FIG5, _SINGLE = 3, 5, 1


def theta_grid(n: int = FIG5_THETA_POINTS) -> tuple[float, ...]:
    """``n`` angles uniform on [0, 2pi), offset half a step so theta = 0 is never hit."""
    return tuple((k + 0.5) * 2.0 * math.pi / n for k in range(n))


@dataclass(frozen=True)
class ExperimentSpec:
    kind: str
    trials: int = 500
    distances: tuple[float, ...] = FIG3_DISTANCES
    r1_list: tuple[float, ...] = FIG5_R1
    r0_list: tuple[float, ...] = FIG5_R0
    thetas: tuple[float, ...] = field(default_factory=theta_grid)
    pu: tuple[float, float] = (300.0, 0.8)
    su_r1: float = 100.0

    def validate(self, config: ScenarioConfig) -> None:
        if self.kind not in ("fig3", "fig5", "single"):
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.kind == "fig3":
            if not self.distances:
                raise ValueError("distance list is empty")
            for d in self.distances:
                _in_cell(d, config)
        elif self.kind == "fig5":
            if not (self.r1_list and self.r0_list and self.thetas):
                raise ValueError("fig5 grid is empty")
            for r0 in self.r0_list:
                _in_cell(r0, config)
            if any(not r1 > 0 for r1 in self.r1_list):
                raise ValueError("r1 values must be positive")
        else:
            _in_cell(self.pu[0], config)
            if not self.su_r1 > 0:
                raise ValueError("SU distance must be positive")


def _in_cell(d, config):
    if not config.Rmin <= d <= config.R0:
        raise ValueError(f"distance {d} m outside [{config.Rmin}, {config.R0}]")


def _fmt(x) -> str:
    x = float(x)
    return "nan" if math.isnan(x) else format(x, ".12g")


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(v if isinstance(v, str) else (str(v) if isinstance(v, int) else _fmt(v))
                           for v in row) + "\n")
    return buf.getvalue()


def _summary(errors: np.ndarray) -> tuple[float, float]:
    n = len(errors)
    mean = float(np.mean(errors))
    se = float(np.std(errors, ddof=1) / math.sqrt(n)) if n > 1 else math.nan
    return mean, se


def _fig3_task(args):
    config, point, distance, lo, hi = args
    true_loss = float(path_loss(config.propagation, distance))
    out = np.empty(hi - lo)
    for j, t in enumerate(range(lo, hi)):
        m_d = simulate_downlink_modes(config, distance, make_rng(config.seed, _FIG3, point, t))
        out[j] = abs_db_error(true_loss, estimate_L_bp(m_d, config).L_hat)
    return out


def _fig5_task(args):
    config, point, (r1, r0, theta), lo, hi = args
    out = np.empty(hi - lo)
    for j, t in enumerate(range(lo, hi)):
        trace = simulate_scenario(config, (r0, theta), r1, make_rng(config.seed, _FIG5, point, t))
        res = run_estimation(trace.observables, r1, config)
        out[j] = abs_db_error(trace.truth.L_ps, res.L_ps)
    return out


def _fan_out(fn, points, config, trials, threads):
    """Run ``trials`` per point in chunks; results come back in point order."""
    tasks, owner = [], []
    for idx, geom in points:
        for lo in range(0, trials, TRIAL_CHUNK):
            tasks.append((config, idx, geom, lo, min(lo + TRIAL_CHUNK, trials)))
            owner.append(idx)
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(fn, tasks))
    else:
        chunks = [fn(t) for t in tasks]
    per_point: dict[int, list[np.ndarray]] = {}
    for idx, arr in zip(owner, chunks):
        per_point.setdefault(idx, []).append(arr)
    return {idx: np.concatenate(v) for idx, v in per_point.items()}


FIG3_HEADER = ("distance_m", "mean_abs_err_db", "stderr_db", "trials")
FIG5_HEADER = ("r1_m", "r0_m", "theta_rad", "mean_abs_err_db", "stderr_db", "trials")


def run_fig3(spec: ExperimentSpec, config: ScenarioConfig, threads: int = 1) -> list[tuple]:
    """Mean |dB error| of the MAP BS-PU loss estimate per PU distance."""
    spec.validate(config)
    points = list(enumerate(spec.distances))
    errs = _fan_out(_fig3_task, points, config, spec.trials, threads)
    return [(float(d), *_summary(errs[i]), spec.trials) for i, d in points]


def fig5_points(spec: ExperimentSpec):
    k = 0
    for r1 in spec.r1_list:
        for r0 in spec.r0_list:
            for th in spec.thetas:
                yield k, (float(r1), float(r0), float(th))
                k += 1


def run_fig5(spec: ExperimentSpec, config: ScenarioConfig, threads: int = 1) -> list[tuple]:
    """Mean |dB error| of the full pipeline's PU-SU loss per (r1, r0, theta).

    Points where the PU would sit within 1 m of the SU are reported as a
    warning row (nan, trials = 0) rather than simulated.
    """
    spec.validate(config)
    good, rows = [], {}
    for idx, (r1, r0, th) in fig5_points(spec):
        if float(pu_su_distance(r0, r1, th)) < SINGULAR_GAP_M:
            log.warning("skipping singular geometry r1=%g r0=%g theta=%g", r1, r0, th)
            rows[idx] = (r1, r0, th, math.nan, math.nan, 0)
        else:
            good.append((idx, (r1, r0, th)))
    errs = _fan_out(_fig5_task, good, config, spec.trials, threads)
    for idx, (r1, r0, th) in good:
        rows[idx] = (r1, r0, th, *_summary(errs[idx]), spec.trials)
    return [rows[k] for k in sorted(rows)]


def run_single(spec: ExperimentSpec, config: ScenarioConfig, dump_trace=None) -> str:
    """Simulate one window at explicit positions and report truth vs estimates."""
    spec.validate(config)
    r0, theta = spec.pu
    trace = simulate_scenario(config, (r0, theta), spec.su_r1, make_rng(config.seed, _SINGLE))
    res = run_estimation(trace.observables, spec.su_r1, config)
    if dump_trace is not None:
        write_trace_csv(trace.observables, dump_trace)
    g = trace.truth

    def dbv(x):
        return f"{10 * math.log10(x):.4f} dB"

    L_sp_true = g.L_ps * 10.0 ** (-config.duplex_offset_db() / 10.0)
    lines = [
        f"PU: r0 = {r0:g} m, theta = {theta:g} rad; SU: r1 = {spec.su_r1:g} m; I = {config.I}",
        f"L_bp      {dbv(g.L_bp)}",
        f"L_bp_hat  {dbv(res.L_bp)}  (error {abs_db_error(g.L_bp, res.L_bp):.4f} dB)",
        f"L_pb      {dbv(g.L_pb)}",
        f"L_pb_hat  {dbv(res.L_pb)}",
        f"L_ps      {dbv(g.L_ps)}",
        f"L_ps_hat  {dbv(res.L_ps)}  (error {abs_db_error(g.L_ps, res.L_ps):.4f} dB)",
        f"L_sp      {dbv(L_sp_true)}",
        f"L_sp_hat  {dbv(res.L_sp)}",
        "diagnostics:",
        f"  map: grid={res.map_estimate.grid_points} log_density={res.map_estimate.log_density:.6g}"
        f" lower_edge={res.map_estimate.at_lower_edge} saturated={res.map_estimate.saturated}",
        f"  prior: r0_hat={res.r0_hat:.3f} m nudged={res.r0_nudged}"
        f" x_mean={res.x_mean:.6g} x_mean_square={res.x_mean_square:.6g}",
        f"  lmmse: x_hat={res.x_hat:.6g} cond={res.cond_estimate:.3g}"
        f" regularized={res.regularized} clamped={res.clamped}",
    ]
    return "\n".join(lines) + "\n"
