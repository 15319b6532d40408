"""Declarative scenario runs: config parsing, solvers, oracles and CSV datasets.

Config files are UTF-8 ``key = value`` pairs; ``#`` starts a comment and a
line may hold several whitespace-separated pairs. Times are given in units
of ``1/gamma``.
"""
from __future__ import annotations

import dataclasses
import io
import math
import re
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import collision
from .coherent import integrate_obe
from .core import (Pulse, QubitState, Statistics, TimeGrid, Units, binary_entropy, gaussian,
                   normalize_pulse, rising_exponential, square, vacuum)
from .energetics import EnergyLedger, assemble_ledger, classical_bound_witness
from .errors import ConfigError, DomainError
from .single_photon import integrate_single_excitation

FORMAT_VERSION = 1
SCENARIOS = ("coherent", "single_photon", "spontaneous")
PULSES = ("rising_exponential", "gaussian", "square")
EMITS = ("trajectory", "fig2", "convergence")

COHERENT_COLUMNS = ("t", "x", "y", "z", "Re_beta_in", "Im_beta_in", "Re_beta_out", "Im_beta_out",
                    "U_q", "W", "Q", "E_q", "E_f_coh", "dWB")
SINGLE_PHOTON_COLUMNS = ("t", "P_e", "Re_xi_in", "Re_xi_out", "Im_xi_out", "U_q", "W", "Q", "E_q",
                         "dWB")
FIG2_COLUMNS = ("t_gamma", "dWB_coherent", "dWB_single", "Q_coherent", "Q_single")
CONVERGENCE_COLUMNS = ("dt", "balance_residual", "oracle_deviation")


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    pulse: Optional[str] = None
    width: Optional[float] = None
    center: float = 0.0
    amplitude: Optional[float] = None
    N: Optional[float] = None
    renormalize: Optional[bool] = None
    t_start: Optional[float] = None
    t_stop: Optional[float] = None
    t0: Optional[float] = None
    t_max: float = 10.0
    dt: float = 1e-3
    initial_x: float = 0.0
    initial_y: float = 0.0
    initial_z: float = -1.0
    oracle: bool = False
    oracle_dt: float = 1e-2
    n_max: Optional[int] = None
    full_fock: bool = False
    emit: str = "trajectory"
    dt_list: tuple = (0.04, 0.02, 0.01)
    gamma: float = 1.0
    omega0: float = 1.0

    @property
    def units(self) -> Units:
        return Units(self.gamma, self.omega0)

    @property
    def statistics(self) -> Statistics:
        if self.scenario == "single_photon":
            return Statistics.SINGLE_PHOTON
        return Statistics.COHERENT


_FIELDS = {f.name: f for f in dataclasses.fields(ScenarioConfig)}
_BOOL = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}
_PAIR = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(\S+)")


def _convert(key, raw, lineno):
    try:
        if key in ("scenario", "pulse", "emit"):
            return raw
        if key in ("oracle", "full_fock", "renormalize"):
            return _BOOL[raw.lower()]
        if key == "n_max":
            return int(raw)
        if key == "dt_list":
            return tuple(float(v) for v in raw.split(",") if v)
        return float(raw)
    except (KeyError, ValueError):
        raise ConfigError(f"bad value {raw!r} for {key}", lineno) from None


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate a config; defaults are filled in."""
    values, where = {}, {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0]
        pos = 0
        while body[pos:].strip():
            m = _PAIR.match(body, pos)
            if m is None:
                raise ConfigError(f"cannot parse {body[pos:].strip()!r}", lineno)
            key, raw = m.group(1), m.group(2)
            if key not in _FIELDS:
                raise ConfigError(f"unknown key {key!r}", lineno)
            if key in values:
                raise ConfigError(f"duplicate key {key!r}", lineno)
            values[key] = _convert(key, raw, lineno)
            where[key] = lineno
            pos = m.end()
    if "scenario" not in values:
        raise ConfigError("missing required key 'scenario'")
    try:
        return validate_config(ScenarioConfig(**values))
    except ConfigError as exc:
        if exc.lineno is None and getattr(exc, "key", None) in where:
            raise ConfigError(str(exc), where[exc.key]) from None
        raise


def _fail(msg, key=None):
    exc = ConfigError(msg)
    exc.key = key
    return exc


def validate_config(cfg: ScenarioConfig) -> ScenarioConfig:
    if cfg.scenario not in SCENARIOS:
        raise _fail(f"scenario must be one of {SCENARIOS}, got {cfg.scenario!r}", "scenario")
    if cfg.emit not in EMITS:
        raise _fail(f"emit must be one of {EMITS}", "emit")
    if cfg.scenario == "spontaneous":
        if cfg.pulse is not None:
            raise _fail("spontaneous scenario takes no pulse", "pulse")
    else:
        if cfg.pulse is None:
            raise _fail(f"scenario {cfg.scenario} requires 'pulse'", "scenario")
        if cfg.pulse not in PULSES:
            raise _fail(f"pulse must be one of {PULSES}, got {cfg.pulse!r}", "pulse")
    if cfg.scenario == "single_photon":
        for key, ground in (("initial_x", 0.0), ("initial_y", 0.0), ("initial_z", -1.0)):
            if getattr(cfg, key) != ground:
                raise _fail("single_photon requires the qubit to start in the ground state", key)
        if cfg.N is not None:
            raise _fail("photon number N applies to coherent pulses only", "N")
    for key in ("gamma", "omega0", "dt", "oracle_dt"):
        if not getattr(cfg, key) > 0:
            raise _fail(f"{key} must be positive", key)
    if cfg.width is not None and not cfg.width > 0:
        raise _fail("width must be positive", "width")
    if cfg.N is not None and not cfg.N > 0:
        raise _fail("N must be positive", "N")
    if cfg.n_max is not None and cfg.n_max < 1:
        raise _fail("n_max must be at least 1", "n_max")
    r2 = cfg.initial_x**2 + cfg.initial_y**2 + cfg.initial_z**2
    if r2 > 1.0 + 1e-9:
        raise _fail("initial Bloch vector lies outside the unit ball", "initial_z")
    if len(cfg.dt_list) < 3:
        raise _fail("dt_list needs at least three values", "dt_list")
    return cfg


def _format_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, tuple):
        return ",".join(repr(float(x)) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def serialize_config(cfg: ScenarioConfig) -> str:
    """Inverse of :func:`parse_config` (unset optional keys are omitted)."""
    lines = []
    for name in _FIELDS:
        v = getattr(cfg, name)
        if v is None:
            continue
        lines.append(f"{name} = {_format_value(v)}")
    return "\n".join(lines) + "\n"


def fig2_configs(**overrides):
    """Coherent (one photon on average) and single-photon runs with the mode-matched envelope."""
    common = dict(pulse="rising_exponential", t_start=-5.0, t0=-5.0, t_max=10.0, dt=1e-3)
    common.update(overrides)
    coh = validate_config(ScenarioConfig(scenario="coherent", N=1.0, **common))
    sp = validate_config(ScenarioConfig(scenario="single_photon", renormalize=True, **common))
    return coh, sp


# -- building blocks ------------------------------------------------------------


def build_pulse(cfg: ScenarioConfig) -> Pulse:
    g = cfg.gamma
    stats = cfg.statistics
    if cfg.scenario == "spontaneous":
        return vacuum()
    width = (cfg.width if cfg.width is not None else 1.0) / g
    center = cfg.center / g
    t_start = None if cfg.t_start is None else cfg.t_start / g
    t_stop = None if cfg.t_stop is None else cfg.t_stop / g
    if cfg.pulse == "rising_exponential":
        p = rising_exponential(rate=1.0 / width, t_start=t_start,
                               t_stop=center if t_stop is None else t_stop, statistics=stats)
    elif cfg.pulse == "gaussian":
        p = gaussian(center=center, width=width, t_start=t_start, t_stop=t_stop, statistics=stats)
    else:
        lo = center - width if t_start is None else t_start
        hi = center if t_stop is None else t_stop
        p = square(lo, hi, statistics=stats)
    if cfg.amplitude is not None:
        p = dataclasses.replace(p, scale=p.scale * cfg.amplitude, _norm=None)
    if stats is Statistics.COHERENT and cfg.N is not None:
        p = normalize_pulse(p, cfg.N)
    if stats is Statistics.SINGLE_PHOTON and (cfg.renormalize is None or cfg.renormalize):
        p = normalize_pulse(p, 1.0)
    return p


def build_grid(cfg: ScenarioConfig, pulse: Pulse, dt: Optional[float] = None) -> TimeGrid:
    g = cfg.gamma
    if cfg.t0 is not None:
        t0 = cfg.t0 / g
    elif np.isfinite(pulse.t_start):
        t0 = pulse.t_start
    else:
        t0 = 0.0
    return TimeGrid(t0, cfg.t_max / g, (cfg.dt if dt is None else dt) / g)


def _solve(cfg, pulse, grid):
    if cfg.statistics is Statistics.SINGLE_PHOTON:
        return integrate_single_excitation(pulse, grid, cfg.gamma)
    s0 = QubitState(cfg.initial_x, cfg.initial_y, cfg.initial_z)
    return integrate_obe(pulse, s0, grid, cfg.gamma)


def _edge_indices(times, grid: TimeGrid):
    k = (times - grid.t0) / grid.dt
    idx = np.rint(k).astype(int)
    if np.max(np.abs(k - idx)) > 1e-6:
        raise DomainError("oracle_dt must be a whole multiple of dt")
    return idx


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    pulse: Pulse
    trajectory: object
    ledger: EnergyLedger
    witness: object
    oracle: dict = field(default_factory=dict)
    entropy: Optional[np.ndarray] = None

    def columns(self):
        tr, led = self.trajectory, self.ledger
        if self.config.statistics is Statistics.SINGLE_PHOTON:
            cols = {
                "t": tr.times, "P_e": tr.excited_population,
                "Re_xi_in": tr.input_envelope.real,
                "Re_xi_out": tr.output_envelope.real, "Im_xi_out": tr.output_envelope.imag,
                "U_q": led.U_q, "W": led.W, "Q": led.Q, "E_q": led.E_q, "dWB": led.dWB,
            }
            if self.entropy is not None:
                cols["S_entropy"] = self.entropy
            return cols
        return {
            "t": tr.times, "x": tr.x, "y": tr.y, "z": tr.z,
            "Re_beta_in": tr.input_amplitude.real, "Im_beta_in": tr.input_amplitude.imag,
            "Re_beta_out": tr.output_amplitude.real, "Im_beta_out": tr.output_amplitude.imag,
            "U_q": led.U_q, "W": led.W, "Q": led.Q, "E_q": led.E_q,
            "E_f_coh": led.E_f_coh, "dWB": led.dWB,
        }

    def summary(self) -> str:
        w = self.witness
        return (f"scenario={self.config.scenario} min_gap={w.min_gap:.6g} "
                f"violation={'true' if w.violation else 'false'}")


def _run_oracle(cfg, pulse, grid, traj) -> tuple:
    dt_o = cfg.oracle_dt / cfg.gamma
    bins = collision.build_time_bins(pulse, dt_o, grid.t0, grid.t_max)
    idx = _edge_indices(bins.edges, grid)
    diag = {"dt": dt_o}
    entropy = None
    if cfg.statistics is Statistics.SINGLE_PHOTON:
        o = collision.simulate_single_excitation_global(bins, cfg.gamma)
        diag["max_abs_dPe"] = float(np.max(np.abs(o.excited_population - traj.excited_population[idx])))
        diag["max_abs_sigma_minus"] = float(np.max(np.abs(o.sigma_minus)))
        diag["max_action_reaction"] = float(np.max(np.abs(o.W_q + o.W_f)))
        diag["max_energy_exchange_residual"] = float(np.max(np.abs(o.dU_q + o.dU_f)))
        diag["excitation_drift"] = float(np.ptp(o.total_excitation))
        entropy = binary_entropy(np.interp(grid.times, o.times, o.excited_population))
    else:
        s0 = QubitState(cfg.initial_x, cfg.initial_y, cfg.initial_z)
        o = collision.simulate_coherent_collisions(bins, s0, cfg.gamma, cfg.n_max)
        sg = math.sqrt(cfg.gamma)
        diag["n_max"] = o.n_max
        diag["max_abs_dz"] = float(np.max(np.abs(o.z - traj.z[idx])))
        diag["max_action_reaction"] = float(np.max(np.abs(o.W_q + o.W_f)))
        diag["max_energy_exchange_residual"] = float(np.max(np.abs(o.dU_q + o.dU_f)))
        diag["max_input_output_residual"] = float(
            np.max(np.abs(o.a_out - (o.a_in - sg * o.sigma_minus_pre))))
        diag["max_abs_mean_coupling"] = float(np.max(np.abs(o.mean_coupling)))
        if cfg.full_fock:
            n_bins = 8
            coarse = collision.build_time_bins(
                pulse, (grid.t_max - grid.t0) / n_bins, grid.t0, grid.t_max)
            n_ff = 2 if cfg.n_max is None else cfg.n_max
            ff = collision.simulate_full_fock(coarse, n_ff, s0, cfg.gamma)
            tb = collision.simulate_coherent_collisions(coarse, s0, cfg.gamma, n_ff)
            diag["full_fock_marginal_deviation"] = float(
                max(np.max(np.abs(ff.z - tb.z)),
                    np.max(np.abs(ff.sigma_minus - 0.5 * (tb.x - 1j * tb.y)))))
    return diag, entropy


def run_scenario(cfg: ScenarioConfig, dt: Optional[float] = None) -> ScenarioResult:
    """Solve one scenario, assemble its energy ledger and optional oracle diagnostics."""
    cfg = validate_config(cfg)
    pulse = build_pulse(cfg)
    grid = build_grid(cfg, pulse, dt)
    traj = _solve(cfg, pulse, grid)
    ledger = assemble_ledger(traj)
    witness = classical_bound_witness(ledger)
    res = ScenarioResult(cfg, pulse, traj, ledger, witness)
    if cfg.oracle:
        res.oracle, res.entropy = _run_oracle(cfg, pulse, grid, traj)
    return res


# -- CSV output ---------------------------------------------------------------------


def _fmt(v) -> str:
    return format(float(v), ".17g")


def _header(cfgs, extra=()):
    lines = [f"format_version = {FORMAT_VERSION}"]
    lines += cfgs[0].units.header_lines()
    for k, cfg in enumerate(cfgs):
        tag = "config" if len(cfgs) == 1 else f"config[{k}]"
        lines += [f"{tag}: {ln}" for ln in serialize_config(cfg).splitlines()]
    lines += list(extra)
    return lines


def write_csv(header_lines, columns: dict) -> str:
    buf = io.StringIO()
    for ln in header_lines:
        buf.write(f"# {ln}\n")
    names = list(columns)
    buf.write(f"# columns = {','.join(names)}\n")
    buf.write(",".join(names) + "\n")
    data = np.column_stack([np.asarray(columns[n], dtype=float) for n in names])
    for row in data:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def read_csv(text: str):
    """Parse a dataset written by this module into (header lines, {column: array})."""
    header, rows, names = [], [], None
    for line in text.splitlines():
        if line.startswith("#"):
            header.append(line[1:].strip())
        elif names is None:
            names = line.split(",")
        elif line:
            rows.append([float(v) for v in line.split(",")])
    data = np.array(rows, dtype=float).reshape(-1, len(names))
    return header, {n: data[:, i] for i, n in enumerate(names)}


def scenario_csv(res: ScenarioResult) -> str:
    w = res.witness
    extra = [
        f"balance_residual = {_fmt(res.ledger.balance_residual)}",
        f"witness_min_gap = {_fmt(w.min_gap)}",
        f"witness_violation = {'true' if w.violation else 'false'}",
    ]
    extra += [f"oracle_{k} = {_fmt(v) if isinstance(v, float) else v}" for k, v in res.oracle.items()]
    return write_csv(_header([res.config], extra), res.columns())


@dataclass
class Fig2Dataset:
    coherent: ScenarioResult
    single: ScenarioResult
    columns: dict

    def csv(self) -> str:
        extra = [f"witness_violation_coherent = {str(self.coherent.witness.violation).lower()}",
                 f"witness_violation_single = {str(self.single.witness.violation).lower()}"]
        return write_csv(_header([self.coherent.config, self.single.config], extra), self.columns)


def emit_fig2_dataset(cfg_coherent: ScenarioConfig, cfg_single: ScenarioConfig) -> Fig2Dataset:
    """Extra extractable work and correlation energy for coherent vs single-photon input."""
    shared = ("pulse", "width", "center", "t_start", "t_stop", "t0", "t_max", "dt", "gamma")
    for key in shared:
        if getattr(cfg_coherent, key) != getattr(cfg_single, key):
            raise DomainError(f"fig2 configs differ in {key!r}")
    if cfg_coherent.statistics is not Statistics.COHERENT or cfg_single.scenario != "single_photon":
        raise DomainError("fig2 needs one coherent and one single_photon config")
    a, b = run_scenario(cfg_coherent), run_scenario(cfg_single)
    cols = {
        "t_gamma": a.ledger.times * cfg_coherent.gamma,
        "dWB_coherent": a.ledger.dWB, "dWB_single": b.ledger.dWB,
        "Q_coherent": a.ledger.Q, "Q_single": b.ledger.Q,
    }
    return Fig2Dataset(a, b, cols)


# -- convergence -------------------------------------------------------------------


def fit_order(dts, errors) -> float:
    """Least-squares slope of ``log(error)`` against ``log(dt)``."""
    dts, errors = np.asarray(dts, float), np.asarray(errors, float)
    errors = np.maximum(errors, 1e-300)
    return float(np.polyfit(np.log(dts), np.log(errors), 1)[0])


@dataclass
class ConvergenceReport:
    dts: np.ndarray
    balance_residuals: np.ndarray
    oracle_deviations: np.ndarray
    balance_order: float
    oracle_order: float
    balance_ratios: np.ndarray
    oracle_ratios: np.ndarray
    min_order: float = 0.5

    @property
    def non_converging(self) -> dict:
        return {"balance": self.balance_order < self.min_order,
                "oracle": self.oracle_order < self.min_order}

    def csv(self, cfg: ScenarioConfig) -> str:
        extra = [f"balance_order = {_fmt(self.balance_order)}",
                 f"oracle_order = {_fmt(self.oracle_order)}",
                 f"balance_non_converging = {str(self.non_converging['balance']).lower()}",
                 f"oracle_non_converging = {str(self.non_converging['oracle']).lower()}"]
        cols = {"dt": self.dts, "balance_residual": self.balance_residuals,
                "oracle_deviation": self.oracle_deviations}
        return write_csv(_header([cfg], extra), cols)


def assess_convergence(dts, residuals, deviations) -> ConvergenceReport:
    dts = np.asarray(dts, float)
    residuals = np.asarray(residuals, float)
    deviations = np.asarray(deviations, float)
    return ConvergenceReport(
        dts, residuals, deviations,
        fit_order(dts, residuals), fit_order(dts, deviations),
        residuals[:-1] / residuals[1:], deviations[:-1] / deviations[1:])


def convergence_sweep(cfg: ScenarioConfig, dt_list=None) -> ConvergenceReport:
    """Balance residual of the solver and oracle deviation for each step size.

    Oracle deviations are measured against the solver run at ``cfg.dt``,
    which must divide every entry of ``dt_list``.
    """
    dts = sorted(cfg.dt_list if dt_list is None else dt_list, reverse=True)
    if len(dts) < 3:
        raise DomainError("convergence sweep needs at least three step sizes")
    g = cfg.gamma
    pulse = build_pulse(cfg)
    ref_grid = build_grid(cfg, pulse)
    ref = _solve(cfg, pulse, ref_grid)
    residuals, deviations = [], []
    for h in dts:
        grid = build_grid(cfg, pulse, h)
        residuals.append(assemble_ledger(_solve(cfg, pulse, grid), check=False).balance_residual)
        bins = collision.build_time_bins(pulse, h / g, ref_grid.t0, ref_grid.t_max)
        idx = _edge_indices(bins.edges, ref_grid)
        if cfg.statistics is Statistics.SINGLE_PHOTON:
            o = collision.simulate_single_excitation_global(bins, g)
        else:
            s0 = QubitState(cfg.initial_x, cfg.initial_y, cfg.initial_z)
            o = collision.simulate_coherent_collisions(bins, s0, g, cfg.n_max)
        deviations.append(float(np.max(np.abs(o.z - ref.z[idx]))))
    return assess_convergence(np.array(dts) / g, residuals, deviations)
