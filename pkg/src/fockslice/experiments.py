"""Scenario configs, the scenario runner, artifacts and the validation suite."""
from __future__ import annotations

import csv
import dataclasses
import json
import logging
import math
import os
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import checks
from . import hamiltonians as hm
from . import lindblad as lb
from . import observables as obs
from . import operators as ops
from .config import TOL

log = logging.getLogger(__name__)

KINDS = ("fock_protection", "superposition_protection", "confinement_demo", "elimination_check")
CSV_COLUMNS = ("tau", "fidelity", "mandel_q", "mean_n", "purity", "trace_error",
               "leakage", "top_level_population")
PLATEAU_WINDOW = (0.05, 0.5)
DIM_STEP = 8
OUT_ENV = "FOCKSLICE_OUT"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class TauGrid:
    count: int = 400
    min: float = 1e-5
    max: float = 1.0
    spacing: str = "log"

    def __post_init__(self):
        if self.count < 2:
            raise ConfigError("tau_grid.count: must be >= 2")
        if not 0 < self.min < self.max:
            raise ConfigError("tau_grid: need 0 < min < max")
        if self.spacing not in ("log", "linear"):
            raise ConfigError("tau_grid.spacing: must be 'log' or 'linear'")

    def points(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.min, self.max, self.count)
        return np.linspace(self.min, self.max, self.count)


@dataclass(frozen=True)
class ScenarioConfig:
    kind: str
    M: int
    omega: float
    kappa: float = 4e6
    gamma0: float = 10.0
    nbar: float = 0.01
    omega_bar_3: float | None = None
    dim_override: int | None = None
    tau_grid: TauGrid = field(default_factory=TauGrid)
    method: str = "adaptive"
    name: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"kind: must be one of {KINDS}, got {self.kind!r}")
        min_m = 2 if self.kind == "superposition_protection" else 1
        if not isinstance(self.M, int) or self.M < min_m:
            raise ConfigError(f"M: must be an integer >= {min_m} for {self.kind}")
        for f in ("omega", "kappa"):
            if not getattr(self, f) > 0:
                raise ConfigError(f"{f}: must be positive")
        for f in ("gamma0", "nbar"):
            if getattr(self, f) < 0:
                raise ConfigError(f"{f}: must be nonnegative")
        if self.omega_bar_3 is not None:
            if self.kind != "superposition_protection":
                raise ConfigError("omega_bar_3: only valid for superposition_protection")
            if not self.omega_bar_3 > 0:
                raise ConfigError("omega_bar_3: must be positive")
        if self.dim_override is not None and self.dim_override < self.M + 4:
            raise ConfigError(f"dim_override: must be >= M + 4 = {self.M + 4}")
        if self.method not in ("adaptive", "expm"):
            raise ConfigError("method: must be 'adaptive' or 'expm'")
        if not self.name:
            object.__setattr__(self, "name", f"{self.kind}_M{self.M}")

    # derived quantities, never stored
    @property
    def ratio(self) -> float:
        return 1.0 if self.omega_bar_3 is None else self.omega_bar_3

    @property
    def eta_sq(self) -> float:
        return 2 / self.M

    @property
    def gamma(self) -> float:
        return self.gamma0 * (1 + self.M) ** 0.7

    @property
    def engineered_rate(self) -> float:
        if self.kind == "superposition_protection":
            return lb.sliced_rate(self.omega, self.kappa)
        return lb.absorption_rate(self.M, self.omega, self.kappa)

    @property
    def rate_ratio(self) -> float:
        return self.engineered_rate / self.gamma

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        d = dict(d)
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigError(f"unknown keys: {unknown}")
        for req in ("kind", "M", "omega"):
            if req not in d:
                raise ConfigError(f"{req}: required")
        grid = d.pop("tau_grid", None)
        if grid is not None:
            if isinstance(grid, dict):
                gknown = {f.name for f in dataclasses.fields(TauGrid)}
                bad = sorted(set(grid) - gknown)
                if bad:
                    raise ConfigError(f"tau_grid: unknown keys {bad}")
                d["tau_grid"] = TauGrid(**grid)
            elif isinstance(grid, TauGrid):
                d["tau_grid"] = grid
            else:
                raise ConfigError("tau_grid: must be a mapping")
        return cls(**d)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        return d

    def echo(self) -> dict:
        """Config plus the derived rates, embedded in every artifact."""
        return {**self.to_dict(), "derived": {
            "eta_sq": self.eta_sq, "gamma": self.gamma,
            "engineered_rate": self.engineered_rate, "rate_ratio": self.rate_ratio}}


def load_config(path) -> ScenarioConfig:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: not valid JSON ({e})") from e
    return ScenarioConfig.from_dict(data)


def fig1_configs() -> list[ScenarioConfig]:
    """The four packaged scenarios of the steady-state protection figure."""
    folder = resources.files("fockslice") / "scenarios"
    names = ("fig1_fock_M5.json", "fig1_fock_M10.json", "fig1_superposition_M4.json",
             "fig1_superposition_M9.json")
    return [ScenarioConfig.from_dict(json.loads((folder / n).read_text())) for n in names]


# Trajectories -----------------------------------------------------------------

def plateau_fidelity(records, window=PLATEAU_WINDOW) -> float:
    """Time average of the fidelity over ``window`` (trapezoid rule on the grid)."""
    lo, hi = window
    pts = [(r.tau, r.fidelity) for r in records if lo <= r.tau <= hi]
    if not pts:
        return math.nan
    if len(pts) == 1:
        return pts[0][1]
    t, f = np.array(pts).T
    return float(np.trapezoid(f, t) / (t[-1] - t[0]))


@dataclass
class Trajectory:
    config: ScenarioConfig
    records: list[obs.ObservableRecord]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        taus = [r.tau for r in self.records]
        if any(b <= a for a, b in zip(taus, taus[1:])):
            raise ValueError("trajectory taus must be strictly increasing")

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])

    def summary(self) -> dict:
        last = self.records[-1]
        return {
            "name": self.config.name,
            "kind": self.config.kind,
            "plateau_fidelity": plateau_fidelity(self.records),
            "plateau_window": list(PLATEAU_WINDOW),
            "final_tau": last.tau,
            "final_fidelity": last.fidelity,
            "steady_mandel_q": last.mandel_q,
            "final_mean_n": last.mean_n,
            "final_purity": last.purity,
            "max_trace_error": float(self.column("trace_error").max()),
            "min_eigenvalue": float(self.column("min_eigenvalue").min()),
            "max_top_level_population": float(self.column("top_level_population").max()),
            "rate_ratio": self.config.rate_ratio,
            "meta": self.meta,
            "config": self.config.echo(),
        }

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_COLUMNS)
            for r in self.records:
                w.writerow([repr(float(getattr(r, c))) for c in CSV_COLUMNS])

    def write(self, outdir=None) -> tuple[Path, Path]:
        outdir = output_dir(outdir)
        csv_path = outdir / f"{self.config.name}.csv"
        json_path = outdir / f"{self.config.name}.json"
        self.write_csv(csv_path)
        json_path.write_text(json.dumps(_jsonable(self.summary()), indent=2))
        return csv_path, json_path


def output_dir(outdir=None) -> Path:
    p = Path(outdir or os.environ.get(OUT_ENV, "./out"))
    p.mkdir(parents=True, exist_ok=True)
    return p


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return None if math.isnan(x) else x
    if isinstance(x, np.integer):
        return int(x)
    return x


# Scenario runner ------------------------------------------------------------------

def scenario_liouvillian(cfg: ScenarioConfig, dim: int) -> tuple[lb.Liouvillian, np.ndarray, tuple[int, int]]:
    """Engineered plus thermal Liouvillian in units of gamma, with target and window."""
    thermal = lb.thermal_liouvillian(cfg.gamma, cfg.nbar, dim)
    if cfg.kind == "fock_protection":
        L = lb.engineered_absorption(cfg.M, cfg.omega, cfg.kappa, dim) + thermal
        return L.scaled(cfg.gamma), ops.basis(dim, cfg.M), (0, cfg.M)
    if cfg.kind == "superposition_protection":
        p = hm.SlicedParams(cfg.M, cfg.ratio, cfg.omega)
        L = lb.engineered_sliced(p, cfg.kappa, dim) + thermal
        return L.scaled(cfg.gamma), hm.dark_state(cfg.M, cfg.ratio, dim), (cfg.M, cfg.M + 1)
    raise ConfigError(f"kind {cfg.kind!r} has no effective Liouvillian")


def _records(states, taus, target, window, lmins=None):
    lmins = [None] * len(taus) if lmins is None else lmins
    return [obs.record(t, r, target, window, lm) for t, r, lm in zip(taus, states, lmins)]


def _run_protection(cfg, max_extensions):
    dim = cfg.dim_override or hm.default_dim(cfg.M)
    taus = cfg.tau_grid.points()
    history = []
    while True:
        L, target, window = scenario_liouvillian(cfg, dim)
        ev = lb.evolve(ops.thermal_dm(cfg.nbar, dim), L, taus, method=cfg.method)
        recs = _records(ev.states, taus, target, window, ev.min_eigenvalues)
        top = max(r.top_level_population for r in recs)
        history.append({"dim": dim, "max_top_level_population": top,
                        "plateau_fidelity": plateau_fidelity(recs)})
        if top <= TOL.top_level_guard:
            break
        if len(history) > max_extensions or dim + DIM_STEP > TOL.max_superop_dim:
            log.warning("%s: top-level population %.2e persists at dim=%d", cfg.name, top, dim)
            break
        dim += DIM_STEP
        log.info("%s: top-level population %.2e, extending to dim=%d", cfg.name, top, dim)
    meta = {"dim": dim, "extensions": len(history) - 1, "dim_history": history,
            "truncation_converged": history[-1]["max_top_level_population"] <= TOL.top_level_guard,
            "integrator": ev.info, "method": ev.method}
    if len(history) > 1:
        meta["plateau_change_last_extension"] = abs(
            history[-1]["plateau_fidelity"] - history[-2]["plateau_fidelity"])
    return recs, meta


def _run_confinement(cfg):
    """Unitary evolution under the upper-bounded JC coupling; tau in units of 1/chi."""
    dim = cfg.dim_override or hm.default_dim(cfg.M)
    eta = math.sqrt(cfg.eta_sq)
    h = hm.build_ub(cfg.M, cfg.omega, "JC", dim) / hm.chi(eta, cfg.omega)
    mode0 = np.zeros(dim, dtype=complex)
    mode0[:cfg.M + 1] = 1 / math.sqrt(cfg.M + 1)
    psi0 = np.kron(ops.KET_G, mode0)
    w, v = np.linalg.eigh(h)
    c0 = v.conj().T @ psi0
    taus = cfg.tau_grid.points()
    states = []
    for t in taus:
        psi = v @ (np.exp(-1j * w * t) * c0)
        states.append(ops.partial_trace_qubit(np.outer(psi, psi.conj())))
    recs = _records(states, taus, mode0, (0, cfg.M))
    return recs, {"dim": dim, "time_unit": "1/chi"}


def _run_elimination(cfg):
    mode_dim = cfg.dim_override or cfg.M + 6
    taus = cfg.tau_grid.points()
    h = hm.build_ub(cfg.M, cfg.omega, "AJC", mode_dim)
    full = lb.full_bipartite_liouvillian(h, cfg.kappa, cfg.gamma, cfg.nbar).scaled(cfg.gamma)
    rho_th = ops.thermal_dm(cfg.nbar, mode_dim)
    ev = lb.evolve(ops.tensor_qubit_mode(ops.projector(ops.KET_G), rho_th), full, taus, method=cfg.method)
    reduced = [ops.partial_trace_qubit(r) for r in ev.states]
    eff = (lb.engineered_absorption(cfg.M, cfg.omega, cfg.kappa, mode_dim)
           + lb.thermal_liouvillian(cfg.gamma, cfg.nbar, mode_dim)).scaled(cfg.gamma)
    ev_eff = lb.evolve(rho_th, eff, taus, method=cfg.method)
    dist = [obs.trace_distance(a, b) for a, b in zip(reduced, ev_eff.states)]
    recs = _records(reduced, taus, ops.basis(mode_dim, cfg.M), (0, cfg.M), ev.min_eigenvalues)
    meta = {"dim": 2 * mode_dim, "max_trace_distance_to_effective": max(dist),
            "chi_over_kappa": hm.chi(math.sqrt(cfg.eta_sq), cfg.omega) / cfg.kappa}
    return recs, meta


def run_scenario(cfg: ScenarioConfig, max_extensions: int = 3) -> Trajectory:
    t0 = time.perf_counter()
    if cfg.kind in ("fock_protection", "superposition_protection"):
        recs, meta = _run_protection(cfg, max_extensions)
    elif cfg.kind == "confinement_demo":
        recs, meta = _run_confinement(cfg)
    else:
        recs, meta = _run_elimination(cfg)
    meta["wall_time_s"] = time.perf_counter() - t0
    return Trajectory(cfg, recs, meta)


def steady(cfg: ScenarioConfig) -> dict:
    """Steady state of the scenario Liouvillian at its starting dimension."""
    dim = cfg.dim_override or hm.default_dim(cfg.M)
    L, target, window = scenario_liouvillian(cfg, dim)
    ss = lb.steady_state(L, seed=ops.thermal_dm(cfg.nbar, dim))
    rec = obs.record(math.inf, ss.rho, target, window)
    return {"name": cfg.name, "dim": dim, "degeneracy": ss.degeneracy,
            "residual": ss.residual, **{k: v for k, v in rec.as_dict().items() if k != "tau"},
            "config": cfg.echo()}


def sweep(cfg: ScenarioConfig, param: str, values) -> list[dict]:
    """Re-run ``cfg`` with ``param`` set to each value; returns summaries."""
    names = {f.name for f in dataclasses.fields(ScenarioConfig)} - {"tau_grid", "kind", "name"}
    if param not in names:
        raise ConfigError(f"cannot sweep {param!r}; choose from {sorted(names)}")
    out = []
    for v in values:
        v = int(v) if param in ("M", "dim_override") else v
        c = dataclasses.replace(cfg, **{param: v}, name=f"{cfg.name}_{param}={v}")
        s = run_scenario(c).summary()
        s["sweep"] = {"param": param, "value": v}
        out.append(s)
    return out


# Validation suite -------------------------------------------------------------------

def _entry(name, value, threshold, passed, **extra):
    return {"name": name, "passed": bool(passed), "value": value, "threshold": threshold, **extra}


def run_validation_suite() -> list[dict]:
    """Invariant checks with measured values; failures are entries, not exceptions."""
    rep = []
    for N in (2, 4, 9):
        for r3 in (0.5, 1.0, 2.0):
            v = checks.dark_state_residual(N, r3)
            rep.append(_entry(f"dark_state_norm N={N} omega_bar_3={r3}", v, 1e-12, v < 1e-12))
        rank = checks.slice_block_rank(N, 1.0)
        rep.append(_entry(f"slice_block_rank N={N}", rank, 1, rank == 1))
    for N in (3, 5, 10):
        for q, qn in ((ops.KET_G, "g"), (ops.KET_E, "e")):
            v = checks.ub_confinement(N, qubit=q)
            rep.append(_entry(f"confinement_ub N={N} qubit={qn}", v, TOL.leakage, v < TOL.leakage))
    v = checks.lb_confinement(5)
    rep.append(_entry("confinement_lb N=5", v, TOL.leakage, v < TOL.leakage))
    for N in (2, 4, 9):
        v = checks.sliced_confinement(N)
        rep.append(_entry(f"confinement_sliced N={N} qubit=g", v, TOL.leakage, v < TOL.leakage))
    v = checks.absorption_stationarity(5, 1.2e6, 4e6)
    rep.append(_entry("stationary |N><N| under absorber (residual / rate)", v, 1e-12, v <= 1e-12))
    v = checks.sliced_stationarity(4, 5.9e5, 4e6)
    rep.append(_entry("stationary dark state under sliced dissipator (residual / rate)", v, 1e-12, v <= 1e-12))
    for cfg in fig1_configs():
        dev = abs(cfg.rate_ratio / 1e4 - 1)
        rep.append(_entry(f"rate_ratio {cfg.name}", cfg.rate_ratio, "1e4 +/- 15%", dev <= 0.15))
    v = checks.thermal_mean_n_error()
    rep.append(_entry("thermal <n>(tau) closed form", v, 1e-6, v <= 1e-6))
    scan = checks.elimination_scan()
    d = [s["max_trace_distance"] for s in scan]
    rep.append(_entry("elimination trace distance decreases with kappa", d, "decreasing",
                      all(b < a for a, b in zip(d, d[1:])),
                      kappas=[s["kappa"] for s in scan]))
    return rep


def omega_bar_3_scan(cfg: ScenarioConfig, values=None, target=0.90, tolerance=0.05) -> dict:
    """Plateau fidelity over ``omega_bar_3`` for a superposition scenario.

    Reports which values land within ``target +/- tolerance`` together with
    the truncation diagnostics of each run.
    """
    if cfg.kind != "superposition_protection":
        raise ConfigError("omega_bar_3 scan needs a superposition_protection config")
    values = np.linspace(0.5, 2.0, 16) if values is None else values
    rows = []
    for v in values:
        traj = run_scenario(dataclasses.replace(cfg, omega_bar_3=float(v)))
        rows.append({"omega_bar_3": float(v),
                     "plateau_fidelity": plateau_fidelity(traj.records),
                     "dim": traj.meta["dim"],
                     "truncation_converged": traj.meta["truncation_converged"],
                     "max_top_level_population": max(r.top_level_population for r in traj.records),
                     "plateau_change_last_extension": traj.meta.get("plateau_change_last_extension")})
    hits = [r for r in rows if abs(r["plateau_fidelity"] - target) <= tolerance]
    return {"name": cfg.name, "target": target, "tolerance": tolerance, "rows": rows,
            "meeting_values": [r["omega_bar_3"] for r in hits]}
