"""Named experiment scenarios, one per figure or claim, with CSV/JSON persistence.

Each scenario has a table of defaults. A :class:`ScenarioConfig` overrides
any of them (type-checked against the default), and :func:`run_scenario`
returns a :class:`Dataset` whose metadata echoes every resolved parameter.
"""
from __future__ import annotations

import datetime as _dt
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import MirrorJointState, mirror_joint_state, mirror_reduced_series
from .coil import CoilParams, coil_table
from .dynamics import TimeGrid, evolve_lindblad, evolve_unitary, steady_state_probe
from .errors import ConfigError, SchemaError
from .hilbert import (
    boltzmann_weights,
    coherent_state,
    fock_state,
    partial_trace,
    tensor,
    thermal_mixture,
)
from .models import (
    FRAMES,
    OptomechParams,
    TripartiteParams,
    build_lindblad_ops,
    build_optomech_hamiltonian,
    build_tripartite_hamiltonian,
)
from .quantify import (
    WignerGrid,
    log_negativity,
    negativity,
    quadrature_variances,
    wigner,
    wigner_integral,
)

_TRIPARTITE_BASE = {
    "init": "1,0,0",
    "frame": "interaction",
    "betas": (0.0, 0.5),
    "kappa": 1.0,
    "gamma_a": 0.0,
    "gamma_b": 0.0,
    "gamma_c": 0.0,
    "dims": (4, 4, 2),
    "n_bar": 0.1,
    "t0": 0.0,
    "t1": 20.0,
    "n_points": 401,
    "substeps": 0,
}

_FIG7_BASE = {
    "alpha2": 1.0,
    "eta": 0.0,
    "g_over_zeta": 1e-2,
    "betas": (1e-4, 0.0),
    "zeta_t": math.pi / 4,
    "omega_k": 10.0,
    "engine": "analytic",
    "half_width": 3.0,
    "resolution": 81,
    "tol": 1e-12,
}

_FIG8_BASE = {
    "alpha2": 5.0,
    "eta": 0.0,
    "g_over_zeta": 0.06,
    "betas": (1e-4, 0.0),
    "omega_k": 10.0,
    "t0": 0.0,
    "t1": 4 * math.pi,
    "n_points": 801,
    "tol": 1e-12,
}

_COIL_BASE = {"R": 80e-9, "I": 1e-3, "N_mag": 1e6, "a0": 50e-12, "n_turns": 1}


def _trip(**kw):
    d = dict(_TRIPARTITE_BASE)
    d.update(kw)
    return d


_DISSIPATIVE_WEAK = dict(gamma_a=0.1, gamma_b=0.1, gamma_c=0.1, t1=50.0, n_points=501)
_DISSIPATIVE_MEDIATOR = dict(gamma_c=2.0, t1=200.0, n_points=2001)


@dataclass(frozen=True)
class Scenario:
    id: str
    kind: str
    caption: str
    defaults: dict


SCENARIOS = {s.id: s for s in [
    Scenario("fig1a", "tripartite", "one excitation, unitary, init |100>, beta/kappa = 0 and 0.5",
             _trip(init="1,0,0")),
    Scenario("fig1b", "tripartite", "one excitation, unitary, init |001>, beta/kappa = 0 and 0.5",
             _trip(init="0,0,1")),
    Scenario("fig2a", "tripartite", "two excitations, unitary, init |200>",
             _trip(init="2,0,0")),
    Scenario("fig2b", "tripartite", "two excitations, unitary, init |110>",
             _trip(init="1,1,0")),
    Scenario("fig3a", "tripartite", "three excitations, unitary, init |300>",
             _trip(init="3,0,0")),
    Scenario("fig3b", "tripartite", "three excitations, unitary, init |111>",
             _trip(init="1,1,1")),
    Scenario("fig4a", "tripartite",
             "thermal mixture of asymmetric states |000>,|100>,|200>, mean excitation 0.1",
             _trip(init="0,0,0;1,0,0;2,0,0")),
    Scenario("fig4b", "tripartite",
             "thermal mixture of symmetric states |000>,|001>,|110>, mean excitation 0.1",
             _trip(init="0,0,0;0,0,1;1,1,0")),
    Scenario("fig5a", "tripartite", "damped, gamma_ab/kappa = gamma_c/kappa = 0.1, init |100>",
             _trip(init="1,0,0", **_DISSIPATIVE_WEAK)),
    Scenario("fig5b", "tripartite", "damped, gamma_ab/kappa = gamma_c/kappa = 0.1, init |001>",
             _trip(init="0,0,1", **_DISSIPATIVE_WEAK)),
    Scenario("fig6a", "tripartite",
             "gamma_c/kappa = 2 and gamma_ab/kappa = 0, init |200>: entangled steady state",
             _trip(init="2,0,0", **_DISSIPATIVE_MEDIATOR)),
    Scenario("fig6b", "tripartite",
             "gamma_c/kappa = 2 and gamma_ab/kappa = 0, init |110>: separable steady state",
             _trip(init="1,1,0", **_DISSIPATIVE_MEDIATOR)),
    Scenario("fig7", "wigner",
             "mirror Wigner function, |alpha|^2 = 1, g/zeta = 1e-2, zeta t = pi/4, beta/zeta = 1e-4 and 0",
             dict(_FIG7_BASE)),
    Scenario("fig8", "quadratures",
             "mirror quadrature variances, g/zeta = 0.06, |alpha|^2 = 5, mirror vacuum",
             dict(_FIG8_BASE)),
    Scenario("coil", "coil", "Helmholtz-coil nonlinearity estimate, R = 80 nm, I = 1 mA",
             dict(_COIL_BASE)),
    Scenario("custom", "tripartite", "free-form a-c-b chain; every parameter overridable",
             _trip()),
]}


def list_scenarios() -> list:
    """``(id, caption)`` pairs in a stable order."""
    return [(s.id, s.caption) for s in SCENARIOS.values()]


def _coerce(key, value, default):
    try:
        if isinstance(default, bool):
            if isinstance(value, str):
                if value.lower() in ("1", "true", "yes"):
                    return True
                if value.lower() in ("0", "false", "no"):
                    return False
                raise ValueError(value)
            return bool(value)
        if isinstance(default, tuple):
            items = value.split(",") if isinstance(value, str) else list(value)
            kind = type(default[0]) if default else float
            return tuple(kind(float(v)) if kind is int else kind(v) for v in items)
        if isinstance(default, int):
            f = float(value)
            if f != int(f):
                raise ValueError(value)
            return int(f)
        if isinstance(default, float):
            return float(value)
        return str(value)
    except (TypeError, ValueError):
        raise ConfigError(f"cannot read {key}={value!r} as {type(default).__name__}") from None


@dataclass
class ScenarioConfig:
    scenario: str
    overrides: dict = field(default_factory=dict)
    out_dir: str | None = None
    seed: int = 0

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; known: {', '.join(SCENARIOS)}")

    def resolve(self) -> dict:
        defaults = SCENARIOS[self.scenario].defaults
        params = dict(defaults)
        for key, value in self.overrides.items():
            if key not in defaults:
                raise ConfigError(
                    f"{self.scenario} has no parameter {key!r}; known: {', '.join(defaults)}")
            params[key] = _coerce(key, value, defaults[key])
        return params

    @classmethod
    def from_file(cls, path, scenario=None, overrides=None, out_dir=None):
        """Load a YAML/JSON file with ``scenario``, ``params``, ``out`` and ``seed`` keys."""
        import yaml

        with open(path) as fh:
            doc = yaml.safe_load(fh) or {}
        if not isinstance(doc, dict):
            raise ConfigError(f"{path}: expected a mapping at the top level")
        params = dict(doc.get("params") or {})
        params.update(overrides or {})
        return cls(scenario or doc.get("scenario", ""), params,
                   out_dir or doc.get("out"), int(doc.get("seed", 0)))


def parse_overrides(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


@dataclass
class Dataset:
    metadata: dict
    columns: dict
    grids: dict = field(default_factory=dict)
    paths: dict = field(default_factory=dict)

    def __post_init__(self):
        lengths = {len(v) for v in self.columns.values()}
        if len(lengths) > 1:
            raise SchemaError(f"columns have different lengths: {sorted(lengths)}")

    def write(self, out_dir) -> dict:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        name = self.metadata["scenario"]
        csv = out / f"{name}.csv"
        names = list(self.columns)
        table = np.column_stack([np.asarray(self.columns[n], dtype=float) for n in names])
        np.savetxt(csv, table, fmt="%.17g", delimiter=",", header=",".join(names), comments="")
        paths = {"table": str(csv)}
        for gname, (re, im, W) in self.grids.items():
            gpath = out / f"{name}_{gname}.csv"
            with open(gpath, "w") as fh:
                fh.write("re," + ",".join(f"{x:.17g}" for x in re) + "\n")
                fh.write("im\\W\n")
                for y, row in zip(im, W):
                    fh.write(f"{y:.17g}," + ",".join(f"{w:.17g}" for w in row) + "\n")
            paths[gname] = str(gpath)
        meta = dict(self.metadata)
        meta["files"] = {k: Path(v).name for k, v in paths.items()}
        meta_path = out / f"{name}.json"
        meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True, default=_jsonable) + "\n")
        paths["metadata"] = str(meta_path)
        self.paths = paths
        return paths

    @classmethod
    def read(cls, path) -> "Dataset":
        """Load from the table CSV or the metadata JSON of a written dataset."""
        p = Path(path)
        if p.is_dir():
            found = sorted(p.glob("*.json"))
            if len(found) != 1:
                raise SchemaError(f"{p}: expected exactly one dataset")
            p = found[0]
        meta_path = p.with_suffix(".json")
        csv = p.with_suffix(".csv")
        metadata = json.loads(meta_path.read_text()) if meta_path.exists() else {}
        with open(csv) as fh:
            names = fh.readline().strip().split(",")
        data = np.loadtxt(csv, delimiter=",", skiprows=1, ndmin=2)
        return cls(metadata, {n: data[:, i] for i, n in enumerate(names)})


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, tuple):
        return list(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _label(beta: float) -> str:
    return f"beta_{beta:g}"


def _initial_state(params, space):
    parts = [tuple(int(x) for x in chunk.split(",")) for chunk in params["init"].split(";")]
    for occ in parts:
        if len(occ) != 3:
            raise ConfigError(f"init {params['init']!r}: each state needs three occupations")
    if len(parts) == 1:
        return fock_state(space, parts[0])
    excitations = [sum(occ) for occ in parts]
    weights = boltzmann_weights(params["n_bar"], excitations)
    return thermal_mixture([(w, fock_state(space, occ)) for w, occ in zip(weights, parts)])


def _ab_negativity(state):
    return negativity(partial_trace(state, ["a", "b"]), ["b"])


def _ab_log_negativity(state):
    return log_negativity(partial_trace(state, ["a", "b"]), ["b"])


def _run_tripartite(params):
    grid = TimeGrid(params["t0"], params["t1"], params["n_points"])
    columns = {"t": grid.times}
    summary = {}
    mixture = ";" in params["init"]
    for beta in params["betas"]:
        p = TripartiteParams(beta=beta, kappa=params["kappa"], gamma_a=params["gamma_a"],
                             gamma_b=params["gamma_b"], gamma_c=params["gamma_c"],
                             dims=params["dims"])
        if params["frame"] not in FRAMES:
            raise ConfigError(f"frame must be one of {FRAMES}, got {params['frame']!r}")
        H = build_tripartite_hamiltonian(p, params["frame"])
        ops = build_lindblad_ops(p)
        psi0 = _initial_state(params, p.space)
        obs = {"negativity": _ab_negativity}
        if mixture:
            obs["log_negativity"] = _ab_log_negativity
        if ops:
            traj = evolve_lindblad(H, ops, psi0, grid, obs,
                                   substeps=params["substeps"] or None)
            converged, finals = steady_state_probe(traj)
            info = dict(traj.info)
            info["steady_state_converged"] = bool(converged)
            info["final_negativity"] = finals["negativity"]
            info["final_max_step_change"] = finals["max_step_change"]
        else:
            traj = evolve_unitary(H, psi0, grid, obs)
            total = sum(p.space.number_grid(l) for l in "abc")
            excitation = [float(np.real(np.sum(total * _populations(s)))) for s in traj.states]
            info = dict(traj.info)
            info["max_excitation_drift"] = float(np.max(np.abs(np.array(excitation) - excitation[0])))
            if mixture:
                info["min_eigenvalue"] = min(s.min_eigenvalue for s in traj.states)
        for name, series in traj.scalars.items():
            columns[f"{name}_{_label(beta)}"] = series
        summary[_label(beta)] = info
    return columns, {}, summary


def _populations(state):
    if hasattr(state, "amplitudes"):
        return np.abs(state.amplitudes) ** 2
    return np.real(np.diag(state.matrix))


def _optomech_params(params, beta):
    return OptomechParams.from_ratios(beta, params["g_over_zeta"], omega_k=params["omega_k"])


def mirror_state(params, beta, t, engine="analytic"):
    """Reduced mirror state for the fig7/fig8 settings from either engine."""
    p = _optomech_params(params, beta)
    alpha = math.sqrt(params["alpha2"])
    spec = MirrorJointState(alpha, params["eta"], p, t, tol=params["tol"])
    if engine == "analytic":
        return partial_trace(mirror_joint_state(spec), ["a"])
    if engine != "numeric":
        raise ConfigError(f"engine must be 'analytic' or 'numeric', got {engine!r}")
    dims = spec.resolved_dims()
    p = OptomechParams(p.omega_k, p.omega_m, p.beta, p.g_k, dims=dims)
    psi0 = tensor(coherent_state(dims[0], alpha, "k", tol=params["tol"]),
                  coherent_state(dims[1], params["eta"], "a", tol=params["tol"]))
    grid = TimeGrid(0.0, t, 2) if t > 0 else None
    if grid is None:
        return partial_trace(psi0, ["a"])
    traj = evolve_unitary(build_optomech_hamiltonian(p), psi0, grid)
    return partial_trace(traj.states[-1], ["a"])


def _run_wigner(params):
    grid = WignerGrid.square(params["half_width"], params["resolution"])
    re, im = grid.re, grid.im
    X, Y = np.meshgrid(re, im)
    columns = {"re": X.reshape(-1), "im": Y.reshape(-1)}
    grids, summary = {}, {}
    for beta in params["betas"]:
        rho = mirror_state(params, beta, params["zeta_t"], params["engine"])
        W = wigner(rho, grid)
        columns[f"W_{_label(beta)}"] = W.reshape(-1)
        grids[f"W_{_label(beta)}"] = (re, im, W)
        summary[_label(beta)] = {"min_W": float(W.min()), "integral": wigner_integral(W, grid),
                                 "mirror_dim": rho.space.dim,
                                 "min_eigenvalue": float(rho.min_eigenvalue)}
    return columns, grids, summary


def _run_quadratures(params):
    grid = TimeGrid(params["t0"], params["t1"], params["n_points"])
    columns = {"t": grid.times}
    summary = {}
    for beta in params["betas"]:
        p = _optomech_params(params, beta)
        states = mirror_reduced_series(math.sqrt(params["alpha2"]), params["eta"], p,
                                       grid.times, tol=params["tol"])
        q = quadrature_variances(states, grid.times)
        columns[f"var_q_{_label(beta)}"] = q.var_q
        columns[f"var_p_{_label(beta)}"] = q.var_p
        summary[_label(beta)] = {"min_variance": float(q.min_variance.min()),
                                 "min_uncertainty_product": float((q.var_q * q.var_p).min()),
                                 "min_eigenvalue": min(float(r.min_eigenvalue) for r in states)}
    return columns, {}, summary


def _run_coil(params):
    table = coil_table(CoilParams(**params))
    return {k: np.array([float(v)]) for k, v in table.items()}, {}, {}


_RUNNERS = {"tripartite": _run_tripartite, "wigner": _run_wigner,
            "quadratures": _run_quadratures, "coil": _run_coil}


def run_scenario(cfg: ScenarioConfig, write: bool = True) -> Dataset:
    """Run one scenario. With ``write`` and an ``out_dir``, files land in ``out_dir/<id>/``."""
    scenario = SCENARIOS[cfg.scenario]
    params = cfg.resolve()
    started = _dt.datetime.now(_dt.timezone.utc).isoformat()
    columns, grids, summary = _RUNNERS[scenario.kind](params)
    metadata = {
        "scenario": scenario.id,
        "caption": scenario.caption,
        "parameters": params,
        "seed": cfg.seed,
        "code_version": __version__,
        "started": started,
        "finished": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "summary": summary,
        "columns": list(columns),
    }
    ds = Dataset(metadata, columns, grids)
    if write and cfg.out_dir is not None:
        ds.write(Path(cfg.out_dir) / scenario.id)
    return ds


def compare_runs(a, b, tol: float | None = None) -> dict:
    """Per-column max absolute difference between two datasets (or dataset paths).

    Returns ``{"max_abs_diff": {...}, "worst": float, "passed": bool | None}``;
    ``passed`` is ``None`` when no tolerance is given.
    """
    a = a if isinstance(a, Dataset) else Dataset.read(a)
    b = b if isinstance(b, Dataset) else Dataset.read(b)
    if list(a.columns) != list(b.columns):
        raise SchemaError(f"column mismatch: {list(a.columns)} vs {list(b.columns)}")
    diffs = {}
    for name in a.columns:
        x, y = np.asarray(a.columns[name]), np.asarray(b.columns[name])
        if x.shape != y.shape:
            raise SchemaError(f"column {name!r} has lengths {x.size} and {y.size}")
        diffs[name] = float(np.max(np.abs(x - y), initial=0.0))
    worst = max(diffs.values(), default=0.0)
    return {"max_abs_diff": diffs, "worst": worst,
            "passed": None if tol is None else worst <= tol}
