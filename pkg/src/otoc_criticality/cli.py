"""Batch command-line front end.

    otoc-criticality <trace|scan|scaling|order-param|size-fit|cutoff-study>
                     [--config FILE] [--key value ...]

Configuration is a flat ``key = value`` text file (UTF-8, # comments);
every key can be overridden by a ``--key value`` flag, with precedence
flags > file > defaults. The resolved configuration is echoed into every
output file. Exit codes: 0 success, 2 configuration error, 3 numerical
error, 4 unresolved extremum.

``threads`` (default from the OTOC_THREADS environment variable) sizes the
worker pool; it is an execution detail, excluded from CSV metadata so that
output files are bit-identical across thread counts.
"""

from __future__ import annotations

import dataclasses
import os
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import analysis, correlators, dynamics, models
from .analysis import CouplingGrid, uniform_grid
from .correlators import TimeGrid
from .errors import (
    FitDomainError,
    NumericalError,
    OtocError,
    ParameterError,
    UnresolvedExtremumError,
)
from .models import ModelParams
from .output import format_value, write_csv, write_envelope

COMMANDS = ("trace", "scan", "scaling", "order-param", "size-fit", "cutoff-study")
KINDS = {
    "otoc-inf": "otoc_inf_temp",
    "otoc-thermal": "otoc_thermal",
    "otoc-eq": "otoc_equilibrium",
    "tpc": "tpc_inf_temp",
}
_ETA_DEFAULT = ",".join(str(2**k) for k in range(11, 21))


@dataclass(frozen=True)
class RunConfig:
    """Resolved run configuration; every field has a default."""

    command: str = "scan"
    model: str = "rabi"
    omega0: float = 1.0
    Omega: float = 0.0  # 0 means "derive from eta"
    eta: float = 1048576.0
    N: int = 1
    n: int = 80
    ratio: float = 1.0
    ratio_min: float = 0.5
    ratio_max: float = 1.5
    ratio_step: float = 0.01
    fine_step: float = 0.002
    fine_window: float = 0.03
    refine: bool = True
    kind: str = "otoc-inf"
    beta: float = 0.0
    beta_list: str = ""
    t_start: float = 0.0
    t_end: float = 500.0
    dt: float = 0.1
    normalize: bool = True
    fit_window: str = ""
    eta_list: str = _ETA_DEFAULT
    gamma_list: str = "131072,262144,524288,1048576"
    N_list: str = "1,2,3"
    size_N_list: str = "1,2,3,4,5,6"
    ratio_list: str = "0.9,1.0,1.1"
    n_list: str = "20,40,60,80,100"
    t_probes: str = "0,50"
    rescale: bool = False
    synthetic: str = ""
    output: str = "out"
    threads: int = 0


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key: str, raw: str):
    kind = _FIELD_TYPES[key]
    raw = raw.strip()
    if kind == "bool":
        if raw.lower() in ("true", "1", "yes"):
            return True
        if raw.lower() in ("false", "0", "no"):
            return False
        raise ParameterError(f"config key '{key}': expected a boolean, got {raw!r}")
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
    except ValueError as exc:
        raise ParameterError(f"config key '{key}': {exc}") from exc
    return raw


def parse_config_file(path: str | Path) -> dict:
    values = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, raw = line.partition("=")
        key = key.strip()
        if not sep:
            raise ParameterError(f"{path}:{lineno}: expected 'key = value'")
        if key not in _FIELD_TYPES:
            raise ParameterError(f"{path}:{lineno}: unknown config key '{key}'")
        values[key] = _coerce(key, raw)
    return values


def parse_args(argv: list[str]) -> RunConfig:
    if not argv:
        raise ParameterError(
            f"usage: otoc-criticality <{'|'.join(COMMANDS)}> [--config FILE] [--key value ...]"
        )
    command = argv[0]
    if command in ("-h", "--help"):
        print(__doc__)
        raise SystemExit(0)
    if command not in COMMANDS:
        raise ParameterError(f"unknown command '{command}' (choose from {COMMANDS})")
    file_values: dict = {}
    flag_values: dict = {}
    i = 1
    while i < len(argv):
        arg = argv[i]
        if not arg.startswith("--"):
            raise ParameterError(f"expected a --key flag, got '{arg}'")
        key = arg[2:].replace("-", "_")
        if i + 1 >= len(argv):
            raise ParameterError(f"flag '{arg}' is missing a value")
        value = argv[i + 1]
        i += 2
        if key == "config":
            file_values = parse_config_file(value)
        elif key in _FIELD_TYPES:
            flag_values[key] = _coerce(key, value)
        else:
            raise ParameterError(f"unknown config key '{key}'")
    merged = {**file_values, **flag_values, "command": command}
    return RunConfig(**merged)


def config_dict(cfg: RunConfig) -> dict:
    return dataclasses.asdict(cfg)


def config_meta(cfg: RunConfig) -> dict:
    """Config echo for CSV headers (threads excluded, see module docstring)."""
    d = config_dict(cfg)
    d.pop("threads")
    return d


def config_from_echo(meta: dict[str, str]) -> RunConfig:
    """Rebuild a RunConfig from CSV header metadata (round-trip check)."""
    values = {k: (_coerce(k, v) if k != "command" else v)
              for k, v in meta.items() if k in _FIELD_TYPES or k == "command"}
    return RunConfig(**values)


# ---------------------------------------------------------------------------
# helpers

def _threads(cfg: RunConfig) -> int:
    if cfg.threads > 0:
        return cfg.threads
    env = os.environ.get("OTOC_THREADS", "")
    return int(env) if env.isdigit() and int(env) > 0 else 1


def _float_list(raw: str, key: str) -> list[float]:
    try:
        return [float(x) for x in raw.split(",") if x.strip() != ""]
    except ValueError as exc:
        raise ParameterError(f"config key '{key}': {exc}") from exc


def _int_list(raw: str, key: str) -> list[int]:
    return [int(x) for x in _float_list(raw, key)]


def _model_params(cfg: RunConfig, eta: float | None = None,
                  N: int | None = None, n: int | None = None) -> ModelParams:
    N = cfg.N if N is None else N
    if cfg.model == "rabi" and N != 1:
        raise ParameterError(f"model 'rabi' requires N = 1, got N = {N}")
    if cfg.model not in ("rabi", "dicke"):
        raise ParameterError(f"unknown model '{cfg.model}'")
    eta = cfg.eta if eta is None else eta
    Omega = cfg.Omega if cfg.Omega > 0 else eta * cfg.omega0
    return ModelParams(omega0=cfg.omega0, Omega=Omega, g=0.0,
                       n=cfg.n if n is None else n, N=N)


def _time_grid(cfg: RunConfig) -> TimeGrid:
    return TimeGrid(t_start=cfg.t_start, t_end=cfg.t_end, dt=cfg.dt)


def _coupling_grid(cfg: RunConfig) -> CouplingGrid:
    grid = uniform_grid(cfg.ratio_min, cfg.ratio_max, cfg.ratio_step)
    if len(grid) < 3:
        raise ParameterError(
            f"scan grid needs at least 3 points, got {len(grid)} "
            f"(ratio_min/ratio_max/ratio_step)"
        )
    return grid


def _kind(cfg: RunConfig) -> str:
    if cfg.kind not in KINDS:
        raise ParameterError(f"unknown kind '{cfg.kind}' (choose from {sorted(KINDS)})")
    return KINDS[cfg.kind]


def _out(cfg: RunConfig) -> Path:
    return Path(cfg.output)


# ---------------------------------------------------------------------------
# commands

def cmd_trace(cfg: RunConfig) -> int:
    params = _model_params(cfg).at_ratio(cfg.ratio)
    tgrid = _time_grid(cfg)
    kind = _kind(cfg)
    W = models.order_parameter_operator(params.n, params.N)
    H = models.build_dicke(params)
    frame = dynamics.prepare_frame(H, W, W)
    if kind == "otoc_inf_temp":
        series = correlators.otoc_infinite_temperature(frame, tgrid, cfg.normalize)
    elif kind == "otoc_thermal":
        weights = dynamics.thermal_weights(frame.spectral, cfg.beta)
        series = correlators.otoc_thermal(frame, weights, tgrid, cfg.normalize)
    elif kind == "otoc_equilibrium":
        psi_eig = np.zeros(frame.dim, dtype=np.complex128)
        psi_eig[0] = 1.0  # ground state expressed in the eigenbasis
        series = correlators.otoc_equilibrium(frame, psi_eig, tgrid, normalize=False)
    else:
        series = correlators.tpc_infinite_temperature(frame, tgrid, cfg.normalize)
    t = tgrid.times()
    meta = config_meta(cfg)
    meta["normalization"] = series.normalization
    meta["normalized"] = series.normalized
    write_csv(
        _out(cfg) / f"trace_{cfg.kind}.csv",
        {
            "t": t.tolist(),
            "value_real": np.real(series.values).tolist(),
            "value_imag": np.imag(series.values).tolist(),
        },
        meta,
    )
    if cfg.fit_window:
        lo, _, hi = cfg.fit_window.partition(":")
        fit = correlators.fit_exponential_decay(series, (float(lo), float(hi)))
        write_envelope(
            _out(cfg) / f"trace_{cfg.kind}_fit.json",
            config_dict(cfg),
            {"exp_fit": {"lambda_L": fit.lambda_L, "intercept": fit.intercept,
                         "window": list(fit.window), "r_squared": fit.r_squared}},
        )
    return 0


def _scan_once(cfg: RunConfig, beta: float | None, suffix: str) -> None:
    params = _model_params(cfg)
    grid = _coupling_grid(cfg)
    scan = analysis.scan_otoc(params, grid, kind=_kind(cfg), tgrid=_time_grid(cfg),
                              beta=beta, threads=_threads(cfg))
    meta = config_meta(cfg)
    meta["g_c"] = params.g_c
    meta["scan_beta"] = 0.0 if beta is None else beta
    meta["degenerate_ratios"] = ";".join(
        repr(r) for r in scan.meta["degenerate_ratios"]
    )
    write_csv(_out(cfg) / f"scan{suffix}.csv",
              {"ratio": scan.grid.ratios.tolist(), "value": scan.values.tolist()},
              meta)


def cmd_scan(cfg: RunConfig) -> int:
    betas = _float_list(cfg.beta_list, "beta_list")
    if cfg.kind == "otoc-thermal" and betas:
        for beta in betas:
            _scan_once(cfg, beta, f"_beta{format_value(beta)}")
    else:
        beta = cfg.beta if cfg.kind == "otoc-thermal" else None
        _scan_once(cfg, beta, "")
    return 0


def _synthetic_ratio_m(cfg: RunConfig, member: float) -> float:
    slope, _, intercept = cfg.synthetic.partition(":")
    return 1.0 + 2.0 ** (float(intercept) + float(slope) * np.log2(member))


def cmd_scaling(cfg: RunConfig) -> int:
    tgrid = _time_grid(cfg)
    coarse = (cfg.ratio_min, cfg.ratio_max, cfg.ratio_step)
    members: list[dict] = []
    if cfg.model == "rabi":
        for eta in _float_list(cfg.eta_list, "eta_list"):
            members.append({"member": eta, "eta": eta, "N": 1, "gamma": eta})
    else:
        for N in _int_list(cfg.N_list, "N_list"):
            for gamma in _float_list(cfg.gamma_list, "gamma_list"):
                members.append({"member": gamma, "eta": gamma / N, "N": N,
                                "gamma": gamma})

    rows = {"member": [], "N": [], "eta": [], "ratio_m": [], "value_at_m": []}
    points = []
    for m in members:
        if cfg.synthetic:
            ratio_m, value = _synthetic_ratio_m(cfg, m["member"]), 0.0
        else:
            params = _model_params(cfg, eta=m["eta"], N=m["N"])
            beta = cfg.beta if cfg.kind == "otoc-thermal" else None
            search = analysis.otoc_minimum_search(
                params, kind=_kind(cfg), tgrid=tgrid, beta=beta, coarse=coarse,
                fine_step=cfg.fine_step, fine_window=cfg.fine_window,
                refine=cfg.refine, threads=_threads(cfg))
            if search.location.on_boundary:
                raise UnresolvedExtremumError(
                    f"minimum on grid boundary for member {m['member']} "
                    f"(eta={m['eta']}, N={m['N']}); widen the ratio range"
                )
            ratio_m, value = search.location.ratio_m, search.location.value_at_m
        points.append((m["member"], ratio_m))
        rows["member"].append(m["member"])
        rows["N"].append(m["N"])
        rows["eta"].append(m["eta"])
        rows["ratio_m"].append(ratio_m)
        rows["value_at_m"].append(value)

    try:
        fit = (analysis.fit_scaling_eta(points) if cfg.model == "rabi"
               else analysis.fit_scaling_gamma(points))
    except FitDomainError as exc:
        raise UnresolvedExtremumError(str(exc)) from exc
    meta = config_meta(cfg)
    write_csv(_out(cfg) / "scaling_members.csv", rows, meta)
    write_envelope(
        _out(cfg) / "scaling_fit.json",
        config_dict(cfg),
        {
            "fit": {
                "slope": fit.slope,
                "intercept": fit.intercept,
                "r_squared": fit.r_squared,
                "exponent": -fit.slope,
                "members": rows["member"],
            }
        },
    )
    return 0


def cmd_order_param(cfg: RunConfig) -> int:
    params = _model_params(cfg)
    grid = _coupling_grid(cfg)
    betas = _float_list(cfg.beta_list, "beta_list")
    threads = _threads(cfg)
    runs: list[tuple[float | None, str]] = (
        [(b, f"_beta{format_value(b)}") for b in betas] if betas else [(None, "_ground")]
    )
    maxima = {"beta": [], "T": [], "susceptibility_max_ratio": []}
    for beta, suffix in runs:
        scan = analysis.scan_order_parameter(params, grid, beta=beta,
                                             rescale_by_n=cfg.rescale,
                                             threads=threads)
        meta = config_meta(cfg)
        meta["g_c"] = params.g_c
        meta["state"] = scan.meta["state"]
        write_csv(_out(cfg) / f"order_param{suffix}.csv",
                  {"ratio": scan.grid.ratios.tolist(),
                   "value": scan.values.tolist()}, meta)
        curve = analysis.susceptibility(scan)
        write_csv(_out(cfg) / f"susceptibility{suffix}.csv",
                  {"ratio": curve.grid.ratios.tolist(),
                   "value": curve.values.tolist()}, meta)
        loc = analysis.locate_extremum(curve.grid.ratios, curve.values,
                                       kind="max", refine=cfg.refine)
        maxima["beta"].append(0.0 if beta is None else beta)
        maxima["T"].append(0.0 if not beta else 1.0 / beta)
        maxima["susceptibility_max_ratio"].append(loc.ratio_m)
    write_csv(_out(cfg) / "susceptibility_maxima.csv", maxima, config_meta(cfg))
    return 0


def cmd_size_fit(cfg: RunConfig) -> int:
    if cfg.model != "dicke":
        raise ParameterError("size-fit requires model = dicke")
    tgrid = _time_grid(cfg)
    ratios = _float_list(cfg.ratio_list, "ratio_list")
    N_values = _int_list(cfg.size_N_list, "size_N_list")
    threads = _threads(cfg)
    values = {"ratio": [], "N": [], "one_minus_F": []}
    per_ratio_points: dict[float, list[tuple[float, float]]] = {r: [] for r in ratios}
    for N in N_values:
        params = _model_params(cfg, N=N)
        grid = CouplingGrid(np.array(sorted(ratios)))
        scan = analysis.scan_otoc(params, grid, kind=_kind(cfg), tgrid=tgrid,
                                  threads=threads)
        for r, v in zip(scan.grid.ratios, scan.values):
            one_minus = 1.0 - float(v)
            values["ratio"].append(float(r))
            values["N"].append(N)
            values["one_minus_F"].append(one_minus)
            per_ratio_points[float(r)].append((float(N), one_minus))
    coeffs = {"ratio": [], "a": [], "b": [], "c": [], "residual": []}
    for r in sorted(per_ratio_points):
        fit = analysis.fit_size_law(per_ratio_points[r])
        coeffs["ratio"].append(r)
        coeffs["a"].append(fit.a)
        coeffs["b"].append(fit.b)
        coeffs["c"].append(fit.c)
        coeffs["residual"].append(fit.residual)
    meta = config_meta(cfg)
    write_csv(_out(cfg) / "size_values.csv", values, meta)
    write_csv(_out(cfg) / "size_fit.csv", coeffs, meta)
    return 0


def cmd_cutoff_study(cfg: RunConfig) -> int:
    params = _model_params(cfg)
    table, fits = analysis.cutoff_study(
        params, t_probes=_float_list(cfg.t_probes, "t_probes"),
        n_list=_int_list(cfg.n_list, "n_list"), ratio=cfg.ratio,
        threads=_threads(cfg))
    meta = config_meta(cfg)
    write_csv(_out(cfg) / "cutoff_table.csv", table, meta)
    write_envelope(
        _out(cfg) / "cutoff_fit.json",
        config_dict(cfg),
        {"fits": {format_value(t): {"slope": f.slope, "intercept": f.intercept,
                                    "r_squared": f.r_squared}
                  for t, f in fits.items()}},
    )
    return 0


_DISPATCH = {
    "trace": cmd_trace,
    "scan": cmd_scan,
    "scaling": cmd_scaling,
    "order-param": cmd_order_param,
    "size-fit": cmd_size_fit,
    "cutoff-study": cmd_cutoff_study,
}


def run(argv: list[str]) -> int:
    try:
        cfg = parse_args(argv)
        return _DISPATCH[cfg.command](cfg)
    except UnresolvedExtremumError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OtocError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    raise SystemExit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
