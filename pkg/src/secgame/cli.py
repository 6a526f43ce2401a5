"""Command-line surface: parameter sweeps emitting plot-ready CSV/JSON.

Subcommands
-----------
invest       optimal investment x*(v) over a vulnerability grid
             (CSV ``v,x_star``; ``--check-1e`` appends ratio and verdict)
epidemic     mean-field curves over a gamma grid (CSV ``gamma,y,p0,p1,h,g``)
equilibrium  equilibrium correspondence, optionally swept over the cost c
             (CSV ``c,gamma_star_low,gamma_star_mid,gamma_star_high,
             stable_flags,critical_mass``)
welfare      planner vs market outcome per cost
             (CSV ``c,gamma_market,gamma_social,W_market,W_social,loss``)
simulate     Monte-Carlo percolation estimates (JSON record or CSV row)

Every key can live in a JSON config document (``--config FILE``, with a
``command`` discriminator) and be overridden by the flag of the same name;
unknown keys are rejected. Output goes to stdout or ``--out`` and starts
with ``# secgame <command> <version> <config_hash>`` so identical configs
are byte-identifiable. Exit codes: 0 ok, 2 config error, 3 numerical
failure, 4 internal-consistency violation.

Degree laws are spelled ``poisson:LAM``, ``fixed:D``, or ``empirical:FILE``
(CSV rows ``degree,prob``); type distributions ``uniform``, ``power:K``,
``homogeneous:ELL``, or ``plinear:FILE`` (CSV knot rows ``ell,F``).
Portfolio items load from CSV per ``breach_models.load_portfolio_csv``:
either ``cost,s`` constant rows, or a ``cost,s_at_v0,...`` header, a
``vgrid`` row, and one tabulated row per item.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys

from . import __version__
from .breach_models import GordonLoeb, Portfolio, Rational, load_portfolio_csv
from .investment import AgentProblem, check_one_over_e, solve
from .epidemic import Empirical, EpidemicModel, Fixed, Poisson, curve
from .equilibrium import (
    GameSpec,
    Homogeneous,
    PiecewiseLinearCDF,
    Power,
    Uniform01,
    find_equilibria,
    social_optimum,
)
from .errors import ConsistencyError, ConvergenceError, InputError
from .simulate import (
    ConfigurationModel,
    ErdosRenyi,
    SimConfig,
    result_record,
    run as run_simulation,
)

# key -> (type, default); None default means "not set"
_EPI_KEYS = {
    "lam": (float, None),
    "degree": (str, None),
    "p": (float, None),
    "q": (float, None),
    "q_plus": (float, None),
}
_GAME_KEYS = {
    **_EPI_KEYS,
    "types": (str, "uniform"),
    "cost": (float, None),
    "sweep_c": (str, None),
    "grid_n": (int, 201),
}
SCHEMAS = {
    "invest": {
        "family": (str, None),
        "alpha": (float, None),
        "a": (float, None),
        "b": (float, None),
        "loss": (float, None),
        "v_grid": (str, "0:1:0.01"),
        "check_1e": (bool, False),
        "portfolio": (str, None),
        "relaxed": (bool, False),
    },
    "epidemic": {**_EPI_KEYS, "gamma_grid": (str, "0:1:0.005")},
    "equilibrium": dict(_GAME_KEYS),
    "welfare": {**_GAME_KEYS, "market": (str, "largest")},
    "simulate": {
        **_EPI_KEYS,
        "n": (int, None),
        "graph": (str, "er"),
        "gamma": (float, None),
        "replications": (int, None),
        "seed": (int, 0),
        "one_hop": (bool, False),
        "format": (str, "json"),
    },
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="secgame", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for command, schema in SCHEMAS.items():
        p = sub.add_parser(command)
        p.add_argument("--config", help="JSON config document")
        p.add_argument("--out", help="write data rows to this file instead of stdout")
        for key, (typ, _default) in schema.items():
            flag = "--" + key.replace("_", "-")
            if typ is bool:
                p.add_argument(flag, action="store_true", default=False)
            else:
                p.add_argument(flag, type=typ, default=None)
    return parser


def _resolve_config(command: str, args: argparse.Namespace) -> dict:
    schema = SCHEMAS[command]
    doc: dict = {}
    if args.config:
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config file: {exc}")
        if not isinstance(loaded, dict):
            raise InputError("config document must be a JSON object")
        file_command = loaded.pop("command", command)
        if file_command != command:
            raise InputError(
                f"config file is for command {file_command!r}, invoked {command!r}"
            )
        for key, value in loaded.items():
            if key not in schema:
                raise InputError(f"unknown config key {key!r} for command {command!r}")
            typ = schema[key][0]
            try:
                doc[key] = typ(value) if value is not None else None
            except (TypeError, ValueError):
                raise InputError(f"config key {key!r} is not a valid {typ.__name__}")
    for key, (typ, default) in schema.items():
        flag_value = getattr(args, key)
        if typ is bool:
            if flag_value:
                doc[key] = True
        elif flag_value is not None:
            doc[key] = flag_value
        doc.setdefault(key, default)
    return doc


def _config_hash(command: str, doc: dict) -> str:
    payload = json.dumps({"command": command, **doc}, sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:12]


def _parse_grid(text: str) -> list[float]:
    try:
        lo, hi, step = (float(t) for t in text.split(":"))
    except ValueError:
        raise InputError(f"grid must be 'lo:hi:step', got {text!r}")
    if step <= 0 or hi < lo:
        raise InputError(f"bad grid bounds {text!r}")
    count = int(round((hi - lo) / step))
    values = [lo + k * step for k in range(count + 1)]
    if values[-1] > hi + 1e-12:
        values.pop()
    return values


def _require(doc: dict, *keys):
    for key in keys:
        if doc.get(key) is None:
            raise InputError(f"missing required key {key!r}")


def _degree_from(doc: dict):
    if doc.get("degree"):
        spec = doc["degree"]
        kind, _, arg = spec.partition(":")
        if kind == "poisson":
            return Poisson(lam=float(arg))
        if kind == "fixed":
            return Fixed(d=int(arg))
        if kind == "empirical":
            with open(arg, newline="") as fh:
                pmf = [(int(r[0]), float(r[1])) for r in csv.reader(fh) if r]
            return Empirical(pmf=tuple(pmf))
        raise InputError(f"unknown degree law {spec!r}")
    _require(doc, "lam")
    return Poisson(lam=doc["lam"])


def _epidemic_from(doc: dict) -> EpidemicModel:
    _require(doc, "p", "q", "q_plus")
    return EpidemicModel(p=doc["p"], q=doc["q"], q_plus=doc["q_plus"],
                         degree=_degree_from(doc))


def _types_from(doc: dict):
    spec = doc.get("types") or "uniform"
    kind, _, arg = spec.partition(":")
    if kind == "uniform":
        return Uniform01()
    if kind == "power":
        return Power(k=float(arg))
    if kind == "homogeneous":
        return Homogeneous(ell=float(arg))
    if kind == "plinear":
        with open(arg, newline="") as fh:
            knots = [(float(r[0]), float(r[1])) for r in csv.reader(fh) if r]
        return PiecewiseLinearCDF(knots=tuple(knots))
    raise InputError(f"unknown type distribution {spec!r}")


def _costs_from(doc: dict) -> list[float]:
    if doc.get("sweep_c"):
        return _parse_grid(doc["sweep_c"])
    _require(doc, "cost")
    return [doc["cost"]]


def _fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return format(x, ".12g")
    return str(x)


class _Writer:
    """Line writer that flushes per row so partial sweeps survive errors."""

    def __init__(self, out_path):
        self._own = out_path is not None
        self.fh = open(out_path, "w") if out_path else sys.stdout

    def row(self, *cells):
        self.fh.write(",".join(_fmt(c) for c in cells) + "\n")
        self.fh.flush()

    def line(self, text):
        self.fh.write(text + "\n")
        self.fh.flush()

    def close(self):
        if self._own:
            self.fh.close()


def _header(writer: _Writer, command: str, doc: dict):
    writer.line(f"# secgame {command} {__version__} {_config_hash(command, doc)}")


def _cmd_invest(doc: dict, writer: _Writer) -> int:
    family = doc.get("family")
    if family == "gl":
        _require(doc, "alpha", "loss")
        model = GordonLoeb(alpha=doc["alpha"])
    elif family == "rational":
        _require(doc, "a", "b", "loss")
        model = Rational(a=doc["a"], b=doc["b"])
    elif family == "portfolio":
        _require(doc, "portfolio", "loss")
        items = load_portfolio_csv(doc["portfolio"])
        model = Portfolio(items=tuple(items), relaxed=doc["relaxed"])
    else:
        raise InputError(f"family must be gl, rational, or portfolio, got {family!r}")
    vs = _parse_grid(doc["v_grid"])
    _header(writer, "invest", doc)
    if doc["check_1e"]:
        writer.line("v,x_star,ratio,bound_holds")
    else:
        writer.line("v,x_star")
    for v in vs:
        problem = AgentProblem(model=model, loss=doc["loss"], vulnerability=v)
        sol = solve(problem)
        if doc["check_1e"]:
            holds, ratio = check_one_over_e(problem)
            writer.row(v, sol.x_star, ratio, holds)
        else:
            writer.row(v, sol.x_star)
    return 0


def _cmd_epidemic(doc: dict, writer: _Writer) -> int:
    model = _epidemic_from(doc)
    gammas = _parse_grid(doc["gamma_grid"])
    _header(writer, "epidemic", doc)
    writer.line("gamma,y,p0,p1,h,g")
    for pt in curve(model, gammas):
        writer.row(pt.gamma, pt.y, pt.p0, pt.p1, pt.h, pt.g)
    return 0


def _cmd_equilibrium(doc: dict, writer: _Writer) -> int:
    model = _epidemic_from(doc)
    types = _types_from(doc)
    costs = _costs_from(doc)
    _header(writer, "equilibrium", doc)
    writer.line("c,gamma_star_low,gamma_star_mid,gamma_star_high,stable_flags,critical_mass")
    for c in costs:
        report = find_equilibria(GameSpec(epidemic=model, types=types, cost=c),
                                 grid_n=doc["grid_n"])
        for warning in report.warnings:
            print(f"warning (c={c:g}): {warning}", file=sys.stderr)
        eqs = report.equilibria
        low = eqs[0].gamma_star if eqs else None
        high = eqs[-1].gamma_star if len(eqs) >= 2 else None
        mid = eqs[1].gamma_star if len(eqs) == 3 else None
        flags = "".join("1" if e.stable else "0" for e in eqs)
        writer.row(c, low, mid, high, flags, report.critical_mass)
    return 0


def _cmd_welfare(doc: dict, writer: _Writer) -> int:
    model = _epidemic_from(doc)
    types = _types_from(doc)
    costs = _costs_from(doc)
    _header(writer, "welfare", doc)
    writer.line("c,gamma_market,gamma_social,W_market,W_social,loss")
    for c in costs:
        rep = social_optimum(GameSpec(epidemic=model, types=types, cost=c),
                             grid_n=max(doc["grid_n"], 201), market=doc["market"])
        writer.row(c, rep.gamma_market, rep.gamma_social, rep.W_market,
                   rep.W_social, rep.efficiency_loss)
    return 0


def _cmd_simulate(doc: dict, writer: _Writer) -> int:
    _require(doc, "n", "gamma", "replications")
    model = _epidemic_from(doc)
    if doc["graph"] == "er":
        _require(doc, "lam")
        graph = ErdosRenyi(lam=doc["lam"])
    elif doc["graph"] == "config":
        graph = ConfigurationModel(degree=_degree_from(doc))
    else:
        raise InputError(f"graph must be 'er' or 'config', got {doc['graph']!r}")
    config = SimConfig(
        n=doc["n"],
        graph=graph,
        epidemic=model,
        gamma=doc["gamma"],
        replications=doc["replications"],
        seed=doc["seed"],
        one_hop=doc["one_hop"],
    )
    result = run_simulation(config)
    record = result_record(config, result)
    if doc["format"] == "json":
        writer.line(json.dumps(record, sort_keys=True))
    elif doc["format"] == "csv":
        _header(writer, "simulate", doc)
        keys = ["config_hash", "gamma", "p0_hat", "p1_hat", "stderr0", "stderr1",
                "n", "replications"]
        writer.line(",".join(keys))
        writer.row(*(record[k] for k in keys))
    else:
        raise InputError(f"format must be 'json' or 'csv', got {doc['format']!r}")
    return 0


_HANDLERS = {
    "invest": _cmd_invest,
    "epidemic": _cmd_epidemic,
    "equilibrium": _cmd_equilibrium,
    "welfare": _cmd_welfare,
    "simulate": _cmd_simulate,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the diagnostic
        return int(exc.code or 0)
    writer = None
    try:
        doc = _resolve_config(args.command, args)
        writer = _Writer(args.out)
        return _HANDLERS[args.command](doc, writer)
    except InputError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except ConsistencyError as exc:
        print(f"internal consistency violation: {exc}", file=sys.stderr)
        return 4
    finally:
        if writer is not None:
            writer.close()


if __name__ == "__main__":
    raise SystemExit(main())
