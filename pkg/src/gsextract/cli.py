"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 no accepted runs at any grid point.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from importlib import resources

import jsonschema

from . import statevector as sv
from .experiment import (
    EmptyEstimateError,
    ExtractionProtocol,
    ResultRow,
    estimate,
    fidelity_curve,
    rows_to_csv,
    rows_to_json,
    susceptibility,
    susceptibility_first_order,
    susceptibility_quadrature,
)
from .graphs import FamilySpec, build_family
from .noise import CorrelatedPhase, model_from_dict, with_strength
from .stabilizer import Postselect

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_CONFIG = 2
EXIT_EMPTY = 3


class ConfigError(ValueError):
    pass


def load_schema() -> dict:
    text = resources.files("gsextract").joinpath("schema/config.schema.json").read_text()
    return json.loads(text)


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    try:
        jsonschema.validate(cfg, load_schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {where}: {exc.message}") from exc
    return cfg


def _family(d: dict, n: int | None = None) -> FamilySpec:
    n = d.get("n") if n is None else n
    if n is None:
        raise ConfigError("family needs 'n'")
    try:
        return FamilySpec(d["kind"], int(n), int(d.get("arms", 3)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _protocol(spec: FamilySpec, postselect) -> ExtractionProtocol:
    try:
        return ExtractionProtocol(spec, Postselect.parse(postselect or "checks"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _noise(cfg: dict):
    try:
        return model_from_dict(cfg["noise"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _grid_models(cfg: dict, model):
    grid = cfg.get("grid")
    if grid is None:
        return None
    if "sigma" in grid:
        if not isinstance(model, CorrelatedPhase):
            raise ConfigError("a sigma grid needs correlated_phase noise")
        return [CorrelatedPhase(s) for s in grid["sigma"]]
    out = []
    for p in grid["p"]:
        try:
            out.append(CorrelatedPhase(0.0) if isinstance(model, CorrelatedPhase) and p == 0 else with_strength(model, p))
        except ValueError as exc:
            raise ConfigError(f"grid value {p}: {exc}") from exc
    return out


def _write(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render(rows, fmt: str) -> str:
    return rows_to_json(rows) if fmt == "json" else rows_to_csv(rows)


def cmd_families(args) -> int:
    try:
        g = build_family(FamilySpec(args.kind, args.n, args.arms))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _write(g.to_json(indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
        model = _noise(cfg)
        if "experiments" in cfg:
            entries = cfg["experiments"]
        elif "family" in cfg:
            entries = [{"family": cfg["family"], "postselect": cfg.get("postselect")}]
        else:
            raise ConfigError("config needs 'family' or 'experiments'")
        protos = [_protocol(_family(e["family"]), e.get("postselect") or cfg.get("postselect")) for e in entries]
        models = _grid_models(cfg, model)
        method = cfg.get("method", "auto")
        if method == "first_order":
            raise ConfigError("first_order is a susceptibility method")
        if method == "quadrature" and not isinstance(model, CorrelatedPhase):
            raise ConfigError("quadrature needs correlated_phase noise")
        if "max_qubits" in cfg:
            sv.DEFAULT_CAP = int(cfg["max_qubits"])
        if isinstance(model, CorrelatedPhase):
            for proto in protos:
                if proto.graph.n > sv.DEFAULT_CAP:
                    raise ConfigError(f"{proto.label()} has {proto.graph.n} qubits, above the cap {sv.DEFAULT_CAP}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    n_samples = int(cfg.get("n_samples", 10_000))
    rows = []
    for proto in protos:
        if models is None:
            results = [(model, estimate(proto, model, n_samples, args.seed, args.threads, method))]
        elif "p" in cfg["grid"] and not isinstance(model, CorrelatedPhase):
            curve = fidelity_curve(proto, model, cfg["grid"]["p"], n_samples, args.seed, args.threads, method)
            results = list(zip(models, (r for _, r in curve)))
        else:
            results = [(m, estimate(proto, m, n_samples, args.seed, args.threads, method)) for m in models]
        rows.extend(ResultRow.build(proto, m, r, args.seed) for m, r in results)
    _write(_render(rows, args.format), args.out)
    if all(r.accepted == 0 for r in rows):
        print("error: no accepted runs at any grid point", file=sys.stderr)
        return EXIT_EMPTY
    return EXIT_OK


def cmd_suscept(args) -> int:
    try:
        cfg = load_config(args.config)
        model = _noise(cfg)
        if "family" not in cfg:
            raise ConfigError("suscept needs 'family'")
        fam = cfg["family"]
        n_values = cfg.get("n_values") or ([fam["n"]] if "n" in fam else None)
        if not n_values:
            raise ConfigError("suscept needs 'n_values' or family.n")
        protos = [_protocol(_family(fam, n), cfg.get("postselect")) for n in n_values]
        p_star = float(cfg.get("p_star", 1e-2))
        method = cfg.get("method", "auto")
        if method == "auto":
            method = "quadrature" if isinstance(model, CorrelatedPhase) else "first_order"
        if method == "first_order" and isinstance(model, CorrelatedPhase):
            raise ConfigError("first_order does not apply to correlated_phase noise")
        if method == "quadrature" and not isinstance(model, CorrelatedPhase):
            raise ConfigError("quadrature needs correlated_phase noise")
        if method == "exact":
            raise ConfigError("use first_order for exact susceptibilities")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    n_samples = int(cfg.get("n_samples", 100_000))
    rows = []
    for proto in protos:
        star = with_strength(model, p_star)
        try:
            if method == "first_order":
                res = susceptibility_first_order(proto, model)
            elif method == "quadrature":
                res = susceptibility_quadrature(proto, p_star)
            else:
                res = susceptibility(proto, model, p_star, n_samples, args.seed, args.threads)
        except EmptyEstimateError:
            rows.append(ResultRow.build(proto, star, None, args.seed, float("nan"), method))
            continue
        fid = 1 - res.alpha * p_star if method != "first_order" else float("nan")
        row = ResultRow.build(proto, star, None, args.seed, res.alpha, res.method.value)
        row.mean_fidelity = fid
        row.stderr = res.stderr
        if method == "montecarlo":
            row.samples = row.accepted = n_samples
        rows.append(row)
    _write(_render(rows, args.format), args.out)
    if all(r.alpha is None or math.isnan(r.alpha) for r in rows):
        return EXIT_EMPTY
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_all

    results = run_all()
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: {r.detail}")
        if r.name.startswith("square") and args.verbose:
            for eps, branch, key, got, exp, c2_got, c2, ok in r.rows:
                print(f"    eps={eps:<5} {branch} {key:>4}  got {got:+.8f}  expected {exp:+.8f}"
                      f"  eps^2 coeff {c2_got:+.4f} vs {c2:+.4f}  {'ok' if ok else 'FAIL'}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gsextract", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("families", help="print a template graph as JSON")
    f.add_argument("--kind", required=True)
    f.add_argument("--n", type=int, required=True)
    f.add_argument("--arms", type=int, default=3)
    f.add_argument("--out")
    f.set_defaults(func=cmd_families)

    for name, func, helptext in (
        ("run", cmd_run, "mean fidelity for one point or a noise grid"),
        ("suscept", cmd_suscept, "fidelity susceptibility over template lengths"),
    ):
        r = sub.add_parser(name, help=helptext)
        r.add_argument("--config", required=True)
        r.add_argument("--seed", type=int, required=True)
        r.add_argument("--threads", type=int, default=1)
        r.add_argument("--out")
        r.add_argument("--format", choices=("csv", "json"), default="csv")
        r.set_defaults(func=func)

    v = sub.add_parser("verify", help="run the built-in oracle checks")
    v.add_argument("--verbose", "-v", action="store_true")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    if getattr(args, "seed", 0) is not None and getattr(args, "seed", 0) < 0:
        print("error: seed must be non-negative", file=sys.stderr)
        return EXIT_CONFIG
    if getattr(args, "threads", 1) < 1:
        print("error: threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
