"""Command-line interface.

Subcommands: verify (run a configured suite), radius (one matrix), chain
(one chain on one matrix), hh-demo (scalar midpoint/integral/endpoint
triple), tightness (recompute summary statistics from a CSV).
Exit status: 0 clean, 1 when verify finds violations, 2 on usage or config
errors.
"""

import argparse
import json
import math
import sys

from .chains import CHAIN_IDS, ChainResult, tightness_report
from .core import load_matrix, matrix_from_json_dict
from .errors import ConfigError, RadiuslabError
from .funcalc import hh_scalar, parse_function, power
from .harness import (
    ExperimentConfig,
    _rect_from_payload,
    read_csv,
    run_suite,
    standard_config,
)
from .maps import IdentityMap, Pinching, TraceState, Transpose, map_from_config
from .numrange import numerical_radius
from .spectral import operator_norm
from . import chains as chains_mod


def _parse_map(text, n):
    if text is None or text == "random":
        return "random" if text == "random" else None
    if text.startswith("@"):
        with open(text[1:]) as fh:
            return map_from_config(json.load(fh))
    if text.startswith("{"):
        return map_from_config(json.loads(text))
    name, _, args = text.partition(":")
    if name == "identity":
        return IdentityMap(n)
    if name == "trace_state":
        return TraceState(n)
    if name == "transpose":
        return Transpose(n)
    if name == "pinch":
        return Pinching([int(b) for b in args.split(",")])
    raise ConfigError(f"map: cannot parse {text!r}")


def _cmd_verify(args):
    if args.config:
        cfg = ExperimentConfig.from_file(args.config)
        if args.out_csv:
            cfg.out_csv = args.out_csv
        if args.out_json:
            cfg.out_json = args.out_json
    elif args.chains is None and args.standard:
        cfg = standard_config(out_csv=args.out_csv, out_json=args.out_json)
        if args.seed is not None:
            cfg.seed = args.seed
    else:
        if not args.chains:
            raise ConfigError("chains: pass --chains or --standard or --config")
        fn = parse_function(args.function) if args.function else power(args.r or 2)
        dims = [int(x) for x in (args.dims or "2,3,4").split(",")]
        cfg = ExperimentConfig(
            chains=[c.strip().upper() for c in args.chains.split(",")],
            dims=dims,
            samples=args.samples,
            seed=args.seed if args.seed is not None else 0,
            ensembles=(args.ensemble or "ginibre").split(","),
            function=fn,
            map_spec=_parse_map(args.map, dims[0]) or "random",
            tol_scale=args.tol_scale,
            out_csv=args.out_csv,
            out_json=args.out_json,
        )
    report = run_suite(cfg)
    for cid, summary in sorted(report.tightness.items()):
        flag = "ok" if summary["holds_all"] else "VIOLATED"
        print(f"{cid}: {summary['samples']} samples {flag}")
    print(
        f"total rows {len(report.rows)}, violations {report.n_violations}, "
        f"wall time {report.wall_time_s:.2f}s, backend {report.backend}"
    )
    return 1 if report.violations else 0


def _cmd_radius(args):
    a = load_matrix(args.matrix)
    res = numerical_radius(a, grid_n=args.grid_n)
    print(f"w = {res.value!r}")
    print(f"norm = {operator_norm(a)!r}")
    print(f"theta_star = {res.theta_star!r}")
    print(f"certified_error = {res.certified_error!r}")
    print(f"refine_width = {res.refine_width!r}")
    return 0


def _cmd_chain(args):
    chain_id = args.id.upper()
    if chain_id not in CHAIN_IDS:
        raise ConfigError(f"chain: unknown id {args.id!r}; expected {CHAIN_IDS}")
    fn = parse_function(args.function) if args.function else power(2)
    a = load_matrix(args.matrix)
    n = a.shape[0]
    if chain_id == "EQUIV":
        res = chains_mod.chain_equiv(a, args.tol_scale)
    elif chain_id == "KITTANEH":
        res = chains_mod.chain_kittaneh(a, args.tol_scale)
    elif chain_id == "THM_MAIN":
        res = chains_mod.chain_thm_main(a, fn, args.tol_scale)
    elif chain_id == "COR_POWER_R":
        res = chains_mod.chain_power_r(a, args.r or fn.params[0], args.tol_scale)
    elif chain_id in ("THM_PHI_SUP", "PROP_PHI_OPCONVEX"):
        phi = _parse_map(args.map, n)
        if phi in (None, "random"):
            phi = IdentityMap(n)
        if chain_id == "THM_PHI_SUP":
            res = chains_mod.chain_thm_phi_sup(a, fn, phi, args.tol_scale)
        else:
            res = chains_mod.chain_prop_phi_opconvex(a, fn, phi, args.tol_scale)
    elif chain_id in ("TWO_OP_SUP", "TWO_OP_OPCONVEX"):
        if not args.matrix_b:
            raise ConfigError("chain: two-operator chains need --matrix-b")
        b = load_matrix(args.matrix_b)
        if chain_id == "TWO_OP_SUP":
            res = chains_mod.chain_two_op_sup(a, b, fn, args.tol_scale)
        else:
            res = chains_mod.chain_two_op_opconvex(a, b, fn, args.tol_scale)
    else:
        if not args.items:
            raise ConfigError("chain: multi-operator chains need --items file")
        with open(args.items) as fh:
            payload = json.load(fh)
        items = [
            (_rect_from_payload(item["p"]), matrix_from_json_dict(item["a"]))
            for item in payload
        ]
        res = chains_mod.chain_multi_op(
            items, fn, chain_id == "MULTI_OP_NORMAL", args.tol_scale
        )
    print(json.dumps(res.as_dict(), indent=2))
    return 0 if res.holds else 1


def _cmd_hh_demo(args):
    fn = parse_function(args.function)
    mid, integral, endavg = hh_scalar(fn, args.a, args.b)
    print(f"{mid!r}, {integral!r}, {endavg!r}")
    return 0


def _cmd_tightness(args):
    rows = read_csv(args.csv)
    if not rows:
        raise ConfigError("csv: no rows to summarize")
    grouped = {}
    for row in rows:
        terms = [float(row[k]) for k in ("term1", "term2", "term3") if row[k]]
        margins = [float(row[k]) for k in ("margin1", "margin2") if row[k]]
        bracket = None
        if row["sup_lower"]:
            bracket = (float(row["sup_lower"]), float(row["sup_upper"]))
        tightness = tuple(
            (t / u) if u != 0.0 else (1.0 if t == 0.0 else math.inf)
            for t, u in zip(terms, terms[1:])
        )
        res = ChainResult(
            chain_id=row["chain_id"],
            terms=tuple(terms),
            margins=tuple(margins),
            holds=row["holds"] == "true",
            tightness=tightness,
            tol_used=float(row["tol"]),
            sup_bracket=bracket,
            sufficient_left=(row["sufficient_left"] == "true")
            if row["sufficient_left"]
            else None,
        )
        grouped.setdefault(row["chain_id"], []).append(res)
    summary = {cid: tightness_report(res) for cid, res in sorted(grouped.items())}
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="radiuslab",
        description="Numerical checks for radius/norm inequality chains",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run an experiment suite")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--standard", action="store_true", help="standard profile")
    p.add_argument("--chains", help="comma-separated chain ids")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--dims", help="comma-separated dimensions")
    p.add_argument("--samples", type=int, default=25)
    p.add_argument("--ensemble", help="comma-separated ensembles")
    p.add_argument("--function", help="e.g. power:2, exp_minus_one")
    p.add_argument("--r", type=float, help="shorthand for --function power:R")
    p.add_argument("--map", help="random | identity | trace_state | transpose | pinch:a,b | @file | JSON")
    p.add_argument("--tol-scale", dest="tol_scale", type=float, default=1e-9)
    p.add_argument("--out-csv", dest="out_csv")
    p.add_argument("--out-json", dest="out_json")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("radius", help="numerical radius of one matrix")
    p.add_argument("matrix", help="matrix JSON file")
    p.add_argument("--grid-n", dest="grid_n", type=int, default=256)
    p.set_defaults(func=_cmd_radius)

    p = sub.add_parser("chain", help="evaluate one chain on one matrix")
    p.add_argument("id", help="chain id, e.g. KITTANEH")
    p.add_argument("matrix", help="matrix JSON file")
    p.add_argument("--function")
    p.add_argument("--r", type=float)
    p.add_argument("--map")
    p.add_argument("--matrix-b", dest="matrix_b")
    p.add_argument("--items", help="JSON file with [{p, a}, ...] payloads")
    p.add_argument("--tol-scale", dest="tol_scale", type=float, default=1e-9)
    p.set_defaults(func=_cmd_chain)

    p = sub.add_parser("hh-demo", help="scalar Hermite-Hadamard triple")
    p.add_argument("--function", required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.set_defaults(func=_cmd_hh_demo)

    p = sub.add_parser("tightness", help="recompute summary from a results CSV")
    p.add_argument("csv")
    p.set_defaults(func=_cmd_tightness)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RadiuslabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
