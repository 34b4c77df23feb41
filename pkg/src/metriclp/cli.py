"""Command-line interface.

Subcommands: gen (fixture mappings), distance (D_p between two maps),
quantize (finite-value approximation), continuify (continuous/smooth
relaxation of a simple map), verify (theorem suite).

Exit codes: 0 success / all checks pass; 1 usage error; 2 data or
validation error; 3 verification failure.

Defaults may come from, in increasing precedence: built-ins, the
METRICLP_OUT environment variable (output directory), a --config JSON
file of {flag: value}, explicit flags.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import fields, fileio, quantize, relax, verify
from .domain import Domain
from .errors import MetricLpError
from .maps import MeasurableMap, SimpleMap, dp_distance
from .spaces import Point, make_space

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_VERIFY = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would SystemExit(2); we map usage -> 1
        raise UsageError(message)


def _parse_grid(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    try:
        sizes = [int(p) for p in parts]
    except ValueError as exc:
        raise UsageError(f"bad grid spec {text!r}") from exc
    if not sizes or any(s < 1 for s in sizes):
        raise UsageError(f"bad grid spec {text!r}")
    if len(set(sizes)) != 1:
        raise UsageError("grids must be square (same size on every axis)")
    return len(sizes), sizes[0]


def _parse_point(space, text: str) -> Point:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"bad point JSON {text!r}") from exc
    return Point(space.tag, np.asarray(payload, dtype=np.float64).reshape(-1))


def _parse_p(text: str) -> float:
    if text.strip().lower() in ("inf", "infinity", "oo"):
        return math.inf
    try:
        return float(text)
    except ValueError as exc:
        raise UsageError(f"bad exponent {text!r}") from exc


def _out_path(args, default_name: str) -> Path:
    if args.out:
        return Path(args.out)
    base = Path(os.environ.get("METRICLP_OUT", "."))
    base.mkdir(parents=True, exist_ok=True)
    return base / default_name


def build_parser() -> _Parser:
    parser = _Parser(prog="metriclp", description=__doc__.split("\n")[0] if __doc__ else "")
    # --config must also exist on every subparser so it is accepted in any
    # position; the value itself is consumed by the pre-parse scan in main().
    config_parent = argparse.ArgumentParser(add_help=False)
    config_parent.add_argument("--config", help="JSON file of default flag values")
    parser.add_argument("--config", help="JSON file of default flag values")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_parser(name: str, **kwargs):
        return sub.add_parser(name, parents=[config_parent], **kwargs)

    p_gen = add_parser("gen", help="generate fixture mappings")
    p_gen.add_argument("--kind", required=True,
                       choices=["smooth", "random", "constant", "piecewise"])
    p_gen.add_argument("--space", default="euclidean2")
    p_gen.add_argument("--grid", default="32x32", help="e.g. 1024 or 64x64")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--regions", type=int, default=3, help="pieces for --kind piecewise")
    p_gen.add_argument("--value", help="JSON payload for --kind constant")
    p_gen.add_argument("--spread", type=float, default=1.0)
    p_gen.add_argument("--out")

    p_dist = add_parser("distance", help="D_p distance between two map files")
    p_dist.add_argument("left")
    p_dist.add_argument("right")
    p_dist.add_argument("--p", default="2", help="comma list, e.g. 1,2,inf")
    p_dist.add_argument("--out", help="also write the report as JSON")

    p_quant = add_parser("quantize", help="approximate a map by finitely many values")
    p_quant.add_argument("map")
    p_quant.add_argument("--mode", default="countable",
                         choices=["countable", "almost-simple", "sup"])
    p_quant.add_argument("--eps", type=float, required=True)
    p_quant.add_argument("--p", default="2")
    p_quant.add_argument("--base", help="base map file (almost-simple / sup)")
    p_quant.add_argument("--base-value", help="JSON payload of a constant base")
    p_quant.add_argument("--out")
    p_quant.add_argument("--report")

    p_cont = add_parser("continuify", help="relax a simple map to a continuous/smooth field")
    p_cont.add_argument("map", help="simple-map file")
    p_cont.add_argument("--background", help="JSON payload of the background point")
    p_cont.add_argument("--p", default="2")
    p_cont.add_argument("--eps", type=float, required=True)
    p_cont.add_argument("--order", type=int, default=0, help="smoothstep order (0 = continuous)")
    p_cont.add_argument("--out")
    p_cont.add_argument("--report")

    p_ver = add_parser("verify", help="run the bundled theorem suite")
    p_ver.add_argument("--suite", default="all", choices=["all"])
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument("--out", help="write the JSON ledger here")
    p_ver.add_argument("--mutate", help="fault-injection hook (testing the harness)")
    return parser


def _cmd_gen(args) -> int:
    dim, per_axis = _parse_grid(args.grid)
    domain = Domain.grid(dim, per_axis)
    space = make_space(args.space)
    rng = np.random.default_rng(args.seed)
    if args.kind == "smooth":
        f = fields.smooth_field(domain, space, rng, args.spread)
    elif args.kind == "random":
        f = fields.random_map(domain, space, rng, args.spread)
    elif args.kind == "constant":
        if not args.value:
            raise UsageError("--kind constant needs --value")
        f = MeasurableMap.constant(domain, space, _parse_point(space, args.value))
    else:  # piecewise -> a simple map
        labels = fields.voronoi_labels(domain.geometry, args.regions, rng)
        g = fields.simple_from_labels(domain, space, labels, rng=rng, spread=args.spread)
        out = _out_path(args, f"{args.kind}-{args.space}.json")
        fileio.save_simple_map(g, out)
        print(json.dumps({"written": str(out), "kind": "simple_map",
                          "atoms": domain.atom_count, "regions": g.range_size}))
        return EXIT_OK
    out = _out_path(args, f"{args.kind}-{args.space}.json")
    fileio.save_map(f, out)
    print(json.dumps({"written": str(out), "kind": "map", "atoms": domain.atom_count}))
    return EXIT_OK


def _as_map(obj) -> MeasurableMap:
    if isinstance(obj, SimpleMap):
        return obj.to_map()
    return obj


def _cmd_distance(args) -> int:
    left = _as_map(fileio.load_any_map(args.left))
    right = _as_map(fileio.load_any_map(args.right))
    exponents = [_parse_p(tok) for tok in str(args.p).split(",") if tok.strip()]
    if not exponents:
        raise UsageError("no exponents given")
    report = {
        "left": args.left,
        "right": args.right,
        "distances": {
            ("inf" if math.isinf(p) else f"{p:g}"): dp_distance(left, right, p)
            for p in exponents
        },
    }
    text = json.dumps(report, indent=1)
    print(text)
    if args.out:
        Path(args.out).write_text(text)
    return EXIT_OK


def _load_base(args, f: MeasurableMap) -> MeasurableMap:
    if args.base:
        return _as_map(fileio.load_any_map(args.base))
    if args.base_value:
        return MeasurableMap.constant(
            f.domain, f.space, _parse_point(f.space, args.base_value)
        )
    raise UsageError("this mode needs --base or --base-value")


def _cmd_quantize(args) -> int:
    f = _as_map(fileio.load_any_map(args.map))
    p = _parse_p(args.p)
    if args.mode == "countable":
        simple, report = quantize.countable_quantize(f, args.eps)
    elif args.mode == "almost-simple":
        simple, report = quantize.almost_simple_approx(f, _load_base(args, f), p, args.eps)
    else:
        simple, report = quantize.simple_approx_sup(f, _load_base(args, f), args.eps)
    out = _out_path(args, f"quantized-{args.mode}.json")
    fileio.save_simple_map(simple, out)
    summary = {
        "written": str(out),
        "mode": args.mode,
        "achieved_error": report.achieved_error,
        "target_eps": report.target_eps,
        "range_size": report.range_size,
    }
    print(json.dumps(summary))
    if args.report:
        fileio.save_report(report, args.report)
    return EXIT_OK


def _cmd_continuify(args) -> int:
    g = fileio.load_any_map(args.map)
    if not isinstance(g, SimpleMap):
        raise MetricLpError("continuify needs a simple-map file")
    space = g.space
    if args.background:
        z0 = _parse_point(space, args.background)
    else:
        if g.value_table.shape[0] == 0:
            raise MetricLpError("empty value table and no --background")
        z0 = Point(space.tag, g.value_table[0].copy())
    p = _parse_p(args.p)
    out_field = relax.smooth_from_simple(g, z0, p, args.eps, order=args.order)
    out = _out_path(args, "relaxed-field.json")
    fileio.save_map(out_field.to_map(), out)
    summary = {
        "written": str(out),
        "order": args.order,
        "achieved_error": out_field.achieved_error,
        "error_bound": relax.error_bound(out_field),
        "target_eps": args.eps,
        "pieces": len(out_field.pieces),
        "flags": out_field.flags,
    }
    print(json.dumps(summary))
    if args.report:
        pieces = [
            {
                "label": piece.label,
                "lipschitz": piece.lipschitz,
                "gap_width": piece.transition.gap_width,
                "core_atoms": piece.core.size,
                "region_atoms": piece.region.size,
                "sup_gap": piece.sup_gap,
                "sup_gap_budget": piece.sup_gap_budget,
                "inner_over_budget": piece.inner_over_budget,
                "outer_over_budget": piece.outer_over_budget,
            }
            for piece in out_field.pieces
        ]
        fileio.save_report({"summary": summary, "pieces": pieces}, args.report)
    return EXIT_OK


def _cmd_verify(args) -> int:
    mutations = (args.mutate,) if args.mutate else ()
    config = verify.SuiteConfig(seed=args.seed, mutations=mutations)
    result = verify.run_theorem_suite(config)
    ledger = result.as_dict()
    if args.out:
        Path(args.out).write_text(json.dumps(fileio.jsonable(ledger), indent=1))
    for entry in result.entries:
        print(f"[{entry['status']:>4}] {entry['check_id']}")
    print(
        json.dumps(
            {
                "all_pass": result.all_pass,
                "seed": result.seed,
                "checks": len(result.entries),
                "runtime_seconds": round(result.runtime_seconds, 3),
            }
        )
    )
    return EXIT_OK if result.all_pass else EXIT_VERIFY


def _subcommand_parsers(parser: argparse.ArgumentParser):
    yield parser
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            yield from action.choices.values()


def _apply_config_defaults(parser: _Parser, defaults: dict) -> None:
    # Subparsers parse into a fresh namespace that overwrites the parent's,
    # so defaults must be pushed into every subparser, and a default makes
    # a required flag optional.
    for target in _subcommand_parsers(parser):
        target.set_defaults(**defaults)
        for action in target._actions:
            if action.dest in defaults and getattr(action, "required", False):
                action.required = False


def _scan_config_flag(argv: list[str]) -> str | None:
    # A plain token scan: parse_known_args would already descend into the
    # subcommand and reject a missing required flag before the config that
    # supplies it could load.
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        config_path = _scan_config_flag(argv)
        if config_path:
            try:
                defaults = json.loads(Path(config_path).read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise MetricLpError(f"cannot load config {config_path}: {exc}") from exc
            if not isinstance(defaults, dict):
                raise MetricLpError("config must be a JSON object of flag defaults")
            _apply_config_defaults(
                parser, {k.replace("-", "_"): v for k, v in defaults.items()}
            )
        args = parser.parse_args(argv)
        handler = {
            "gen": _cmd_gen,
            "distance": _cmd_distance,
            "quantize": _cmd_quantize,
            "continuify": _cmd_continuify,
            "verify": _cmd_verify,
        }[args.command]
        return handler(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MetricLpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
