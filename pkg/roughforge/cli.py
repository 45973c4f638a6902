"""
CLI Interface for roughforge

Subcommands for tree enumeration, BCH tables, lifts, the Hairer–Kelly
expansion, the action of Hölder families, BCFP translations and
verification. Results are JSON on stdout (tables with --pretty); failures
are JSON on stderr with exit code 1.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from .config.settings import RunConfig, config
from .core.errors import RoughForgeError
from .protocol.transport import dumps, read_json, write_json, write_table_csv
from .tools.commands import RoughForgeTools, describe_rows


def setup_logging() -> None:
    """Setup logging configuration"""
    logging.basicConfig(
        level=getattr(logging, config.logging.level.upper(), logging.WARNING),
        format=config.logging.format,
        stream=sys.stderr,
    )

    if config.logging.enable_file_logging:
        log_dir = Path(config.logging.log_file).parent
        log_dir.mkdir(parents=True, exist_ok=True)

        file_handler = logging.FileHandler(config.logging.log_file)
        file_handler.setFormatter(logging.Formatter(config.logging.format))
        logging.getLogger().addHandler(file_handler)


def _emit(result: Dict[str, Any], args: argparse.Namespace, pretty: Optional[str] = None) -> int:
    if not result.get("success", False):
        sys.stderr.write(dumps(result))
        return 1
    if getattr(args, "pretty", False) and pretty is not None:
        print(pretty)
    else:
        write_json(getattr(args, "output", None), result)
    return 0


def _load(path: str, key: Optional[str] = None) -> Any:
    """Read a document, unwrapping the output of an earlier command"""
    data = read_json(path)
    if key is not None and isinstance(data, dict) and key in data and "success" in data:
        return data[key]
    return data


def _z_init(pairs: Sequence[str]) -> Dict[str, str]:
    values = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep:
            raise ValueError(f"--z-init expects KEY=VALUE, got {pair!r}")
        values[key.strip()] = value.strip()
    return values


def cmd_trees(args: argparse.Namespace, tools: RoughForgeTools) -> int:
    """Enumerate trees"""
    result = tools.trees(args.n, args.d, args.with_zero)
    pretty = "\n".join(result.get("trees", [])) + f"\n# {result.get('count')} trees"
    return _emit(result, args, pretty)


def cmd_bch(args: argparse.Namespace, tools: RoughForgeTools) -> int:
    """Dump descent-number coefficients, optionally evaluate BCH"""
    alpha = _load(args.alpha) if args.alpha else None
    beta = _load(args.beta) if args.beta else None
    result = tools.bch(args.k, alpha, beta, args.N)
    if args.csv is not None and result.get("success"):
        write_table_csv(None if args.csv == "-" else args.csv, result["rows"])
        if args.csv == "-":
            return 0
    pretty = describe_rows(result.get("rows", []))
    return _emit(result, args, pretty)


def cmd_lift(args: argparse.Namespace, tools: RoughForgeTools) -> int:
    """Build a rough path from a CSV path"""
    run = RunConfig(
        gamma=args.gamma,
        depth=args.depth if args.depth is not None else config.construction.depth,
        truncation=args.N,
        algebra=args.algebra,
        gammas=args.gammas,
        z_init=_z_init(args.z_init),
        split_weight=args.split_weight or config.construction.split_weight,
        input_path=args.input,
        output_path=args.output,
        scalar_mode="exact" if args.exact else "float",
    )
    result = tools.lift(run, signature=args.signature, with_zero=args.with_zero)
    pretty = None
    if result.get("success"):
        holder = result["rp"]["holder"]["constants"]
        rows = [
            {
                "element": key,
                "exponent": f"{v['exponent']:.4g}",
                "constant": "inf" if v["constant"] is None else f"{v['constant']:.6g}",
            }
            for key, v in holder.items()
        ]
        pretty = describe_rows(rows)
    return _emit(result, args, pretty)


def cmd_psi(args: argparse.Namespace, tools: RoughForgeTools) -> int:
    """Hairer–Kelly expansion"""
    result = tools.psi(args.tree, args.method)
    return _emit(result, args, result.get("pretty"))


def cmd_act(args: argparse.Namespace, tools: RoughForgeTools) -> int:
    return _emit(tools.act(_load(args.rp, "rp"), _load(args.g, "g")), args)


def cmd_solve(args: argparse.Namespace, tools: RoughForgeTools) -> int:
    result = tools.solve(_load(args.rp, "rp"), _load(args.rp2, "rp"))
    pretty = None
    if result.get("success"):
        rows = [
            {"tree": tree, "sup": f"{max((abs(v) for v in values), default=0.0):.6g}"}
            for tree, values in result["g"]["values"].items()
        ]
        pretty = describe_rows(rows) + f"\n# round trip error {result['round_trip_error']:.3e}"
    return _emit(result, args, pretty)


def cmd_bcfp(args: argparse.Namespace, tools: RoughForgeTools) -> int:
    result = tools.bcfp(_load(args.rp, "rp"), _load(args.v), check_bound=not args.skip_bound_check)
    return _emit(result, args)


def cmd_verify(args: argparse.Namespace, tools: RoughForgeTools) -> int:
    """Verification report"""
    result = tools.verify(_load(args.rp, "rp"), args.tol, args.full)
    pretty = None
    if result.get("success"):
        rows = [
            {"check": name, "value": json.dumps(check["value"]), "passed": str(check["passed"])}
            for name, check in result["checks"].items()
        ]
        pretty = describe_rows(rows)
    return _emit(result, args, pretty)


def cmd_config(args: argparse.Namespace, tools: RoughForgeTools) -> int:
    """Show current configuration"""
    return _emit(tools.show_config(), args)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="roughforge - constructive rough paths over trees and words",
        prog="roughforge",
    )
    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    def add(name: str, func: Any, help_text: str) -> argparse.ArgumentParser:
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument("--pretty", action="store_true", help="Human-readable output")
        sub.add_argument("--output", default=None, help="Write JSON here instead of stdout")
        sub.set_defaults(func=func)
        return sub

    trees_parser = add("trees", cmd_trees, "Enumerate decorated rooted trees")
    trees_parser.add_argument("--n", type=int, required=True, help="Maximum node count")
    trees_parser.add_argument("--d", type=int, required=True, help="Number of decorations")
    trees_parser.add_argument("--with-zero", action="store_true", help="Include decoration 0")

    bch_parser = add("bch", cmd_bch, "Descent-number BCH coefficients")
    bch_parser.add_argument("--k", type=int, required=True, help="Order")
    bch_parser.add_argument("--alpha", default=None, help="Dual element JSON")
    bch_parser.add_argument("--beta", default=None, help="Dual element JSON")
    bch_parser.add_argument("--N", type=int, default=None, help="Evaluate BCH through this order")
    bch_parser.add_argument(
        "--csv", default=None, help="Also write the coefficient table as CSV here (- for stdout)"
    )

    lift_parser = add("lift", cmd_lift, "Build a rough path from a CSV path")
    lift_parser.add_argument("--input", required=True, help="CSV with header t,a1,...,ad")
    lift_parser.add_argument("--gamma", default="2/5", help="Hölder exponent p/q")
    lift_parser.add_argument("--N", type=int, default=None, help="Truncation level override")
    lift_parser.add_argument("--algebra", choices=["bck", "shuffle", "aniso"], default="bck")
    lift_parser.add_argument("--gammas", default=None, help="Per-channel exponents for aniso")
    lift_parser.add_argument("--depth", type=int, default=None, help="Grid depth for --signature")
    lift_parser.add_argument("--split-weight", default=None, help="Correction split weight")
    lift_parser.add_argument(
        "--z-init", action="append", default=[], help="KEY=VALUE initial correction"
    )
    lift_parser.add_argument("--exact", action="store_true", help="Rational arithmetic")
    lift_parser.add_argument("--with-zero", action="store_true", help="Reserve decoration 0")
    lift_parser.add_argument(
        "--signature", action="store_true", help="Input holds breakpoints; emit the signature lift"
    )

    psi_parser = add("psi", cmd_psi, "Hairer-Kelly expansion of a tree")
    psi_parser.add_argument("--tree", required=True, help='Tree in bracket grammar, e.g. "[1[2]]"')
    psi_parser.add_argument("--method", choices=["recursive", "partition"], default="recursive")

    act_parser = add("act", cmd_act, "Apply a Hölder family")
    act_parser.add_argument("--rp", required=True, help="Branched rough path JSON")
    act_parser.add_argument("--g", required=True, help="Hölder family JSON")

    solve_parser = add("solve", cmd_solve, "Solve for the translating Hölder family")
    solve_parser.add_argument("--rp", required=True, help="Source rough path JSON")
    solve_parser.add_argument("--rp2", required=True, help="Target rough path JSON")

    bcfp_parser = add("bcfp", cmd_bcfp, "Translate by a constant character")
    bcfp_parser.add_argument("--rp", required=True, help="Branched rough path JSON with decoration 0")
    bcfp_parser.add_argument("--v", required=True, help="Character JSON on 0-free forests")
    bcfp_parser.add_argument("--skip-bound-check", action="store_true")

    verify_parser = add("verify", cmd_verify, "Verify rough path invariants")
    verify_parser.add_argument("--rp", required=True, help="Rough path JSON")
    verify_parser.add_argument("--tol", type=float, default=None, help="Algebraic tolerance")
    verify_parser.add_argument(
        "--full", action="store_true", help="Check Chen's relation on every dyadic triple"
    )

    add("config", cmd_config, "Show configuration")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)

    if not hasattr(args, "func"):
        parser.print_help()
        return 0

    setup_logging()
    tools = RoughForgeTools()
    try:
        return args.func(args, tools)
    except RoughForgeError as e:
        sys.stderr.write(dumps(e.to_dict()))
        return 1
    except (ValueError, OSError) as e:
        sys.stderr.write(
            dumps({"success": False, "error": str(e), "error_type": type(e).__name__, "precondition": "input"})
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
