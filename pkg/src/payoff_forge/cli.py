"""Command-line surface: imply, solve, audit, and export on product files.

Exit codes: 0 success, 2 solver failure, 3 validation failure, 64 usage or
parse error. Outputs are byte-identical for identical inputs and settings.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from .errors import (
    BudgetError,
    InvalidInputError,
    MonotonicityError,
    ParseError,
    PayoffForgeError,
    RiskLovingInputError,
    SolverError,
)
from .formats import (
    PROFILE_HEADER,
    ProductSpec,
    read_curve_csv,
    read_product,
    read_profile_csv,
    render_plot_csv,
    write_curve_csv,
    write_json_doc,
    write_profile_csv,
    write_text,
)
from .growth import OverlayCurve, PayoffCurve, allocation_to_payoff, growth_optimal_payoff
from .market import SecurityQuotes, imply_market_distribution
from .pipeline import (
    normalize_risk_request,
    run_solve,
    settings_from_doc,
    solve_manifest,
)
from .solver import (
    brute_force_oracle,
    implied_risk_aversion,
    solve_elasticity_state_agnostic,
    solve_fixed_point,
)
from .validation import audit_product

EXIT_OK = 0
EXIT_SOLVER = 2
EXIT_VALIDATION = 3
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> _Parser:
    parser = _Parser(prog="payoff-forge", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("imply-market", help="normalize quoted prices into market weights")
    p.add_argument("input", help="product JSON with prices, or a prices curve CSV")
    p.add_argument("-o", "--output", help="output curve CSV (default <input>.market.csv)")

    p = sub.add_parser("solve", help="solve a product file for the optimal payoff")
    p.add_argument("product", help="product JSON file")
    p.add_argument("--family", help="utility family: log | constant_relative:R | constant_absolute_over_f:a")
    p.add_argument("--profile", help="per-edge risk aversion CSV (x_mid,R)")
    p.add_argument("--a", type=float, dest="strength", help="one-parameter family dial")
    p.add_argument("--max-loss", type=float, help="calibrate the dial to a worst-case payoff floor in (0,1)")
    p.add_argument("--allow-gambling", action="store_true", help="accept negative risk aversion in profiles")
    p.add_argument("--floor-beliefs", action="store_true", help="floor belief weights at 1e-12 and renormalize")
    p.add_argument("--settings", help="JSON file overriding solve settings fields")
    p.add_argument("-o", "--out-dir", help="output directory (default: alongside the product)")

    p = sub.add_parser("imply-r", help="imply per-edge risk aversion from an existing payoff")
    p.add_argument("payoff", help="payoff curve CSV")
    p.add_argument("product", help="product JSON file (for the growth-optimal reference)")
    p.add_argument("-o", "--output", help="output CSV (default <payoff>.implied_r.csv)")

    p = sub.add_parser("validate", help="audit a payoff or overlay against a product file")
    p.add_argument("curve", help="payoff (or overlay) curve CSV")
    p.add_argument("product", help="product JSON file")
    p.add_argument("--overlay", action="store_true", help="treat the curve as a zero-cost overlay")
    p.add_argument("--report", help="report JSON path (default <product>.report.json)")

    p = sub.add_parser("oracle", help="cross-check solvers against brute-force maximization")
    p.add_argument("product", help="product JSON file")
    p.add_argument("--family", required=True, help="utility family to check")
    p.add_argument("--settings", help="JSON file overriding solve settings fields")

    p = sub.add_parser("plot-data", help="merge curves into one long-format CSV")
    p.add_argument("series", nargs="+", metavar="NAME=FILE", help="series name and source file")
    p.add_argument("-o", "--output", required=True, help="output CSV")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--bind", help="host:port (default PAYOFF_FORGE_BIND or 127.0.0.1:8080)")
    return parser


def _parse_family_flag(text: str):
    from .preferences import UtilitySpec

    name, _, param = text.partition(":")
    if name == "log":
        if param:
            raise InvalidInputError("the log family takes no parameter")
        return UtilitySpec.log()
    if not param:
        raise InvalidInputError(f"family {name!r} needs a parameter, e.g. {name}:2.0")
    try:
        value = float(param)
    except ValueError:
        raise InvalidInputError(f"cannot parse family parameter {param!r}")
    if name == "constant_relative":
        return UtilitySpec.constant_relative(value)
    if name == "constant_absolute_over_f":
        return UtilitySpec.constant_absolute_over_f(value)
    raise InvalidInputError(f"unknown utility family {name!r}")


def _load_settings(path: str | None):
    if not path:
        return settings_from_doc(None)
    import json

    try:
        with open(path, "r", encoding="utf-8") as handle:
            doc = json.load(handle)
    except OSError as exc:
        raise ParseError(path, None, str(exc))
    except json.JSONDecodeError as exc:
        raise ParseError(path, exc.lineno, exc.msg)
    return settings_from_doc(doc)


def _cmd_imply_market(args) -> int:
    if args.input.endswith(".json"):
        product = read_product(args.input)
        market = product.market
        mesh = product.mesh
    else:
        mesh, prices = read_curve_csv(args.input)
        market = imply_market_distribution(SecurityQuotes(mesh, prices))
    out = args.output or _sibling(args.input, "market.csv")
    write_curve_csv(out, mesh, market.weights)
    print(out)
    return EXIT_OK


def _cmd_solve(args) -> int:
    product = read_product(args.product)
    settings = _load_settings(args.settings)
    request = {
        "family": _parse_family_flag(args.family) if args.family else None,
        "profile_values": None,
        "strength": args.strength,
        "max_loss": args.max_loss,
    }
    if args.profile:
        _, values = read_profile_csv(args.profile)
        if np.any(np.isnan(values)):
            raise InvalidInputError(f"profile {args.profile} has indeterminate entries")
        request["profile_values"] = values
    risk = normalize_risk_request(request, product)
    outcome = run_solve(
        product,
        risk,
        settings,
        allow_gambling=args.allow_gambling,
        floor_beliefs=args.floor_beliefs,
    )

    out_dir = args.out_dir or os.path.dirname(os.path.abspath(args.product))
    os.makedirs(out_dir, exist_ok=True)
    stem = os.path.splitext(os.path.basename(args.product))[0]
    paths = {
        "payoff": os.path.join(out_dir, f"{stem}.payoff.csv"),
        "growth_optimal": os.path.join(out_dir, f"{stem}.growth_optimal.csv"),
        "implied_r": os.path.join(out_dir, f"{stem}.implied_r.csv"),
        "manifest": os.path.join(out_dir, f"{stem}.manifest.json"),
    }
    write_curve_csv(paths["payoff"], product.mesh, outcome.payoff.values)
    write_curve_csv(paths["growth_optimal"], product.mesh, outcome.growth_optimal.values)
    write_profile_csv(paths["implied_r"], outcome.implied.edge_positions, outcome.implied.values)
    manifest = solve_manifest(
        outcome,
        settings,
        extra={
            "command": "solve",
            "input": os.path.basename(args.product),
            "outputs": {k: os.path.basename(v) for k, v in paths.items() if k != "manifest"},
        },
    )
    write_json_doc(paths["manifest"], manifest)
    for key in ("payoff", "growth_optimal", "implied_r", "manifest"):
        print(paths[key])
    return EXIT_OK


def _cmd_imply_r(args) -> int:
    product = read_product(args.product)
    mesh, values = read_curve_csv(args.payoff)
    product.mesh.require_same(mesh, "payoff and product")
    payoff = PayoffCurve(mesh, values)
    reference = growth_optimal_payoff(product.belief(), product.market)
    implied = implied_risk_aversion(payoff, reference)
    out = args.output or _sibling(args.payoff, "implied_r.csv")
    write_profile_csv(out, implied.edge_positions, implied.values)
    print(out)
    return EXIT_OK


def _cmd_validate(args) -> int:
    product = read_product(args.product)
    mesh, values = read_curve_csv(args.curve)
    product.mesh.require_same(mesh, "curve and product")
    curve = OverlayCurve(mesh, values) if args.overlay else PayoffCurve(mesh, values)
    report = audit_product(curve, product.market, product.belief())
    print(report.render_text())
    report_path = args.report or _sibling(args.product, "report.json")
    write_json_doc(report_path, report.to_doc())
    return EXIT_OK if report.rational else EXIT_VALIDATION


def _cmd_oracle(args) -> int:
    product = read_product(args.product)
    settings = _load_settings(args.settings)
    spec = _parse_family_flag(args.family)
    belief = product.belief()
    market = product.market
    if product.quotes is not None:
        quotes = product.quotes
    else:
        quotes = SecurityQuotes(product.mesh, market.weights)
    oracle_stats: dict = {}
    oracle_beta = brute_force_oracle(belief, quotes, spec, settings, stats=oracle_stats)
    fixed_beta = solve_fixed_point(belief, quotes, spec, settings)
    reference = growth_optimal_payoff(belief, market)
    elastic = solve_elasticity_state_agnostic(reference, spec, market, settings)
    fixed_payoff = allocation_to_payoff(fixed_beta, quotes)

    gap_alloc = float(np.max(np.abs(oracle_beta.weights - fixed_beta.weights)))
    gap_payoff = float(np.max(np.abs(fixed_payoff.values - elastic.values)))
    budget = abs(float(np.dot(elastic.values, market.weights)) - 1.0)
    print(f"oracle-vs-fixed-point allocation max diff: {gap_alloc:.3e}")
    print(f"fixed-point-vs-elasticity payoff max diff: {gap_payoff:.3e}")
    print(f"elasticity budget residual: {budget:.3e}")
    print(f"oracle grid points: {oracle_stats.get('grid_points', 0)}")
    return EXIT_OK


def _cmd_plot_data(args) -> int:
    series = []
    for item in args.series:
        name, sep, path = item.partition("=")
        if not sep or not name or not path:
            raise InvalidInputError(f"series argument {item!r} is not NAME=FILE")
        if not os.path.exists(path):
            raise ParseError(path, None, "missing series file")
        with open(path, "r", encoding="utf-8") as handle:
            header = handle.readline().strip()
        if header == PROFILE_HEADER:
            xs, values = read_profile_csv(path)
        else:
            mesh, values = read_curve_csv(path)
            xs = mesh.midpoints
        series.append((name, xs, values))
    write_text(args.output, render_plot_csv(series))
    print(args.output)
    return EXIT_OK


def _cmd_serve(args) -> int:
    from .service import serve

    serve(args.bind)
    return EXIT_OK


def _sibling(path: str, suffix: str) -> str:
    stem = os.path.splitext(path)[0]
    return f"{stem}.{suffix}"


_COMMANDS = {
    "imply-market": _cmd_imply_market,
    "solve": _cmd_solve,
    "imply-r": _cmd_imply_r,
    "validate": _cmd_validate,
    "oracle": _cmd_oracle,
    "plot-data": _cmd_plot_data,
    "serve": _cmd_serve,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"payoff-forge: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SolverError, RiskLovingInputError, MonotonicityError) as exc:
        print(f"payoff-forge: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (InvalidInputError, BudgetError) as exc:
        print(f"payoff-forge: validation failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except PayoffForgeError as exc:
        print(f"payoff-forge: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    raise SystemExit(main())
