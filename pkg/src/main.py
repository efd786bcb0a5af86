"""Main module."""

import argparse
import logging
import sys
from typing import Any, Sequence

import numpy as np

from app.common import (
    APP_START_TIME,
    SUITES,
    AppConfig,
    PerfTimer,
    configure_logging,
    load_config,
)
from app.files import (
    read_monad,
    read_pair,
    write_monad,
    write_pair,
)
from app.reporting import make_report, render_report
from app.sweep import run_sweep
from core.canonical import (
    PointConfig,
    autl_reduce,
    default_points,
    random_generic_pair,
    slice_report,
    stabilizer_solve,
    t_reduce,
)
from core.cohom import euler_from_h, h_line_bundle
from core.errors import FormatError, InvalidInput, RelstabError
from core.exact import as_rational
from core.geom import (
    ChernData,
    ChowClass,
    ResolutionTerm,
    chern_from_resolution,
    euler_characteristic,
    grr_pushforward,
    line_bundle_character,
)
from core.monad import (
    FamilyKind,
    expected_dims,
    family_chern,
    generic_completion,
    line_restriction_check,
    monad_complete,
    monad_compose_check,
    monad_terms,
    pointwise_check,
    relative_direct_images,
    restrict_to_fiber,
    restrict_to_lambda,
)
from core.stability import (
    FibrationFrame,
    SheafNumData,
    compare_bound,
    fiber_slope,
    slope_lc,
    slope_usual,
    standard_c2,
    threshold_af,
    threshold_report,
)
from core.strata import enumerate_bvectors, generic_split, moduli_dims, strata_table
from core.variety import VarietyKind, VarietyTag

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


class UsageError(Exception):
    """Raised by the argument parser instead of exiting."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(f"{self.prog}: {message}")


def _variety(text: str) -> VarietyTag:
    try:
        return VarietyTag.parse(text)
    except InvalidInput as err:
        raise argparse.ArgumentTypeError(str(err)) from err


def _rational(text: str) -> Any:
    try:
        return as_rational(text)
    except (InvalidInput, ValueError, ZeroDivisionError) as err:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from err


def _rationals(text: str) -> tuple[Any, ...]:
    return tuple(_rational(part) for part in text.split(",") if part)


def _term(text: str) -> tuple[int, tuple[Any, ...], int]:
    """Parse SIGN:COORDS[:MULT], e.g. `-:-1,0:2`."""
    parts = text.split(":")
    if len(parts) not in (2, 3) or parts[0] not in ("+", "-"):
        raise argparse.ArgumentTypeError(f"bad term {text!r}, expected SIGN:COORDS[:MULT]")
    mult = int(parts[2]) if len(parts) == 3 else 1
    return (1 if parts[0] == "+" else -1), _rationals(parts[1]), mult


def _divisor(v: VarietyTag, coords: Sequence[Any] | None) -> ChowClass:
    if coords is None:
        return ChowClass.zero(v)
    return ChowClass.divisor(v, *coords)


def _sheaf(args: argparse.Namespace) -> SheafNumData:
    v = args.variety
    return SheafNumData(
        args.r, _divisor(v, args.c1), standard_c2(v, args.n), as_rational(args.c3)
    )


def _frame(args: argparse.Namespace) -> FibrationFrame:
    return FibrationFrame.standard(args.variety, args.a_degree, args.l_twist)


def cmd_slope(args: argparse.Namespace, conf: AppConfig) -> tuple[dict[str, Any], int]:
    """Both slopes of a sheaf for L_c."""
    frame, s = _frame(args), _sheaf(args)
    return (
        make_report(
            "slope",
            variety=args.variety,
            c=args.c,
            slope_lc=slope_lc(frame, s, args.c),
            slope_usual=slope_usual(frame, s, args.c),
            fiber_slope=fiber_slope(frame, s),
        ),
        EXIT_OK,
    )


def cmd_threshold(
    args: argparse.Namespace, conf: AppConfig
) -> tuple[dict[str, Any], int]:
    """c_F, c'_F, the relative bounds and the usual-slope conversion."""
    frame, s = _frame(args), _sheaf(args)
    report = threshold_report(frame, s)
    items: dict[str, Any] = {
        "variety": args.variety,
        "r": args.r,
        "n": args.n,
        "c_f": report.c_f,
        "c_f_prime": report.c_f_prime,
        "discriminant_bracket": report.discriminant_bracket,
        "bounds": report.bounds,
    }
    if report.c_f is not None:
        items["usual_slope_threshold"] = compare_bound(
            frame.d_x, frame.d_y, report.c_f, args.r, 0
        )
    if args.m_max is not None and args.m_min is not None:
        items["a_f"] = threshold_af(frame, args.r, args.m_max, args.m_min)
    return make_report("threshold", **items), EXIT_OK


def cmd_cohom(args: argparse.Namespace, conf: AppConfig) -> tuple[dict[str, Any], int]:
    """Cohomology of one line bundle."""
    cls = _divisor(args.variety, args.deg)
    h = h_line_bundle(args.variety, cls)
    chi = euler_characteristic(line_bundle_character(cls))
    return (
        make_report(
            "cohom",
            variety=args.variety,
            line_bundle=cls,
            h=list(h),
            chi=chi,
            chi_from_h=euler_from_h(h),
        ),
        EXIT_OK,
    )


def _chern_items(ch: ChernData) -> dict[str, Any]:
    c1, c2, c3 = ch.chern_classes()
    return {
        "variety": ch.variety,
        "rank": ch.rank,
        "ch": ch.character(),
        "c1": c1,
        "c2": c2,
        "c3": c3,
        "chi": euler_characteristic(ch),
    }


def cmd_chern(args: argparse.Namespace, conf: AppConfig) -> tuple[dict[str, Any], int]:
    """Chern data of a monad, an example family or explicit resolution terms."""
    v = args.variety
    items: dict[str, Any]
    if args.family is not None:
        report = family_chern(FamilyKind(args.family), v, args.n, args.r)
        items = {"family": report.kind, **_chern_items(report.chern)}
        items["asserted_c2"] = report.asserted_c2
    elif args.term:
        terms = [
            ResolutionTerm(sign, _divisor(v, coords), mult)
            for sign, coords, mult in args.term
        ]
        items = _chern_items(chern_from_resolution(terms))
    else:
        if v.kind != VarietyKind.P2_BUNDLE:
            raise InvalidInput("monad Chern data need a p2bundle variety")
        items = _chern_items(chern_from_resolution(monad_terms(v, args.r, args.n)))
        items["direct_images"] = relative_direct_images(v.a, v.b, args.r, args.n)
        if 2 <= args.r <= args.n:
            items["dimensions"] = expected_dims(v.a, v.b, args.r, args.n)
    return make_report("chern", **items), EXIT_OK


def cmd_grr(args: argparse.Namespace, conf: AppConfig) -> tuple[dict[str, Any], int]:
    """Push Chern data down to P1."""
    v = args.variety
    c3 = ChowClass.point(v).scale(args.c3) if v.dim == 3 else None
    ch = ChernData.from_chern(v, args.r, _divisor(v, args.c1), standard_c2(v, args.n), c3)
    pushed = grr_pushforward(ch)
    return (
        make_report(
            "grr",
            variety=v,
            rank=pushed.rank,
            degree=pushed.ch1.top,
            chi=euler_characteristic(ch),
        ),
        EXIT_OK,
    )


def cmd_strata(args: argparse.Namespace, conf: AppConfig) -> tuple[dict[str, Any], int]:
    """Dimension table and stratification rows."""
    items: dict[str, Any] = {
        "r": args.r,
        "n": args.n,
        "dims": moduli_dims(args.r, args.n),
        "rows": [
            {
                "n_f": row.n_f,
                "generic": str(row.generic),
                "split_types": row.split_types,
                "dim_end": row.dim_end_generic,
                "ext1_q": row.ext1_q,
                "degree": row.pushforward_degree,
                "dim_bound": row.dim_bound,
            }
            for row in strata_table(args.r, args.n)
        ],
    }
    if args.n_f is not None:
        items["generic_split"] = generic_split(args.r, args.n_f)
        items["bvectors"] = [b.b for b in enumerate_bvectors(args.n, args.n_f)]
    return make_report("strata", **items), EXIT_OK


def cmd_monad(args: argparse.Namespace, conf: AppConfig) -> tuple[dict[str, Any], int]:
    """monad check | complete | restrict."""
    m = read_monad(args.file)
    if args.monad_command == "check":
        compose = monad_compose_check(m)
        items: dict[str, Any] = {"compose_ok": compose.ok, "residual": compose.residual}
        pointwise = pointwise_check(m, args.samples, args.seed)
        items["pointwise"] = pointwise
        ok = compose.ok and pointwise.a_injective and pointwise.b_surjective
        if m.variety.kind == VarietyKind.P2_BUNDLE:
            items["lambda"] = restrict_to_lambda(m)
            if args.lines:
                items["lines"] = line_restriction_check(m, args.lines, args.seed)
        return make_report("monad check", ok=ok, **items), EXIT_OK if ok else EXIT_FAILURE
    if args.monad_command == "complete":
        basis = monad_complete(m.variety, m.r, m.n, m.a_matrix)
        completed = generic_completion(
            m.variety, m.r, m.n, m.a_matrix, np.random.default_rng(args.seed)
        )
        if args.out:
            write_monad(args.out, completed)
        return (
            make_report(
                "monad complete",
                basis_size=len(basis),
                compose_ok=monad_compose_check(completed).ok,
                monad=completed,
                out=args.out,
            ),
            EXIT_OK,
        )
    if args.lambda_:
        return make_report("monad restrict", **{"lambda": restrict_to_lambda(m)}), EXIT_OK
    if args.x is None:
        raise InvalidInput("give --x W0,W1 or --lambda")
    restricted = restrict_to_fiber(m, args.x)
    if args.out:
        write_monad(args.out, restricted)
    return (
        make_report(
            "monad restrict",
            x=args.x,
            monad=restricted,
            compose_ok=monad_compose_check(restricted).ok,
            out=args.out,
        ),
        EXIT_OK,
    )


def cmd_canon(args: argparse.Namespace, conf: AppConfig) -> tuple[dict[str, Any], int]:
    """canon reduce | stabilizer | treduce | sample | slice."""
    command = args.canon_command
    if command == "slice":
        report = slice_report(args.r, args.n)
        return make_report("canon slice", slice=report, consistent=report.consistent), EXIT_OK
    if command == "sample":
        config = PointConfig(args.x) if args.x else default_points(args.n)
        e = random_generic_pair(args.r, args.n, np.random.default_rng(args.seed), config)
        if args.out:
            write_pair(args.out, e)
        return make_report("canon sample", pair=e, out=args.out), EXIT_OK
    e = read_pair(args.file)
    if command == "reduce":
        result = autl_reduce(e)
        if args.out:
            write_pair(args.out, result.canonical)
        return (
            make_report(
                "canon reduce",
                r1=e.r1,
                r2=e.r2,
                canonical=result.canonical,
                g_used=result.g_used,
                out=args.out,
            ),
            EXIT_OK,
        )
    if command == "stabilizer":
        stab = stabilizer_solve(e)
        return (
            make_report(
                "canon stabilizer",
                dimension=stab.dimension,
                trivial=stab.is_trivial,
                stabilizer=stab,
            ),
            EXIT_OK,
        )
    result = t_reduce(e)
    if args.out:
        write_pair(args.out, result.scaled)
    return make_report("canon treduce", result=result, out=args.out), EXIT_OK


def cmd_sweep(args: argparse.Namespace, conf: AppConfig) -> tuple[dict[str, Any], int]:
    """Run the property suites."""
    sweep_conf = conf.sweep
    if args.seed is not None:
        sweep_conf.seed = args.seed
    if args.suite:
        sweep_conf.suites = list(args.suite)
    results = run_sweep(sweep_conf)
    rows = [
        {"suite": r.name, "checked": r.checked, "failures": len(r.failures)}
        for r in results
    ]
    failed = {r.name: r.failures for r in results if r.failures}
    ok = not failed
    report = make_report(
        "sweep", seed=sweep_conf.seed, ok=ok, rows=rows, failures=failed
    )
    return report, EXIT_OK if ok else EXIT_FAILURE


def _add_sheaf_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--variety", type=_variety, required=True)
    p.add_argument("--r", type=int, required=True, help="rank")
    p.add_argument("--n", type=_rational, default=0, help="c2 = n*pt or n*u^2")
    p.add_argument("--c1", type=_rationals, default=None, help="divisor coordinates")
    p.add_argument("--c3", type=_rational, default=0)
    p.add_argument("--a-degree", type=int, default=1)
    p.add_argument("--l-twist", type=_rational, default=0)


def build_parser() -> argparse.ArgumentParser:
    """Return the argument parser."""
    parser = _Parser(prog="relstab", description="Slope stability on fibrations over P1")
    parser.add_argument("--config", default=None, help="YAML configuration")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--table", action="store_true", help="plain table output")
    parser.add_argument("--log-format", choices=["simple", "ecs"], default=None)
    parser.add_argument("--log-level", default=None)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("slope")
    _add_sheaf_args(p)
    p.add_argument("--c", type=_rational, default=0)
    p.set_defaults(handler=cmd_slope)

    p = sub.add_parser("threshold")
    _add_sheaf_args(p)
    p.add_argument("--m-max", type=_rational, default=None)
    p.add_argument("--m-min", type=_rational, default=None)
    p.set_defaults(handler=cmd_threshold)

    p = sub.add_parser("cohom")
    p.add_argument("--variety", type=_variety, required=True)
    p.add_argument("--deg", type=_rationals, required=True, help="k,l")
    p.set_defaults(handler=cmd_cohom)

    p = sub.add_parser("chern")
    p.add_argument("--variety", type=_variety, required=True)
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--family", choices=[k.value for k in FamilyKind], default=None)
    p.add_argument("--term", type=_term, action="append", default=[])
    p.set_defaults(handler=cmd_chern)

    p = sub.add_parser("grr")
    _add_sheaf_args(p)
    p.set_defaults(handler=cmd_grr)

    p = sub.add_parser("strata")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--n-f", type=int, default=None)
    p.set_defaults(handler=cmd_strata)

    monad = sub.add_parser("monad")
    monad_sub = monad.add_subparsers(
        dest="monad_command", required=True, parser_class=_Parser
    )
    p = monad_sub.add_parser("check")
    p.add_argument("file")
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--lines", type=int, default=0)
    p = monad_sub.add_parser("complete")
    p.add_argument("file")
    p.add_argument("--out", default=None)
    p = monad_sub.add_parser("restrict")
    p.add_argument("file")
    p.add_argument("--x", type=_rationals, default=None)
    p.add_argument("--lambda", dest="lambda_", action="store_true")
    p.add_argument("--out", default=None)
    monad.set_defaults(handler=cmd_monad)

    canon = sub.add_parser("canon")
    canon_sub = canon.add_subparsers(
        dest="canon_command", required=True, parser_class=_Parser
    )
    for name in ("reduce", "stabilizer", "treduce"):
        p = canon_sub.add_parser(name)
        p.add_argument("file")
        if name != "stabilizer":
            p.add_argument("--out", default=None)
    p = canon_sub.add_parser("sample")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x", type=_rationals, default=None)
    p.add_argument("--out", default=None)
    p = canon_sub.add_parser("slice")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    canon.set_defaults(handler=cmd_canon)

    p = sub.add_parser("sweep")
    p.add_argument("--suite", action="append", choices=SUITES, default=[])
    p.set_defaults(handler=cmd_sweep)
    return parser


def _error_report(err: Exception) -> dict[str, Any]:
    return make_report("error", error=type(err).__name__, message=str(err))


def run(argv: Sequence[str] | None = None) -> int:
    """Parse arguments, run one command and print its report; return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as err:
        print(err, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as err:
        return int(err.code or 0)
    try:
        conf = load_config(args.config)
    except (OSError, TypeError, ValueError) as err:
        print(render_report(_error_report(err)))
        return EXIT_USAGE
    configure_logging(conf.logging, args.log_format, args.log_level)
    logger = logging.getLogger("main")
    seed = args.seed if args.seed is not None else conf.sweep.seed
    if args.command != "sweep":
        args.seed = seed
    table = args.table or conf.output.table
    try:
        with PerfTimer(APP_START_TIME, logger):
            report, code = args.handler(args, conf)
    except (FormatError, OSError) as err:
        logger.error("cannot read input: %s", err)
        print(render_report(_error_report(err)))
        return EXIT_USAGE
    except RelstabError as err:
        logger.error("%s: %s", type(err).__name__, err)
        print(render_report(_error_report(err)))
        return EXIT_FAILURE
    print(render_report(report, table=table, indent=conf.output.indent))
    return code


if __name__ == "__main__":
    sys.exit(run())
