"""The `hilb` command-line front end.

Subcommands:

    hilb ring show   --preset NAME | --ring PATH
    hilb mul         --preset NAME | --ring PATH  -n N  X-SPEC Y-SPEC
    hilb verify      SUITE  [--preset|--ring] [-n N] [...]
    hilb series      closed|refined|bruteforce|compare  [...]

Every command is deterministic given its flags (seeds are echoed in
reports).  Exit codes: 0 success/pass, 1 check failure, 2 usage or parse
error, 3 resource limit exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import DataError, ResourceError, UsageError
from .exact_poly import from_text as series_from_text
from .exact_poly import to_text as series_to_text
from .generating_series import (
    CASE_NAMES,
    SeriesSpec,
    brute_force_poincare,
    closed_form,
    compare_series,
    poly_render,
    poly_to_series,
    refined_goettsche,
    ring_dims,
)
from .perverse_filtration import (
    check_diagonal_bound,
    check_monodromy_suite,
    check_multiplicativity,
    perversity_class,
)
from .report import CheckReport
from .surface_ring import PRESET_NAMES, SurfaceRing, load_ring, preset, validate
from .symmetric_groups import parse_cycles
from .wreath_ring import (
    DEFAULT_LIMIT,
    check_associativity,
    check_equivariance,
    cup_class,
    element_degree,
    make_element,
    render_class,
    sigma_orbits,
)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3


def _add_ring_source(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--preset", choices=PRESET_NAMES, help="built-in surface ring")
    group.add_argument("--ring", metavar="PATH", help="ring document to load")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes")
    parser.add_argument(
        "--limit", type=int, default=DEFAULT_LIMIT, help="resource limit override"
    )
    parser.add_argument("--seed", type=int, default=0, help="seed for sampled suites")


def _resolve_ring(args) -> SurfaceRing:
    if args.preset:
        return preset(args.preset)
    if args.ring:
        with open(args.ring, "r", encoding="utf-8") as handle:
            return load_ring(handle.read())
    raise UsageError("a ring source is required: --preset NAME or --ring PATH")


def _parse_element_spec(ring: SurfaceRing, n: int, spec: str):
    """Parse `factors;cycles`, factors comma-separated, each `name` (in
    canonical orbit order) or `name@orbit-minimum`; unassigned orbits under
    the @ form default to the unit."""
    if ";" not in spec:
        raise UsageError(f"element spec needs `factors;cycles`: {spec!r}")
    factor_text, cycle_text = spec.rsplit(";", 1)
    sigma = parse_cycles(cycle_text.strip(), n)
    blocks = sigma_orbits(sigma).blocks
    entries = [f.strip() for f in factor_text.split(",") if f.strip()]
    tagged = [e for e in entries if "@" in e]
    if tagged and len(tagged) != len(entries):
        raise UsageError("mix of positional and @-tagged factors in element spec")
    factors = [ring.unit] * len(blocks)
    if tagged:
        mins = {block[0]: i for i, block in enumerate(blocks)}
        for entry in entries:
            name, at = entry.split("@", 1)
            try:
                anchor = int(at)
            except ValueError:
                raise UsageError(f"orbit anchor must be an integer: {entry!r}")
            if anchor not in mins:
                raise UsageError(
                    f"{anchor} is not the minimum of an orbit of {sigma.cycle_string()}"
                )
            factors[mins[anchor]] = ring.index(name)
    else:
        if len(entries) != len(blocks):
            raise UsageError(
                f"{len(blocks)} factors required for {sigma.cycle_string()}, got {len(entries)}"
            )
        factors = [ring.index(name) for name in entries]
    return make_element(ring, n, sigma, factors)


def _emit_report(report: CheckReport, fmt: str) -> int:
    if fmt == "json":
        print(report.to_json())
    else:
        print(report.render_text())
    return EXIT_PASS if report.passed else EXIT_FAIL


# -- subcommands --------------------------------------------------------------


def _cmd_ring_show(args) -> int:
    ring = _resolve_ring(args)
    report = validate(ring)
    if args.format == "json":
        payload = {
            "name": ring.name,
            "mode": ring.mode,
            "basis": [
                {"name": nm, "degree": d, "perversity": p}
                for nm, d, p in zip(ring.names, ring.degrees, ring.perversities)
            ],
            "euler": ring.render_class(ring.euler),
            "validation": report.status,
        }
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        print(f"ring {ring.name}: mode={ring.mode}, {ring.size} basis elements")
        for nm, d, p in zip(ring.names, ring.degrees, ring.perversities):
            print(f"  {nm}: degree={d} perversity={p}")
        print(f"  euler class: {ring.render_class(ring.euler)}")
        print(f"  validation: {report.status}")
    return EXIT_PASS if report.passed else EXIT_FAIL


def _cmd_mul(args) -> int:
    ring = _resolve_ring(args)
    n = args.n
    x = _parse_element_spec(ring, n, args.x)
    y = _parse_element_spec(ring, n, args.y)
    result = cup_class(ring, x, y)
    perv = perversity_class(ring, result)
    degree = (
        element_degree(ring, next(iter(result.terms))) if result.terms else None
    )
    if args.format == "json":
        payload = {
            "x": args.x,
            "y": args.y,
            "product": render_class(ring, result),
            "degree": degree,
            "perversity": None if not result.terms else int(perv),
        }
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        print(f"product: {render_class(ring, result)}")
        print(f"degree: {degree}")
        print(f"perversity: {'-inf' if not result.terms else int(perv)}")
    return EXIT_PASS


def _cmd_verify(args) -> int:
    suite = args.suite
    if suite == "monodromy":
        return _emit_report(check_monodromy_suite(), args.format)
    ring = _resolve_ring(args)
    n = args.n if args.n is not None else 2
    if suite == "multiplicativity":
        report = check_multiplicativity(
            ring, n, limit=args.limit, seed=args.seed, jobs=args.jobs
        )
    elif suite == "diagonal":
        report = check_diagonal_bound(ring, n_max=max(n, 2))
    elif suite == "associativity":
        report = check_associativity(ring, n, limit=args.limit, seed=args.seed)
    elif suite == "equivariance":
        report = check_equivariance(ring, n, limit=args.limit, seed=args.seed)
    else:
        raise UsageError(f"unknown suite {suite!r}")
    report.info.setdefault("seed", args.seed)
    report.info.setdefault("n", n)
    return _emit_report(report, args.format)


def _cmd_series(args) -> int:
    action = args.action
    if action == "closed":
        spec = SeriesSpec.parse(args.case, args.s_bound)
        sys.stdout.write(series_to_text(closed_form(spec)))
        return EXIT_PASS
    if action == "refined":
        ring = _resolve_ring(args)
        sys.stdout.write(series_to_text(refined_goettsche(ring_dims(ring), args.s_bound)))
        return EXIT_PASS
    if action == "bruteforce":
        ring = _resolve_ring(args)
        n = args.n if args.n is not None else 1
        poly = brute_force_poincare(ring, n, limit=args.limit)
        if args.format == "json":
            print(
                json.dumps(
                    {"n": n, "ring": ring.name, "polynomial": poly_render(poly)},
                    sort_keys=True,
                    indent=2,
                )
            )
        else:
            sys.stdout.write(series_to_text(poly_to_series(poly, n, n)))
        return EXIT_PASS
    if action == "compare":
        with open(args.series_a, "r", encoding="utf-8") as handle:
            series_a = series_from_text(handle.read())
        with open(args.series_b, "r", encoding="utf-8") as handle:
            series_b = series_from_text(handle.read())
        comparison = compare_series(series_a, series_b, args.up_to)
        if args.format == "json":
            print(json.dumps(comparison.to_json_dict(), sort_keys=True, indent=2))
        else:
            print(comparison.render_text())
        return EXIT_PASS if comparison.equal else EXIT_FAIL
    raise UsageError(f"unknown series action {action!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hilb",
        description="Exact wreath-product model of Hilbert-scheme cohomology "
        "with perverse-filtration checkers and generating series.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ring_parser = sub.add_parser("ring", help="ring inspection")
    ring_sub = ring_parser.add_subparsers(dest="ring_command", required=True)
    show = ring_sub.add_parser("show", help="basis table, mode, validation summary")
    _add_ring_source(show)
    _add_common(show)
    show.set_defaults(func=_cmd_ring_show)

    mul = sub.add_parser("mul", help="cup product of two wreath elements")
    _add_ring_source(mul)
    _add_common(mul)
    mul.add_argument("-n", type=int, required=True)
    mul.add_argument("x", help="element spec `factors;cycles`, e.g. '1;(1 2)'")
    mul.add_argument("y")
    mul.set_defaults(func=_cmd_mul)

    verify = sub.add_parser("verify", help="run a verification suite")
    verify.add_argument(
        "suite",
        choices=(
            "multiplicativity",
            "diagonal",
            "associativity",
            "equivariance",
            "monodromy",
        ),
    )
    _add_ring_source(verify)
    _add_common(verify)
    verify.add_argument("-n", type=int, default=None)
    verify.set_defaults(func=_cmd_verify)

    series = sub.add_parser("series", help="generating-series commands")
    series_sub = series.add_subparsers(dest="action", required=True)

    closed = series_sub.add_parser("closed", help="closed-form family expansion")
    closed.add_argument("--case", required=True, help=f"one of {', '.join(CASE_NAMES)}")
    closed.add_argument("--s-bound", type=int, required=True, dest="s_bound")
    _add_common(closed)
    closed.set_defaults(func=_cmd_series, action="closed")

    refined = series_sub.add_parser("refined", help="refined product from ring data")
    _add_ring_source(refined)
    refined.add_argument("--s-bound", type=int, required=True, dest="s_bound")
    _add_common(refined)
    refined.set_defaults(func=_cmd_series, action="refined")

    brute = series_sub.add_parser("bruteforce", help="orbit-count Poincare polynomial")
    _add_ring_source(brute)
    brute.add_argument("-n", type=int, required=True)
    _add_common(brute)
    brute.set_defaults(func=_cmd_series, action="bruteforce")

    compare = series_sub.add_parser("compare", help="compare two series files")
    compare.add_argument("series_a")
    compare.add_argument("series_b")
    compare.add_argument("--up-to", type=int, required=True, dest="up_to")
    _add_common(compare)
    compare.set_defaults(func=_cmd_series, action="compare")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors already; normalize other codes
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_PASS
    try:
        return args.func(args)
    except (UsageError, DataError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
