"""Command-line front end: bounds, benchmark reproduction, sweeps, verification.

Exit codes are a stable contract for CI: 0 success, 1 usage error,
2 domain error (the violated constraint is named on stderr), and
3 verification or reproduction failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .classic_bounds import (
    UnknownIharaBound,
    gv_bound,
    ihara_lower_exact,
    make_profile,
    no1_bound,
    tvz_bound,
)
from .numerics import DomainError, PrecisionReal, parse_exact, truncate_decimal
from .rate_bounds import (
    compare_table,
    make_bound_problem,
    optimize_x,
    r_general,
    r_lin,
    rows_to_csv,
    rows_to_json,
)
from .reference_cases import REFERENCE_CASES
from .verification import (
    run_combinatorics_verification,
    run_surface_verification,
    run_vectors_verification,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DOMAIN = 2
EXIT_VERIFICATION = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse variant that reports usage problems with exit code 1."""

    def error(self, message):
        raise _UsageError(message)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--precision-bits", type=int, default=768,
                        help="working precision in bits (default 768)")
    parser.add_argument("--digits", type=int, default=30,
                        help="decimal digits to print (default 30)")
    parser.add_argument("--format", choices=("table", "csv", "json"),
                        default="table", help="output format")


def build_parser() -> _Parser:
    parser = _Parser(prog="agbounds",
                     description="Asymptotic rate bounds for q-ary codes at "
                                 "configurable precision, with exact "
                                 "combinatorial verification suites.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_bound = sub.add_parser("bound", parents=[], help="compute one bound")
    p_bound.add_argument("kind", choices=("gv", "tvz", "no1", "lin", "new"))
    p_bound.add_argument("--q", required=True,
                         help="field size (integer or power form like 2^21)")
    p_bound.add_argument("--delta", required=True,
                         help="relative distance (decimal, p/q, or power form)")
    p_bound.add_argument("--gamma", default=None,
                         help="places-per-genus limit; defaults from q when "
                              "q is a square or cube")
    p_bound.add_argument("--gamma-l", action="append", default=[],
                         metavar="L=V", help="degree-l profile entry (repeatable)")
    p_bound.add_argument("--x", default=None,
                         help="comma-separated x-vector for kind 'new'")
    p_bound.add_argument("--m", type=int, default=None,
                         help="expected length of the x-vector (cross-check)")
    _add_common(p_bound)

    p_rep = sub.add_parser("reproduce", help="re-run a benchmark case")
    p_rep.add_argument("case", choices=sorted(REFERENCE_CASES))
    _add_common(p_rep)

    p_scan = sub.add_parser("scan", help="sweep delta and emit a comparison table")
    p_scan.add_argument("--q", required=True)
    p_scan.add_argument("--gamma", default=None)
    p_scan.add_argument("--gamma-l", action="append", default=[], metavar="L=V")
    p_scan.add_argument("--delta-from", required=True)
    p_scan.add_argument("--delta-to", required=True)
    p_scan.add_argument("--steps", type=int, required=True)
    p_scan.add_argument("--m", type=int, default=1)
    p_scan.add_argument("--x", default=None,
                        help="x-vector, or the word 'optimize'")
    p_scan.add_argument("--budget", type=int, default=50,
                        help="evaluation budget when optimizing")
    _add_common(p_scan)

    p_ver = sub.add_parser("verify", help="run verification suites")
    p_ver.add_argument("suite", choices=("combinatorics", "vectors", "surface", "all"))
    p_ver.add_argument("--seed", type=int, default=0,
                       help="seed for randomized checks (default 0)")
    _add_common(p_ver)
    return parser


def _parse_q(text: str) -> int:
    value = parse_exact(text)
    if not isinstance(value, int) or value < 2:
        raise DomainError(f"q must be an integer >= 2, got {text!r}")
    return value


def _parse_gamma_l(entries: list[str]) -> dict[int, Fraction]:
    table = {}
    for entry in entries:
        key, sep, value = entry.partition("=")
        if not sep:
            raise DomainError(f"--gamma-l expects L=V, got {entry!r}")
        table[int(key)] = Fraction(parse_exact(value))
    return table


def _profile_from_args(args) -> "IharaProfile":
    q = _parse_q(args.q)
    gamma = parse_exact(args.gamma) if args.gamma is not None else None
    gamma_l = _parse_gamma_l(args.gamma_l) if getattr(args, "gamma_l", None) else None
    try:
        return make_profile(q, gamma, gamma_l, precision=args.precision_bits)
    except UnknownIharaBound as exc:
        raise DomainError(f"{exc}; pass an explicit --gamma") from exc


def _parse_xs(text: str) -> tuple[Fraction, ...]:
    return tuple(Fraction(parse_exact(part)) for part in text.split(","))


def _clamp_unit(value: PrecisionReal) -> PrecisionReal:
    from .numerics import as_real
    if value < 0:
        return as_real(0, value.precision)
    if value > 1:
        return as_real(1, value.precision)
    return value


def _emit(record: dict, fmt: str, out) -> None:
    if fmt == "json":
        print(json.dumps(record, indent=2), file=out)
    elif fmt == "csv":
        print("key,value", file=out)
        for key, value in record.items():
            if isinstance(value, dict):
                continue
            print(f"{key},{value}", file=out)
    else:
        for key, value in record.items():
            if isinstance(value, dict):
                print(f"{key}:", file=out)
                for k, v in value.items():
                    print(f"  {k} = {v}", file=out)
            else:
                print(f"{key} = {value}", file=out)


def cmd_bound(args, out) -> int:
    q = _parse_q(args.q)
    digits = args.digits
    precision = args.precision_bits
    delta = parse_exact(args.delta)
    record: dict = {"kind": args.kind, "q": q,
                    "delta": str(delta)}

    if args.kind == "gv":
        if Fraction(delta) >= Fraction(q - 1, q):
            raise DomainError(
                f"bound gv requires delta < (q-1)/q = {Fraction(q - 1, q)}")
        value = gv_bound(q, delta, precision)
        psi_diag = None
    else:
        profile = _profile_from_args(args)
        record["gamma"] = truncate_decimal(profile.gamma, digits)
        if args.kind == "tvz":
            value, psi_diag = tvz_bound(delta, profile.gamma, precision), None
        elif args.kind == "no1":
            value, psi_diag = no1_bound(q, delta, profile.gamma, precision), None
        elif args.kind == "lin":
            result = r_lin(profile, delta, precision)
            value, psi_diag = result.value, result.psi.diagnostics
        else:  # new
            if args.x is None:
                raise DomainError("kind 'new' requires --x")
            xs = _parse_xs(args.x)
            if args.m is not None and args.m != len(xs):
                raise DomainError(f"--m {args.m} disagrees with {len(xs)} x-values")
            problem = make_bound_problem(profile, delta, xs, precision)
            result = r_general(problem)
            value, psi_diag = result.value, result.psi.diagnostics
            lin = r_lin(profile, delta, precision)
            record["r_lin"] = truncate_decimal(lin.value, digits)
            record["gain_over_lin"] = truncate_decimal(value - lin.value,
                                                       max(digits, 100))

    record["value"] = truncate_decimal(value, digits)
    record["clamped"] = truncate_decimal(_clamp_unit(value), digits)
    if psi_diag is not None:
        record["psi"] = psi_diag.as_dict(digits)
    _emit(record, args.format, out)
    return EXIT_OK


def margin_resolvable(margin: Fraction, precision: int) -> bool:
    """Precision guard: the bisection cannot certify margins below its width."""
    return margin > Fraction(1, 2) ** max(precision - 40, 1)


def cmd_reproduce(args, out) -> int:
    case = REFERENCE_CASES[args.case]
    precision = args.precision_bits
    profile = make_profile(case.q, case.gamma, precision=precision)
    lines = []
    records = []
    all_pass = True

    for idx, sub in enumerate(case.cases, start=1):
        lin = r_lin(profile, sub.delta, precision)
        expected18 = sub.r_lin_digits[:20]  # "0." + 18 digits
        got18 = truncate_decimal(lin.value, 18)
        lin_ok = got18 == expected18

        if margin_resolvable(sub.gain_margin, precision):
            problem = make_bound_problem(profile, sub.delta, sub.xs, precision)
            general = r_general(problem)
            gain = general.value - lin.value
            gain_ok = gain >= sub.gain_margin
            gain_reason = ""
            general_text = truncate_decimal(general.value, args.digits)
            gain_text = truncate_decimal(gain, 140)
        else:
            gain = None
            gain_ok = False
            gain_reason = " (insufficient precision for this margin)"
            general_text = "n/a"
            gain_text = "n/a"

        competitor = Fraction(sub.competitor_digits)
        lead = lin.value - competitor
        competitor_ok = margin_resolvable(sub.competitor_margin, precision) \
            and lead >= sub.competitor_margin

        all_pass &= lin_ok and gain_ok and competitor_ok
        records.append({
            "delta_index": idx,
            "delta": sub.delta_digits,
            "r_lin": truncate_decimal(lin.value, args.digits),
            "r_lin_expected": sub.r_lin_digits,
            "r_lin_pass": lin_ok,
            "r_general": general_text,
            "gain": gain_text,
            "gain_margin": str(sub.gain_margin),
            "gain_pass": gain_ok,
            "competitor": sub.competitor_digits,
            "competitor_margin": str(sub.competitor_margin),
            "competitor_pass": competitor_ok,
        })
        lines.append(f"case {case.label} delta#{idx} = {sub.delta_digits}...")
        lines.append(f"  r_lin     = {truncate_decimal(lin.value, args.digits)}")
        lines.append(f"  expected  = {sub.r_lin_digits}... -> "
                     f"{'PASS' if lin_ok else 'FAIL'} (first 18 digits)")
        lines.append(f"  gain      = {_sci(gain) if gain is not None else 'n/a'} "
                     f">= {float(sub.gain_margin):.6e} -> "
                     f"{'PASS' if gain_ok else 'FAIL'}{gain_reason}")
        lines.append(f"  vs known  = +{_sci(lead)} >= {float(sub.competitor_margin):.6e} -> "
                     f"{'PASS' if competitor_ok else 'FAIL'}")

    if args.format == "json":
        print(json.dumps({"case": case.label, "q": case.q,
                          "passed": all_pass, "results": records}, indent=2),
              file=out)
    elif args.format == "csv":
        print("case,delta_index,r_lin_pass,gain_pass,competitor_pass", file=out)
        for rec in records:
            print(f"{case.label},{rec['delta_index']},{rec['r_lin_pass']},"
                  f"{rec['gain_pass']},{rec['competitor_pass']}", file=out)
    else:
        for line in lines:
            print(line, file=out)
        print(f"overall: {'PASS' if all_pass else 'FAIL'}", file=out)
    return EXIT_OK if all_pass else EXIT_VERIFICATION


def _sci(value) -> str:
    import mpmath as mp
    if isinstance(value, PrecisionReal):
        value = value.value
    return mp.nstr(mp.mpf(value), 8)


def cmd_scan(args, out) -> int:
    profile = _profile_from_args(args)
    lo = Fraction(parse_exact(args.delta_from))
    hi = Fraction(parse_exact(args.delta_to))
    if not (0 < lo < hi < 1):
        raise DomainError("scan requires 0 < delta-from < delta-to < 1")
    if args.steps < 1:
        raise DomainError("scan requires steps >= 1")
    if args.steps == 1:
        deltas = [lo]
    else:
        step = (hi - lo) / (args.steps - 1)
        deltas = [lo + k * step for k in range(args.steps)]
    xs = None
    if args.x == "optimize":
        xs = "optimize"
    elif args.x is not None:
        xs = _parse_xs(args.x)
    rows = compare_table(profile, deltas, args.m, xs,
                         precision=args.precision_bits, budget=args.budget)
    if args.format == "json":
        print(json.dumps(rows_to_json(rows, args.digits), indent=2), file=out)
    else:
        # csv is the plot-ready default; "table" prints the same grid
        print(rows_to_csv(rows, args.digits), end="", file=out)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    suites = {}
    if args.suite in ("combinatorics", "all"):
        suites["combinatorics"] = run_combinatorics_verification()
    if args.suite in ("vectors", "all"):
        suites["vectors"] = run_vectors_verification(seed=args.seed)
    if args.suite in ("surface", "all"):
        suites["surface"] = run_surface_verification(
            seed=args.seed, precision=args.precision_bits)

    passed = all(report.get("passed") for report in suites.values())
    if args.format == "json":
        print(json.dumps({"passed": passed, "suites": suites}, indent=2), file=out)
    else:
        for name, report in suites.items():
            print(f"suite {name}: {'PASS' if report.get('passed') else 'FAIL'}",
                  file=out)
            for check in report.get("checks", []):
                print(f"  {check['name']}: {check['total'] - check['failures']}"
                      f"/{check['total']} pass", file=out)
            for grid in report.get("grids", []):
                print(f"  grid q={grid['q']} m={grid['m']} r<={grid['r_max']}: "
                      f"{grid['count_u_checks']} profile counts, "
                      f"{grid['count_vm_checks']} family counts, "
                      f"{grid['emptiness_checks']} emptiness checks", file=out)
            if report.get("mismatches"):
                print(f"  first mismatch: "
                      f"{json.dumps(report['mismatches'][0])}", file=out)
            if report.get("first_counterexample"):
                print(f"  first counterexample: "
                      f"{json.dumps(report['first_counterexample'])}", file=out)
    return EXIT_OK if passed else EXIT_VERIFICATION


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.precision_bits < 128:
            raise DomainError("precision-bits must be at least 128")
        if args.digits < 1:
            raise DomainError("digits must be at least 1")
        if args.command == "bound":
            return cmd_bound(args, out)
        if args.command == "reproduce":
            return cmd_reproduce(args, out)
        if args.command == "scan":
            return cmd_scan(args, out)
        if args.command == "verify":
            return cmd_verify(args, out)
        raise _UsageError(f"unknown command {args.command!r}")
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
