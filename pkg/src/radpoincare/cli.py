"""Command-line interface.

Subcommands: ``constants``, ``xi``, ``zeta``, ``check``, ``suite``, ``sharpness``.
Exit codes: 0 pass, 1 fail, 2 spec/hypothesis error, 3 numerical non-convergence.
"""

import argparse
import sys

from . import __version__, hypgeom
from . import coefficients as co
from .harness import SPEC_IDS, SUITES, InequalitySpec, check_inequality, load_config, run_suite
from .quadrature import QuadratureError
from .radial import default_library
from .report import emit_report, encode_json, format_float

EXIT_PASS, EXIT_FAIL, EXIT_SPEC, EXIT_NUMERIC = 0, 1, 2, 3
_EXIT = {"pass": EXIT_PASS, "fail": EXIT_FAIL, "spec_error": EXIT_SPEC}


def _table_dict(table, sharp=None):
    d = {
        "meta": {
            "version": __version__,
            "family": table.family,
            "n": table.n,
            "params": [str(x) for x in table.params],
            "table_version": table.version,
            "status": table.status,
        },
        "entries": [
            {"index": i, "weight_exponent": str(table.weight_exponent(i)), "exact": str(v), "value": float(v)}
            for i, v in table.items()
        ],
        "checks": [
            {"name": c.name, "recursion": str(c.recursion), "closed_form": str(c.closed_form), "ok": c.ok}
            for c in table.checks
        ],
    }
    if sharp is not None:
        d["meta"]["sharp_constant"] = str(sharp)
    return d


def _print_table(table, out, fmt="text", sharp=None):
    if fmt == "json":
        out.write(encode_json(_table_dict(table, sharp)) + "\n")
        return
    if fmt == "csv":
        out.write("index,weight_exponent,exact,value\n")
        for i, v in table.items():
            out.write(f"{i},{table.weight_exponent(i)},{v},{format_float(v)}\n")
        return
    params = ",".join(str(x) for x in table.params)
    out.write(f"# {table.family}({params}) n={table.n} status={table.status} version={table.version}\n")
    if sharp is not None:
        out.write(f"# sharp constant {sharp}\n")
    out.write(f"{'index':>5}  {'r-power':>7}  {'exact':>24}  value\n")
    for i, v in table.items():
        out.write(f"{i:>5}  {str(table.weight_exponent(i)):>7}  {str(v):>24}  {format_float(v)}\n")
    for c in table.checks:
        mark = "ok" if c.ok else "MISMATCH"
        out.write(f"# check {c.name}: recursion={c.recursion} closed_form={c.closed_form} [{mark}]\n")


def cmd_constants(args, cfg, out):
    sharp = co.sharp_constant(args.n, args.k, args.l)
    if args.family == "sharp":
        if args.format == "json":
            out.write(f'{{"n": {args.n}, "k": {args.k}, "l": {args.l}, "exact": "{sharp}", '
                      f'"value": {format_float(sharp)}}}\n')
        else:
            out.write("n,k,l,exact,value\n" if args.format == "csv" else "")
            out.write(f"{args.n},{args.k},{args.l},{sharp},{format_float(sharp)}\n")
        return EXIT_PASS
    table = (co.c_table if args.family == "C" else co.d_table)(args.n, args.k, args.l)
    _print_table(table, out, args.format, sharp)
    return EXIT_PASS


def cmd_iterated(args, cfg, out):
    table = (co.xi_table if args.command == "xi" else co.zeta_table)(args.n, args.alpha, args.beta)
    _print_table(table, out, args.format)
    return EXIT_PASS


def _print_rows(rep_dict, out):
    out.write(f"# spec={rep_dict['meta']['spec']} n={rep_dict['meta']['n']} "
              f"config={rep_dict['meta']['config_hash']} verdict={rep_dict['verdict']}\n")
    for key in ("message",):
        if rep_dict["meta"].get(key):
            out.write(f"# {key}: {rep_dict['meta'][key]}\n")
    out.write("func,lhs,rhs,deficit,rel_deficit\n")
    for r in rep_dict["rows"]:
        out.write(",".join([r["func"]] + [format_float(r[c]) for c in ("lhs", "rhs", "deficit", "rel_deficit")]) + "\n")


def cmd_check(args, cfg, out):
    try:
        spec = InequalitySpec(
            args.spec, args.n, alpha=args.alpha, k=args.k, l=args.l, beta=args.beta,
            tolerance=cfg.tolerance if args.tol is None else args.tol,
        )
    except co.HypothesisError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    report = check_inequality(spec, default_library(cfg.library_seed), cfg)
    if args.out:
        emit_report(report, args.format, args.out)
    _print_rows(report.to_dict(), out)
    return _EXIT[report.verdict]


def cmd_suite(args, cfg, out):
    report = run_suite(args.name, args.n, cfg)
    if args.out:
        emit_report(report, args.format, args.out)
    out.write(f"# suite={args.name} n={args.n} config={report.config_hash} verdict={report.verdict}\n")
    out.write("spec,verdict,functions,min_rel_deficit\n")
    for rep in report.reports:
        out.write(f"{rep.spec.label},{rep.verdict},{len(rep.rows)},{format_float(rep.min_rel_deficit)}\n")
    for spec in report.inadmissible:
        out.write(f"{spec.label},inadmissible,0,\n")
    return _EXIT[report.verdict]


def _parse_ratios(text):
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}")
    if not values or any(v <= 0 for v in values):
        raise argparse.ArgumentTypeError("ln(R/R0) values must be positive")
    return values


def cmd_sharpness(args, cfg, out):
    from .sharpness import sharpness_sweep

    sweep = sharpness_sweep(args.n, args.k, args.l, args.eps, args.r_ratios, iter=args.iter, cfg=cfg.quadrature)
    out.write(f"# n={sweep.n} k={sweep.k} l={sweep.l} eps={sweep.eps} R0={format_float(sweep.R0)} "
              f"sharp={format_float(sweep.sharp)} asymptotic_bound={format_float(sweep.asymptotic_bound)}\n")
    for note in sweep.notes:
        out.write(f"# {note}\n")
    extra_keys = sorted({k for r in sweep.rows for k in r.extra})
    out.write(",".join(["ln_ratio", "R", "numerator", "denominator", "quotient", "certified_bound"] + extra_keys) + "\n")
    for r in sweep.rows:
        cells = [r.ln_ratio, r.R, r.numerator, r.denominator, r.quotient]
        line = [format_float(c) for c in cells]
        line.append("" if r.certified_bound is None else format_float(r.certified_bound))
        line += [str(r.extra.get(k, "")) for k in extra_keys]
        out.write(",".join(line) + "\n")
    floor_ok = sweep.min_quotient >= sweep.sharp * (1 - 1e-8)
    bootstrap_ok = all(r.extra.get("bootstrap_ok", True) for r in sweep.rows)
    ok = floor_ok and bootstrap_ok and sweep.nonincreasing()
    out.write(f"# nonincreasing={sweep.nonincreasing()} above_sharp={floor_ok} verdict={'pass' if ok else 'fail'}\n")
    return EXIT_PASS if ok else EXIT_FAIL


def build_parser():
    p = argparse.ArgumentParser(
        prog="radpoincare",
        description="Constants, coefficient tables and numerical checks of radial Poincare-Hardy-Rellich inequalities on H^N.",
    )
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--config", help="key=value file overriding quadrature tolerances, horizon, library seed")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("constants", help="sharp constant or C/D remainder table")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--l", type=int, required=True)
    c.add_argument("--family", choices=("sharp", "C", "D"), default="sharp")
    c.add_argument("--format", choices=("text", "json", "csv"), default="text")
    c.set_defaults(func=cmd_constants)

    for name in ("xi", "zeta"):
        x = sub.add_parser(name, help=f"iterated weighted Rellich table ({name})")
        x.add_argument("--n", type=int, required=True)
        x.add_argument("--alpha", type=int, required=True)
        x.add_argument("--beta", type=int, required=True)
        x.add_argument("--format", choices=("text", "json", "csv"), default="text")
        x.set_defaults(func=cmd_iterated)

    ch = sub.add_parser("check", help="check one inequality over the default library")
    ch.add_argument("--spec", required=True, choices=SPEC_IDS)
    ch.add_argument("--n", type=int, required=True)
    ch.add_argument("--alpha", type=int)
    ch.add_argument("--k", type=int)
    ch.add_argument("--l", type=int)
    ch.add_argument("--beta", type=int)
    ch.add_argument("--tol", type=float)
    ch.add_argument("--out")
    ch.add_argument("--format", choices=("json", "csv"), default="json")
    ch.set_defaults(func=cmd_check)

    s = sub.add_parser("suite", help="run a named suite over the default library")
    s.add_argument("--name", required=True, choices=sorted(SUITES))
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--out")
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.set_defaults(func=cmd_suite)

    sh = sub.add_parser("sharpness", help="Rayleigh quotients of the minimizing sequence")
    sh.add_argument("--n", type=int, required=True)
    sh.add_argument("--k", type=int, required=True)
    sh.add_argument("--l", type=int, default=0)
    sh.add_argument("--eps", type=float, required=True)
    sh.add_argument("--r-ratios", dest="r_ratios", type=_parse_ratios, required=True,
                    help="comma-separated ln(R/R0) values")
    sh.add_argument("--iter", default="auto", help="v-iteration depth or 'auto'")
    sh.set_defaults(func=cmd_sharpness)
    return p


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg, out)
    except (QuadratureError, hypgeom.RootFindingError) as exc:
        print(f"numerical non-convergence: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return EXIT_SPEC


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
