"""surgelens command line.

Exit codes: 0 success, 1 bad input, 2 non-cyclic H_1 (classify/obstruct),
3 scan disagreements or failed verification criteria, 130 interrupted scan.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .alexander import LinkModel, hatK_alexander
from .catalog import NOT_CYCLIC, classify_milnor, classify_twisted_whitehead
from .cyclo import CycNum, d_norm, parse_coeff_list
from .laurent import format_poly, parse_poly
from .obstruct import lens_candidate_filter
from .scan import ScanConfig, ScanSummary, read_config_file, stream_scan, threads_from_env, write_stream
from .surgery import NotCyclic, SurgerySlope, SurgerySpec, lens_torsion_test, parse_slopes

EXIT_OK, EXIT_INPUT, EXIT_NOT_CYCLIC, EXIT_INCONSISTENT, EXIT_INTERRUPTED = 0, 1, 2, 3, 130


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # exit code 2 is reserved for a non-cyclic H_1
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _slopes(text: str) -> list[SurgerySlope]:
    try:
        out = parse_slopes(text)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    if not out:
        raise InputError("no slopes given")
    return out


def _link_from_args(args) -> LinkModel:
    fam = args.family
    if fam in ("milnor3", "milnor"):
        lam = 3 if fam == "milnor3" else (args.components or 3)
        return LinkModel.milnor(lam)
    if fam == "whitehead":
        if args.twists is None:
            raise InputError("--twists is required for the whitehead family")
        return LinkModel.whitehead(args.twists)
    if fam == "brunnian_type":
        if args.components is None or args.f is None:
            raise InputError("brunnian_type needs --components and --f")
        names = [f"t{i + 1}" for i in range(args.components)]
        return LinkModel.brunnian_type(args.components, parse_poly(args.f, names))
    if fam == "satellite2":
        if args.k is None or args.inner is None:
            raise InputError("satellite2 needs --k and --inner (JSON link descriptor)")
        return LinkModel.satellite2(args.k, LinkModel.from_json(json.loads(args.inner)))
    raise InputError(f"unknown family {fam!r}")


# -- subcommands -----------------------------------------------------------------


def cmd_classify(args) -> int:
    slopes = _slopes(args.slopes)
    if args.family == "whitehead":
        if args.twists is None:
            raise InputError("--twists is required for the whitehead family")
        verdict = classify_twisted_whitehead(args.twists, slopes)
    elif args.family in ("milnor3", "milnor"):
        lam = 3 if args.family == "milnor3" else (args.components or len(slopes))
        verdict = classify_milnor(lam, slopes, evidence=args.evidence)
    else:
        raise InputError(f"no classification table for family {args.family!r}")
    _emit(verdict.to_json())
    return EXIT_NOT_CYCLIC if verdict.outcome == NOT_CYCLIC else EXIT_OK


def _load_spec(args) -> SurgerySpec:
    if args.spec:
        try:
            with open(args.spec, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read spec {args.spec}: {exc}") from exc
        return SurgerySpec.from_json(data)
    if not args.family or not args.slopes:
        raise InputError("give --spec FILE or --family with --slopes")
    return SurgerySpec(_link_from_args(args), tuple(_slopes(args.slopes)))


def _target(text: str | None):
    if text is None:
        return None
    parts = text.replace("/", ",").split(",")
    if len(parts) != 2:
        raise InputError(f"target must be P,Q, got {text!r}")
    return int(parts[0]), int(parts[1])


def cmd_obstruct(args) -> int:
    spec = _load_spec(args)
    lam = spec.link.components
    ks = [args.component] if args.component else list(range(1, lam + 1))
    target = _target(args.target)
    out = {"spec": spec.to_json(), "components": []}
    for k in ks:
        if not 1 <= k <= lam:
            raise InputError(f"component {k} out of range 1..{lam}")
        entry = lens_candidate_filter(spec, k).to_json()
        if target is not None:
            entry["targeted"] = lens_torsion_test(spec, k, target).to_json()
        out["components"].append(entry)
    _emit(out)
    return EXIT_OK


def _scan_config(args) -> ScanConfig:
    values = {}
    if args.config:
        try:
            values.update(read_config_file(args.config))
        except OSError as exc:
            raise InputError(str(exc)) from exc
    if "parallelism" not in values and "threads" not in values:
        values["parallelism"] = threads_from_env()
    overrides = {
        "family": args.family,
        "components": args.components,
        "max_abs_p": args.max_abs_p,
        "max_abs_q": args.max_abs_q,
        "parallelism": args.parallelism,
        "output": args.output,
        "format": args.format,
    }
    values.update({k: v for k, v in overrides.items() if v is not None})
    return ScanConfig.from_mapping(values)


def cmd_scan(args) -> int:
    cfg = _scan_config(args)
    t0 = time.perf_counter()
    summary = ScanSummary()
    chunks = stream_scan(cfg, summary)
    try:
        if cfg.output:
            with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
                write_stream(cfg, summary, chunks, fh)
        else:
            write_stream(cfg, summary, chunks, sys.stdout)
    except KeyboardInterrupt:
        # interrupted while writing rather than computing; the report is truncated
        summary.interrupted = True
    elapsed = time.perf_counter() - t0
    print(
        f"scan: {summary.records} records, {len(summary.disagreements)} disagreements, "
        f"{len(summary.needs_review)} needs_review, {elapsed:.1f}s",
        file=sys.stderr,
    )
    if summary.interrupted:
        return EXIT_INTERRUPTED
    return EXIT_INCONSISTENT if summary.disagreements else EXIT_OK


def cmd_norm(args) -> int:
    if args.order < 1:
        raise InputError("--order must be positive")
    num = parse_coeff_list(args.coeffs)
    den = parse_coeff_list(args.den) if args.den else [1]
    x = CycNum.from_terms(args.order, list(enumerate(num))) / CycNum.from_terms(args.order, list(enumerate(den)))
    n = d_norm(x)
    _emit({"d": args.order, "norm": str(n), "numerator": n.numerator, "denominator": n.denominator})
    return EXIT_OK


def cmd_alex(args) -> int:
    link = _link_from_args(args)
    out = {"link": link.to_json(), "alexander": format_poly(link.alexander())}
    if args.hatk is not None:
        qs = [int(v) for v in args.hatk.split(",")] if args.hatk else [1] * (link.components - 1)
        f = link.f_at(args.hatk_component - 1)
        out["hatK"] = format_poly(hatK_alexander(f, qs, link.components))
    _emit(out)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_all

    only = {int(v) for v in args.only.split(",")} if args.only else None
    parallelism = args.parallelism or threads_from_env()
    results = []
    for res in run_all(parallelism=parallelism, only=only):
        results.append(res)
        if not args.json:
            print(res.line(), flush=True)
    if args.json:
        _emit([r.to_json() for r in results])
    return EXIT_OK if all(r.passed for r in results) else EXIT_INCONSISTENT


# -- argument parsing --------------------------------------------------------------


def _add_family(p, families, required=True):
    p.add_argument("--family", choices=families, required=required)
    p.add_argument("--components", type=int, help="component count (milnor, brunnian_type)")
    p.add_argument("--twists", type=int, help="n for the twisted Whitehead link")
    p.add_argument("--f", help="f polynomial in t1..t_lambda (brunnian_type)")
    p.add_argument("--k", type=int, help="winding parameter (satellite2)")
    p.add_argument("--inner", help="inner link descriptor as JSON (satellite2)")


FAMILIES = ("milnor3", "milnor", "whitehead", "brunnian_type", "satellite2")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="surgelens", description="Lens-space surgery obstructions for Brunnian links.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("classify", help="classify one surgery")
    _add_family(p, ("milnor3", "milnor", "whitehead"))
    p.add_argument("--slopes", required=True, help="comma separated p/q list; use --slopes=-1/1,... for a leading minus")
    p.add_argument("--evidence", action="store_true", help="attach obstruction evidence (milnor, four or more components)")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("obstruct", help="run the obstruction pipeline on one surgery")
    p.add_argument("--spec", help="JSON file with {link, slopes}")
    _add_family(p, FAMILIES, required=False)
    p.add_argument("--slopes")
    p.add_argument("-k", "--component", type=int, help="1-based component index (default: all)")
    p.add_argument("--target", help="lens space P,Q for a targeted torsion test")
    p.set_defaults(func=cmd_obstruct)

    p = sub.add_parser("scan", help="scan a slope grid")
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--family", choices=("milnor3", "milnor"))
    p.add_argument("--components", type=int)
    p.add_argument("--max-abs-p", type=int)
    p.add_argument("--max-abs-q", type=int)
    p.add_argument("--parallelism", type=int)
    p.add_argument("--output")
    p.add_argument("--format", choices=("json", "csv"))
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("norm", help="norm of an element of Q(zeta_d)")
    p.add_argument("--order", "-d", type=int, required=True)
    p.add_argument("--coeffs", required=True, help="coefficients c0,c1,... of sum c_i zeta^i")
    p.add_argument("--den", help="optional denominator coefficients")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("alex", help="Alexander polynomial of a family member")
    _add_family(p, FAMILIES)
    p.add_argument("--hatk", nargs="?", const="", help="also print hatK for q values q1,q2,... (default all 1)")
    p.add_argument("--hatk-component", type=int, default=1)
    p.set_defaults(func=cmd_alex)

    p = sub.add_parser("verify-paper", help="run the reproduction criteria")
    p.add_argument("--only", help="comma separated criterion numbers")
    p.add_argument("--parallelism", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NotCyclic as exc:
        print(f"surgelens: {exc}", file=sys.stderr)
        return EXIT_NOT_CYCLIC
    except (InputError, ValueError, KeyError) as exc:
        print(f"surgelens: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
