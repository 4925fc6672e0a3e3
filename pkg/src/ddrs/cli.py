"""The ``ddrs`` command line: normalize, convert, check, enumerate, dump, list.

Exit codes: 0 success or pass, 1 check failure or counterexample, 2 usage,
parse or lookup error. Results go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from . import analysis, catalog, engine, semantics
from .errors import DdrsError, MetaDigitError, RewriteCycle, StepLimitExceeded
from .syntax import parse_term, print_term
from .terms import SIGMA_R, SIGMA_Z

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# intermediate terms above this many nodes trigger a warning
LARGE_TERM = 10**4

VIEWS = {"unary": "Zubd", "binary": "Zbud", "decimal": "Zdub"}

DEFAULT_SAMPLES = 10**4


class _Usage(Exception):
    """Raised for errors that map to exit status 2."""


def _err(msg: str) -> None:
    print(f"ddrs: {msg}", file=sys.stderr)


def _load(args) -> catalog.RewriteSystem:
    if args.file:
        try:
            with open(args.file, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise _Usage(f"cannot read {args.file}: {exc.strerror}") from None
        return catalog.load_system(text, args.file)
    if not args.system:
        raise _Usage("one of --system or --file is required")
    return catalog.builtin(args.system)


def _parse_input(text: str, system: catalog.RewriteSystem):
    return parse_term(text, system.signature)


def _warn_if_large(size: int) -> None:
    if size > LARGE_TERM:
        _err(f"warning: an intermediate term reached {size} nodes (unary notation grows quickly)")


def _strategy(args) -> engine.Strategy:
    if args.strategy == "random":
        return engine.Strategy.random(args.seed)
    return engine.Strategy(args.strategy, args.seed)


# ---------------------------------------------------------------------------
# subcommands


def cmd_normalize(args) -> int:
    system = _load(args)
    t = _parse_input(args.term, system)
    strategy = _strategy(args)
    if args.trace or strategy.kind != "innermost":
        trace = engine.normalize(system, t, strategy, args.step_limit)
        _warn_if_large(max(s.size for s in trace.terms()))
        if args.trace:
            print(trace.dumps())
        else:
            print(print_term(trace.final))
        if not trace.reached_normal_form:
            _err(f"step limit of {args.step_limit} reached without a normal form")
            return EXIT_FAIL
        return EXIT_OK
    norm = engine.Normalizer(system, args.step_limit)
    try:
        nf = norm.normalize(t)
    except RewriteCycle as exc:
        _err(str(exc))
        return EXIT_FAIL
    except StepLimitExceeded as exc:
        _err(str(exc))
        return EXIT_FAIL
    finally:
        _warn_if_large(norm.largest)
    print(print_term(nf))
    return EXIT_OK


def cmd_convert(args) -> int:
    source = catalog.builtin(VIEWS[args.source])
    target = catalog.builtin(VIEWS[args.target])
    t = parse_term(args.term, SIGMA_Z)
    if t not in analysis.grammar_for(source.name) or not engine.is_normal(source, t):
        raise _Usage(f"{args.term!r} is not a {args.source} normal form")
    norm = engine.Normalizer(target, args.step_limit)
    try:
        nf = norm.normalize(t)
    except StepLimitExceeded as exc:
        _err(str(exc))
        return EXIT_FAIL
    finally:
        _warn_if_large(norm.largest)
    print(print_term(nf))
    return EXIT_OK


def _soundness(system, args, out, lines) -> bool:
    report = semantics.check_system_soundness(system, seed=args.seed)
    out["soundness"] = report.to_json()
    bad = report.unsound
    lines.append(f"soundness: {len(report.rules) - len(bad)}/{len(report.rules)} rules sound")
    for v in bad:
        shown = ", ".join(f"{k} := {print_term(val)}" for k, val in v.counterexample.items())
        lines.append(f"  unsound rule [{v.tag}]: counterexample {shown}")
    return report.sound


def _ground(system, args, out, lines) -> bool:
    grammar = analysis.grammar_for(system.name)
    max_size = args.max_size
    if max_size is None:
        max_size = 6 if system.signature == SIGMA_R else 5
    report = analysis.check_ground_confluence(
        system, grammar, max_size, args.node_budget,
        samples=args.samples, seed=args.seed, step_limit=args.step_limit,
    )
    out["ground_confluence"] = report.to_json()
    lines.append(report.summary())
    if report.certificate:
        lines.append(f"  {report.certificate}")
    for f in report.failures[:20]:
        lines.append(f"  {f.kind}: {print_term(f.term)}" + (f" ({f.detail})" if f.detail else ""))
    if len(report.failures) > 20:
        lines.append(f"  ... {len(report.failures) - 20} more")
    lines.append(analysis.status_report(system, report))
    return report.passed


def _weights(system, args, out, lines) -> bool:
    weights = analysis.weights_for(system.name)
    report = analysis.check_weight_certificate(system, weights, args.max_size or 4)
    out["weights"] = report.to_json()
    lines.append(report.summary())
    for v in report.violations:
        lines.append(f"  [{v.tag}] {v.lhs_weight} <= {v.rhs_weight}")
    return report.passed


def cmd_check(args) -> int:
    out: dict = {}
    lines: list[str] = []
    try:
        system = _load(args)
    except MetaDigitError as exc:
        # a table that cannot even be expanded is a check failure, not bad usage
        out = {"system": args.system or args.file, "error": f"expansion error: {exc}"}
        print(json.dumps(out, indent=2) if args.json else f"expansion error: {exc}")
        return EXIT_FAIL
    out["system"] = system.name
    what = args.what
    if what == "weights" and analysis.weights_for(system.name, None) is None:
        raise _Usage(f"no weight function is recorded for {system.name}")
    ok = True
    if what in ("soundness", "all"):
        ok &= _soundness(system, args, out, lines)
    if what in ("ground-confluence", "all"):
        ok &= _ground(system, args, out, lines)
    if what == "weights" or (what == "all" and analysis.weights_for(system.name, None) is not None):
        ok &= _weights(system, args, out, lines)
    if args.json:
        out["passed"] = bool(ok)
        print(json.dumps(out, indent=2))
    else:
        print("\n".join(lines))
        print("result: pass" if ok else "result: FAIL")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_enumerate(args) -> int:
    system = _load(args)
    if args.max_size is None:
        raise _Usage("enumerate needs --max-size")
    grammar = analysis.grammar_for(system.name) if args.grammar_only else None
    for t in analysis.enumerate_closed(system.signature, args.max_size):
        if grammar is None or t in grammar:
            print(print_term(t))
    return EXIT_OK


def cmd_dump(args) -> int:
    sys.stdout.write(catalog.dump_system(_load(args)))
    return EXIT_OK


def cmd_list(args) -> int:
    rows = []
    for name in catalog.BUILTIN_NAMES:
        try:
            system = catalog.builtin(name)
            count = str(len(system.rules))
            st = system.status
            status = (
                f"termination {st.termination.verdict}, confluence {st.confluence.verdict}, "
                f"ground-confluence {st.ground_confluence.verdict}"
            )
        except MetaDigitError as exc:
            count, status = "-", f"not expandable: {exc}"
        rows.append((name, count, catalog.describe(name), status))
    if args.json:
        print(json.dumps([dict(zip(("name", "rules", "description", "status"), r)) for r in rows], indent=2))
        return EXIT_OK
    width = max(len(r[0]) for r in rows)
    for name, count, desc, status in rows:
        print(f"{name:<{width}}  {count:>4}  {desc}; {status}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _add_system(p, required=True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--system", metavar="NAME", help="built-in system name")
    g.add_argument("--file", metavar="PATH", help="rule file in the ddrs format")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ddrs", description="Rewrite-system workbench for numeral datatypes.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("normalize", help="rewrite a term to normal form")
    _add_system(p)
    p.add_argument("term")
    p.add_argument("--strategy", choices=("innermost", "outermost", "random"), default="innermost")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--step-limit", type=int, default=engine.DEFAULT_STEP_LIMIT)
    p.add_argument("--trace", action="store_true", help="print the derivation as trace-v1 JSON")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("convert", help="translate a normal form between views")
    p.add_argument("--from", dest="source", choices=sorted(VIEWS), required=True)
    p.add_argument("--to", dest="target", choices=sorted(VIEWS), required=True)
    p.add_argument("term")
    p.add_argument("--step-limit", type=int, default=engine.DEFAULT_STEP_LIMIT)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("check", help="run soundness, ground-confluence and weight checks")
    _add_system(p)
    p.add_argument("--what", choices=("soundness", "ground-confluence", "weights", "all"), default="all")
    p.add_argument("--max-size", type=int, default=None)
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES, help="random terms beyond the exhaustive sizes")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--node-budget", type=int, default=engine.DEFAULT_NODE_BUDGET)
    p.add_argument("--step-limit", type=int, default=engine.DEFAULT_STEP_LIMIT)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("enumerate", help="list closed terms in enumeration order")
    _add_system(p)
    p.add_argument("--max-size", type=int, default=None)
    p.add_argument("--grammar-only", action="store_true", help="only normal-form grammar members")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("dump", help="print a system in the rule-file format")
    _add_system(p)
    p.set_defaults(func=cmd_dump)

    p = sub.add_parser("list", help="list built-in systems with their recorded status")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_list)
    return parser


def _protect_terms(argv: list) -> list:
    # every flag is -h or starts with "--", so any other argument that starts
    # with "-" is a term such as -(-(1)); move it behind "--"
    terms = [a for a in argv if a.startswith("-") and not a.startswith("--") and a != "-h"]
    if not terms or "--" in argv:
        return argv
    return [a for a in argv if a not in terms] + ["--"] + terms


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_protect_terms(list(sys.argv[1:] if argv is None else argv)))
    try:
        return args.func(args)
    except _Usage as exc:
        _err(str(exc))
        return EXIT_USAGE
    except DdrsError as exc:
        _err(str(exc))
        return EXIT_USAGE
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
