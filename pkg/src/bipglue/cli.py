"""``bipglue`` command line.

Exit codes: 0 success/equal, 1 verified-unequal (or not bisimilar),
2 parse error, 3 validation error, 4 compilation refused.
"""

import argparse
import json
import os
import sys
from dataclasses import replace

from . import analysis, compile as comp, corpus, formats
from .glue import GlueError, Node, apply_glue, validate_expression, validate_glue
from .lts import LtsError, bisimilar, fmt_interaction, state_name
from .sos import apply_sos, validate_operator

EXIT_OK, EXIT_UNEQUAL, EXIT_PARSE, EXIT_INVALID, EXIT_REFUSED = 0, 1, 2, 3, 4


class CliError(Exception):
    def __init__(self, msg, code):
        super().__init__(msg)
        self.code = code


def _color_enabled(stream):
    flag = os.environ.get("BIPGLUE_COLOR")
    if flag in ("0", "1"):
        return flag == "1"
    return hasattr(stream, "isatty") and stream.isatty()


def _paint(text, ok):
    if not _color_enabled(sys.stdout):
        return text
    return f"\033[{32 if ok else 31}m{text}\033[0m"


def _read(path):
    try:
        with open(path, encoding="utf-8") as f:
            return f.read()
    except OSError as e:
        raise CliError(f"{path}: {e.strerror}", EXIT_PARSE)


def _load(parser, path):
    try:
        return parser(_read(path), path)
    except formats.ParseError as e:
        raise CliError(str(e), EXIT_PARSE)
    except formats.FormatValidationError as e:
        raise CliError(str(e), EXIT_INVALID)


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(data, out=None):
    _emit(json.dumps(data, sort_keys=True, indent=2) + "\n", out)


def _load_operator(path):
    op = _load(formats.parse_operator, path)
    report = validate_operator(op)
    if not report:
        raise CliError(f"{path}: " + "; ".join(report.problems), EXIT_INVALID)
    return op


def _load_behaviours(paths):
    return [_load(formats.parse_lts, p) for p in paths]


# -- commands ------------------------------------------------------------------

def cmd_compose(args):
    glue = _load(formats.parse_glue, args.glue)
    report = validate_glue(glue)
    if not report:
        raise CliError(f"{args.glue}: " + "; ".join(report.problems), EXIT_INVALID)
    result = apply_glue(glue, _load_behaviours(args.lts))
    _emit(formats.dump_lts(_named(result, args.name or "composed")), args.output)
    return EXIT_OK


def cmd_sos_apply(args):
    op = _load_operator(args.operator)
    result = apply_sos(op, _load_behaviours(args.lts))
    _emit(formats.dump_lts(_named(result, args.name or "composed")), args.output)
    return EXIT_OK


def _named(lts, name):
    return replace(lts, name=name)


def cmd_classify(args):
    op = _load_operator(args.operator)
    report = analysis.classification_report(op)
    if args.json:
        _emit_json(report, args.output)
        return EXIT_OK
    lines = [f"operator  {report['operator'] or '-'}",
             f"acyclic   {'yes' if report['acyclic'] else 'no'}",
             f"depth     {report['depth'] if report['depth'] is not None else '-'}"]
    pairs = ", ".join(f"{p['low']} < {p['high']}" for p in report["pairs"]) or "none"
    lines.append(f"relation  {pairs}")
    for i, layer in enumerate(report["layers"], start=1):
        lines.append(f"layer {i}   " + ", ".join(f"{p['low']} < {p['high']}" for p in layer))
    if "cycle" in report:
        lines.append("cycle     " + " < ".join(report["cycle"] + report["cycle"][:1]))
    for key in sorted(report["verdicts"]):
        v = report["verdicts"][key]
        lines.append(f"{key:<20s}{_paint(v, v == 'expressible')}")
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def cmd_compile(args):
    op = _load_operator(args.operator)
    try:
        result = comp.compile_operator(op, args.target)
    except analysis.CyclicRelationError as e:
        raise CliError("layered compilation refused: cycle " +
                       analysis.format_cycle(e.cycle), EXIT_REFUSED)
    _emit(formats.dump_expression(result.expression), args.output)
    return EXIT_OK


def cmd_verify(args):
    op = _load_operator(args.operator)
    expr = _load(formats.parse_expression, args.expression)
    report = validate_expression(expr)
    if not report:
        raise CliError(f"{args.expression}: " + "; ".join(report.problems), EXIT_INVALID)
    if isinstance(expr, Node) and expr.op.ports != op.ports:
        raise CliError("expression and operator use different ports", EXIT_INVALID)
    names = sorted(set(expr.variables()), key=lambda v: (len(v), v))
    expected = [f"Z{i + 1}" for i in range(op.arity)]
    if names != expected:
        raise CliError(f"expression variables {names} do not match arity {op.arity}",
                       EXIT_INVALID)
    tuples = comp.random_behaviours(op.partition, args.seed, args.max_states, args.density,
                                    args.tuples)
    try:
        result = comp.verify_compilation(op, expr, tuples)
    except (GlueError, comp.CompilationError) as e:
        raise CliError(str(e), EXIT_INVALID)
    data = result.to_json()
    data.update(operator=op.name, seed=args.seed, max_states=args.max_states,
                density=args.density)
    if args.json:
        _emit_json(data, args.output)
    else:
        verdict = _paint("EQUAL" if result.equal else "UNEQUAL", result.equal)
        text = f"{verdict}: {result.behaviours_tested} behaviour tuples, " \
               f"{result.unequal_tuples} unequal\n"
        if result.first_discrepancy:
            text += "first discrepancy: " + result.first_discrepancy.describe() + "\n"
        _emit(text, args.output)
    return EXIT_OK if result.equal else EXIT_UNEQUAL


def cmd_witness(args):
    op = _load_operator(args.operator)
    rel = analysis.inhibiting_relation(op)
    cycle = analysis.detect_cycle(rel)
    if cycle is None:
        raise CliError("inhibiting relation is acyclic; no witness exists", EXIT_INVALID)
    witnesses = analysis.cycle_witness(op, cycle)
    check = analysis.check_witness(op, cycle, witnesses)
    written = []
    if args.output:
        os.makedirs(args.output, exist_ok=True)
        for w in witnesses:
            path = os.path.join(args.output, f"{w.name}.lts")
            with open(path, "w", encoding="utf-8") as f:
                f.write(formats.dump_lts(w))
            written.append(path)
    data = {"cycle": [fmt_interaction(a) for a in cycle],
            "final_deadlocked": check.final_deadlocked,
            "final_enables_cycle": check.final_enables_cycle,
            "mixed_exact": check.mixed_exact, "details": check.details, "files": written}
    if args.json:
        _emit_json(data)
    else:
        out = [f"cycle {analysis.format_cycle(cycle)}"]
        for key in ("final_deadlocked", "final_enables_cycle", "mixed_exact"):
            out.append(f"{key:<20s}{_paint(str(data[key]).lower(), data[key])}")
        out += [f"  {d}" for d in check.details]
        if not args.output:
            out += [""] + [formats.dump_lts(w) for w in witnesses]
        sys.stdout.write("\n".join(out) + "\n")
    return EXIT_OK


def cmd_bisim(args):
    a, b = _load_behaviours([args.first, args.second])
    result = bisimilar(a, b)
    if args.json:
        rel = sorted([state_name(s), state_name(t)] for s, t in result.relation or ())
        _emit_json({"bisimilar": result.bisimilar, "reason": result.reason, "relation": rel})
    else:
        word = "bisimilar" if result.bisimilar else "not bisimilar"
        sys.stdout.write(_paint(word, result.bisimilar) +
                         (f" ({result.reason})" if result.reason else "") + "\n")
    return EXIT_OK if result.bisimilar else EXIT_UNEQUAL


def cmd_corpus(args):
    if args.action == "list":
        for i in corpus.EXAMPLE_IDS:
            sys.stdout.write(f"{i:<20s}{corpus.load_example(i).title}\n")
        return EXIT_OK
    if args.action == "export":
        if not args.id or not args.dir:
            raise CliError("usage: corpus export <id> <dir>", EXIT_PARSE)
        try:
            ex = corpus.load_example(args.id)
        except KeyError as e:
            raise CliError(str(e.args[0]), EXIT_INVALID)
        for path in corpus.export_example(ex, args.dir):
            sys.stdout.write(path + "\n")
        return EXIT_OK
    results = corpus.run_example_suite()
    if args.json:
        _emit_json([r.__dict__ for r in results])
    else:
        for r in results:
            mark = _paint("pass" if r.passed else "FAIL", r.passed)
            sys.stdout.write(f"{mark}  {r.example:<18s} [{r.provenance}] {r.fact}"
                             + (f"  ({r.error})" if r.error else "") + "\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_UNEQUAL


def build_parser():
    p = argparse.ArgumentParser(prog="bipglue",
                                description="BIP glue composition, SOS analysis and compilation")
    sub = p.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("compose", help="apply a glue operator to LTS files")
    s.add_argument("glue")
    s.add_argument("lts", nargs="+")
    s.add_argument("-o", "--output")
    s.add_argument("--name")
    s.set_defaults(func=cmd_compose)

    s = sub.add_parser("sos-apply", help="apply an SOS operator to LTS files")
    s.add_argument("operator")
    s.add_argument("lts", nargs="+")
    s.add_argument("-o", "--output")
    s.add_argument("--name")
    s.set_defaults(func=cmd_sos_apply)

    s = sub.add_parser("classify", help="inhibiting relation and expressiveness verdicts")
    s.add_argument("operator")
    s.add_argument("--json", action="store_true")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("compile", help="compile an SOS operator into a glue expression")
    s.add_argument("operator")
    s.add_argument("--target", choices=comp.TARGETS, default=comp.LAYERED)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_compile)

    s = sub.add_parser("verify", help="compare a glue expression with the SOS rules")
    s.add_argument("operator")
    s.add_argument("expression")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--tuples", type=int, default=100)
    s.add_argument("--max-states", type=int, default=4)
    s.add_argument("--density", type=float, default=0.3)
    s.add_argument("--json", action="store_true")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("witness", help="witness behaviours for a cyclic operator")
    s.add_argument("operator")
    s.add_argument("-o", "--output", help="directory for the witness LTS files")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_witness)

    s = sub.add_parser("bisim", help="strong bisimilarity of two LTS files")
    s.add_argument("first")
    s.add_argument("second")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_bisim)

    s = sub.add_parser("corpus", help="built-in examples")
    s.add_argument("action", choices=("list", "check", "export"))
    s.add_argument("id", nargs="?")
    s.add_argument("dir", nargs="?")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_corpus)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        sys.stderr.write(f"bipglue: {e}\n")
        return e.code
    except (GlueError, LtsError, comp.CompilationError, analysis.AnalysisError) as e:
        sys.stderr.write(f"bipglue: {e}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
