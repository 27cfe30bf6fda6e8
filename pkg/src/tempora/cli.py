"""Command-line front end.

Commands: check, entail, answers, repairs, conflicts, normalize, fragment,
satgen.  Exit codes: 0 affirmative/consistent, 1 negative/inconsistent,
2 error (with a structured payload in JSON mode).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

from . import harness, repairs, semantics
from .errors import EngineError, ParseError, TemporaError
from .facts import FactSet, normalize
from .reasoner import EngineLimits, certain_answers, is_consistent
from .repairs import DEFAULT_CAP
from .syntax import (classify_fragment, dataset_to_text, fact_to_text, parse_dataset_raw,
                     parse_fact, parse_problem, parse_program, parse_query,
                     program_to_text)

ENV_MAX_ITER = "TEMPORA_MAX_ITER"
ENV_MAX_ENDPOINT = "TEMPORA_MAX_ENDPOINT"


def _limits(args) -> EngineLimits:
    max_iter = args.max_iter
    if max_iter is None:
        max_iter = int(os.environ.get(ENV_MAX_ITER, EngineLimits().max_iterations))
    max_endpoint = args.max_endpoint
    if max_endpoint is None:
        max_endpoint = int(os.environ.get(ENV_MAX_ENDPOINT,
                                          EngineLimits().max_endpoint_magnitude))
    return EngineLimits(max_iterations=max_iter, max_endpoint_magnitude=max_endpoint)


def _emit(args, payload: dict, text_lines: list[str]):
    if args.text:
        for line in text_lines:
            print(line)
    else:
        print(json.dumps(payload, sort_keys=True))


def _load_problem(args):
    program_text = Path(args.program).read_text(encoding="utf-8")
    dataset_text = Path(args.dataset).read_text(encoding="utf-8")
    return parse_problem(program_text, dataset_text)


def _fact_strings(fs: FactSet) -> list[str]:
    return [str(f) for f in fs.sorted_facts()]


def cmd_check(args) -> int:
    program, dataset = _load_problem(args)
    ok = is_consistent(program, dataset, _limits(args))
    _emit(args, {"consistent": ok}, ["consistent" if ok else "inconsistent"])
    return 0 if ok else 1


def cmd_entail(args) -> int:
    program, dataset = _load_problem(args)
    fact = parse_fact(args.fact)
    verdict = semantics.entails_under(args.semantics, args.kind, dataset, program,
                                      fact, _limits(args), args.cap)
    payload = {"entailed": verdict, "semantics": args.semantics, "kind": args.kind,
               "fact": str(fact)}
    _emit(args, payload, [f"{fact}: {'entailed' if verdict else 'not entailed'} "
                          f"under {args.semantics} ({args.kind})"])
    return 0 if verdict else 1


def cmd_answers(args) -> int:
    program, dataset = _load_problem(args)
    query = parse_query(args.query)
    if args.semantics == "classical":
        rows = certain_answers(program, dataset, query, _limits(args))
    else:
        rows = semantics.answers_under(args.semantics, args.kind, dataset, program,
                                       query, _limits(args), args.cap)
    payload = [{"tuple": list(combo), "intervals": [str(i) for i in intervals]}
               for combo, intervals in rows]
    lines = [f"({', '.join(combo)}) @ {', '.join(str(i) for i in intervals)}"
             if combo else f"() @ {', '.join(str(i) for i in intervals)}"
             for combo, intervals in rows]
    _emit(args, {"answers": payload, "semantics": args.semantics, "kind": args.kind},
          lines or ["no answers"])
    return 0 if rows else 1


def _cmd_repair_like(args, enumerate_fn, generate_fn, label: str) -> int:
    program, dataset = _load_problem(args)
    limits = _limits(args)
    if args.one:
        got = generate_fn(args.kind, dataset, program, limits)
        items = [] if got is None else [got]
    else:
        items = list(enumerate_fn(args.kind, dataset, program, limits, args.cap))
    payload = {"kind": args.kind, "count": len(items),
               "items": [_fact_strings(s) for s in items]}
    lines = [f"{len(items)} {label}(s) [{args.kind}]"]
    lines += ["  {" + ", ".join(_fact_strings(s)) + "}" for s in items]
    _emit(args, payload, lines)
    if label == "conflict":
        return 1 if items else 0
    return 0


def cmd_repairs(args) -> int:
    return _cmd_repair_like(args, repairs.enumerate_repairs,
                            repairs.generate_repair, "repair")


def cmd_conflicts(args) -> int:
    return _cmd_repair_like(args, repairs.enumerate_conflicts,
                            repairs.generate_conflict, "conflict")


def cmd_normalize(args) -> int:
    raw = parse_dataset_raw(Path(args.dataset).read_text(encoding="utf-8"))
    merged = normalize(raw)
    text = dataset_to_text(merged)
    if args.text:
        sys.stdout.write(text)
        if merged.key() != raw.key():
            print("% note: normalization merged facts", file=sys.stderr)
    else:
        print(json.dumps({"facts": _fact_strings(merged),
                          "changed": merged.key() != raw.key()}, sort_keys=True))
    return 0


def cmd_fragment(args) -> int:
    program = parse_program(Path(args.program).read_text(encoding="utf-8"))
    report = dataclasses.asdict(classify_fragment(program))
    _emit(args, report, [f"{k}: {v}" for k, v in sorted(report.items())])
    return 0


def cmd_satgen(args) -> int:
    cnf = harness.parse_dimacs(Path(args.dimacs).read_text(encoding="utf-8"))
    program, dataset, fact = harness.satgen(args.target, cnf)
    sem, kind, iff_sat = harness.SATGEN_TARGETS[args.target]
    prefix = Path(args.out)
    prog_path = prefix.with_suffix(".dmtl")
    data_path = prefix.with_suffix(".dmtd")
    target_path = prefix.with_suffix(".target.json")
    prog_path.write_text(program_to_text(program), encoding="utf-8")
    data_path.write_text(dataset_to_text(dataset), encoding="utf-8")
    target = {"fact": str(fact), "semantics": sem, "kind": kind,
              "entailed_iff": "sat" if iff_sat else "unsat"}
    target_path.write_text(json.dumps(target, sort_keys=True) + "\n", encoding="utf-8")
    _emit(args, {"program": str(prog_path), "dataset": str(data_path),
                 "target": str(target_path), **target},
          [f"wrote {prog_path}, {data_path}, {target_path}",
           f"check: {fact_to_text(fact)[:-1]} under {sem} ({kind}), "
           f"entailed iff {'sat' if iff_sat else 'unsat'}"])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tempora",
        description="Consistency, repairs, conflicts, and repair-based query "
                    "answering for DatalogMTL datasets over the integers.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, program=True, dataset=True):
        if program:
            p.add_argument("-p", "--program", required=True, help="program file (.dmtl)")
        if dataset:
            p.add_argument("-d", "--dataset", required=True, help="dataset file (.dmtd)")
        p.add_argument("--kind", choices=["s", "i", "p"], default="s")
        p.add_argument("--semantics",
                       choices=["classical", "brave", "cqa", "intersection"],
                       default="classical")
        p.add_argument("--cap", type=int, default=DEFAULT_CAP)
        p.add_argument("--max-iter", type=int, default=None)
        p.add_argument("--max-endpoint", type=int, default=None)
        fmt = p.add_mutually_exclusive_group()
        fmt.add_argument("--json", dest="text", action="store_false", default=False)
        fmt.add_argument("--text", dest="text", action="store_true")

    p = sub.add_parser("check", help="report dataset consistency")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("entail", help="fact entailment under a semantics")
    common(p)
    p.add_argument("fact", help='fact string, e.g. "Fever(a)@[29,34]"')
    p.set_defaults(func=cmd_entail)

    p = sub.add_parser("answers", help="query answers under a semantics")
    common(p)
    p.add_argument("query", help='query string, e.g. "FevEp(?v)@r"')
    p.set_defaults(func=cmd_answers)

    for name, help_text in (("repairs", "enumerate or generate repairs"),
                            ("conflicts", "enumerate or generate conflicts")):
        p = sub.add_parser(name, help=help_text)
        common(p)
        mode = p.add_mutually_exclusive_group()
        mode.add_argument("--all", dest="one", action="store_false", default=False)
        mode.add_argument("--one", dest="one", action="store_true")
        p.set_defaults(func=cmd_repairs if name == "repairs" else cmd_conflicts)

    p = sub.add_parser("normalize", help="print the normalized dataset")
    common(p, program=False)
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("fragment", help="classify the program's fragment")
    common(p, dataset=False)
    p.set_defaults(func=cmd_fragment)

    p = sub.add_parser("satgen", help="emit a SAT-reduction instance")
    p.add_argument("dimacs", help="DIMACS CNF input file")
    p.add_argument("--target", required=True, choices=sorted(harness.SATGEN_TARGETS))
    p.add_argument("-o", "--out", required=True, help="output path prefix")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="text", action="store_false", default=False)
    fmt.add_argument("--text", dest="text", action="store_true")
    p.set_defaults(func=cmd_satgen)

    return parser


def _error_payload(kind: str, exc: Exception) -> dict:
    payload = {"kind": kind, "message": str(exc)}
    if isinstance(exc, ParseError) and exc.line is not None:
        payload["location"] = {"line": exc.line, "col": exc.col}
    return payload


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, EngineError, TemporaError, OSError, ValueError) as exc:
        payload = _error_payload(type(exc).__name__, exc)
        if getattr(args, "text", False):
            print(f"error [{payload['kind']}]: {payload['message']}", file=sys.stderr)
        else:
            print(json.dumps(payload, sort_keys=True))
        return 2


if __name__ == "__main__":
    sys.exit(main())
