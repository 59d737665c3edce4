"""Command-line front end.

Exit codes: 0 the relation holds (or every corpus check passed), 1 it
does not hold, 2 usage or parse error, 3 a search budget was exhausted.
Term arguments are taken literally or, with a leading ``@``, read from a
file.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from .corpus import run_suite
from .equivalence import (
    BUILTIN_LABEL_SETS, DEFAULT_MAX_PAIRS, RELATIONS, async_bisim,
    barbed_semi_saturated_bisim, ipo_bisim, l_bisim, pattern_label_set,
    pred_ccs, pred_open, semi_saturated_bisim, strong_bisim,
)
from .errors import DivergenceBudgetExceededError, LbisimError, ParseError
from .lts import TransitionSystem, lts_to_dot, lts_to_json
from .reduction import barbs, reducts
from .syntax import parse_label, parse_term, print_term
from .terms import Calculus

EXIT_HOLDS = 0
EXIT_FAILS = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


def _read_arg(text: str) -> str:
    if text.startswith("@"):
        with open(text[1:], encoding="utf-8") as fh:
            return fh.read()
    return text


def _read_lines(path: str) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return [ln.strip() for ln in fh
                if ln.strip() and not ln.lstrip().startswith("#")]


def _label_set(selector: str, calc: Calculus):
    if selector.startswith("@"):
        patterns = [parse_label(ln, calc)
                    for ln in _read_lines(selector[1:])]
        return pattern_label_set(os.path.basename(selector[1:]), patterns)
    try:
        return BUILTIN_LABEL_SETS[selector]
    except KeyError:
        raise LbisimError(
            f"unknown label set {selector!r}; use one of "
            f"{', '.join(sorted(BUILTIN_LABEL_SETS))} or @patternfile")


def _pool(mode: str, calc: Calculus):
    if mode is None or mode == "symbolic":
        return None
    if mode.startswith("instantiate:@"):
        return [parse_term(ln, calc) for ln in _read_lines(mode[13:])]
    raise LbisimError(
        f"unknown mode {mode!r}; use 'symbolic' or 'instantiate:@poolfile'")


def _emit(args, payload: dict, text_lines) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _witness_lines(witness) -> list[str]:
    out = ["witness:"]
    for i, step in enumerate(witness, 1):
        p, q = step.pair
        if step.kind == "barb":
            out.append(f"  {i}. at ({p}  ,  {q}): the {step.side} side "
                       f"shows barb {step.move} and the other does not")
            continue
        line = (f"  {i}. at ({p}  ,  {q}): {step.side} moves "
                f"{step.move}  ->  {step.attacker_target}")
        if step.intro_vars:
            intro = ", ".join(f"{k}:={v}" for k, v in
                              sorted(step.intro_vars.items()))
            line += f"  [{intro}]"
        out.append(line)
        if step.defender_target is None:
            out.append(f"     defender: {step.reason}")
        else:
            out.append(f"     defender answers  ->  {step.defender_target}")
    return out


def _cmd_check(args) -> int:
    calc = Calculus(args.calculus)
    p = parse_term(_read_arg(args.p), calc)
    q = parse_term(_read_arg(args.q), calc)
    pool = _pool(args.mode, calc)
    kw = {"max_pairs": args.max_pairs}
    rel = args.rel
    if rel == "strong":
        if pool is not None:
            raise LbisimError("--mode applies to contextual relations only")
        res = strong_bisim(p, q, **kw)
    elif rel == "async":
        if pool is not None:
            raise LbisimError("--mode applies to contextual relations only")
        res = async_bisim(p, q, **kw)
    elif rel == "ipo":
        res = ipo_bisim(p, q, pool=pool, **kw)
    elif rel == "semi-sat":
        res = semi_saturated_bisim(p, q, pool=pool, **kw)
    elif rel == "barbed-semi-sat":
        res = barbed_semi_saturated_bisim(p, q, pool=pool, **kw)
    elif rel == "l-bisim":
        if args.labels is None:
            raise LbisimError("--rel l-bisim needs --labels")
        labels = _label_set(args.labels, calc)
        res = l_bisim(p, q, labels, pool=pool, **kw)
    else:
        raise LbisimError(f"unknown relation {rel!r}")
    payload = res.to_dict()
    payload.update({"relation": rel, "calculus": calc.value,
                    "p": print_term(p), "q": print_term(q)})
    if args.labels is not None:
        payload["labels"] = args.labels
    lines = [payload["verdict"]]
    if res.witness:
        lines += _witness_lines(res.witness)
    lines.append(f"explored {res.pairs_explored} pairs "
                 f"in {res.rounds} rounds")
    _emit(args, payload, lines)
    return EXIT_HOLDS if res.verdict else EXIT_FAILS


def _cmd_lts(args) -> int:
    calc = Calculus(args.calculus)
    term = parse_term(_read_arg(args.term), calc)
    kind = "ordinary" if args.ordinary else "its"
    ts = TransitionSystem(kind)
    states, edges = ts.reachable(term, max_states=args.max_states)
    if args.format == "dot":
        sys.stdout.write(lts_to_dot(states, edges))
        return EXIT_HOLDS
    payload = lts_to_json(states, edges)
    payload["kind"] = kind
    lines = [f"{len(states)} states, {len(edges)} transitions"]
    for tr in payload["transitions"]:
        lines.append(f"  {tr['source']}  --[{tr['label']}]-->  "
                     f"{tr['target']}  ({tr['rule']})")
    _emit(args, payload, lines)
    return EXIT_HOLDS


def _cmd_reduce(args) -> int:
    calc = Calculus(args.calculus)
    term = parse_term(_read_arg(args.term), calc)
    steps = reducts(term)
    payload = {
        "term": print_term(term),
        "reducts": [{"rule": s.rule, "position": list(s.position),
                     "target": print_term(s.target)} for s in steps],
    }
    lines = [f"{len(steps)} reduction(s) from {print_term(term)}"]
    for s in steps:
        where = "/".join(
            f"{e[0]}:{','.join(str(k) for k in e[1:])}"
            if isinstance(e, tuple) else str(e)
            for e in s.position) or "top"
        lines.append(f"  {s.rule} at {where}  ->  {print_term(s.target)}")
    _emit(args, payload, lines)
    return EXIT_HOLDS


def _cmd_barbs(args) -> int:
    calc = Calculus(args.calculus)
    term = parse_term(_read_arg(args.term), calc)
    got = sorted(barbs(term))
    payload = {"term": print_term(term), "barbs": got}
    _emit(args, payload, got or ["(none)"])
    return EXIT_HOLDS


def _cmd_pred(args) -> int:
    calc = Calculus(args.calculus)
    p = parse_term(_read_arg(args.p), calc)
    target = parse_term(_read_arg(args.target), calc)
    t1 = None if args.t1 is None else parse_term(_read_arg(args.t1), calc)
    if args.kind == "open":
        if calc is not Calculus.MA:
            raise LbisimError("kind 'open' is the ambient predicate")
        if args.name is None or t1 is None:
            raise LbisimError("kind 'open' needs --name and --t1")
        verdict = pred_open(p, target, args.name, t1)
    else:
        verdict = pred_ccs(args.kind, p, target, args.name, t1)
    payload = {"kind": args.kind, "p": print_term(p),
               "target": print_term(target), "verdict": verdict}
    if args.name:
        payload["name"] = args.name
    _emit(args, payload, ["holds" if verdict else "does not hold"])
    return EXIT_HOLDS if verdict else EXIT_FAILS


def _cmd_corpus(args) -> int:
    spec = json.loads(_read_arg(args.spec))
    if args.seed is not None:
        spec["seed"] = args.seed
    if args.max_pairs != _default_max_pairs():
        spec["max_pairs"] = args.max_pairs
    outcomes = run_suite(spec)
    payload = {"checks": [o.to_dict() for o in outcomes],
               "ok": all(o.ok for o in outcomes)}
    lines = []
    for o in outcomes:
        mark = "ok  " if o.ok else "FAIL"
        lines.append(f"{mark} {o.name}  ({o.total} cases"
                     + (f", {len(o.failures)} failures)" if o.failures
                        else ")"))
        for f in o.failures[:3]:
            lines.append(f"       {f}")
    lines.append("suite " + ("passed" if payload["ok"] else "FAILED"))
    _emit(args, payload, lines)
    return EXIT_HOLDS if payload["ok"] else EXIT_FAILS


def _default_max_pairs() -> int:
    raw = os.environ.get("LBISIM_MAX_PAIRS")
    if raw:
        try:
            return int(raw)
        except ValueError:
            pass
    return DEFAULT_MAX_PAIRS


def _add_common(sp, *, fmt=("text", "json")) -> None:
    sp.add_argument("--calculus", required=True,
                    choices=[c.value for c in Calculus])
    sp.add_argument("--format", choices=fmt, default="text")
    sp.add_argument("--max-pairs", type=int, default=_default_max_pairs(),
                    help="symbolic game budget (state pairs)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="lbisim",
        description="Behavioural equivalences for CCS, asynchronous CCS "
                    "and communication-free mobile ambients.")
    sub = ap.add_subparsers(dest="verb", required=True)

    check = sub.add_parser("check", help="decide an equivalence query")
    _add_common(check)
    check.add_argument("--rel", required=True, choices=list(RELATIONS))
    check.add_argument("--labels",
                       help="LM, LA, LCCS, ALL, EMPTY or @patternfile")
    check.add_argument("--mode", default="symbolic",
                       help="symbolic (default) or instantiate:@poolfile")
    check.add_argument("p", metavar="TERM1")
    check.add_argument("q", metavar="TERM2")
    check.set_defaults(run=_cmd_check)

    lts = sub.add_parser("lts", help="dump the reachable transition system")
    _add_common(lts, fmt=("text", "json", "dot"))
    style = lts.add_mutually_exclusive_group()
    style.add_argument("--its", action="store_true", default=True,
                       help="contextual transition system (default)")
    style.add_argument("--ordinary", action="store_true",
                       help="ordinary CCS/ACCS transition system")
    lts.add_argument("--max-states", type=int, default=2000)
    lts.add_argument("term", metavar="TERM")
    lts.set_defaults(run=_cmd_lts)

    red = sub.add_parser("reduce", help="list one-step reducts")
    _add_common(red)
    red.add_argument("term", metavar="TERM")
    red.set_defaults(run=_cmd_reduce)

    bb = sub.add_parser("barbs", help="list observable names")
    _add_common(bb)
    bb.add_argument("term", metavar="TERM")
    bb.set_defaults(run=_cmd_barbs)

    pred = sub.add_parser(
        "pred", help="evaluate a reduction-and-barb transition predicate")
    _add_common(pred)
    pred.add_argument("--kind", required=True,
                      choices=("open", "out", "in", "tau"))
    pred.add_argument("--name", help="ambient name or channel")
    pred.add_argument("--t1", help="instantiation term for the label hole")
    pred.add_argument("p", metavar="TERM")
    pred.add_argument("target", metavar="TARGET")
    pred.set_defaults(run=_cmd_pred)

    corp = sub.add_parser("corpus", help="run a corpus cross-check suite")
    corp.add_argument("--format", choices=("text", "json"), default="text")
    corp.add_argument("--seed", type=int)
    corp.add_argument("--max-pairs", type=int, default=_default_max_pairs())
    corp.add_argument("spec", metavar="SPECFILE",
                      help="JSON spec, literal or @file")
    corp.set_defaults(run=_cmd_corpus)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.run(args)
    except DivergenceBudgetExceededError as exc:
        _fail(args, f"budget exceeded: {exc}")
        return EXIT_BUDGET
    except ParseError as exc:
        _fail(args, f"parse error: {exc}")
        return EXIT_USAGE
    except (LbisimError, OSError, json.JSONDecodeError, ValueError) as exc:
        _fail(args, str(exc))
        return EXIT_USAGE


def _fail(args, message: str) -> None:
    if getattr(args, "format", "text") == "json":
        print(json.dumps({"error": message}))
    print(message, file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
