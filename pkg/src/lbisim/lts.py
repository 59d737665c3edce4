"""Ordinary labelled semantics and the instance transition systems (ITS).

An ITS transition P --C[-]--> P' says: the smallest context C[-] enabling
a reduction of C[P] was borrowed from the environment, and P' is what the
combined system becomes.  Labels are unary contexts over the extended
syntax; the canonical label variables are X1, X2 (processes) and x (an
ambient name).  A `-` label is an internal step and coincides with
one-step reduction.

MA rules (label / target, from a premise P == (nu A)(...), side
conditions keep the interacting name unrestricted):

  Tau     -                     one-step reduct
  Open    - | n[X1]             (nu A)(P1 | P2 | X1)
  CoOpen  - | open n.X1         (nu A)(P1 | X1 | P2)
  In      x[- | X1] | m[X2]     (nu A) m[x[P1 | P2 | X1] | X2]
  InAmb   - | m[X1]             (nu A)(m[n[P1 | P2] | X1] | P3)
  CoIn    - | x[in m.X1 | X2]   (nu A)(m[x[X1 | X2] | P1] | P2)
  Out     m[x[- | X1] | X2]     (nu A)(m[X2] | x[P1 | P2 | X1])
  OutAmb  m[- | X1]             (nu A)(m[P3 | X1] | n[P1 | P2])

CCS:  Rcv  - | 'a.X1  and  Snd  - | a.X1, both with target
(nu A)(Q | R | X1).  ACCS:  Rcv  - | 'a with target (nu A)(Q | R) — an
output particle is consumed whole, so no variable — and Snd - | a.X1
with target (nu A)(Q | X1).
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from functools import lru_cache

from .congruence import (
    ambient_cap_matches, ambient_matches, canonical_label, canonical_term,
    canonicalize, cap_matches, node_key, particle_matches, summand_matches,
)
from .errors import DivergenceBudgetExceededError, MAUnsupportedError
from .reduction import reducts
from .terms import (
    Amb, Calculus, Cap, Hole, Label, Msg, NameVar, Prefix, ProcVar, Recv,
    Send, Substitution, Term, apply_subst, close_label, par, restricts,
)

X1 = ProcVar("X1")
X2 = ProcVar("X2")
XN = NameVar("x")


@dataclass(frozen=True)
class OrdinaryTransition:
    source: Term
    action: str        # "tau", "a" or "'a"
    target: Term
    rule: str


@dataclass(frozen=True)
class ItsTransition:
    source: Term
    label: Label
    target: Term
    rule: str


@lru_cache(maxsize=1 << 16)
def ordinary_transitions(term: Term) -> tuple[OrdinaryTransition, ...]:
    """The textbook labelled semantics; undefined for MA."""
    if term.calculus is Calculus.MA:
        raise MAUnsupportedError("MA has no ordinary labelled semantics here")
    cf = canonicalize(term)
    source = cf.term
    out = []
    for step in reducts(source):
        out.append((source, "tau", step.target, "tau"))
    for m in summand_matches(cf, "recv"):
        target = canonical_term(
            Term(cf.calculus,
                 restricts(m.binders, par(m.continuation, *m.rest))))
        out.append((source, m.action.channel, target, "recv"))
    if cf.calculus is Calculus.CCS:
        for m in summand_matches(cf, "send"):
            target = canonical_term(
                Term(cf.calculus,
                     restricts(m.binders, par(m.continuation, *m.rest))))
            out.append((source, f"'{m.action.channel}", target, "send"))
    else:
        for m in particle_matches(cf):
            target = canonical_term(
                Term(cf.calculus, restricts(m.binders, par(*m.rest))))
            out.append((source, f"'{m.channel}", target, "send"))
    uniq = {}
    for source, action, target, rule in out:
        uniq.setdefault((action, target.node), (source, action, target, rule))
    trs = [OrdinaryTransition(*v) for v in uniq.values()]
    trs.sort(key=lambda t: (t.action, node_key(t.target.node)))
    return tuple(trs)


def _mk(calc, cf, label_body, target_body, rule, acc):
    label = canonical_label(Label(calc, label_body))
    target = canonical_term(Term(calc, target_body))
    acc.append(ItsTransition(cf.term, label, target, rule))


@lru_cache(maxsize=1 << 16)
def its_transitions(term: Term) -> tuple[ItsTransition, ...]:
    """Context-borrowing transitions of the instance transition system."""
    cf = canonicalize(term)
    calc = cf.calculus
    acc: list[ItsTransition] = []
    hole = Hole()
    for step in reducts(cf.term):
        _mk(calc, cf, hole, step.target.node, "Tau", acc)
    if calc is Calculus.MA:
        for m in cap_matches(cf, "open"):
            _mk(calc, cf,
                par(hole, Amb(m.name, X1)),
                restricts(m.binders, par(m.continuation, *m.rest, X1)),
                "Open", acc)
        for m in ambient_matches(cf):
            _mk(calc, cf,
                par(hole, Prefix(Cap("open", m.name), X1)),
                restricts(m.binders, par(m.content, X1, *m.rest)),
                "CoOpen", acc)
            _mk(calc, cf,
                par(hole, Amb(XN, par(Prefix(Cap("in", m.name), X1), X2))),
                restricts(m.binders,
                          par(Amb(m.name, par(Amb(XN, par(X1, X2)),
                                              m.content)),
                              *m.rest)),
                "CoIn", acc)
        for m in cap_matches(cf, "in"):
            _mk(calc, cf,
                par(Amb(XN, par(hole, X1)), Amb(m.name, X2)),
                restricts(m.binders,
                          Amb(m.name,
                              par(Amb(XN, par(m.continuation, *m.rest, X1)),
                                  X2))),
                "In", acc)
        for m in ambient_cap_matches(cf, "in"):
            _mk(calc, cf,
                par(hole, Amb(m.cap_name, X1)),
                restricts(m.binders,
                          par(Amb(m.cap_name,
                                  par(Amb(m.amb_name,
                                          par(m.continuation, *m.inner_rest)),
                                      X1)),
                              *m.rest)),
                "InAmb", acc)
        for m in cap_matches(cf, "out"):
            _mk(calc, cf,
                Amb(m.name, par(Amb(XN, par(hole, X1)), X2)),
                restricts(m.binders,
                          par(Amb(m.name, X2),
                              Amb(XN, par(m.continuation, *m.rest, X1)))),
                "Out", acc)
        for m in ambient_cap_matches(cf, "out"):
            _mk(calc, cf,
                Amb(m.cap_name, par(hole, X1)),
                restricts(m.binders,
                          par(Amb(m.cap_name, par(*m.rest, X1)),
                              Amb(m.amb_name,
                                  par(m.continuation, *m.inner_rest)))),
                "OutAmb", acc)
    elif calc is Calculus.CCS:
        for m in summand_matches(cf, "recv"):
            _mk(calc, cf,
                par(hole, Prefix(Send(m.action.channel), X1)),
                restricts(m.binders, par(m.continuation, *m.rest, X1)),
                "Rcv", acc)
        for m in summand_matches(cf, "send"):
            _mk(calc, cf,
                par(hole, Prefix(Recv(m.action.channel), X1)),
                restricts(m.binders, par(m.continuation, *m.rest, X1)),
                "Snd", acc)
    else:
        for m in summand_matches(cf, "recv"):
            _mk(calc, cf,
                par(hole, Msg(m.action.channel)),
                restricts(m.binders, par(m.continuation, *m.rest)),
                "Rcv", acc)
        for m in particle_matches(cf):
            _mk(calc, cf,
                par(hole, Prefix(Recv(m.channel), X1)),
                restricts(m.binders, par(*m.rest, X1)),
                "Snd", acc)
    uniq = {}
    for tr in acc:
        uniq.setdefault((tr.label.body, tr.target.node), tr)
    trs = list(uniq.values())
    trs.sort(key=lambda t: (node_key(t.label.body), node_key(t.target.node)))
    return tuple(trs)


def instantiate(tr: ItsTransition, subst: Substitution) -> ItsTransition:
    """Close a symbolic transition; the substitution must cover every
    label variable and the result is pure."""
    label = canonical_label(close_label(tr.label, subst))
    target = canonical_term(apply_subst(tr.target, subst))
    return ItsTransition(tr.source, label, target, tr.rule)


class TransitionSystem:
    """Lazy transition cache: concurrent readers, serialised writers."""

    def __init__(self, kind: str = "its"):
        if kind not in ("its", "ordinary"):
            raise ValueError(f"unknown transition-system kind {kind!r}")
        self.kind = kind
        self._cache: dict = {}
        self._lock = threading.Lock()

    def outgoing(self, term: Term):
        key = (term.calculus, canonicalize(term).node)
        with self._lock:
            hit = self._cache.get(key)
        if hit is not None:
            return hit
        if self.kind == "its":
            trs = its_transitions(term)
        else:
            trs = ordinary_transitions(term)
        with self._lock:
            self._cache.setdefault(key, trs)
        return trs

    def reachable(self, term: Term, *, max_states: int = 2000):
        """Breadth-first closure; raises DivergenceBudgetExceededError when
        the state budget is exhausted (the MA ITS may be infinite)."""
        root = canonical_term(term)
        states = [root]
        index = {root.node: 0}
        edges = []
        frontier = [root]
        while frontier:
            nxt = []
            for state in frontier:
                for tr in self.outgoing(state):
                    if tr.target.node not in index:
                        if len(states) >= max_states:
                            raise DivergenceBudgetExceededError(
                                max_states, len(states) + 1)
                        index[tr.target.node] = len(states)
                        states.append(tr.target)
                        nxt.append(tr.target)
                    edges.append(tr)
            frontier = nxt
        return states, edges


def _label_text(tr) -> str:
    from .syntax import print_label
    if isinstance(tr, OrdinaryTransition):
        return tr.action
    return print_label(tr.label)


def lts_to_json(states, edges) -> dict:
    from .syntax import print_term
    texts = [print_term(s) for s in states]
    return {
        "states": texts,
        "transitions": [
            {
                "source": print_term(tr.source),
                "label": _label_text(tr),
                "target": print_term(tr.target),
                "rule": tr.rule,
            }
            for tr in edges
        ],
    }


def _gvquote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def lts_to_dot(states, edges) -> str:
    from .syntax import print_term
    lines = ["digraph lts {"]
    for s in states:
        lines.append(f"  {_gvquote(print_term(s))};")
    for tr in edges:
        lines.append(
            f"  {_gvquote(print_term(tr.source))} -> "
            f"{_gvquote(print_term(tr.target))} "
            f"[label={_gvquote(_label_text(tr) + ' (' + tr.rule + ')')}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
