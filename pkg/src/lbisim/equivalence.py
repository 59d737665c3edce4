"""Equivalence checking as on-the-fly bisimulation games.

All relations are decided by one engine playing an attacker/defender game
on pairs of states.  A pair dies when some attack has no surviving
answer; the engine alternates breadth-first expansion with a refutation
fixpoint, so a finite disproof is found even when the full symbolic state
space is infinite (possible in MA, where environment ambients can keep
entering).  The verdict is `True` only once every reachable pair is
expanded and alive, `False` when the root dies; running out of budget
raises DivergenceBudgetExceededError.

The relations:

  * strong_bisim / async_bisim play on the ordinary labelled semantics
    (async uses the asynchronous input clause: an input may also be
    answered by an internal step, leaving the message `'a` next to the
    defender's residual).
  * l_bisim(L) plays on the instance transition systems: attacks whose
    label lies in L must be answered by the same label; any other attack
    C[-] is answered by one reduction step of C[defender].  ipo_bisim is
    l_bisim(ALL), semi_saturated_bisim is l_bisim(EMPTY), and
    barbed_semi_saturated_bisim additionally requires equal barbs at
    every pair (deciding barbs via the capturing labels of the calculus;
    quantifying over all contexts instead is refused).

Symbolic moves carry the canonical variables X1, X2, x; the engine
freshens them to per-pair constants so that the attacker's and defender's
residuals share them.  Witnesses re-number those constants W1, W2, ...
(w1 ... for name variables) step by step, and `verify_witness` replays a
witness against the public move generators.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations, product

from .congruence import canonical_label, canonical_node, canonical_term, node_key
from .errors import (
    DivergenceBudgetExceededError, LbisimError, MalformedTermError,
    MAUnsupportedError, UnsupportedQuantificationError,
)
from .lts import ItsTransition, instantiate, its_transitions, ordinary_transitions
from .reduction import barbs, reduct_terms
from .terms import (
    Amb, Calculus, Cap, Hole, Label, Msg, NameVar, Nil, Node, Par, Prefix,
    ProcVar, Recv, Send, Substitution, Sum, Term,
    _vars_in_order, free_names, fresh_name, is_pure, par, plug, rename_vars,
    same_calculus,
)

DEFAULT_MAX_PAIRS = 50_000

RELATIONS = ("strong", "async", "ipo", "semi-sat", "barbed-semi-sat", "l-bisim")


# --- label sets ------------------------------------------------------------

def _two_parts(body: Node):
    """The canonical body of a context `- | T`, if it has that shape."""
    if isinstance(body, Par) and len(body.children) == 2:
        a, b = body.children
        if isinstance(a, Hole):
            return b
        if isinstance(b, Hole):
            return a
    return None


def _match(pat: Node, node: Node, bnd: dict) -> bool:
    match pat:
        case ProcVar(name=v):
            if isinstance(node, Hole):
                return False
            if v in bnd:
                return bnd[v] == node
            bnd[v] = node
            return True
        case Hole():
            return isinstance(node, Hole)
        case Nil() | Msg():
            return pat == node
        case Prefix(action=pact, body=pb):
            return (isinstance(node, Prefix)
                    and _match_action(pact, node.action, bnd)
                    and _match(pb, node.body, bnd))
        case Amb(name=pn, body=pb):
            return (isinstance(node, Amb)
                    and _match_name(pn, node.name, bnd)
                    and _match(pb, node.body, bnd))
        case Par(children=ps) | Sum(children=ps):
            if type(node) is not type(pat):
                return False
            ns = node.children
            if len(ps) != len(ns):
                return False
            for perm in permutations(range(len(ns))):
                trial = dict(bnd)
                if all(_match(ps[i], ns[perm[i]], trial)
                       for i in range(len(ps))):
                    bnd.update(trial)
                    return True
            return False
        case _:
            return pat == node


def _match_name(pn, n, bnd) -> bool:
    if isinstance(pn, NameVar):
        key = "?" + pn.name
        if key in bnd:
            return bnd[key] == n
        bnd[key] = n
        return True
    return pn == n


def _match_action(pact, act, bnd) -> bool:
    match pact:
        case Cap(op=op, amb=pn):
            return (isinstance(act, Cap) and act.op == op
                    and _match_name(pn, act.amb, bnd))
        case _:
            return pact == act


@dataclass(frozen=True)
class LabelSet:
    """A set of ITS labels an attacker move can be required to match."""
    name: str
    kind: str                      # all | empty | lm | la | lccs | patterns
    patterns: tuple[Label, ...] = ()

    def contains(self, label: Label) -> bool:
        body = canonical_label(label).body
        match self.kind:
            case "all":
                return True
            case "empty":
                return False
            case "lm":
                other = _two_parts(body)
                return (isinstance(other, Prefix)
                        and isinstance(other.action, Cap)
                        and other.action.op == "open")
            case "la":
                if isinstance(body, Hole):
                    return True
                other = _two_parts(body)
                return (isinstance(other, Prefix)
                        and isinstance(other.action, Recv))
            case "lccs":
                if isinstance(body, Hole):
                    return True
                other = _two_parts(body)
                return (isinstance(other, Prefix)
                        and isinstance(other.action, (Recv, Send)))
            case "patterns":
                return any(p.calculus is label.calculus
                           and _match(canonical_label(p).body, body, {})
                           for p in self.patterns)
        raise LbisimError(f"unknown label-set kind {self.kind!r}")

    def barb_candidates(self, barb: str, calculus: Calculus) -> list[Label]:
        """Labels whose presence could witness the barb, filtered to this
        set."""
        x1 = ProcVar("X1")
        raw: list[Label] = []
        if calculus is Calculus.MA:
            n = NameVar(barb[1:]) if barb.startswith("?") else barb
            raw.append(Label(calculus, par(Hole(), Prefix(Cap("open", n), x1))))
            raw.append(Label(calculus,
                             par(Hole(),
                                 Amb(NameVar("x"),
                                     par(Prefix(Cap("in", n), x1),
                                         ProcVar("X2"))))))
        elif calculus is Calculus.CCS:
            if barb.startswith("'"):
                raw.append(Label(calculus,
                                 par(Hole(), Prefix(Recv(barb[1:]), x1))))
            else:
                raw.append(Label(calculus, par(Hole(), Prefix(Send(barb), x1))))
        else:
            if barb.startswith("'"):
                raw.append(Label(calculus,
                                 par(Hole(), Prefix(Recv(barb[1:]), x1))))
        return [canonical_label(l) for l in raw if self.contains(l)]


ALL = LabelSet("ALL", "all")
EMPTY = LabelSet("EMPTY", "empty")
LM = LabelSet("LM", "lm")
LA = LabelSet("LA", "la")
LCCS = LabelSet("LCCS", "lccs")

BUILTIN_LABEL_SETS = {"ALL": ALL, "EMPTY": EMPTY, "LM": LM, "LA": LA,
                      "LCCS": LCCS}


def pattern_label_set(name: str, patterns) -> LabelSet:
    return LabelSet(name, "patterns", tuple(patterns))


# --- game engine -----------------------------------------------------------

@dataclass(frozen=True)
class _Attack:
    side: int                      # 0: left state attacks, 1: right
    text: str                      # label text (canonical) or action
    label: "Label | None"          # None for ordinary games
    target: Term                   # internal variable naming
    fresh_procs: tuple = ()        # (canonical, internal) pairs
    fresh_names: tuple = ()


class _PairNode:
    __slots__ = ("p", "q", "status", "rank", "expanded", "attacks", "fail",
                 "index")

    def __init__(self, p, q, index):
        self.p = p
        self.q = q
        self.status = "open"       # open | true | dead
        self.rank = None
        self.expanded = False
        self.attacks = []          # [(attack, [(answer_term, pair_key)])]
        self.fail = None           # ("barb", side, name) | ("attack", i)
        self.index = index


@dataclass
class WitnessMove:
    pair: tuple[str, str]
    side: str                      # "left" | "right"
    kind: str                      # "move" | "barb"
    move: str                      # label/action text, or the barb
    attacker_target: "str | None"
    defender_target: "str | None"
    intro_vars: dict
    reason: "str | None"

    def to_dict(self) -> dict:
        return {
            "pair": list(self.pair),
            "side": self.side,
            "kind": self.kind,
            "move": self.move,
            "attacker_target": self.attacker_target,
            "defender_target": self.defender_target,
            "intro_vars": dict(self.intro_vars),
            "reason": self.reason,
        }


@dataclass
class GameResult:
    verdict: bool
    witness: "list[WitnessMove] | None"
    pairs_explored: int
    rounds: int

    def to_dict(self) -> dict:
        return {
            "verdict": "equivalent" if self.verdict else "inequivalent",
            "witness": None if self.witness is None
            else [m.to_dict() for m in self.witness],
            "stats": {"pairs": self.pairs_explored, "rounds": self.rounds},
        }


def _solve(game, p0: Term, q0: Term, max_pairs: int) -> GameResult:
    pairs: dict = {}
    order: list = []

    def intern(p: Term, q: Term):
        key = (p.node, q.node)
        node = pairs.get(key)
        if node is None:
            if len(pairs) >= max_pairs:
                raise DivergenceBudgetExceededError(max_pairs, len(pairs) + 1)
            node = _PairNode(p, q, len(order))
            if p.node == q.node:
                node.status = "true"
            pairs[key] = node
            order.append(key)
        return key

    root = intern(canonical_term(p0), canonical_term(q0))
    pending = [root] if pairs[root].status == "open" else []
    rounds = 0
    while True:
        discovered: list = []
        for key in pending:
            node = pairs[key]
            if node.status != "open" or node.expanded:
                continue
            node.expanded = True
            bad = game.pair_barb_fail(node.p, node.q)
            if bad is not None:
                node.status = "dead"
                node.rank = 0
                node.fail = bad
                continue
            for attack in game.attacks(node.p, node.q):
                defender = node.q if attack.side == 0 else node.p
                answers = []
                for ans in game.answers(attack, defender):
                    if attack.side == 0:
                        k = intern(attack.target, ans)
                    else:
                        k = intern(ans, attack.target)
                    answers.append((ans, k))
                    if pairs[k].status == "open" and not pairs[k].expanded:
                        discovered.append(k)
                node.attacks.append((attack, answers))
                if not answers:
                    node.status = "dead"
                    node.rank = 0
                    node.fail = ("attack", len(node.attacks) - 1)
                    break
        # refutation fixpoint
        changed = True
        while changed:
            changed = False
            rounds += 1
            for key in order:
                node = pairs[key]
                if node.status != "open" or not node.expanded:
                    continue
                for i, (attack, answers) in enumerate(node.attacks):
                    if answers and all(pairs[k].status == "dead"
                                       for _, k in answers):
                        node.status = "dead"
                        node.rank = rounds
                        node.fail = ("attack", i)
                        changed = True
                        break
        if pairs[root].status == "dead":
            witness = _build_witness(pairs, root)
            return GameResult(False, witness, len(pairs), rounds)
        pending = [k for k in discovered
                   if pairs[k].status == "open" and not pairs[k].expanded]
        if not pending:
            return GameResult(True, None, len(pairs), rounds)


def _build_witness(pairs, root) -> list[WitnessMove]:
    from .syntax import print_label, print_term
    moves: list[WitnessMove] = []
    ren_p: dict = {}               # internal proc var -> Wk
    ren_n: dict = {}               # internal name var -> wk
    counter = [0]

    def text(term: Term) -> str:
        return print_term(
            canonical_term(Term(term.calculus,
                                rename_vars(term.node, ren_p, ren_n))))

    key = root
    while True:
        node = pairs[key]
        pair_text = (text(node.p), text(node.q))
        kind, *info = node.fail
        if kind == "barb":
            side, name = info
            moves.append(WitnessMove(pair_text, "left" if side == 0 else "right",
                                     "barb", name, None, None, {},
                                     "barb unmatched"))
            return moves
        attack, answers = node.attacks[info[0]]
        back_p = {internal: canonical for canonical, internal
                  in attack.fresh_procs}
        back_n = {internal: canonical for canonical, internal
                  in attack.fresh_names}

        def xform(term: Term) -> str:
            return print_term(canonical_term(
                Term(term.calculus,
                     rename_vars(term.node, ren_p | back_p, ren_n | back_n))))

        att_text = xform(attack.target)
        intro = {}
        for canonical, internal in attack.fresh_procs:
            counter[0] += 1
            intro[canonical] = f"W{counter[0]}"
            ren_p[internal] = f"W{counter[0]}"
        for canonical, internal in attack.fresh_names:
            counter[0] += 1
            intro[canonical] = f"w{counter[0]}"
            ren_n[internal] = f"w{counter[0]}"
        side_text = "left" if attack.side == 0 else "right"
        if not answers:
            moves.append(WitnessMove(pair_text, side_text, "move", attack.text,
                                     att_text, None, intro, "no answer"))
            return moves
        _, best = min(answers,
                      key=lambda ak: (pairs[ak[1]].rank,
                                      node_key(ak[0].node)))
        best_node = pairs[best]
        defender = best_node.q if attack.side == 0 else best_node.p
        moves.append(WitnessMove(pair_text, side_text, "move", attack.text,
                                 att_text, xform(defender), intro, None))
        key = best


# --- concrete games --------------------------------------------------------

class _OrdinaryGame:
    """Strong bisimulation on the ordinary labelled semantics."""

    def __init__(self, calculus: Calculus):
        self.calculus = calculus

    def pair_barb_fail(self, p, q):
        return None

    def attacks(self, p, q):
        out = []
        for side, state in ((0, p), (1, q)):
            for tr in ordinary_transitions(state):
                out.append(_Attack(side, tr.action, None, tr.target))
        return out

    def answers(self, attack, defender):
        return [tr.target for tr in ordinary_transitions(defender)
                if tr.action == attack.text]


class _AsyncGame(_OrdinaryGame):
    """Asynchronous bisimulation: inputs may be answered by a tau step
    that leaves the consumed message beside the residual."""

    def answers(self, attack, defender):
        exact = super().answers(attack, defender)
        action = attack.text
        if action == "tau" or action.startswith("'"):
            return exact
        extra = [
            canonical_term(Term(defender.calculus,
                                par(tr.target.node, Msg(action))))
            for tr in ordinary_transitions(defender) if tr.action == "tau"
        ]
        return exact + extra


class _SymbolicGame:
    """l_bisim(L) on the symbolic ITS."""

    def __init__(self, calculus: Calculus, labels: LabelSet, barbed: bool):
        self.calculus = calculus
        self.labels = labels
        self.barbed = barbed
        self._counter = 0

    def pair_barb_fail(self, p, q):
        if not self.barbed:
            return None
        bp, bq = barbs(p), barbs(q)
        if bp == bq:
            return None
        only_p = sorted(bp - bq)
        if only_p:
            return ("barb", 0, only_p[0])
        return ("barb", 1, sorted(bq - bp)[0])

    def _freshen(self, side: int, tr: ItsTransition) -> _Attack:
        from .syntax import print_label
        fresh_p = []
        fresh_n = []
        seen = set()
        for kind, name in _vars_in_order(tr.label.body):
            if name in seen:
                continue
            seen.add(name)
            self._counter += 1
            if kind == "proc":
                fresh_p.append((name, f"V{self._counter}"))
            else:
                fresh_n.append((name, f"v{self._counter}"))
        target = canonical_term(
            Term(tr.target.calculus,
                 rename_vars(tr.target.node, dict(fresh_p), dict(fresh_n))))
        return _Attack(side, print_label(tr.label), tr.label, target,
                       tuple(fresh_p), tuple(fresh_n))

    def attacks(self, p, q):
        return [self._freshen(side, tr)
                for side, state in ((0, p), (1, q))
                for tr in its_transitions(state)]

    def answers(self, attack, defender):
        if self.labels.contains(attack.label):
            pm, nm = dict(attack.fresh_procs), dict(attack.fresh_names)
            return [
                canonical_term(Term(defender.calculus,
                                    rename_vars(tr.target.node, pm, nm)))
                for tr in its_transitions(defender)
                if tr.label.body == attack.label.body
            ]
        pm, nm = dict(attack.fresh_procs), dict(attack.fresh_names)
        ctx = Label(attack.label.calculus,
                    rename_vars(attack.label.body, pm, nm))
        return list(reduct_terms(plug(ctx, defender)))


class _IpoGame(_SymbolicGame):
    """IPO bisimilarity: every attack must be answered with the same
    label.  Kept separate from the label-set game so the endpoint
    identity l_bisim(ALL) = ipo exercises two code paths."""

    def answers(self, attack, defender):
        pm, nm = dict(attack.fresh_procs), dict(attack.fresh_names)
        return [
            canonical_term(Term(defender.calculus,
                                rename_vars(tr.target.node, pm, nm)))
            for tr in its_transitions(defender)
            if tr.label.body == attack.label.body
        ]


class _SemiSatGame(_SymbolicGame):
    """Semi-saturated bisimilarity: every attack C is answered by one
    reduction of C[defender]."""

    def answers(self, attack, defender):
        pm, nm = dict(attack.fresh_procs), dict(attack.fresh_names)
        ctx = Label(attack.label.calculus,
                    rename_vars(attack.label.body, pm, nm))
        return list(reduct_terms(plug(ctx, defender)))


class _InstantiatedGame:
    """l_bisim(L) with label variables closed over a finite pool."""

    def __init__(self, calculus, labels: LabelSet, barbed: bool,
                 pool: tuple[Term, ...], names: tuple[str, ...]):
        self.calculus = calculus
        self.labels = labels
        self.barbed = barbed
        self.pool = pool
        self.names = names

    def pair_barb_fail(self, p, q):
        return _SymbolicGame.pair_barb_fail(self, p, q)

    def _closures(self, tr: ItsTransition):
        pvars = []
        nvars = []
        seen = set()
        for kind, name in _vars_in_order(tr.label.body):
            if name in seen:
                continue
            seen.add(name)
            (pvars if kind == "proc" else nvars).append(name)
        if not pvars and not nvars:
            yield tr
            return
        for procs in product(self.pool, repeat=len(pvars)):
            for names in product(self.names, repeat=len(nvars)):
                subst = Substitution.make(
                    self.calculus,
                    procs={v: t for v, t in zip(pvars, procs)},
                    names={v: n for v, n in zip(nvars, names)})
                yield instantiate(tr, subst)

    def attacks(self, p, q):
        from .syntax import print_label
        out = []
        for side, state in ((0, p), (1, q)):
            seen = set()
            for tr in its_transitions(state):
                for inst in self._closures(tr):
                    key = (inst.label.body, inst.target.node)
                    if key in seen:
                        continue
                    seen.add(key)
                    out.append(_Attack(side, print_label(inst.label),
                                       inst.label, inst.target))
        return out

    def answers(self, attack, defender):
        if self.labels.contains(attack.label):
            res = []
            seen = set()
            for tr in its_transitions(defender):
                for inst in self._closures(tr):
                    if inst.label.body == attack.label.body \
                            and inst.target.node not in seen:
                        seen.add(inst.target.node)
                        res.append(inst.target)
            return res
        return list(reduct_terms(plug(attack.label, defender)))


# --- public solvers --------------------------------------------------------

def _entry(p: Term, q: Term) -> Calculus:
    calc = same_calculus(p, q)
    for t in (p, q):
        if not is_pure(t.node):
            raise MalformedTermError(
                "equivalence queries take pure terms "
                "(variables appear only in game states)")
    return calc


def strong_bisim(p: Term, q: Term, *, max_pairs: int = DEFAULT_MAX_PAIRS) \
        -> GameResult:
    calc = _entry(p, q)
    if calc is Calculus.MA:
        raise MAUnsupportedError("strong bisimilarity needs an ordinary LTS; "
                                 "MA has none here")
    return _solve(_OrdinaryGame(calc), p, q, max_pairs)


def async_bisim(p: Term, q: Term, *, max_pairs: int = DEFAULT_MAX_PAIRS) \
        -> GameResult:
    calc = _entry(p, q)
    if calc is not Calculus.ACCS:
        raise LbisimError("asynchronous bisimilarity is an ACCS relation")
    return _solve(_AsyncGame(calc), p, q, max_pairs)


def _pool_names(p, q, pool) -> tuple[str, ...]:
    names = set(free_names(p.node)) | set(free_names(q.node))
    for t in pool:
        names |= free_names(t.node)
    names.add(fresh_name(names))
    return tuple(sorted(names))


def l_bisim(p: Term, q: Term, labels: LabelSet, *,
            barbed: bool = False,
            pool=None,
            max_pairs: int = DEFAULT_MAX_PAIRS) -> GameResult:
    calc = _entry(p, q)
    if pool is None:
        game = _SymbolicGame(calc, labels, barbed)
    else:
        pool = tuple(canonical_term(t) for t in pool)
        for t in pool:
            if t.calculus is not calc or not is_pure(t.node):
                raise MalformedTermError("instantiation pool terms must be "
                                         "pure terms of the same calculus")
        game = _InstantiatedGame(calc, labels, barbed, pool,
                                 _pool_names(p, q, pool))
    return _solve(game, p, q, max_pairs)


def ipo_bisim(p: Term, q: Term, *, pool=None,
              max_pairs: int = DEFAULT_MAX_PAIRS) -> GameResult:
    if pool is not None:
        return l_bisim(p, q, ALL, pool=pool, max_pairs=max_pairs)
    calc = _entry(p, q)
    return _solve(_IpoGame(calc, ALL, False), p, q, max_pairs)


def semi_saturated_bisim(p: Term, q: Term, *, pool=None,
                         max_pairs: int = DEFAULT_MAX_PAIRS) -> GameResult:
    if pool is not None:
        return l_bisim(p, q, EMPTY, pool=pool, max_pairs=max_pairs)
    calc = _entry(p, q)
    return _solve(_SemiSatGame(calc, EMPTY, False), p, q, max_pairs)


def barbed_semi_saturated_bisim(p: Term, q: Term, *,
                                contextual_barbs: bool = True,
                                pool=None,
                                max_pairs: int = DEFAULT_MAX_PAIRS) \
        -> GameResult:
    if not contextual_barbs:
        raise UnsupportedQuantificationError(
            "deciding barbs by quantification over all contexts is not "
            "supported; use the contextual-barb mode")
    return l_bisim(p, q, EMPTY, barbed=True, pool=pool, max_pairs=max_pairs)


# --- reduction predicates behind the non-capturable labels -----------------

def pred_open(p: Term, target: Term, amb_name: str, t1: Term) -> bool:
    """Does p have an open-label transition to `target`, decided purely
    from reductions and barbs?

    Uses the context  - | open n.(m[0] | open m.T1)  with m fresh: the
    first reduction must unleash the marker ambient m, the second must
    consume it again, and the result must have lost the m barb.
    """
    for t in (p, target, t1):
        if t.calculus is not Calculus.MA:
            raise MAUnsupportedError("pred_open is an MA predicate")
        if not is_pure(t.node):
            raise MalformedTermError("pred_open takes pure terms")
    m = fresh_name(free_names(p.node) | free_names(t1.node)
                   | free_names(target.node) | {amb_name})
    ctx = Label(Calculus.MA,
                par(Hole(),
                    Prefix(Cap("open", amb_name),
                           par(Amb(m, Nil()),
                               Prefix(Cap("open", m), t1.node)))))
    want = canonical_node(target)
    if m in barbs(target):
        return False
    for mid in reduct_terms(plug(ctx, p)):
        if m not in barbs(mid):
            continue
        for out in reduct_terms(mid):
            if out.node == want and m not in barbs(out):
                return True
    return False


def pred_ccs(kind: str, p: Term, target: Term, channel: "str | None" = None,
             t1: "Term | None" = None) -> bool:
    """CCS counterpart: "out" asks for a - | 'a.T1 transition (the context
    offers an output), "in" for - | a.T1, "tau" for a silent step.

    The marker is a fresh channel i: the context offers the prefix on `a`
    with continuation ('i.0 | T1), plus a probe i.0.  The first step must
    fire the prefix (observable as the 'i barb), the second consumes the
    marker pair, and the result must have lost the 'i barb.
    """
    if p.calculus is not Calculus.CCS:
        raise LbisimError("pred_ccs is a CCS predicate")
    if kind == "tau":
        want = canonical_node(target)
        return any(out.node == want for out in reduct_terms(p))
    if kind not in ("out", "in"):
        raise LbisimError(f"unknown predicate kind {kind!r}")
    if channel is None or t1 is None:
        raise LbisimError("kinds 'out' and 'in' need a channel and a term")
    for t in (p, target, t1):
        if not is_pure(t.node):
            raise MalformedTermError("pred_ccs takes pure terms")
    i = fresh_name(free_names(p.node) | free_names(t1.node)
                   | free_names(target.node) | {channel})
    inner = par(Prefix(Send(i), Nil()), t1.node)
    probe = (Prefix(Send(channel), inner) if kind == "out"
             else Prefix(Recv(channel), inner))
    ctx = Label(Calculus.CCS, par(Hole(), probe, Prefix(Recv(i), Nil())))
    want = canonical_node(target)
    mark = f"'{i}"
    if mark in barbs(target):
        return False
    for mid in reduct_terms(plug(ctx, p)):
        if mark not in barbs(mid):
            continue
        for out in reduct_terms(mid):
            if out.node == want and mark not in barbs(out):
                return True
    return False


# --- capturing check -------------------------------------------------------

@dataclass
class BarbReport:
    barb: str
    label_text: "str | None"
    ok: bool
    violations: list[str] = field(default_factory=list)


@dataclass
class CapturingReport:
    label_set: str
    calculus: str
    entries: list[BarbReport]
    ok: bool


def is_capturing(labels: LabelSet, calculus: Calculus, corpus) \
        -> CapturingReport:
    """Check, over a corpus, that every barb is equivalent to having a
    transition with some fixed label of the set."""
    from .syntax import print_term
    corpus = [canonical_term(t) for t in corpus]
    universe: set[str] = set()
    for t in corpus:
        universe |= barbs(t)
        universe |= free_names(t.node)
    observed = {}
    for t in corpus:
        observed[t.node] = {tr.label.body for tr in its_transitions(t)}
    entries = []
    for raw in sorted(universe):
        forms = {raw}
        if calculus is not Calculus.MA and not raw.startswith("'"):
            forms = {f"'{raw}"} if calculus is Calculus.ACCS else {raw, f"'{raw}"}
        if calculus is Calculus.CCS and raw.startswith("'"):
            continue  # handled from the positive form
        for barb in sorted(forms):
            cands = labels.barb_candidates(barb, calculus)
            best = None
            for cand in cands:
                bad = [t for t in corpus
                       if (barb in barbs(t)) != (cand.body in observed[t.node])]
                if not bad:
                    best = (cand, [])
                    break
                if best is None or len(bad) < len(best[1]):
                    best = (cand, bad)
            if best is None:
                entries.append(BarbReport(barb, None, False))
                continue
            cand, bad = best
            from .syntax import print_label
            entries.append(BarbReport(barb, print_label(cand), not bad,
                                      [print_term(t) for t in bad[:5]]))
    return CapturingReport(labels.name, calculus.value, entries,
                           all(e.ok for e in entries) and bool(entries))


# --- witness replay --------------------------------------------------------

def _replay_game(relation, calc, labels, barbed, pool, p, q):
    if relation == "strong":
        return _OrdinaryGame(calc)
    if relation == "async":
        return _AsyncGame(calc)
    sets = {"ipo": ALL, "semi-sat": EMPTY, "barbed-semi-sat": EMPTY,
            "l-bisim": labels}
    labelset = sets[relation]
    if labelset is None:
        raise LbisimError("l-bisim replay needs its label set")
    barbed = barbed or relation == "barbed-semi-sat"
    if pool is None:
        return _SymbolicGame(calc, labelset, barbed)
    pool = tuple(canonical_term(t) for t in pool)
    return _InstantiatedGame(calc, labelset, barbed, pool,
                             _pool_names(p, q, pool))


def verify_witness(p: Term, q: Term, result: GameResult, relation: str,
                   labels: "LabelSet | None" = None, pool=None) -> bool:
    """Replay a failure witness against the move generators.

    Every step's attacker move must exist, every recorded defender answer
    must be a legal answer, and the last step must be a genuine dead end
    (no answer, or an unmatched barb).  Witness states rename the
    variables introduced along the trace to W1, W2, ... (w1 ... for name
    variables); `intro_vars` of each step records that renaming, which is
    undone here to recompute moves in canonical X-naming.
    """
    from .syntax import print_label, print_term
    if result.verdict or not result.witness:
        raise LbisimError("only inequivalence results carry a witness")
    calc = same_calculus(p, q)
    game = _replay_game(relation, calc, labels, False, pool, p, q)
    ordinary = isinstance(game, _OrdinaryGame)
    cur_p, cur_q = canonical_term(p), canonical_term(q)
    for step in result.witness:
        if (print_term(cur_p), print_term(cur_q)) != step.pair:
            return False
        attacker, defender = ((cur_p, cur_q) if step.side == "left"
                              else (cur_q, cur_p))
        if step.kind == "barb":
            return step.move in barbs(attacker) - barbs(defender)
        # find the recorded attacker move
        found = None
        if ordinary:
            for tr in ordinary_transitions(attacker):
                if tr.action == step.move \
                        and print_term(tr.target) == step.attacker_target:
                    found = (tr.target, None)
                    break
        else:
            for tr in its_transitions(attacker):
                if print_label(tr.label) == step.move \
                        and print_term(tr.target) == step.attacker_target:
                    found = (tr.target, tr.label)
                    break
        if found is None:
            return False
        att_target, label = found
        # recompute the legal answers
        side = 0 if step.side == "left" else 1
        if ordinary:
            answers = game.answers(_Attack(side, step.move, None, att_target),
                                   defender)
        elif game.labels.contains(label):
            answers = [tr.target for tr in its_transitions(defender)
                       if tr.label.body == label.body]
        else:
            answers = list(reduct_terms(plug(label, defender)))
        if step.defender_target is None:
            return not answers and step.reason == "no answer"
        chosen = next((a for a in answers
                       if print_term(a) == step.defender_target), None)
        if chosen is None:
            return False
        pm = {k: v for k, v in step.intro_vars.items() if v.startswith("W")}
        nm = {k: v for k, v in step.intro_vars.items() if v.startswith("w")}
        nxt_att = canonical_term(
            Term(calc, rename_vars(att_target.node, pm, nm)))
        nxt_def = canonical_term(
            Term(calc, rename_vars(chosen.node, pm, nm)))
        cur_p, cur_q = ((nxt_att, nxt_def) if step.side == "left"
                        else (nxt_def, nxt_att))
    return False
