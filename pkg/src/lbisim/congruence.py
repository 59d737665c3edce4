"""Structural congruence via canonical forms.

`canonicalize` orients the congruence axioms into a terminating rewrite:

  * drop parallel and sum units, flatten both associative operators;
  * prune vacuous restrictions ((nu n) p with n not free in p);
  * hoist restrictions outward — across parallel composition in every
    calculus, and through ambients and capability prefixes in MA, so an MA
    canonical form keeps every binder in one top-level cluster while CCS
    and ACCS keep binders under prefixes where they started;
  * alpha-rename each binder cluster to f0, f1, ... (smallest names not
    free in the cluster), trying every binder order and keeping the
    lexicographically least body;
  * sort parallel components and summands by a total order on terms.

Two terms are structurally congruent exactly when their canonical forms
are equal, so `equiv` is canonical-form equality.  The pruning step is a
convention on top of the textbook axiom sets (which cannot derive
(nu n) 0 = 0); it is what makes the "name not restricted" side conditions
of the transition rules independent of the chosen representative.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations

from .errors import LbisimError
from .terms import (
    Amb, Calculus, Cap, Hole, Label, Msg, NameVar, Nil, Node, Par, Prefix,
    ProcVar, Recv, Restrict, Send, Sum, Tau, Term,
    free_names, fresh_name, par, rename_free, restricts, same_calculus,
)

_MAX_CLUSTER = 7  # binder clusters are permuted exhaustively


def strip_restricts(node: Node) -> tuple[list[str], Node]:
    names = []
    while isinstance(node, Restrict):
        names.append(node.name)
        node = node.body
    return names, node


def components(node: Node) -> tuple[Node, ...]:
    match node:
        case Par(children=cs):
            return cs
        case Nil():
            return ()
        case _:
            return (node,)


# --- structural normalisation ----------------------------------------------

def _hoist_out(binders: list[str], core: Node, blocked: frozenset[str]):
    """Rename binders clashing with `blocked` (names of the surrounding
    construct) so the cluster can move outward."""
    out = []
    for b in binders:
        if b in blocked or b in out:
            b2 = fresh_name(set(blocked) | set(out) | set(binders)
                            | free_names(core))
            core = rename_free(core, {b: b2})
            b = b2
        out.append(b)
    return out, core


def _normalize(node: Node, calc: Calculus) -> Node:
    match node:
        case Nil() | Hole() | Msg() | ProcVar():
            return node
        case Prefix(action=act, body=b):
            b = _normalize(b, calc)
            if calc is Calculus.MA:
                bs, core = strip_restricts(b)
                if bs:
                    n = act.amb if isinstance(act, Cap) else None
                    blocked = frozenset((n,)) if isinstance(n, str) else frozenset()
                    bs, core = _hoist_out(bs, core, blocked)
                    return restricts(bs, Prefix(act, core))
            return Prefix(act, b)
        case Amb(name=n, body=b):
            b = _normalize(b, calc)
            bs, core = strip_restricts(b)
            if bs:
                blocked = frozenset((n,)) if isinstance(n, str) else frozenset()
                bs, core = _hoist_out(bs, core, blocked)
                return restricts(bs, Amb(n, core))
            return Amb(n, b)
        case Sum(children=cs):
            flat: list[Node] = []
            for c in cs:
                c = _normalize(c, calc)
                if isinstance(c, Sum):
                    flat.extend(c.children)
                elif not isinstance(c, Nil):
                    flat.append(c)
            if not flat:
                return Nil()
            if len(flat) == 1:
                return flat[0]
            return Sum(tuple(flat))
        case Par(children=cs):
            entries: list[tuple[list[str], Node]] = []
            for c in cs:
                c = _normalize(c, calc)
                bs, core = strip_restricts(c)
                entries.append((list(bs), core))
            # Move every binder to the front, freshening on clashes with
            # the other children or the binders already collected.
            collected: list[str] = []
            cores = [core for _, core in entries]
            for i, (bs, _) in enumerate(entries):
                for b in bs:
                    others = set(collected)
                    for j, cj in enumerate(cores):
                        if j != i:
                            others |= free_names(cj)
                    if b in others:
                        b2 = fresh_name(others | free_names(cores[i]))
                        cores[i] = rename_free(cores[i], {b: b2})
                        b = b2
                    collected.append(b)
            parts: list[Node] = []
            for core in cores:
                parts.extend(p for p in components(core)
                             if not isinstance(p, Nil))
            body = par(*parts)
            return restricts([b for b in collected if b in free_names(body)],
                             body)
        case Restrict(name=n, body=b):
            b = _normalize(b, calc)
            if n not in free_names(b):
                return b
            return Restrict(n, b)
    raise TypeError(f"not a node: {node!r}")


# --- total order -----------------------------------------------------------

def _name_key(n):
    return (0, n) if isinstance(n, str) else (1, n.name)


_CAP_OPS = {"in": 0, "out": 1, "open": 2}


def _act_key(act):
    match act:
        case Tau():
            return (0,)
        case Recv(channel=a):
            return (1, a)
        case Send(channel=a):
            return (2, a)
        case Cap(op=op, amb=n):
            return (3, _CAP_OPS[op], _name_key(n))
    raise TypeError(f"not an action: {act!r}")


@lru_cache(maxsize=1 << 18)
def node_key(node: Node):
    """Total order on syntax trees; canonical forms compare by this key."""
    match node:
        case Nil():
            return (0,)
        case Hole():
            return (1,)
        case ProcVar(name=v):
            return (2, v)
        case Msg(channel=a):
            return (3, a)
        case Prefix(action=act, body=b):
            return (4, _act_key(act), node_key(b))
        case Sum(children=cs):
            return (5, tuple(node_key(c) for c in cs))
        case Amb(name=n, body=b):
            return (6, _name_key(n), node_key(b))
        case Restrict(name=n, body=b):
            return (7, n, node_key(b))
        case Par(children=cs):
            return (8, tuple(node_key(c) for c in cs))
    raise TypeError(f"not a node: {node!r}")


# --- alpha-canonical renaming and sorting ----------------------------------

def _cluster_names(avoid, k: int) -> list[str]:
    out = []
    i = 0
    while len(out) < k:
        cand = f"f{i}"
        if cand not in avoid:
            out.append(cand)
        i += 1
    return out


def _alpha(node: Node, env: dict) -> Node:
    if isinstance(node, Restrict):
        names, body = strip_restricts(node)
        outer_free = {env.get(x, x) for x in free_names(node)}
        fresh = _cluster_names(outer_free, len(names))
        if len(names) > _MAX_CLUSTER:
            return restricts(fresh, _alpha_big(names, body, env, fresh))
        best = None
        best_key = None
        orders = permutations(names) if len(names) > 1 else (tuple(names),)
        for perm in orders:
            env2 = dict(env)
            env2.update({perm[i]: fresh[i] for i in range(len(names))})
            cand = _alpha(body, env2)
            k = node_key(cand)
            if best_key is None or k < best_key:
                best, best_key = cand, k
        return restricts(fresh, best)
    match node:
        case Nil() | Hole() | ProcVar():
            return node
        case Msg(channel=a):
            return Msg(env.get(a, a))
        case Prefix(action=act, body=b):
            match act:
                case Recv(channel=a):
                    act = Recv(env.get(a, a))
                case Send(channel=a):
                    act = Send(env.get(a, a))
                case Cap(op=op, amb=n):
                    if isinstance(n, str):
                        act = Cap(op, env.get(n, n))
            return Prefix(act, _alpha(b, env))
        case Sum(children=cs):
            done = sorted((_alpha(c, env) for c in cs), key=node_key)
            return Sum(tuple(done))
        case Par(children=cs):
            done = sorted((_alpha(c, env) for c in cs), key=node_key)
            return Par(tuple(done))
        case Amb(name=n, body=b):
            if isinstance(n, str):
                n = env.get(n, n)
            return Amb(n, _alpha(b, env))
    raise TypeError(f"not a node: {node!r}")


def _alpha_big(names: list, body: Node, env: dict, fresh: list) -> Node:
    """Binder clusters too large to permute exhaustively.

    Each binder gets an alpha-invariant signature (the body with that
    binder marked "self" and its siblings "other"); binders are assigned
    fresh names in signature order.  Binders with equal signatures must
    be outright interchangeable — every pairwise swap is recomputed and
    checked — which covers the practical case of parallel replicas.  A
    cluster with asymmetric signature ties is rejected rather than given
    an unstable normal form.
    """
    sigs = {}
    for x in names:
        env2 = dict(env)
        for y in names:
            env2[y] = "\x00self" if y == x else "\x00other"
        sigs[x] = node_key(_alpha(body, env2))
    order = {x: i for i, x in enumerate(names)}
    ordered = sorted(names, key=lambda x: (sigs[x], order[x]))
    assign = {x: fresh[i] for i, x in enumerate(ordered)}
    env_base = dict(env)
    env_base.update(assign)
    result = _alpha(body, env_base)
    i = 0
    while i < len(ordered):
        j = i
        while j + 1 < len(ordered) and sigs[ordered[j + 1]] == sigs[ordered[i]]:
            j += 1
        for a in range(i, j + 1):
            for b in range(a + 1, j + 1):
                swapped = dict(assign)
                swapped[ordered[a]], swapped[ordered[b]] = \
                    swapped[ordered[b]], swapped[ordered[a]]
                env3 = dict(env)
                env3.update(swapped)
                if _alpha(body, env3) != result:
                    raise LbisimError(
                        f"binder cluster of size {len(names)} exceeds the "
                        f"exhaustive-permutation maximum of {_MAX_CLUSTER} "
                        f"and is not symmetric enough to normalise")
        i = j + 1
    return result


# --- canonical forms -------------------------------------------------------

@dataclass(frozen=True)
class CanonicalForm:
    """Top binder cluster plus sorted parallel components."""
    calculus: Calculus
    binders: tuple[str, ...]
    parts: tuple[Node, ...]

    @property
    def node(self) -> Node:
        return restricts(self.binders, par(*self.parts))

    @property
    def term(self) -> Term:
        return Term(self.calculus, self.node)

    @property
    def key(self):
        return node_key(self.node)

    @property
    def text(self) -> str:
        from .syntax import print_node
        return print_node(self.node)


@lru_cache(maxsize=1 << 17)
def _canon_node(calc: Calculus, node: Node) -> Node:
    return _alpha(_normalize(node, calc), {})


def canonical_node(term: Term) -> Node:
    return _canon_node(term.calculus, term.node)


def canonicalize(term) -> CanonicalForm:
    """Canonical representative of the structural-congruence class."""
    if isinstance(term, Label):
        node = _canon_node(term.calculus, term.body)
    else:
        node = _canon_node(term.calculus, term.node)
    binders, core = strip_restricts(node)
    return CanonicalForm(term.calculus, tuple(binders), components(core))


def canonical_term(term: Term) -> Term:
    return Term(term.calculus, canonical_node(term))


def canonical_label(label: Label) -> Label:
    return Label(label.calculus, _canon_node(label.calculus, label.body))


def equiv(t1: Term, t2: Term) -> bool:
    """Structural congruence, decided on canonical forms."""
    same_calculus(t1, t2)
    return canonical_node(t1) == canonical_node(t2)


# --- premise decompositions ------------------------------------------------
#
# The transition rules all match a term against a shape
# (nu A)(<selected> | rest) with a "selected name is not restricted" side
# condition; these generators enumerate the ways a canonical form fits.

@dataclass(frozen=True)
class CapMatch:
    """(nu A)(op n.P1 | P2) with n unrestricted."""
    calculus: Calculus
    binders: tuple[str, ...]
    op: str
    name: "str | NameVar"
    continuation: Node
    rest: tuple[Node, ...]

    def recompose(self) -> Term:
        sel = Prefix(Cap(self.op, self.name), self.continuation)
        return Term(self.calculus,
                    restricts(self.binders, par(sel, *self.rest)))


@dataclass(frozen=True)
class AmbientMatch:
    """(nu A)(n[P1] | P2) with n unrestricted."""
    calculus: Calculus
    binders: tuple[str, ...]
    name: "str | NameVar"
    content: Node
    rest: tuple[Node, ...]

    def recompose(self) -> Term:
        return Term(self.calculus,
                    restricts(self.binders,
                              par(Amb(self.name, self.content), *self.rest)))


@dataclass(frozen=True)
class AmbientCapMatch:
    """(nu A)(n[op m.P1 | P2] | P3) with m unrestricted."""
    calculus: Calculus
    binders: tuple[str, ...]
    amb_name: "str | NameVar"
    op: str
    cap_name: "str | NameVar"
    continuation: Node
    inner_rest: tuple[Node, ...]
    rest: tuple[Node, ...]

    def recompose(self) -> Term:
        inner = par(Prefix(Cap(self.op, self.cap_name), self.continuation),
                    *self.inner_rest)
        return Term(self.calculus,
                    restricts(self.binders,
                              par(Amb(self.amb_name, inner), *self.rest)))


@dataclass(frozen=True)
class SummandMatch:
    """(nu A)(act.Q + M | R) with the channel, if any, unrestricted."""
    calculus: Calculus
    binders: tuple[str, ...]
    action: "Tau | Recv | Send"
    continuation: Node
    sum_rest: tuple[Node, ...]
    rest: tuple[Node, ...]

    def recompose(self) -> Term:
        sel = Prefix(self.action, self.continuation)
        if self.sum_rest:
            sel = Sum((sel, *self.sum_rest))
        return Term(self.calculus,
                    restricts(self.binders, par(sel, *self.rest)))


@dataclass(frozen=True)
class ParticleMatch:
    """(nu A)('a | Q) with a unrestricted."""
    calculus: Calculus
    binders: tuple[str, ...]
    channel: str
    rest: tuple[Node, ...]

    def recompose(self) -> Term:
        return Term(self.calculus,
                    restricts(self.binders, par(Msg(self.channel), *self.rest)))


def _unrestricted(name, binders) -> bool:
    return isinstance(name, NameVar) or name not in binders


def _drop(parts: tuple, i: int) -> tuple:
    return parts[:i] + parts[i + 1:]


def cap_matches(cf: CanonicalForm, op: str):
    for i, c in enumerate(cf.parts):
        match c:
            case Prefix(action=Cap(op=o, amb=n), body=p1) if o == op:
                if _unrestricted(n, cf.binders):
                    yield CapMatch(cf.calculus, cf.binders, op, n, p1,
                                   _drop(cf.parts, i))


def ambient_matches(cf: CanonicalForm):
    for i, c in enumerate(cf.parts):
        match c:
            case Amb(name=n, body=p1):
                if _unrestricted(n, cf.binders):
                    yield AmbientMatch(cf.calculus, cf.binders, n, p1,
                                       _drop(cf.parts, i))


def ambient_cap_matches(cf: CanonicalForm, op: str):
    for i, c in enumerate(cf.parts):
        match c:
            case Amb(name=n, body=b):
                inner = components(b)
                for j, d in enumerate(inner):
                    match d:
                        case Prefix(action=Cap(op=o, amb=m), body=p1) if o == op:
                            if _unrestricted(m, cf.binders):
                                yield AmbientCapMatch(
                                    cf.calculus, cf.binders, n, op, m, p1,
                                    _drop(inner, j), _drop(cf.parts, i))


def _summands(c: Node):
    match c:
        case Prefix():
            yield c, ()
        case Sum(children=cs):
            for j, s in enumerate(cs):
                if isinstance(s, Prefix):
                    yield s, _drop(cs, j)


_KINDS = {"tau": Tau, "recv": Recv, "send": Send}


def summand_matches(cf: CanonicalForm, kind: str):
    want = _KINDS[kind]
    for i, c in enumerate(cf.parts):
        for s, sum_rest in _summands(c):
            if isinstance(s.action, want):
                ch = getattr(s.action, "channel", None)
                if ch is not None and ch in cf.binders:
                    continue
                yield SummandMatch(cf.calculus, cf.binders, s.action, s.body,
                                   sum_rest, _drop(cf.parts, i))


def particle_matches(cf: CanonicalForm):
    for i, c in enumerate(cf.parts):
        match c:
            case Msg(channel=a):
                if a not in cf.binders:
                    yield ParticleMatch(cf.calculus, cf.binders, a,
                                        _drop(cf.parts, i))


_SHAPES = {
    "cap-in": lambda cf: cap_matches(cf, "in"),
    "cap-out": lambda cf: cap_matches(cf, "out"),
    "cap-open": lambda cf: cap_matches(cf, "open"),
    "ambient": ambient_matches,
    "ambient-cap-in": lambda cf: ambient_cap_matches(cf, "in"),
    "ambient-cap-out": lambda cf: ambient_cap_matches(cf, "out"),
    "summand-tau": lambda cf: summand_matches(cf, "tau"),
    "summand-recv": lambda cf: summand_matches(cf, "recv"),
    "summand-send": lambda cf: summand_matches(cf, "send"),
    "particle": particle_matches,
}


def decompose(term: Term, shape: str):
    """Enumerate the ways `term` matches a rule premise shape."""
    if shape not in _SHAPES:
        raise LbisimError(f"unknown decomposition shape {shape!r}")
    return list(_SHAPES[shape](canonicalize(term)))
