"""Abstract syntax shared by the three calculi.

A `Term` pairs a `Calculus` tag with an immutable syntax tree.  The same
node classes serve CCS, asynchronous CCS (ACCS) and the communication-free
fragment of mobile ambients (MA); `check_node` enforces the per-calculus
restrictions (no summation in MA, no ambients outside MA, output particles
only in ACCS, and so on).

Extended syntax adds process variables (`@X`) and ambient-name variables
(`?x[...]`, MA only).  A term with no variables is *pure*.  Labels are
terms with exactly one hole `-`; they double as the unary contexts of the
instance transition systems.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from enum import Enum

from .errors import (
    CrossCalculusError,
    IncompleteSubstitutionError,
    MalformedTermError,
)


class Calculus(Enum):
    CCS = "ccs"
    ACCS = "accs"
    MA = "ma"


# --- syntax tree -----------------------------------------------------------

@dataclass(frozen=True)
class NameVar:
    """Ambient-name variable; ranges over ambient names, never bound."""
    name: str


# A "name position" holds either a concrete name (str) or a NameVar.
Name = "str | NameVar"


@dataclass(frozen=True)
class Tau:
    pass


@dataclass(frozen=True)
class Recv:
    channel: str


@dataclass(frozen=True)
class Send:
    channel: str


@dataclass(frozen=True)
class Cap:
    """Mobility capability: op is one of "in", "out", "open"."""
    op: str
    amb: "str | NameVar"


Action = "Tau | Recv | Send | Cap"


@dataclass(frozen=True)
class Node:
    pass


@dataclass(frozen=True)
class Nil(Node):
    pass


@dataclass(frozen=True)
class Prefix(Node):
    action: "Tau | Recv | Send | Cap"
    body: Node


@dataclass(frozen=True)
class Sum(Node):
    children: tuple[Node, ...]


@dataclass(frozen=True)
class Par(Node):
    children: tuple[Node, ...]


@dataclass(frozen=True)
class Restrict(Node):
    name: str
    body: Node


@dataclass(frozen=True)
class Amb(Node):
    name: "str | NameVar"
    body: Node


@dataclass(frozen=True)
class Msg(Node):
    """ACCS output particle (an unguarded message in the ether)."""
    channel: str


@dataclass(frozen=True)
class ProcVar(Node):
    name: str


@dataclass(frozen=True)
class Hole(Node):
    pass


@dataclass(frozen=True)
class Term:
    calculus: Calculus
    node: Node


@dataclass(frozen=True)
class Label:
    """A unary context: a node containing exactly one `Hole`."""
    calculus: Calculus
    body: Node

    @property
    def variables(self) -> tuple[str, ...]:
        """Variable names in first-use (pre-order) position order."""
        out: list[str] = []
        for kind, name in _vars_in_order(self.body):
            if name not in out:
                out.append(name)
        return tuple(out)


# --- traversals ------------------------------------------------------------

def free_names(node: Node) -> frozenset[str]:
    """Free concrete names.  Name variables contribute nothing."""
    match node:
        case Nil() | Hole() | ProcVar():
            return frozenset()
        case Msg(channel=a):
            return frozenset((a,))
        case Prefix(action=act, body=b):
            return _action_names(act) | free_names(b)
        case Sum(children=cs) | Par(children=cs):
            out: frozenset[str] = frozenset()
            for c in cs:
                out |= free_names(c)
            return out
        case Restrict(name=n, body=b):
            return free_names(b) - {n}
        case Amb(name=n, body=b):
            base = free_names(b)
            return base | {n} if isinstance(n, str) else base
    raise TypeError(f"not a node: {node!r}")


def _action_names(act) -> frozenset[str]:
    match act:
        case Tau():
            return frozenset()
        case Recv(channel=a) | Send(channel=a):
            return frozenset((a,))
        case Cap(amb=n):
            return frozenset((n,)) if isinstance(n, str) else frozenset()
    raise TypeError(f"not an action: {act!r}")


def _vars_in_order(node: Node):
    """Yield ("proc"|"name", varname) pre-order occurrences."""
    match node:
        case ProcVar(name=v):
            yield ("proc", v)
        case Prefix(action=Cap(amb=NameVar(name=x)), body=b):
            yield ("name", x)
            yield from _vars_in_order(b)
        case Prefix(body=b):
            yield from _vars_in_order(b)
        case Sum(children=cs) | Par(children=cs):
            for c in cs:
                yield from _vars_in_order(c)
        case Restrict(body=b):
            yield from _vars_in_order(b)
        case Amb(name=n, body=b):
            if isinstance(n, NameVar):
                yield ("name", n.name)
            yield from _vars_in_order(b)
        case _:
            return


def proc_vars(node: Node) -> frozenset[str]:
    return frozenset(n for k, n in _vars_in_order(node) if k == "proc")


def name_vars(node: Node) -> frozenset[str]:
    return frozenset(n for k, n in _vars_in_order(node) if k == "name")


def is_pure(node: Node) -> bool:
    return next(_vars_in_order(node), None) is None


def count_holes(node: Node) -> int:
    match node:
        case Hole():
            return 1
        case Prefix(body=b) | Restrict(body=b) | Amb(body=b):
            return count_holes(b)
        case Sum(children=cs) | Par(children=cs):
            return sum(count_holes(c) for c in cs)
        case _:
            return 0


# --- well-formedness -------------------------------------------------------

def _guarded(node: Node) -> bool:
    """Summands must be 0, a prefix, or again a sum of such."""
    match node:
        case Nil() | Prefix():
            return True
        case Sum(children=cs):
            return all(_guarded(c) for c in cs)
        case _:
            return False


def check_node(calculus: Calculus, node: Node, *, allow_hole=False) -> None:
    """Raise MalformedTermError unless `node` fits `calculus`.

    Checks the per-calculus constructor and prefix repertoire, guardedness
    of summands, and (for extended terms) that no variable occurs twice.
    """
    seen: set[str] = set()
    for kind, name in _vars_in_order(node):
        key = kind + ":" + name
        if key in seen:
            raise MalformedTermError(f"variable {name!r} occurs twice")
        seen.add(key)
    _check(calculus, node, allow_hole)
    if not allow_hole and count_holes(node):
        raise MalformedTermError("hole outside a label")


def _check(calc: Calculus, node: Node, allow_hole: bool) -> None:
    match node:
        case Nil() | ProcVar():
            return
        case Hole():
            if not allow_hole:
                raise MalformedTermError("hole outside a label")
            return
        case Msg():
            if calc is not Calculus.ACCS:
                raise MalformedTermError("output particles exist only in ACCS")
            return
        case Prefix(action=act, body=b):
            match act:
                case Cap():
                    if calc is not Calculus.MA:
                        raise MalformedTermError(
                            "capability prefixes exist only in MA")
                case Send():
                    if calc is not Calculus.CCS:
                        raise MalformedTermError(
                            "output prefixes exist only in CCS")
                case Tau() | Recv():
                    if calc is Calculus.MA:
                        raise MalformedTermError(
                            "channel prefixes do not exist in MA")
            _check(calc, b, allow_hole)
            return
        case Sum(children=cs):
            if calc is Calculus.MA:
                raise MalformedTermError("MA has no summation")
            if len(cs) < 2:
                raise MalformedTermError("sums need at least two summands")
            for c in cs:
                if not _guarded(c):
                    raise MalformedTermError("unguarded summand")
                _check(calc, c, allow_hole)
            return
        case Par(children=cs):
            for c in cs:
                _check(calc, c, allow_hole)
            return
        case Restrict(body=b):
            _check(calc, b, allow_hole)
            return
        case Amb(body=b):
            if calc is not Calculus.MA:
                raise MalformedTermError("ambients exist only in MA")
            _check(calc, b, allow_hole)
            return
    raise MalformedTermError(f"unknown node {node!r}")


def check_term(term: Term) -> Term:
    check_node(term.calculus, term.node)
    return term


def same_calculus(a, b) -> Calculus:
    if a.calculus is not b.calculus:
        raise CrossCalculusError(
            f"cannot combine {a.calculus.value} with {b.calculus.value}")
    return a.calculus


# --- fresh names and renaming ---------------------------------------------

def fresh_name(avoid) -> str:
    """Smallest f0, f1, ... not in `avoid`."""
    return fresh_names(avoid, 1)[0]


def fresh_names(avoid, k: int) -> list[str]:
    avoid = set(avoid)
    out = []
    for i in itertools.count():
        if len(out) == k:
            break
        cand = f"f{i}"
        if cand not in avoid:
            out.append(cand)
    return out


def _ren_name(n, ren: dict):
    if isinstance(n, str):
        return ren.get(n, n)
    return n


def _ren_action(act, ren: dict):
    match act:
        case Recv(channel=a):
            return Recv(ren.get(a, a))
        case Send(channel=a):
            return Send(ren.get(a, a))
        case Cap(op=op, amb=n):
            return Cap(op, _ren_name(n, ren))
        case _:
            return act


def rename_free(node: Node, ren: dict) -> Node:
    """Rename free concrete names.  Binders shadow; binders that collide
    with a renaming target are freshened first."""
    if not ren:
        return node
    match node:
        case Nil() | Hole() | ProcVar():
            return node
        case Msg(channel=a):
            return Msg(ren.get(a, a))
        case Prefix(action=act, body=b):
            return Prefix(_ren_action(act, ren), rename_free(b, ren))
        case Sum(children=cs):
            return Sum(tuple(rename_free(c, ren) for c in cs))
        case Par(children=cs):
            return Par(tuple(rename_free(c, ren) for c in cs))
        case Amb(name=n, body=b):
            return Amb(_ren_name(n, ren), rename_free(b, ren))
        case Restrict(name=n, body=b):
            inner = {k: v for k, v in ren.items() if k != n}
            if n in inner.values():
                n2 = fresh_name(free_names(b) | set(inner) | set(inner.values()))
                b = rename_free(b, {n: n2})
                return Restrict(n2, rename_free(b, inner))
            return Restrict(n, rename_free(b, inner))
    raise TypeError(f"not a node: {node!r}")


def rename_vars(node: Node, procs: dict, names: dict) -> Node:
    """Rename variables (no capture concerns: variables are never bound)."""
    if not procs and not names:
        return node
    match node:
        case ProcVar(name=v):
            return ProcVar(procs.get(v, v))
        case Prefix(action=Cap(op=op, amb=NameVar(name=x)), body=b):
            return Prefix(Cap(op, NameVar(names.get(x, x))),
                          rename_vars(b, procs, names))
        case Prefix(action=act, body=b):
            return Prefix(act, rename_vars(b, procs, names))
        case Sum(children=cs):
            return Sum(tuple(rename_vars(c, procs, names) for c in cs))
        case Par(children=cs):
            return Par(tuple(rename_vars(c, procs, names) for c in cs))
        case Restrict(name=n, body=b):
            return Restrict(n, rename_vars(b, procs, names))
        case Amb(name=NameVar(name=x), body=b):
            return Amb(NameVar(names.get(x, x)), rename_vars(b, procs, names))
        case Amb(name=n, body=b):
            return Amb(n, rename_vars(b, procs, names))
        case _:
            return node


# --- substitution ----------------------------------------------------------

@dataclass(frozen=True)
class Substitution:
    """Maps process variables to pure terms and name variables to names."""
    calculus: Calculus
    procs: tuple[tuple[str, Node], ...] = ()
    names: tuple[tuple[str, str], ...] = ()

    @staticmethod
    def make(calculus: Calculus, procs=None, names=None) -> "Substitution":
        procs = dict(procs or {})
        names = dict(names or {})
        for v, n in procs.items():
            if isinstance(n, Term):
                if n.calculus is not calculus:
                    raise CrossCalculusError(
                        f"substitution for @{v} is a "
                        f"{n.calculus.value} term")
                n = n.node
                procs[v] = n
            if not is_pure(n):
                raise MalformedTermError(
                    f"substitution for @{v} must be pure")
            check_node(calculus, n)
        return Substitution(calculus,
                            tuple(sorted(procs.items())),
                            tuple(sorted(names.items())))

    @property
    def proc_map(self) -> dict:
        return dict(self.procs)

    @property
    def name_map(self) -> dict:
        return dict(self.names)


def _mentions_vars(node: Node, pvars, nvars) -> bool:
    return any((k == "proc" and n in pvars) or (k == "name" and n in nvars)
               for k, n in _vars_in_order(node))


def _subst(node: Node, procs: dict, names: dict, danger: frozenset,
           used: frozenset) -> Node:
    match node:
        case ProcVar(name=v):
            return procs.get(v, node)
        case Nil() | Hole() | Msg():
            return node
        case Prefix(action=Cap(op=op, amb=NameVar(name=x)), body=b) if x in names:
            return Prefix(Cap(op, names[x]),
                          _subst(b, procs, names, danger, used))
        case Prefix(action=act, body=b):
            return Prefix(act, _subst(b, procs, names, danger, used))
        case Sum(children=cs):
            return Sum(tuple(_subst(c, procs, names, danger, used)
                             for c in cs))
        case Par(children=cs):
            return Par(tuple(_subst(c, procs, names, danger, used)
                             for c in cs))
        case Amb(name=NameVar(name=x), body=b) if x in names:
            return Amb(names[x], _subst(b, procs, names, danger, used))
        case Amb(name=n, body=b):
            return Amb(n, _subst(b, procs, names, danger, used))
        case Restrict(name=n, body=b):
            if n in danger and _mentions_vars(b, procs, names):
                n2 = fresh_name(danger | free_names(b) | used)
                b = rename_free(b, {n: n2})
                n = n2
            return Restrict(n, _subst(b, procs, names, danger, used | {n}))
    raise TypeError(f"not a node: {node!r}")


def apply_subst(term: Term, subst: Substitution) -> Term:
    """Capture-avoiding substitution: binders whose names clash with free
    names of substituted material are renamed fresh."""
    if term.calculus is not subst.calculus:
        raise CrossCalculusError(
            f"{subst.calculus.value} substitution applied to a "
            f"{term.calculus.value} term")
    procs, names = subst.proc_map, subst.name_map
    danger: frozenset[str] = frozenset(names.values())
    for n in procs.values():
        danger |= free_names(n)
    node = _subst(term.node, procs, names, danger, frozenset())
    return Term(term.calculus, node)


def close_label(label: Label, subst: Substitution) -> Label:
    """Substitute into a label body, leaving the hole alone."""
    if label.calculus is not subst.calculus:
        raise CrossCalculusError("substitution and label disagree on calculus")
    procs, names = subst.proc_map, subst.name_map
    missing = [v for v in label.variables
               if v not in procs and v not in names]
    if missing:
        raise IncompleteSubstitutionError(
            f"label variables left open: {', '.join(missing)}")
    danger: frozenset[str] = frozenset(names.values())
    for n in procs.values():
        danger |= free_names(n)
    return Label(label.calculus,
                 _subst(label.body, procs, names, danger, frozenset()))


# --- plugging --------------------------------------------------------------

def _fill(node: Node, repl: Node, danger: frozenset,
          used: frozenset) -> Node:
    match node:
        case Hole():
            return repl
        case Prefix(action=act, body=b):
            return Prefix(act, _fill(b, repl, danger, used))
        case Sum(children=cs):
            return Sum(tuple(_fill(c, repl, danger, used) for c in cs))
        case Par(children=cs):
            return Par(tuple(_fill(c, repl, danger, used) for c in cs))
        case Amb(name=n, body=b):
            return Amb(n, _fill(b, repl, danger, used))
        case Restrict(name=n, body=b):
            if n in danger and count_holes(b):
                n2 = fresh_name(danger | free_names(b) | used)
                b = rename_free(b, {n: n2})
                n = n2
            return Restrict(n, _fill(b, repl, danger, used | {n}))
        case _:
            return node


def plug(label: Label, term: Term) -> Term:
    """Place `term` in the hole of `label`, avoiding capture of its free
    names by the label's binders."""
    if label.calculus is not term.calculus:
        raise CrossCalculusError(
            f"cannot plug a {term.calculus.value} term into a "
            f"{label.calculus.value} context")
    node = _fill(label.body, term.node, free_names(term.node),
                 frozenset())
    return Term(term.calculus, node)


def make_label(calculus: Calculus, body: Node) -> Label:
    if count_holes(body) != 1:
        raise MalformedTermError("a label needs exactly one hole")
    check_node(calculus, body, allow_hole=True)
    return Label(calculus, body)


HOLE = Hole()
NIL = Nil()


def par(*nodes: Node) -> Node:
    parts = [n for n in nodes if not isinstance(n, Nil)]
    if not parts:
        return NIL
    if len(parts) == 1:
        return parts[0]
    return Par(tuple(parts))


def restricts(names, body: Node) -> Node:
    for n in reversed(list(names)):
        body = Restrict(n, body)
    return body
