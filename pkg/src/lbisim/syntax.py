"""Concrete syntax: a hand-rolled scanner/parser and the matching printer.

Grammar (identical for terms and labels; labels also admit the hole `-`):

    P ::= "0" | NAME "[" P "]" | PREFIX "." P | "'" NAME
        | "(" "nu" NAME ")" P | P "|" P | S "+" S
        | "@" IDENT | "?" IDENT "[" P "]" | "-"
    PREFIX ::= "tau" | NAME | "'" NAME | "in" NAME | "out" NAME | "open" NAME

`.` binds tightest, then `+`, then `|`; `(nu n)` scopes as far right as
possible.  `tau`, `nu`, `in`, `out` and `open` are reserved words.  Which
productions are legal depends on the calculus: ambients, `?x[...]` and
capability prefixes are MA-only, `+` is rejected in MA, the output
particle `'a` is ACCS-only and the output prefix `'a.P` is CCS-only.
"""
from __future__ import annotations

from .errors import ParseError
from .terms import (
    Amb, Calculus, Cap, Hole, Label, Msg, NameVar, Nil, Node, Par, Prefix,
    ProcVar, Recv, Restrict, Send, Sum, Tau, Term,
    check_node, count_holes, make_label,
)

KEYWORDS = ("tau", "nu", "in", "out", "open")
_SYMBOLS = "()[].+|'@?-"


class _Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col


def _scan(text: str) -> list[_Token]:
    toks = []
    line, col = 1, 1
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch in _SYMBOLS:
            toks.append(_Token(ch, ch, line, col))
            i += 1
            col += 1
            continue
        if ch == "0":
            toks.append(_Token("0", "0", line, col))
            i += 1
            col += 1
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = word if word in KEYWORDS else "name"
            toks.append(_Token(kind, word, line, col))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    toks.append(_Token("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, text: str, calculus: Calculus, allow_hole: bool):
        self.toks = _scan(text)
        self.pos = 0
        self.calc = calculus
        self.allow_hole = allow_hole

    def peek(self, ahead=0) -> _Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def take(self) -> _Token:
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            self.fail(f"expected {kind!r}, found {tok.text or 'end of input'!r}")
        return self.take()

    def fail(self, message):
        tok = self.peek()
        raise ParseError(message, tok.line, tok.col)

    def name(self) -> str:
        tok = self.peek()
        if tok.kind != "name":
            self.fail(f"expected a name, found {tok.text or 'end of input'!r}")
        return self.take().text

    # expr ::= "(nu n)" expr | par
    def expr(self) -> Node:
        if self.peek().kind == "(" and self.peek(1).kind == "nu":
            self.take()
            self.take()
            n = self.name()
            self.expect(")")
            return Restrict(n, self.expr())
        return self.par()

    def par(self) -> Node:
        parts = [self.sum()]
        while self.peek().kind == "|":
            self.take()
            if self.peek().kind == "(" and self.peek(1).kind == "nu":
                # a restriction scopes maximally right, swallowing the
                # rest of the parallel composition
                parts.append(self.expr())
                break
            parts.append(self.sum())
        return parts[0] if len(parts) == 1 else Par(tuple(parts))

    def sum(self) -> Node:
        parts = [self.seq()]
        while self.peek().kind == "+":
            if self.calc is Calculus.MA:
                self.fail("MA has no summation")
            self.take()
            parts.append(self.seq())
        return parts[0] if len(parts) == 1 else Sum(tuple(parts))

    # seq ::= PREFIX "." seq | "(nu n)" seq | atom
    def seq(self) -> Node:
        tok = self.peek()
        if tok.kind == "(" and self.peek(1).kind == "nu":
            # under a prefix the restriction scope ends with the sequent
            self.take()
            self.take()
            n = self.name()
            self.expect(")")
            return Restrict(n, self.seq())
        if tok.kind in ("in", "out", "open"):
            if self.calc is not Calculus.MA:
                self.fail(f"capability prefixes are MA syntax")
            op = self.take().kind
            n = self.name()
            self.expect(".")
            return Prefix(Cap(op, n), self.seq())
        if tok.kind == "tau":
            if self.calc is Calculus.MA:
                self.fail("tau prefixes do not exist in MA")
            self.take()
            self.expect(".")
            return Prefix(Tau(), self.seq())
        if tok.kind == "'":
            nxt = self.peek(1)
            after = self.peek(2)
            if nxt.kind == "name" and after.kind == ".":
                if self.calc is not Calculus.CCS:
                    self.fail("output prefixes exist only in CCS")
                self.take()
                a = self.name()
                self.take()
                return Prefix(Send(a), self.seq())
            return self.atom()
        if tok.kind == "name" and self.peek(1).kind == ".":
            if self.calc is Calculus.MA:
                self.fail("channel prefixes do not exist in MA")
            a = self.name()
            self.take()
            return Prefix(Recv(a), self.seq())
        return self.atom()

    def atom(self) -> Node:
        tok = self.peek()
        match tok.kind:
            case "0":
                self.take()
                return Nil()
            case "-":
                if not self.allow_hole:
                    self.fail("the hole '-' is label syntax")
                self.take()
                return Hole()
            case "'":
                self.take()
                if self.calc is not Calculus.ACCS:
                    self.fail("output particles exist only in ACCS")
                return Msg(self.name())
            case "@":
                self.take()
                return ProcVar(self.name())
            case "?":
                if self.calc is not Calculus.MA:
                    self.fail("ambient-name variables are MA syntax")
                self.take()
                x = self.name()
                self.expect("[")
                body = self.expr()
                self.expect("]")
                return Amb(NameVar(x), body)
            case "name":
                if self.peek(1).kind == "[":
                    if self.calc is not Calculus.MA:
                        self.fail("ambients exist only in MA")
                    n = self.name()
                    self.take()
                    body = self.expr()
                    self.expect("]")
                    return Amb(n, body)
                self.fail(f"name {tok.text!r} is not a process"
                          " (write a prefix 'name.P' or an ambient 'name[P]')")
            case "(":
                self.take()
                body = self.expr()
                self.expect(")")
                return body
        self.fail(f"expected a process, found {tok.text or 'end of input'!r}")


def parse_term(text: str, calculus: Calculus) -> Term:
    p = _Parser(text, calculus, allow_hole=False)
    node = p.expr()
    if p.peek().kind != "eof":
        p.fail(f"trailing input {p.peek().text!r}")
    check_node(calculus, node)
    return Term(calculus, node)


def parse_label(text: str, calculus: Calculus) -> Label:
    p = _Parser(text, calculus, allow_hole=True)
    node = p.expr()
    if p.peek().kind != "eof":
        p.fail(f"trailing input {p.peek().text!r}")
    if count_holes(node) != 1:
        tok = p.toks[0]
        raise ParseError("a label needs exactly one hole", tok.line, tok.col)
    return make_label(calculus, node)


# --- printing --------------------------------------------------------------

def _act_text(act) -> str:
    match act:
        case Tau():
            return "tau"
        case Recv(channel=a):
            return a
        case Send(channel=a):
            return f"'{a}"
        case Cap(op=op, amb=NameVar(name=x)):
            return f"{op} ?{x}"
        case Cap(op=op, amb=n):
            return f"{op} {n}"
    raise TypeError(f"not an action: {act!r}")


def _print(node: Node) -> str:
    match node:
        case Nil():
            return "0"
        case Hole():
            return "-"
        case Msg(channel=a):
            return f"'{a}"
        case ProcVar(name=v):
            return f"@{v}"
        case Amb(name=NameVar(name=x), body=b):
            return f"?{x}[{_print(b)}]"
        case Amb(name=n, body=b):
            return f"{n}[{_print(b)}]"
        case Prefix(action=act, body=b):
            inner = _print(b)
            if isinstance(b, (Par, Sum, Restrict)):
                inner = f"({inner})"
            return f"{_act_text(act)}.{inner}"
        case Sum(children=cs):
            parts = [f"({_print(c)})" if isinstance(c, (Sum, Restrict))
                     else _print(c) for c in cs]
            return " + ".join(parts)
        case Par(children=cs):
            parts = [f"({_print(c)})" if isinstance(c, (Par, Restrict))
                     else _print(c) for c in cs]
            return " | ".join(parts)
        case Restrict(name=n, body=b):
            inner = _print(b)
            if isinstance(b, (Par, Sum)):
                inner = f"({inner})"
            return f"(nu {n}) {inner}"
    raise TypeError(f"not a node: {node!r}")


def print_node(node: Node) -> str:
    return _print(node)


def print_term(term: Term) -> str:
    return _print(term.node)


def print_label(label: Label) -> str:
    return _print(label.body)
