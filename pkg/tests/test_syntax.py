import random

import pytest

from lbisim.corpus import random_term
from lbisim.errors import ParseError
from lbisim.syntax import parse_label, parse_term, print_label, print_term
from lbisim.terms import (Amb, Calculus, Cap, Msg, NameVar, Nil, Par, Prefix,
                          ProcVar, Recv, Restrict, Send, Sum, Tau)

CCS, ACCS, MA = Calculus.CCS, Calculus.ACCS, Calculus.MA


def test_precedence_prefix_sum_par():
    t = parse_term("a.0 + b.0 | c.0", CCS)
    assert isinstance(t.node, Par)
    left, right = t.node.children
    assert isinstance(left, Sum)
    assert right == Prefix(Recv("c"), Nil())


def test_restriction_scopes_maximally_right():
    t = parse_term("(nu a) a.0 | b.0", CCS)
    assert isinstance(t.node, Restrict)
    assert isinstance(t.node.body, Par)


def test_prefix_binds_tighter_than_sum():
    t = parse_term("tau.a.0 + 'b.0", CCS)
    assert t.node == Sum((Prefix(Tau(), Prefix(Recv("a"), Nil())),
                          Prefix(Send("b"), Nil())))


def test_ma_shapes():
    t = parse_term("open n.(n[0] | m[in k.out k.0])", MA)
    assert isinstance(t.node, Prefix)
    assert t.node.action == Cap("open", "n")
    t = parse_term("?x[@X1]", MA)
    assert t.node == Amb(NameVar("x"), ProcVar("X1"))


def test_accs_particles_and_prefixes():
    t = parse_term("'a | a.'b", ACCS)
    assert t.node == Par((Msg("a"), Prefix(Recv("a"), Msg("b"))))
    with pytest.raises(ParseError):
        parse_term("'a.0", ACCS)        # output prefix is CCS syntax
    with pytest.raises(ParseError):
        parse_term("'a", CCS)           # particle is ACCS syntax


def test_keywords_are_reserved():
    for bad, calc in [("in.0", CCS), ("nu.0", CCS), ("tau[0]", MA),
                      ("open.0", CCS)]:
        with pytest.raises(ParseError):
            parse_term(bad, calc)


def test_calculus_specific_rejections():
    with pytest.raises(ParseError):
        parse_term("a.0 + b.0", MA)     # sums are CCS/ACCS-only
    with pytest.raises(ParseError):
        parse_term("n[0]", CCS)
    with pytest.raises(ParseError):
        parse_term("in n.0", ACCS)
    with pytest.raises(ParseError):
        parse_term("tau.0", MA)


def test_holes_only_in_labels():
    with pytest.raises(ParseError):
        parse_term("- | a.0", CCS)
    lab = parse_label("- | a.0", CCS)
    assert isinstance(lab.body, Par)
    with pytest.raises(ParseError):
        parse_label("- | -", CCS)       # exactly one hole
    with pytest.raises(ParseError):
        parse_label("a.0", CCS)         # at least one hole


def test_parse_error_position():
    with pytest.raises(ParseError) as exc:
        parse_term("a.0 |", CCS)
    assert "1:6" in str(exc.value)
    with pytest.raises(ParseError) as exc:
        parse_term("a.0 |\n b.% ", CCS)
    assert "2:4" in str(exc.value)


def test_print_parenthesization_is_minimal_but_sufficient():
    cases = [
        ("(a.0 + b.0) | c.0", CCS, "a.0 + b.0 | c.0"),
        ("a.(b.0 | c.0)", CCS, "a.(b.0 | c.0)"),
        ("((nu a) a.0) | b.0", CCS, "((nu a) a.0) | b.0"),
        ("n[m[0] | 0]", MA, "n[m[0] | 0]"),
        ("(nu n) (n[0] | m[0])", MA, "(nu n) (n[0] | m[0])"),
    ]
    for text, calc, want in cases:
        assert print_term(parse_term(text, calc)) == want


def test_roundtrip_on_random_terms():
    rng = random.Random(42)
    for calc, names in ((CCS, ("a", "b", "c")), (ACCS, ("a", "b", "c")),
                        (MA, ("n", "m", "k"))):
        for i in range(80):
            t = random_term(calc, names, rng, allow_vars=(i % 4 == 0))
            text = print_term(t)
            assert parse_term(text, calc).node == t.node
            assert print_term(parse_term(text, calc)) == text


def test_label_roundtrip():
    for text, calc in [("- | 'a.@X1", CCS), ("- | m[@X1]", MA),
                       ("?x[- | @X1] | m[@X2]", MA), ("- | a.@X1", ACCS),
                       ("m[?x[- | @X1] | @X2]", MA)]:
        lab = parse_label(text, calc)
        assert print_label(lab) == text
        assert parse_label(print_label(lab), calc).body == lab.body


def test_whitespace_insensitive():
    a = parse_term("a.0|b.0+c.0", CCS)
    b = parse_term(" a.0 | b.0 + c.0 ", CCS)
    assert a.node == b.node
