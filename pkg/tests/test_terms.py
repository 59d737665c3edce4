import random

import pytest

from lbisim.errors import (CrossCalculusError, IncompleteSubstitutionError,
                           MalformedTermError)
from lbisim.syntax import parse_label, parse_term, print_term
from lbisim.terms import (
    Amb, Calculus, Cap, Hole, Msg, NameVar, Nil, Par, Prefix, ProcVar, Recv,
    Restrict, Send, Substitution, Sum, Tau, Term, apply_subst, check_node,
    close_label, free_names, fresh_name, fresh_names, make_label, par, plug,
    rename_free, same_calculus,
)

CCS, ACCS, MA = Calculus.CCS, Calculus.ACCS, Calculus.MA


def test_free_names_binders():
    t = parse_term("(nu a)(a.b.0 | 'a.0)", CCS)
    assert free_names(t.node) == {"b"}
    t = parse_term("n[(nu m) in m.out k.0]", MA)
    assert free_names(t.node) == {"n", "k"}


def test_free_names_name_variables_do_not_count():
    node = Amb(NameVar("x"), Prefix(Cap("in", "m"), Nil()))
    assert free_names(node) == {"m"}


def test_fresh_name_picks_first_gap():
    assert fresh_name({"a", "b"}) == "f0"
    assert fresh_name({"f0", "f2"}) == "f1"
    assert fresh_names({"f0"}, 2) == ["f1", "f2"]


def test_check_node_rejects_unguarded_sum():
    bad = Sum((Par((Nil(), Nil())), Prefix(Tau(), Nil())))
    with pytest.raises(MalformedTermError):
        check_node(CCS, bad)


def test_check_node_calculus_restrictions():
    with pytest.raises(MalformedTermError):
        check_node(CCS, Msg("a"))            # particles are ACCS-only
    with pytest.raises(MalformedTermError):
        check_node(ACCS, Prefix(Send("a"), Nil()))  # output prefix is CCS
    with pytest.raises(MalformedTermError):
        check_node(MA, Prefix(Tau(), Nil()))
    with pytest.raises(MalformedTermError):
        check_node(MA, Sum((Prefix(Cap("in", "n"), Nil()),) * 2))
    with pytest.raises(MalformedTermError):
        check_node(CCS, Amb("n", Nil()))
    # and the allowed shapes go through
    check_node(MA, Amb("n", Prefix(Cap("open", "m"), Nil())))
    check_node(ACCS, Par((Msg("a"), Prefix(Recv("a"), Nil()))))


def test_duplicate_variables_rejected():
    with pytest.raises(MalformedTermError):
        check_node(MA, Par((ProcVar("X"), ProcVar("X"))), allow_hole=True)


def test_rename_free_respects_shadowing():
    recv_a = Prefix(Recv("a"), Nil())
    t = Par((Restrict("a", recv_a), recv_a))
    out = rename_free(t, {"a": "c"})
    assert print_term(Term(CCS, out)) == "((nu a) a.0) | c.0"


def test_rename_free_avoids_capture():
    t = parse_term("(nu c)(a.c.0)", CCS)
    out = Term(CCS, rename_free(t.node, {"a": "c"}))
    # the binder c must move out of the way before a becomes c
    assert print_term(out) == "(nu f0) c.f0.0"
    assert free_names(out.node) == {"c"}


def test_substitution_requires_pure_closed_images():
    with pytest.raises(MalformedTermError):
        Substitution.make(MA, procs={"X": Term(MA, ProcVar("Y"))})
    with pytest.raises(CrossCalculusError):
        Substitution.make(CCS, procs={"X": parse_term("n[0]", MA)})


def test_apply_subst_avoids_capture_with_distinct_fresh_binders():
    t = parse_term("(nu n)(nu m)(@X | ?x[0])", MA)
    s = Substitution.make(MA, procs={"X": parse_term("n[0]", MA)},
                          names={"x": "m"})
    assert print_term(apply_subst(t, s)) == "(nu f0) (nu f1) (n[0] | m[0])"


def test_close_label_requires_every_variable():
    lab = parse_label("- | m[@X1]", MA)
    with pytest.raises(IncompleteSubstitutionError):
        close_label(lab, Substitution.make(MA))
    closed = close_label(lab, Substitution.make(
        MA, procs={"X1": parse_term("0", MA)}))
    assert print_term(Term(MA, closed.body)) == "- | m[0]"


def test_plug_fills_every_hole_and_avoids_capture():
    lab = parse_label("(nu n) -", MA)
    out = plug(lab, parse_term("n[0]", MA))
    assert print_term(out) == "(nu f0) n[0]"
    assert free_names(out.node) == {"n"}


def test_plug_rejects_cross_calculus():
    lab = parse_label("- | a.0", CCS)
    with pytest.raises(CrossCalculusError):
        plug(lab, parse_term("'a", ACCS))
    with pytest.raises(CrossCalculusError):
        same_calculus(parse_term("0", CCS), parse_term("0", MA))


def test_make_label_counts_holes():
    with pytest.raises(MalformedTermError):
        make_label(MA, Par((Hole(), Hole())))
    with pytest.raises(MalformedTermError):
        make_label(MA, Nil())


def test_label_variables_in_first_use_order():
    lab = parse_label("- | ?x[in m.@X2 | @X1]", MA)
    assert lab.variables == ("x", "X2", "X1")


def test_par_helper_drops_units():
    assert par(Nil(), Nil()) == Nil()
    assert par(Msg("a"), Nil()) == Msg("a")
    assert isinstance(par(Msg("a"), Msg("b")), Par)


def test_terms_hash_and_compare_structurally():
    rng = random.Random(0)
    a = parse_term("a.0 | b.0", CCS)
    b = parse_term("a.0 | b.0", CCS)
    assert a == b and hash(a) == hash(b)
    assert len({a, b}) == 1
