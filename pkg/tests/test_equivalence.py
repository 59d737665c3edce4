"""Checks for the equivalence solvers and the label-set machinery.

The game solver is compared against an independent partition refinement
over the reachable ordinary LTS, the flagship asynchronous pair is pinned
as a golden, and inequivalence witnesses are replayed move by move.
"""

import pytest

from lbisim import (
    ALL,
    EMPTY,
    LA,
    LCCS,
    LM,
    Calculus,
    DivergenceBudgetExceededError,
    LbisimError,
    MalformedTermError,
    MAUnsupportedError,
    ProcVar,
    Term,
    UnsupportedQuantificationError,
    async_bisim,
    barbed_semi_saturated_bisim,
    canonical_term,
    enumerate_terms,
    ipo_bisim,
    is_capturing,
    l_bisim,
    node_key,
    ordinary_transitions,
    parse_label,
    parse_term,
    pattern_label_set,
    pred_ccs,
    pred_open,
    print_label,
    print_term,
    semi_saturated_bisim,
    strong_bisim,
    term_pairs,
    verify_witness,
)

CCS = Calculus.CCS
ACCS = Calculus.ACCS
MA = Calculus.MA


# --- independent oracle: partition refinement on the ordinary LTS ----------

def _reachable(corpus):
    seen = set()
    todo = list(corpus)
    while todo:
        t = todo.pop()
        if t in seen:
            continue
        seen.add(t)
        todo.extend(canonical_term(tr.target)
                    for tr in ordinary_transitions(t))
    return seen


def _refine(states):
    """Partition states by strong bisimilarity (signature refinement)."""
    states = sorted(states, key=lambda t: node_key(t.node))
    block = {t: 0 for t in states}
    while True:
        sig = {}
        for t in states:
            moves = frozenset((tr.action, block[canonical_term(tr.target)])
                              for tr in ordinary_transitions(t))
            sig[t] = (block[t], moves)
        fresh = {}
        new = {t: fresh.setdefault(sig[t], len(fresh)) for t in states}
        if new == block:
            return block
        block = new


@pytest.mark.parametrize("calc,pairs", [(CCS, 200), (ACCS, 150)])
def test_strong_bisim_matches_partition_refinement(calc, pairs):
    corpus = enumerate_terms(calc, ("a", "b"), count=40)
    block = _refine(_reachable(corpus))
    for p, q in term_pairs(corpus, pairs):
        got = strong_bisim(p, q).verdict
        want = block[canonical_term(p)] == block[canonical_term(q)]
        assert got is want, (print_term(p), print_term(q))


# --- the flagship asynchronous pair ----------------------------------------

def test_flagship_pair_relations():
    p = parse_term("a.'a + tau.0", ACCS)
    q = parse_term("tau.0", ACCS)
    assert async_bisim(p, q).verdict is True
    assert l_bisim(p, q, LA).verdict is True
    assert strong_bisim(p, q).verdict is False
    r = ipo_bisim(p, q)
    assert r.verdict is False
    assert any(m.kind == "move" and m.move == "- | 'a" for m in r.witness)
    assert verify_witness(p, q, r, "ipo") is True
    d = r.to_dict()
    assert d["verdict"] == "inequivalent"
    assert d["stats"]["pairs"] >= 1
    assert isinstance(d["witness"], list) and d["witness"]


def test_endpoint_identities_on_samples():
    def verdict(fn, *args, **kw):
        try:
            return fn(*args, **kw).verdict
        except DivergenceBudgetExceededError:
            return "budget"

    cases = [
        (ACCS, "a.'a + tau.0", "tau.0"),
        (ACCS, "'a", "0"),
        (ACCS, "a.0", "a.0 + a.0"),
        (CCS, "a.0 | b.0", "a.b.0 + b.a.0"),
        (CCS, "a.b.0", "a.0"),
        (MA, "n[0]", "0"),
        (MA, "n[in m.0]", "n[0]"),
        (MA, "open n.0", "open n.0"),
    ]
    for calc, s1, s2 in cases:
        p, q = parse_term(s1, calc), parse_term(s2, calc)
        assert verdict(ipo_bisim, p, q) == verdict(l_bisim, p, q, ALL)
        assert verdict(semi_saturated_bisim, p, q) \
            == verdict(l_bisim, p, q, EMPTY)


# --- label sets ------------------------------------------------------------

def test_label_set_membership():
    assert LM.contains(parse_label("- | open n.@X1", MA)) is True
    assert LM.contains(parse_label("- | n[@X1]", MA)) is False
    assert LM.contains(parse_label("- | ?x[@X2 | in n.@X1]", MA)) is False
    assert LM.contains(parse_label("-", MA)) is False
    assert LA.contains(parse_label("-", ACCS)) is True
    assert LA.contains(parse_label("- | a.@X1", ACCS)) is True
    assert LA.contains(parse_label("- | 'a", ACCS)) is False
    assert LCCS.contains(parse_label("-", CCS)) is True
    assert LCCS.contains(parse_label("- | a.@X1", CCS)) is True
    assert LCCS.contains(parse_label("- | 'a.@X1", CCS)) is True
    assert LCCS.contains(parse_label("- | open n.@X1", MA)) is False
    assert ALL.contains(parse_label("- | 'a", ACCS)) is True
    assert EMPTY.contains(parse_label("-", CCS)) is False


def test_pattern_label_sets():
    exact = pattern_label_set("onlya", [parse_label("- | a.@X1", CCS)])
    assert exact.name == "onlya"
    assert exact.contains(parse_label("- | a.@X1", CCS)) is True
    assert exact.contains(parse_label("- | b.@X1", CCS)) is False
    assert exact.contains(parse_label("- | 'a.@X1", CCS)) is False
    wild = pattern_label_set("anyamb", [parse_label("- | ?z[@X1]", MA)])
    assert wild.contains(parse_label("- | n[@X1]", MA)) is True
    assert wild.contains(parse_label("- | m[@X1]", MA)) is True
    assert wild.contains(parse_label("- | open n.@X1", MA)) is False
    # patterns never match across calculi
    cross = pattern_label_set("cross", [parse_label("- | open n.@X1", MA)])
    assert cross.contains(parse_label("- | a.@X1", CCS)) is False


def test_barb_candidates():
    got = [print_label(l) for l in LM.barb_candidates("n", MA)]
    assert got == ["- | open n.@X1"]
    both = [print_label(l) for l in ALL.barb_candidates("n", MA)]
    assert "- | open n.@X1" in both and len(both) == 2
    out = [print_label(l) for l in LA.barb_candidates("'a", ACCS)]
    assert out == ["- | a.@X1"]
    assert EMPTY.barb_candidates("n", MA) == []


def test_capturing_reports():
    ma = enumerate_terms(MA, ("n", "m"), count=60)
    rep = is_capturing(LM, MA, ma)
    assert rep.ok is True and rep.entries
    assert all(e.label_text is not None for e in rep.entries)
    assert is_capturing(EMPTY, MA, ma).ok is False
    accs = enumerate_terms(ACCS, ("a", "b"), count=60)
    assert is_capturing(LA, ACCS, accs).ok is True


# --- reduction predicates --------------------------------------------------

def test_pred_open_golden():
    p = parse_term("n[k[0]]", MA)
    t1 = parse_term("w[0]", MA)
    target = canonical_term(parse_term("k[0] | w[0]", MA))
    assert pred_open(p, target, "n", t1) is True
    assert pred_open(p, target, "m", t1) is False
    assert pred_open(p, canonical_term(p), "n", t1) is False
    # a bare open-prefix has no coopen transition
    assert pred_open(parse_term("open n.k[0]", MA), target, "n", t1) is False


def test_pred_ccs_golden():
    t1 = parse_term("c.0", CCS)
    target = canonical_term(parse_term("b.0 | c.0", CCS))
    recv = parse_term("a.b.0", CCS)
    send = parse_term("'a.b.0", CCS)
    assert pred_ccs("out", recv, target, "a", t1) is True
    assert pred_ccs("out", recv, target, "b", t1) is False
    assert pred_ccs("out", send, target, "a", t1) is False
    assert pred_ccs("in", send, target, "a", t1) is True
    assert pred_ccs("in", recv, target, "a", t1) is False
    comm = parse_term("a.0 | 'a.b.0", CCS)
    assert pred_ccs("tau", comm, parse_term("b.0", CCS)) is True
    assert pred_ccs("tau", comm, parse_term("0", CCS)) is False
    with pytest.raises(LbisimError):
        pred_ccs("out", recv, target)  # channel and t1 required
    with pytest.raises(LbisimError):
        pred_ccs("sideways", recv, target, "a", t1)


# --- witnesses -------------------------------------------------------------

def test_witness_replay_across_relations():
    cases = [
        ("strong", CCS, "a.0", "b.0", None),
        ("strong", CCS, "a.b.0", "a.0", None),
        ("async", ACCS, "'a", "0", None),
        ("ipo", ACCS, "a.'a + tau.0", "tau.0", None),
        ("semi-sat", ACCS, "'a", "0", None),
        ("l-bisim", MA, "n[0]", "0", LM),
        ("l-bisim", CCS, "a.0 + b.0", "a.0", LCCS),
    ]
    runners = {
        "strong": lambda p, q, _: strong_bisim(p, q),
        "async": lambda p, q, _: async_bisim(p, q),
        "ipo": lambda p, q, _: ipo_bisim(p, q),
        "semi-sat": lambda p, q, _: semi_saturated_bisim(p, q),
        "l-bisim": lambda p, q, ls: l_bisim(p, q, ls),
    }
    for rel, calc, s1, s2, labels in cases:
        p, q = parse_term(s1, calc), parse_term(s2, calc)
        r = runners[rel](p, q, labels)
        assert r.verdict is False and r.witness, (rel, s1, s2)
        assert verify_witness(p, q, r, rel, labels=labels) is True, (rel, s1)
        # a tampered replay (swapped endpoints) must not validate
        if print_term(canonical_term(p)) != print_term(canonical_term(q)):
            assert verify_witness(q, p, r, rel, labels=labels) is False


def test_barbed_witness_replay():
    p, q = parse_term("n[0]", MA), parse_term("0", MA)
    r = barbed_semi_saturated_bisim(p, q)
    assert r.verdict is False
    assert any(m.kind == "barb" and m.move == "n" for m in r.witness)
    assert verify_witness(p, q, r, "barbed-semi-sat") is True


def test_witness_only_on_inequivalence():
    p = parse_term("a.0", CCS)
    q = parse_term("a.0 + a.0", CCS)
    r = strong_bisim(p, q)
    assert r.verdict is True and r.witness is None
    with pytest.raises(LbisimError):
        verify_witness(p, q, r, "strong")


# --- pools, budgets, guards ------------------------------------------------

def test_instantiated_pool_agrees_with_symbolic():
    pool = [parse_term(s, ACCS) for s in ("0", "'c")]
    cases = [("a.'a + tau.0", "tau.0"), ("'a", "0"), ("a.0", "a.0 + a.0")]
    for s1, s2 in cases:
        p, q = parse_term(s1, ACCS), parse_term(s2, ACCS)
        assert l_bisim(p, q, LA).verdict \
            == l_bisim(p, q, LA, pool=pool).verdict
    p, q = parse_term("a.'a + tau.0", ACCS), parse_term("tau.0", ACCS)
    r = ipo_bisim(p, q, pool=pool)
    assert r.verdict is False
    assert verify_witness(p, q, r, "ipo", pool=pool) is True
    with pytest.raises(MalformedTermError):
        l_bisim(p, q, LA, pool=[parse_term("n[0]", MA)])


def test_budget_exceeded_raises_deterministically():
    p = parse_term("a.0 + a.0", CCS)
    q = parse_term("a.0", CCS)
    for _ in range(2):
        with pytest.raises(DivergenceBudgetExceededError):
            strong_bisim(p, q, max_pairs=1)
    assert strong_bisim(p, q).verdict is True


def test_relation_guards():
    p = parse_term("n[0]", MA)
    with pytest.raises(MAUnsupportedError):
        strong_bisim(p, p)
    c = parse_term("a.0", CCS)
    with pytest.raises(LbisimError):
        async_bisim(c, c)
    with pytest.raises(UnsupportedQuantificationError):
        barbed_semi_saturated_bisim(p, p, contextual_barbs=False)
    impure = Term(Calculus.CCS, ProcVar("X1"))
    with pytest.raises(MalformedTermError):
        strong_bisim(impure, impure)
