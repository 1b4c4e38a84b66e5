"""Decision diagram engine against truth-table oracles."""

from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from aigsynt.aiger import AigerDoc
from aigsynt.bdd import AigCone, BddError, BddManager


def fresh(n=5):
    mgr = BddManager()
    refs = [mgr.add_var(f"v{i}") for i in range(n)]
    return mgr, refs


# random formula evaluation -------------------------------------------------


@st.composite
def formulas(draw, n_vars=5, max_depth=4):
    def go(depth):
        if depth == 0 or draw(st.integers(0, 3)) == 0:
            return ("var", draw(st.integers(0, n_vars - 1)))
        kind = draw(st.sampled_from(["and", "or", "xor", "not", "ite"]))
        if kind == "not":
            return ("not", go(depth - 1))
        if kind == "ite":
            return ("ite", go(depth - 1), go(depth - 1), go(depth - 1))
        return (kind, go(depth - 1), go(depth - 1))
    return go(max_depth)


def eval_formula(f, assignment):
    kind = f[0]
    if kind == "var":
        return assignment[f[1]]
    if kind == "not":
        return not eval_formula(f[1], assignment)
    if kind == "and":
        return eval_formula(f[1], assignment) and eval_formula(f[2], assignment)
    if kind == "or":
        return eval_formula(f[1], assignment) or eval_formula(f[2], assignment)
    if kind == "xor":
        return eval_formula(f[1], assignment) != eval_formula(f[2], assignment)
    if kind == "ite":
        return eval_formula(f[2] if eval_formula(f[1], assignment) else f[3],
                            assignment)
    raise AssertionError(f)


def build_formula(mgr, refs, f):
    kind = f[0]
    if kind == "var":
        return refs[f[1]]
    if kind == "not":
        return ~build_formula(mgr, refs, f[1])
    args = [build_formula(mgr, refs, a) for a in f[1:]]
    if kind == "and":
        return args[0] & args[1]
    if kind == "or":
        return args[0] | args[1]
    if kind == "xor":
        return args[0] ^ args[1]
    if kind == "ite":
        return args[0].ite(args[1], args[2])
    raise AssertionError(f)


@given(formulas())
@settings(max_examples=150, deadline=None)
def test_ite_matches_truth_table(f):
    mgr, refs = fresh()
    node = build_formula(mgr, refs, f)
    for bits in product([False, True], repeat=5):
        assert node.evaluate(list(bits)) == eval_formula(f, list(bits))


@given(formulas(), st.sets(st.integers(0, 4), max_size=5))
@settings(max_examples=100, deadline=None)
def test_quantifiers_match_truth_table(f, qvars):
    mgr, refs = fresh()
    node = build_formula(mgr, refs, f)
    ex = node.exists(qvars)
    fa = node.forall(qvars)
    qlist = sorted(qvars)
    for bits in product([False, True], repeat=5):
        base = list(bits)
        values = []
        for combo in product([False, True], repeat=len(qlist)):
            a = list(base)
            for lvl, v in zip(qlist, combo):
                a[lvl] = v
            values.append(eval_formula(f, a))
        assert ex.evaluate(base) == any(values)
        assert fa.evaluate(base) == all(values)


@given(formulas(), formulas(n_vars=5))
@settings(max_examples=100, deadline=None)
def test_compose_matches_truth_table(f, g):
    mgr, refs = fresh()
    fn = build_formula(mgr, refs, f)
    gn = build_formula(mgr, refs, g)
    composed = fn.compose({2: gn})
    for bits in product([False, True], repeat=5):
        a = list(bits)
        a2 = list(bits)
        a2[2] = eval_formula(g, a)
        assert composed.evaluate(a) == eval_formula(f, a2)


# canonicity ------------------------------------------------------------------


@given(formulas(), formulas())
@settings(max_examples=100, deadline=None)
def test_canonicity_equal_functions_same_handle(f, g):
    mgr, refs = fresh()
    fn = build_formula(mgr, refs, f)
    gn = build_formula(mgr, refs, g)
    same = all(eval_formula(f, list(bits)) == eval_formula(g, list(bits))
               for bits in product([False, True], repeat=5))
    assert (fn == gn) == same


def test_basic_identities():
    mgr, (x, y, *_) = fresh()
    assert x.ite(mgr.true, mgr.false) == x
    g = x | y
    assert x.ite(g, g) == g
    assert (x & ~x).is_false
    assert (x | ~x).is_true
    assert x.exists([0]).is_true
    assert x.forall([0]).is_false


def test_de_morgan_and_quantifier_duality():
    mgr, (x, y, z, *_) = fresh()
    f = (x & y) | (z & ~y)
    assert ~(x & y) == (~x | ~y)
    assert ~(x | y) == (~x & ~y)
    assert ~(f.exists([1])) == (~f).forall([1])
    assert ~(f.forall([0, 2])) == (~f).exists([0, 2])


def test_substitute_examples():
    mgr, (x, y, z, *_) = fresh()
    assert x.compose({0: y}) == y
    assert (x & z).compose({0: ~z}).is_false


def test_managers_do_not_mix():
    m1 = BddManager()
    m2 = BddManager()
    a = m1.add_var("a")
    b = m2.add_var("b")
    with pytest.raises(BddError):
        _ = a & b


def test_cofactor_and_support():
    mgr, (x, y, z, *_) = fresh()
    f = (x & y) | z
    assert f.cofactor(0, True) == (y | z)
    assert f.cofactor(0, False) == z
    assert f.support() == {0, 1, 2}


def test_sat_one_deterministic():
    mgr, (x, y, *_) = fresh()
    f = (x & ~y) | (x & y)
    assert f.sat_one() == {0: True}


# AIG translation --------------------------------------------------------------


def test_from_aig_constants_and_gates():
    doc = AigerDoc(fmt="new")
    a = doc.add_input("a")
    b = doc.add_input("b")
    g = doc.aig.and_(a, b ^ 1)
    mgr = BddManager()
    var_map = {a >> 1: mgr.add_var("a"), b >> 1: mgr.add_var("b")}
    cone = AigCone(mgr, doc, var_map)
    assert cone.lit(0).is_false
    assert cone.lit(1).is_true
    node = cone.lit(g)
    for va, vb in product([False, True], repeat=2):
        assert node.evaluate([va, vb]) == (va and not vb)


def test_from_aig_matches_simulation():
    from aigsynt.aiger import evaluate_vars, values_lit
    import random
    rng = random.Random(7)
    doc = AigerDoc(fmt="new")
    lits = [doc.add_input(f"i{k}") for k in range(6)]
    pool = list(lits)
    for _ in range(25):
        a = rng.choice(pool) ^ rng.randint(0, 1)
        b = rng.choice(pool) ^ rng.randint(0, 1)
        pool.append(doc.aig.and_(a, b))
    top = pool[-1]
    mgr = BddManager()
    var_map = {lit >> 1: mgr.add_var(f"i{k}") for k, lit in enumerate(lits)}
    node = AigCone(mgr, doc, var_map).lit(top)
    for bits in product([False, True], repeat=6):
        values = evaluate_vars(doc, [], list(bits))
        assert node.evaluate(list(bits)) == values_lit(values, top)
