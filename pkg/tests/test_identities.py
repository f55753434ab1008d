import random
from itertools import combinations

import pytest

from skewform import diagrams
from skewform.altforms import evaluate, power, unit_form
from skewform.config import Budget
from skewform.exact_linalg import RatMatrix
from skewform.identities import (InhomogeneousRelation, RelationExpr, apply_pi, certify_basis,
                                 certify_exterior_invariants, check_parity_split,
                                 check_trace_vanishing, check_vanishing_power, derive_relation,
                                 derived_consequence_checks, invariant_generators,
                                 printed_relation, shifted_relation, standard_poly_direct,
                                 structure_series, verify_relation)
from skewform.matspaces import Family, make_space
from skewform.reports import CheckReport

SMALL_SPACES = [("full", 2), ("full", 3), ("sympl_plus", 1), ("sympl_plus", 2), ("sympl_minus", 1),
                ("sympl_minus", 2), ("orth_plus", 3), ("orth_minus", 3), ("orth_minus", 5)]


def rand_matrix(rng, m):
    return RatMatrix(m, m, [rng.randint(-3, 3) for _ in range(m * m)])


def test_standard_poly_small_cases():
    rng = random.Random(0)
    a, b = rand_matrix(rng, 3), rand_matrix(rng, 3)
    assert standard_poly_direct([a]) == a
    assert standard_poly_direct([a, b]) == a @ b - b @ a


def test_amitsur_levitzki_on_2x2():
    rng = random.Random(1)
    for _ in range(5):
        assert standard_poly_direct([rand_matrix(rng, 2) for _ in range(4)]).is_zero()


def test_standard_poly_guardrails():
    with pytest.raises(ValueError):
        standard_poly_direct([RatMatrix.identity(2)] * 9)
    with pytest.raises(ValueError):
        standard_poly_direct([RatMatrix.identity(2), RatMatrix.identity(3)])


@pytest.mark.parametrize("tag,size", SMALL_SPACES)
def test_power_equals_permutation_sum_on_basis_tuples(tag, size):
    space = make_space(tag, size)
    for k in range(1, min(5, space.dim) + 1):
        Xk = power(space, k)
        for idx in combinations(range(space.dim), k):
            mats = [space.basis[i] for i in idx]
            assert evaluate(Xk, mats) == standard_poly_direct(mats)


def test_vanishing_power_reports():
    assert check_vanishing_power("full", 2, k=4).holds
    assert check_vanishing_power("sympl_plus", 2, k=6).holds
    r = check_vanishing_power("sympl_plus", 2, k=5)
    assert r.verdict == "fails"
    assert r.witness["subset"] == [0, 1, 2, 3, 4]
    assert not r.witness["coefficient"].is_zero()


def test_budget_skip():
    r = check_vanishing_power("sympl_plus", 3, k=10, budget=Budget(max_table_entries=100))
    assert r.verdict == "skipped-budget" and "reason" in r.details


def test_trace_vanishing_reports():
    assert check_trace_vanishing("sympl_plus", 2, degree=3).holds
    assert check_trace_vanishing("sympl_minus", 2, degree=5).holds
    r = check_trace_vanishing("orth_plus", 2, degree=5)
    assert r.verdict == "fails" and r.witness is not None
    with pytest.raises(ValueError):
        check_trace_vanishing("sympl_plus", 1, degree=2)


@pytest.mark.parametrize("tag,n,degrees", [("sympl_plus", 2, [1, 5]), ("orth_minus", 2, [3, 7]),
                                           ("orth_plus", 1, [1, 5]), ("sympl_minus", 2, [3, 7]),
                                           ("full", 3, [1, 3, 5])])
def test_generator_degrees(tag, n, degrees):
    gens = invariant_generators(tag, n)
    assert [g.degree for g in gens] == degrees
    assert [g.index for g in gens] == list(range(len(degrees)))


@pytest.mark.parametrize("tag,n,degrees", [("sympl_plus", 2, {0, 1, 5, 6}), ("sympl_minus", 1, {0, 3}),
                                           ("orth_plus", 1, {0, 1, 5, 6})])
def test_exterior_invariants(tag, n, degrees):
    r = certify_exterior_invariants(tag, n)
    assert r.holds
    assert set(r.details["per_degree"]) == degrees


@pytest.mark.parametrize("tag,n,total", [("sympl_minus", 2, 16), ("sympl_plus", 2, 12),
                                         ("orth_minus", 1, 4), ("full", 2, 8)])
def test_certify_basis(tag, n, total):
    r = certify_basis(tag, n)
    assert r.holds and r.details["total"] == total


def test_apply_pi_examples():
    fam = Family("full", 2)
    assert apply_pi(RelationExpr(fam, [(1, (), 4)], 4)).is_zero()
    fam1 = Family("sympl_minus", 1)
    T0 = apply_pi(RelationExpr(fam1, [(1, (0,), 0)], 3))
    from skewform.altforms import embed_scalar
    assert T0 == embed_scalar(invariant_generators(fam1)[0].form)
    assert apply_pi(printed_relation("sympl_plus", 2)).is_zero()
    assert apply_pi(RelationExpr(fam, [(1, (), 0)], 0)) == unit_form(make_space(fam))


def test_relation_expr_validation():
    fam = Family("sympl_plus", 2)
    with pytest.raises(InhomogeneousRelation):
        RelationExpr(fam, [(1, (), 5), (1, (0,), 0)], 5)
    with pytest.raises(IndexError):
        RelationExpr(fam, [(1, (2,), 0)], 9)
    loose = RelationExpr(fam, [(1, (), 5), (1, (0,), 0)], 5, validate=False)
    with pytest.raises(InhomogeneousRelation):
        apply_pi(loose)


def test_printed_orth_plus_relation_is_inhomogeneous():
    for n in (1, 2):
        expr = printed_relation("orth_plus", n, validate=False)
        assert not expr.is_homogeneous
        assert sorted(set(expr.term_degrees())) == [4 * n + 1, 4 * n + 3]


@pytest.mark.parametrize("tag,n", [("sympl_minus", 1), ("sympl_minus", 2), ("orth_minus", 1),
                                   ("orth_minus", 2), ("sympl_plus", 2), ("full", 2), ("orth_plus", 1)])
def test_verify_relation(tag, n):
    assert verify_relation(tag, n).holds


def test_derive_relation_sympl_plus_matches_printed():
    d = derive_relation("sympl_plus", 2)
    assert d.unique and d.printed_match
    assert d.solution == {((), 5): 4, ((0,), 4): -1}
    # printed form normalized to T1 coefficient 1
    assert printed_relation("sympl_plus", 2).normalized(((1,), 0)) == {
        ((), 5): -4, ((1,), 0): 1, ((0,), 4): 1}


def test_derive_relation_full_two():
    d = derive_relation("full", 2)
    assert d.unique and d.printed_match
    assert d.solution == {((), 3): 2, ((0,), 2): -1}


def test_derive_relation_orth_plus_one():
    d = derive_relation("orth_plus", 1)
    assert d.unique and d.expr.is_homogeneous
    assert not d.printed_homogeneous and not d.printed_match
    assert d.solution == {((), 5): 3, ((0,), 4): -1}
    assert apply_pi(d.expr).is_zero()


def test_consequences():
    assert [r.holds for r in derived_consequence_checks("full", 3)] == [True]
    assert [r.holds for r in derived_consequence_checks("orth_minus", 2)] == [True]
    reports = derived_consequence_checks("sympl_minus", 2)
    assert len(reports) == 3 and all(r.holds for r in reports)


def test_shifted_relation_terms():
    expr = shifted_relation("sympl_minus", 2, j=1)
    assert expr.coefficients() == {((1,), 1): 1, ((0,), 5): 1}
    with pytest.raises(ValueError):
        shifted_relation("sympl_plus", 2, j=1)


def test_parity_split_lists():
    r = check_parity_split("sympl_minus", 2)
    assert r.holds
    assert r.details["fixed"] == [0, 3, 4, 7] and r.details["negated"] == [1, 2, 5, 6]
    r = check_parity_split("sympl_plus", 2)
    assert r.details["fixed"] == [0, 1, 4, 5] and r.details["negated"] == [2, 3]


@pytest.mark.parametrize("tag", ["sympl_plus", "sympl_minus", "orth_plus", "orth_minus"])
def test_structure_series_matches_diagrams(tag):
    for n in range(1, 6):
        for kind, table in (("invariants", diagrams.invariant_dims(tag, n)),
                            ("covariants", diagrams.covariant_dims(tag, n))):
            assert structure_series(tag, n, kind) == table


def test_check_report_contract():
    with pytest.raises(ValueError):
        CheckReport("x", "full(2)", 2, "fails")
    with pytest.raises(ValueError):
        CheckReport("x", "full(2)", 2, "maybe")
    d = CheckReport("x", "full(2)", 2, "holds", timing_ms=1.5).as_dict(timings=False)
    assert "timing_ms" not in d and d["verdict"] == "holds"


def test_verdicts_reproducible():
    a = verify_relation("orth_minus", 2, config_hash="h").as_dict(timings=False)
    b = verify_relation("orth_minus", 2, config_hash="h").as_dict(timings=False)
    assert a == b
