"""One test per acceptance criterion; each states its time limit and tolerance.

All comparisons are exact (integers and rationals), so every tolerance is zero.
Run ``python3 tests/test_acceptance.py`` for the pass/fail summary alone.
"""

import random
import time
from itertools import combinations

from skewform import altforms, diagrams
from skewform.altforms import AltForm, evaluate, power, subsets, trace_form, wedge
from skewform.exact_linalg import RatMatrix
from skewform.identities import (apply_pi, certify_basis, check_parity_split,
                                 check_trace_vanishing, check_vanishing_power, derive_relation,
                                 printed_relation, standard_poly_direct, verify_relation)
from skewform.inv_oracle import (action_operator, determinant_invariant, family_pair,
                                 invariant_table, is_invariant, span_rank, sphere_covariants,
                                 sphere_pair)
from skewform.matspaces import Family, ad_action, make_space, symplectic_transpose


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


def test_criterion_1_dimension_tables():
    """dimension tables n=1..6 equal the closed forms exactly, under 1 s"""
    diagrams._invariant_table.cache_clear()
    diagrams._covariant_table.cache_clear()
    with Timer() as t:
        for n in range(1, 7):
            inv = {tag: diagrams.invariant_count(tag, n)
                   for tag in ("sympl_plus", "sympl_minus", "orth_minus", "orth_plus")}
            cov = {tag: diagrams.covariant_count(tag, n)
                   for tag in ("sympl_plus", "sympl_minus", "orth_minus", "orth_plus")}
            assert inv == {"sympl_plus": 2 ** n, "sympl_minus": 2 ** n,
                           "orth_minus": 2 ** n, "orth_plus": 2 ** (n + 1)}, n
            assert cov == {"sympl_plus": (2 * n - 1) * 2 ** n, "sympl_minus": 2 * n * 2 ** n,
                           "orth_minus": n * 2 ** (n + 1), "orth_plus": (2 * n + 1) * 2 ** (n + 1)}, n
    assert t.seconds < 1.0, t.seconds


def test_criterion_2_oracle_cross_check():
    """per-degree Lie-kernel dimensions equal diagram counts (sympl n<=2, orth m=3,5), under 5 min"""
    families = [Family("sympl_plus", 1), Family("sympl_plus", 2), Family("sympl_minus", 1),
                Family("sympl_minus", 2), Family("orth_plus", 3), Family("orth_plus", 5),
                Family("orth_minus", 3), Family("orth_minus", 5)]
    compared = skipped = 0
    with Timer() as t:
        for fam in families:
            pair = family_pair(fam)
            for target, table in (("trivial", diagrams.invariant_dims(fam)),
                                  ("full", diagrams.covariant_dims(fam))):
                for degree, dim in invariant_table(pair, target).items():
                    if dim is None:
                        assert target == "full"  # invariants always fit the budget
                        skipped += 1
                        continue
                    assert dim == table.get(degree, 0), (fam, target, degree)
                    compared += 1
    assert compared > 0 and skipped <= 6
    assert t.seconds < 300, t.seconds


def test_criterion_3_identity_suite():
    """Amitsur-Levitzki, Rowen, Hutchinson and trace vanishing over all basis subsets, under 5 min"""
    altforms.clear_power_cache()
    with Timer() as t:
        reports = [
            check_vanishing_power("full", 2, k=4),
            check_vanishing_power("full", 3, k=6),
            check_vanishing_power("sympl_plus", 2, k=6),
            check_vanishing_power("orth_minus", 2, k=8),
            check_trace_vanishing("sympl_plus", 2, degree=3),
            check_trace_vanishing("orth_plus", 2, degree=3),
            check_trace_vanishing("sympl_minus", 2, degree=5),
            check_trace_vanishing("orth_minus", 2, degree=5),
        ]
        for m in (2, 3):
            space = make_space("full", m)
            for deg in (2, 4, 6):
                if deg <= space.dim:
                    reports.append(check_trace_vanishing("full", m, degree=deg))
                else:
                    # no subsets of that size: the form is zero by the degree bound
                    assert trace_form(power(space, deg)).is_zero()
    bad = [(r.family, r.name, r.verdict) for r in reports if not r.holds]
    assert not bad, bad
    assert t.seconds < 300, t.seconds


SMALL = [("full", 2), ("full", 3), ("sympl_plus", 1), ("sympl_plus", 2), ("sympl_minus", 1),
         ("sympl_minus", 2), ("orth_plus", 3), ("orth_minus", 3), ("orth_minus", 5)]


def test_criterion_4_wedge_standard_polynomial_oracle():
    """X^k and St_a^St_b agree with the k!-term permutation sum on every basis tuple, under 1 min"""
    with Timer() as t:
        tags = set()
        for tag, size in SMALL:
            space = make_space(tag, size)
            assert space.dim <= 10
            tags.add(tag)
            for k in range(1, min(4, space.dim) + 1):
                Xk = power(space, k)
                for idx in combinations(range(space.dim), k):
                    mats = [space.basis[i] for i in idx]
                    assert evaluate(Xk, mats) == standard_poly_direct(mats), (tag, size, idx)
            for a in range(1, 5):
                for b in range(1, 6 - a):
                    if a + b > space.dim:
                        continue
                    prod = wedge(power(space, a), power(space, b))
                    assert prod == power(space, a + b)
                    for idx in combinations(range(space.dim), a + b):
                        mats = [space.basis[i] for i in idx]
                        assert evaluate(prod, mats) == standard_poly_direct(mats)
        assert tags == {"full", "sympl_plus", "sympl_minus", "orth_plus", "orth_minus"}
    assert t.seconds < 60, t.seconds


def test_criterion_5_relations():
    """explicit kernel generators map to the zero form under t -> X, under 2 min"""
    cases = [("sympl_plus", 2), ("sympl_minus", 1), ("sympl_minus", 2), ("orth_minus", 1),
             ("orth_minus", 2), ("full", 2)]
    with Timer() as t:
        for tag, n in cases:
            expr = printed_relation(tag, n)
            assert expr.is_homogeneous
            assert apply_pi(expr).is_zero(), (tag, n)
            assert verify_relation(tag, n).holds
    assert t.seconds < 120, t.seconds


def test_criterion_6_relation_derivation():
    """orth_plus n=1,2: unique homogeneous derived generator with zero image; literal inhomogeneous form flagged, under 2 min"""
    with Timer() as t:
        for n in (1, 2):
            d = derive_relation("orth_plus", n)
            assert d.unique and d.expr.is_homogeneous
            assert apply_pi(d.expr).is_zero()
            assert d.printed_homogeneous is False and d.printed_match is False
            # T_n = (2n+1) X^(4n+1) - sum_j T_(n-j) X^(4j)
            expected = {((), 4 * n + 1): 2 * n + 1}
            expected.update({((n - j,), 4 * j): -1 for j in range(1, n + 1)})
            assert d.solution == expected
    assert t.seconds < 120, t.seconds


def test_criterion_7_basis_certification():
    """free-basis ranks full per degree, totals equal criterion 1, parity split holds, under 5 min"""
    cases = [("sympl_plus", 2, 12), ("sympl_minus", 2, 16), ("orth_minus", 2, 16),
             ("orth_plus", 1, 12), ("full", 2, 8)]
    with Timer() as t:
        for tag, n, total in cases:
            r = certify_basis(tag, n)
            assert r.holds, (tag, n, r.witness)
            assert r.details["total"] == total == r.details["closed_form"]
            assert all(row["rank"] == row["count"] for row in r.details["per_degree"].values())
            if tag != "full":
                assert total == diagrams.covariant_count(tag, n)
                assert check_parity_split(tag, n).holds
        # full(2): four basis powers over the two-element algebra spanned by 1 and T0
        assert len(range(4)) * 2 == 8
        split = check_parity_split("sympl_minus", 2).details
        assert split["fixed"] == [0, 3, 4, 7]
    assert t.seconds < 300, t.seconds


def test_criterion_8_sphere_case():
    """n=2,3: four covariants annihilated by so(2n-1), spans of dimension 2 + 2, under 1 min"""
    with Timer() as t:
        for n in (2, 3):
            pair = sphere_pair(n)
            cov = sphere_covariants(n)
            for name, F in cov.as_dict().items():
                assert is_invariant(pair, F, "k" if name.startswith("omega") else "p"), (n, name)
            k_table = invariant_table(pair, "k")
            p_table = invariant_table(pair, "p")
            assert sum(k_table.values()) == 2 and sum(p_table.values()) == 2
            assert span_rank(pair, [cov.omega1, cov.omega2], "k") == 2
            assert span_rank(pair, [cov.theta1, cov.theta2], "p") == 2
            assert is_invariant(pair, determinant_invariant(n), "trivial")
    assert t.seconds < 60, t.seconds


def _random_form(rng, space, degree, matrix):
    m = space.ambient_size
    table = {}
    for s in subsets(space.dim, degree):
        if rng.random() < 0.5:
            table[s] = (RatMatrix(m, m, [rng.randint(-2, 2) for _ in range(m * m)])
                        if matrix else rng.randint(-3, 3))
    return AltForm(space, degree, (m, m) if matrix else None, table)


def test_criterion_9_property_suite():
    """associativity, sign rule, alternation, involutivity, bracket compatibility on fixed inputs"""
    rng = random.Random(2024)
    for tag, size in [("full", 2), ("sympl_plus", 2), ("orth_minus", 5)]:
        space = make_space(tag, size)
        for p in range(3):
            for q in range(3):
                for r in range(2):
                    F, G, H = (_random_form(rng, space, d, True) for d in (p, q, r))
                    assert wedge(wedge(F, G), H) == wedge(F, wedge(G, H))
                f, g = _random_form(rng, space, p, False), _random_form(rng, space, q, False)
                assert wedge(f, g) == wedge(g, f).scale((-1) ** (p * q))
        X3 = power(space, 3)
        vs = [[rng.randint(-2, 2) for _ in range(space.dim)] for _ in range(3)]
        assert evaluate(X3, [vs[0], vs[0], vs[2]]).is_zero()
        assert evaluate(X3, [vs[2], vs[1], vs[0]]) == -evaluate(X3, vs)
    for _ in range(10):
        A = RatMatrix(4, 4, [rng.randint(-5, 5) for _ in range(16)])
        assert symplectic_transpose(symplectic_transpose(A)) == A
    for pair, target in ((sphere_pair(3), "k"), (family_pair(Family("sympl_plus", 2)), "full")):
        gens = pair.k_algebra.generators
        for degree in (0, 1, 2):
            ops = [action_operator(pair, i, degree, target) for i in range(len(gens))]
            for i, j in [(0, 1), (0, 2), (1, 3), (2, 4)]:
                lhs = action_operator(pair, ad_action(gens[i], gens[j]), degree, target)
                assert lhs.triples == (ops[i] @ ops[j] - ops[j] @ ops[i]).triples


if __name__ == "__main__":
    import sys

    import pytest

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
