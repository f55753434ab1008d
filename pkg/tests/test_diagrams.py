from collections import Counter

import pytest

from skewform import diagrams as D
from skewform.diagrams import HookSequence, YoungDiagram, nest_hooks, pieri_add_boxes
from skewform.matspaces import Family

INVOLUTION_FAMILIES = ("sympl_plus", "sympl_minus", "orth_plus", "orth_minus")


def test_nest_examples():
    assert nest_hooks(HookSequence((4, 3, 1), "minus")).rows == (5, 5, 4, 2)
    assert nest_hooks(HookSequence((1,), "minus")).rows == (2,)
    assert nest_hooks(HookSequence((0,), "plus")).rows == (1, 1)


@pytest.mark.parametrize("variant", ["minus", "plus"])
def test_box_counts(variant):
    shift = 0 if variant == "minus" else 2
    for seq in D.hook_sequences(variant, 7):
        d = nest_hooks(seq)
        assert d.boxes == sum(2 * a + shift for a in seq.entries) == 2 * seq.degree


def test_sequence_counts_are_subsets():
    # minus: subsets of {1..m-1}; plus: subsets of {0..m-1}
    for m in range(1, 7):
        assert sum(1 for _ in D.hook_sequences("minus", m)) == 2 ** (m - 1)
        assert sum(1 for _ in D.hook_sequences("plus", m)) == 2 ** m


def test_malformed_sequences():
    with pytest.raises(ValueError):
        HookSequence((2, 2), "minus")
    with pytest.raises(ValueError):
        HookSequence((1, 0), "minus")
    with pytest.raises(ValueError):
        HookSequence((4,), "minus", bound=4)
    with pytest.raises(ValueError):
        YoungDiagram((1, 2))


def test_transpose_and_columns():
    d = YoungDiagram((3, 1))
    assert d.columns() == (2, 1, 1)
    assert d.transpose().transpose() == d


def test_pieri_examples():
    assert pieri_add_boxes(YoungDiagram(()), 2) == Counter({YoungDiagram((2,)): 1, YoungDiagram((1, 1)): 1})
    out = pieri_add_boxes(YoungDiagram((4, 4)), 2, bound=4)
    assert out[YoungDiagram((4, 4, 2))] == 1 and out[YoungDiagram((4, 4, 1, 1))] == 1
    # one box on the second row and one opening a new row: two orders
    assert pieri_add_boxes(YoungDiagram((2, 1)), 2)[YoungDiagram((2, 2, 1))] == 2


def test_pieri_path_count_consistency():
    for rows in [(), (2,), (3, 1), (4, 4, 2), (5, 5, 4, 2)]:
        d = YoungDiagram(rows)
        one = pieri_add_boxes(d, 1, bound=6)
        two = pieri_add_boxes(d, 2, bound=6)
        assert sum(two.values()) == sum(len(e.addable_rows(6)) for e in one)


def test_symplectic_rule_calibrates_to_even_rows():
    assert D.calibrated_symplectic_rule() == D.EVEN_ROWS


@pytest.mark.parametrize("tag,n,total", [("sympl_plus", 2, 4), ("orth_minus", 2, 4), ("orth_plus", 2, 8)])
def test_invariant_totals(tag, n, total):
    assert D.invariant_count(tag, n) == total


@pytest.mark.parametrize("tag,n,total", [("sympl_plus", 2, 12), ("sympl_minus", 2, 16),
                                         ("orth_minus", 2, 16), ("orth_plus", 2, 40)])
def test_covariant_totals(tag, n, total):
    assert D.covariant_count(tag, n) == total


def test_closed_form_examples():
    assert D.closed_form("sympl_plus", 5, "invariants") == 32
    assert D.closed_form("sympl_plus", 5) == 288
    assert D.closed_form("orth_plus", 3) == 112
    with pytest.raises(ValueError):
        D.closed_form("sympl_plus", 2, "weights")
    with pytest.raises(ValueError):
        D.closed_form(Family("orth_plus", 4))


@pytest.mark.parametrize("tag", INVOLUTION_FAMILIES)
@pytest.mark.parametrize("n", [1, 2, 3])
def test_fast_tables_match_reference_enumeration(tag, n):
    fam = D._family(tag, n)
    rule = D._rule(fam)
    inv, cov = Counter(), Counter()
    for seq, d in D.decomposition(fam):
        if D.is_admissible(d, rule):
            inv[seq.degree] += 1
        c = D.two_box_contributions(d, fam.ambient_size, rule)
        if c:
            cov[seq.degree] += c
    assert dict(inv) == D.invariant_dims(fam)
    assert dict(cov) == D.covariant_dims(fam)


def test_degree_filter():
    assert D.invariant_count("sympl_plus", 2, degree=5) == 1
    assert D.covariant_count("sympl_plus", 2, degree=3) == 2
    assert all(seq.degree == 4 for seq, _ in D.decomposition("orth_minus", 2, degree=4))


def test_full_family_has_no_hook_decomposition():
    with pytest.raises(ValueError):
        D.invariant_dims("full", 2)


@pytest.mark.slow
@pytest.mark.parametrize("tag", INVOLUTION_FAMILIES)
def test_closed_forms_up_to_ten(tag):
    for n in range(1, 11):
        assert D.invariant_count(tag, n) == D.closed_form(tag, n, "invariants")
        assert D.covariant_count(tag, n) == D.closed_form(tag, n)
