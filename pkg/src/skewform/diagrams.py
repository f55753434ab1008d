"""Young-diagram counts for invariants and covariants of exterior algebras.

Diagrams are in the transposed convention where a row of length k stands for
``Lambda^k V``; hence the row length is bounded by ``dim V`` while column
length is unbounded.  In this convention:

* ``Lambda(Lambda^2 V)`` is the sum of ``S_lambda(a)`` over strictly decreasing
  ``dim V > a_1 > ... > a_k > 0``, nesting hooks with arm ``a_i`` and leg
  ``a_i - 1`` (row ``a_i + 1``, column ``a_i``);
* ``Lambda(S^2 V)`` is the same with ``a_k >= 0`` and legs ``a_i + 1``
  (row ``a_i + 1``, column ``a_i + 2``).

A symplectic group has a (one-dimensional) invariant in ``S_lambda`` iff every
row of lambda is even; an orthogonal group iff every column is even.
Covariants valued in ``M_m = V (x) V`` are counted by adding two boxes (Pieri)
and keeping the paths that end on an invariant-admissible diagram.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterator

from .matspaces import Family

EVEN_ROWS = "even_rows"
EVEN_COLUMNS = "even_columns"


@dataclass(frozen=True)
class HookSequence:
    entries: tuple
    variant: str  # "minus" (Lambda^2 V) or "plus" (S^2 V)
    bound: int | None = None  # dim V

    def __post_init__(self):
        e = tuple(int(a) for a in self.entries)
        object.__setattr__(self, "entries", e)
        if self.variant not in ("minus", "plus"):
            raise ValueError(f"unknown hook variant {self.variant!r}")
        if any(a <= b for a, b in zip(e, e[1:])):
            raise ValueError(f"hook sequence {e} is not strictly decreasing")
        low = 1 if self.variant == "minus" else 0
        if e and e[-1] < low:
            raise ValueError(f"{self.variant} hook entries must be >= {low}")
        if self.bound is not None and e and e[0] >= self.bound:
            raise ValueError(f"first entry {e[0]} must be < dim V = {self.bound}")

    @property
    def degree(self) -> int:
        """Exterior degree of the summand (half the number of boxes)."""
        shift = 0 if self.variant == "minus" else 1
        return sum(a + shift for a in self.entries)


@dataclass(frozen=True, order=True)
class YoungDiagram:
    rows: tuple

    def __post_init__(self):
        r = tuple(int(x) for x in self.rows if x)
        object.__setattr__(self, "rows", r)
        if any(x < 0 for x in r) or any(a < b for a, b in zip(r, r[1:])):
            raise ValueError(f"rows {self.rows} are not weakly decreasing")

    @property
    def boxes(self) -> int:
        return sum(self.rows)

    def columns(self) -> tuple:
        if not self.rows:
            return ()
        return tuple(sum(1 for r in self.rows if r > j) for j in range(self.rows[0]))

    def transpose(self) -> "YoungDiagram":
        return YoungDiagram(self.columns())

    def addable_rows(self, bound: int | None = None) -> list[int]:
        """Row indices where a box can go (index len(rows) opens a new row)."""
        out = []
        rows = self.rows
        for i in range(len(rows) + 1):
            cur = rows[i] if i < len(rows) else 0
            if i > 0 and rows[i - 1] <= cur:
                continue
            if bound is not None and cur + 1 > bound:
                continue
            out.append(i)
        return out

    def add_box(self, i: int) -> "YoungDiagram":
        rows = list(self.rows)
        if i == len(rows):
            rows.append(1)
        else:
            rows[i] += 1
        return YoungDiagram(tuple(rows))

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.rows)) + ")"


def _nest(arms: tuple, variant: str) -> tuple:
    legs = [a - 1 if variant == "minus" else a + 1 for a in arms]
    k = len(arms)
    rows = [arms[i] + i + 1 for i in range(k)]
    depth = max((legs[j] + j + 1 for j in range(k)), default=0)
    for r in range(k, depth):
        rows.append(sum(1 for j in range(k) if legs[j] + j >= r))
    return tuple(rows)


def nest_hooks(seq: HookSequence) -> YoungDiagram:
    """Diagram with Frobenius arms a_i and legs a_i -+ 1."""
    d = YoungDiagram(_nest(seq.entries, seq.variant))
    shift = 0 if seq.variant == "minus" else 2
    assert d.boxes == sum(2 * a + shift for a in seq.entries)
    return d


def is_admissible(d: YoungDiagram, rule: str) -> bool:
    if rule == EVEN_ROWS:
        return all(r % 2 == 0 for r in d.rows)
    if rule == EVEN_COLUMNS:
        return all(c % 2 == 0 for c in d.columns())
    raise ValueError(f"unknown parity rule {rule!r}")


# ---------------------------------------------------------------------------
# family bookkeeping

def _family(family, n: int | None) -> Family:
    if isinstance(family, Family):
        return family
    tag = family.replace("-", "_")
    if n is None:
        raise ValueError("n is required")
    if tag.startswith("sympl") or tag == "full":
        return Family(tag, n)
    return Family(tag, 2 * n + 1)


def _variant(fam: Family) -> str:
    if fam.tag in ("sympl_plus", "orth_minus"):
        return "minus"
    if fam.tag in ("sympl_minus", "orth_plus"):
        return "plus"
    raise ValueError(f"no hook decomposition for {fam}")


def _rule(fam: Family) -> str:
    symplectic = calibrated_symplectic_rule()
    other = EVEN_COLUMNS if symplectic == EVEN_ROWS else EVEN_ROWS
    return symplectic if fam.is_symplectic else other


def _first_k_parities(variant: str, rule: str) -> Callable[[int, int], int]:
    """Length of row (or column) i < k of lambda(a), which depends only on a_i."""
    if rule == EVEN_ROWS:
        return lambda i, a: a + i + 1
    leg = (lambda a: a - 1) if variant == "minus" else (lambda a: a + 1)
    return lambda i, a: leg(a) + i + 1


def _raw_sequences(variant: str, bound: int, degree: int | None = None,
                   rule: str | None = None, max_defects: int = 0) -> Iterator[tuple]:
    low = 1 if variant == "minus" else 0
    shift = 0 if variant == "minus" else 1
    length = _first_k_parities(variant, rule) if rule else None
    prefix: list[int] = []

    def rec(top: int, remaining: int | None, defects: int):
        if remaining is None or remaining == 0:
            yield tuple(prefix)
            if remaining == 0:
                return
        for a in range(top, low - 1, -1):
            w = a + shift
            if remaining is not None and w > remaining:
                continue
            dd = defects
            if length is not None and length(len(prefix), a) % 2:
                dd += 1
                if dd > max_defects:
                    continue
            prefix.append(a)
            yield from rec(a - 1, None if remaining is None else remaining - w, dd)
            prefix.pop()

    yield from rec(bound - 1, degree, 0)


def hook_sequences(variant: str, bound: int, degree: int | None = None,
                   rule: str | None = None, max_defects: int = 0) -> Iterator[HookSequence]:
    """Strictly decreasing sequences below ``bound``, lazily.

    With ``degree`` only sequences of that exterior degree are produced.  With
    ``rule``, a sequence is skipped as soon as more than ``max_defects`` of its
    leading rows (or columns) have odd length; those lengths are final once
    the corresponding hook is placed.
    """
    for t in _raw_sequences(variant, bound, degree, rule, max_defects):
        yield HookSequence(t, variant, bound)


def decomposition(family, n: int | None = None, degree: int | None = None) -> Iterator[tuple[HookSequence, YoungDiagram]]:
    fam = _family(family, n)
    variant = _variant(fam)
    for seq in hook_sequences(variant, fam.ambient_size, degree):
        yield seq, nest_hooks(seq)


def _conjugate(rows: tuple) -> tuple:
    if not rows:
        return ()
    return tuple(sum(1 for r in rows if r > j) for j in range(rows[0]))


def _parity_seq(rows: tuple, rule: str) -> tuple:
    return rows if rule == EVEN_ROWS else _conjugate(rows)


def _addable(seq: list, i: int, rule: str, bound: int) -> bool:
    cur = seq[i] if i < len(seq) else 0
    if i > 0 and seq[i - 1] <= cur:
        return False
    # rows: a row may not exceed dim V; columns: there are at most dim V of them
    return cur + 1 <= bound if rule == EVEN_ROWS else i < bound


def _bump(seq: list, i: int) -> list:
    out = list(seq)
    if i == len(out):
        out.append(1)
    else:
        out[i] += 1
    return out


def two_box_contributions_fast(rows: tuple, bound: int, rule: str) -> int:
    """Number of two-box Pieri paths from ``rows`` to an admissible diagram.

    Rows (or columns, for the column rule) of odd length must each receive
    exactly one box; with no odd ones, a single row (column) receives both.
    """
    seq = list(_parity_seq(rows, rule))
    odd = [i for i, x in enumerate(seq) if x % 2]
    if len(odd) == 2:
        total = 0
        for first, second in (odd, odd[::-1]):
            if _addable(seq, first, rule, bound) and _addable(_bump(seq, first), second, rule, bound):
                total += 1
        return total
    if odd:
        return 0
    total = 0
    for i in range(len(seq) + 1):
        if _addable(seq, i, rule, bound):
            s1 = _bump(seq, i)
            if _addable(s1, i, rule, bound):
                total += 1
    return total


def _is_admissible_rows(rows: tuple, rule: str) -> bool:
    return all(x % 2 == 0 for x in _parity_seq(rows, rule))


@lru_cache(maxsize=None)
def _invariant_table(tag: str, size: int) -> dict[int, int]:
    fam = Family(tag, size)
    variant = _variant(fam)
    rule = _rule(fam)
    shift = 0 if variant == "minus" else 1
    table: Counter = Counter()
    for arms in _raw_sequences(variant, fam.ambient_size, rule=rule, max_defects=0):
        if _is_admissible_rows(_nest(arms, variant), rule):
            table[sum(a + shift for a in arms)] += 1
    return dict(sorted(table.items()))


def invariant_dims(family, n: int | None = None) -> dict[int, int]:
    """Degree -> dimension of invariants in the exterior algebra (nonzero degrees only)."""
    fam = _family(family, n)
    return dict(_invariant_table(fam.tag, fam.size))


def invariant_count(family, n: int | None = None, degree: int | None = None) -> int:
    table = invariant_dims(family, n)
    if degree is None:
        return sum(table.values())
    return table.get(degree, 0)


def pieri_add_boxes(d: YoungDiagram, count: int, bound: int | None = None) -> Counter:
    """Diagrams reachable by adding ``count`` boxes one at a time, with path counts."""
    if count not in (1, 2):
        raise ValueError("count must be 1 or 2")
    layer = Counter({d: 1})
    for _ in range(count):
        nxt: Counter = Counter()
        for diag, mult in layer.items():
            for i in diag.addable_rows(bound):
                nxt[diag.add_box(i)] += mult
        layer = nxt
    return layer


def two_box_contributions(d: YoungDiagram, bound: int, rule: str) -> int:
    """Reference count through :func:`pieri_add_boxes` (slow path)."""
    return sum(mult for nu, mult in pieri_add_boxes(d, 2, bound).items() if is_admissible(nu, rule))


@lru_cache(maxsize=None)
def _covariant_table(tag: str, size: int) -> dict[int, int]:
    fam = Family(tag, size)
    variant = _variant(fam)
    rule = _rule(fam)
    bound = fam.ambient_size
    shift = 0 if variant == "minus" else 1
    table: Counter = Counter()
    for arms in _raw_sequences(variant, bound, rule=rule, max_defects=2):
        c = two_box_contributions_fast(_nest(arms, variant), bound, rule)
        if c:
            table[sum(a + shift for a in arms)] += c
    return dict(sorted(table.items()))


def covariant_dims(family, n: int | None = None) -> dict[int, int]:
    """Degree -> dimension of matrix-valued covariants."""
    fam = _family(family, n)
    return dict(_covariant_table(fam.tag, fam.size))


def covariant_count(family, n: int | None = None, degree: int | None = None) -> int:
    table = covariant_dims(family, n)
    if degree is None:
        return sum(table.values())
    return table.get(degree, 0)


def closed_form(family, n: int | None = None, kind: str = "covariants") -> int:
    """Closed-form totals; ``n`` is the rank index (m = 2n or 2n + 1)."""
    fam = _family(family, n)
    tag = fam.tag
    n = fam.n
    if kind not in ("invariants", "covariants"):
        raise ValueError(f"unknown kind {kind!r}")
    if tag == "full":
        return 2 ** n if kind == "invariants" else n * 2 ** n
    if tag in ("sympl_plus", "sympl_minus"):
        if kind == "invariants":
            return 2 ** n
        return (2 * n - 1) * 2 ** n if tag == "sympl_plus" else 2 * n * 2 ** n
    if tag in ("orth_minus", "orth_plus"):
        if not fam.structure_supported:
            raise ValueError(f"no closed form for even orthogonal size ({fam})")
        if tag == "orth_minus":
            return 2 ** n if kind == "invariants" else n * 2 ** (n + 1)
        return 2 ** (n + 1) if kind == "invariants" else (2 * n + 1) * 2 ** (n + 1)
    raise ValueError(f"unknown family {family!r}")


def _raw_invariant_total(variant: str, bound: int, rule: str) -> int:
    return sum(1 for arms in _raw_sequences(variant, bound, rule=rule, max_defects=0)
               if _is_admissible_rows(_nest(arms, variant), rule))


@lru_cache(maxsize=None)
def calibrated_symplectic_rule() -> str:
    """The parity rule that yields 2^n invariants on M_2n^+ for n = 1, 2, 3."""
    matches = [rule for rule in (EVEN_ROWS, EVEN_COLUMNS)
               if all(_raw_invariant_total("minus", 2 * n, rule) == 2 ** n for n in (1, 2, 3))]
    if len(matches) != 1:
        raise RuntimeError(f"parity convention is ambiguous: {matches}")
    return matches[0]
