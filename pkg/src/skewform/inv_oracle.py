"""Brute-force invariant dimensions via common kernels of Lie-algebra actions.

For a Lie algebra k acting on a space p and on a target U, the invariants
in ``Lambda^k p* (x) U`` are the common kernel of the operators

    (g . F)(v_1..v_k) = g . F(v_1..v_k) - sum_s F(v_1, .., g . v_s, .., v_k)

over a basis of k.  Computation is per degree and exact.

Before eliminating, columns are restricted to the vectors fixed by a few
diagonal sign matrices lying in the connected group (every invariant is fixed
by them); pass ``graded=False`` to skip this reduction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Sequence

from .altforms import AltForm, generic_element, indices_of, mask_of, subsets
from .config import DEFAULT_BUDGET, Budget, BudgetExceeded
from .exact_linalg import (CoordinateMap, RatMatrix, SparseOperator, rank, rat,
                           stacked_echelon)
from .matspaces import (Family, LieAlgebraSpec, MatrixSpaceSpec, lie_generators,
                        make_space, symmetry_algebra)

TARGETS = ("trivial", "p", "k", "full")


def _act(kind: str, g: RatMatrix, v: RatMatrix) -> RatMatrix:
    if kind == "ad":
        return g @ v - v @ g
    if kind == "defining":
        return g @ v
    raise ValueError(f"unknown action {kind!r}")


def _sign_act(kind: str, d: tuple, v: RatMatrix) -> RatMatrix:
    """Action of the diagonal sign matrix ``d`` on ``v``."""
    r, c = v.shape
    e = v.entries
    if kind == "ad":
        return RatMatrix._raw(r, c, tuple(e[i * c + j] * d[i] * d[j] for i in range(r) for j in range(c)))
    return RatMatrix._raw(r, c, tuple(e[i * c + j] * d[i] for i in range(r) for j in range(c)))


@dataclass(eq=False)
class Module:
    """A representation given by a basis of matrices and an action rule."""

    name: str
    basis: tuple
    action: str  # "ad", "defining" or "zero"
    coords: CoordinateMap = field(repr=False, default=None)

    def __post_init__(self):
        if self.coords is None and self.action != "zero":
            self.coords = CoordinateMap(list(self.basis))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def matrix_of(self, g: RatMatrix) -> list[dict[int, object]]:
        """Rows of the action matrix: entry [i][t] = coefficient of b_i in g . b_t."""
        rows: list[dict[int, object]] = [dict() for _ in range(self.dim)]
        if self.action == "zero":
            return rows
        for t, b in enumerate(self.basis):
            col = self.coords.coords(_act(self.action, g, b))
            for i, x in enumerate(col):
                if x:
                    rows[i][t] = x
        return rows

    def character(self, d: tuple) -> list[int] | None:
        """Signs of the basis under the sign matrix ``d``; None if not diagonal."""
        if self.action == "zero":
            return [1] * self.dim
        out = []
        for b in self.basis:
            img = _sign_act(self.action, d, b)
            if img == b:
                out.append(1)
            elif img == -b:
                out.append(-1)
            else:
                return None
        return out


TRIVIAL = Module("trivial", (RatMatrix.identity(1),), "zero")


@dataclass(eq=False)
class PairSpec:
    """Lie algebra ``k_algebra`` acting on ``p_space`` and on the named targets."""

    name: str
    k_algebra: LieAlgebraSpec
    p_space: MatrixSpaceSpec
    p_action: str
    targets: dict
    grading: tuple = ()

    def __post_init__(self):
        self.p_module = Module("p", self.p_space.basis, self.p_action, self.p_space._coords)
        # closure of the action is checked by the coordinate map
        self._p_rows = [self.p_module.matrix_of(g) for g in self.k_algebra.generators]

    @property
    def dim_p(self) -> int:
        return self.p_space.dim

    def target(self, name: str) -> Module:
        try:
            return self.targets[name]
        except KeyError:
            raise ValueError(f"pair {self.name} has no target {name!r}; "
                             f"available: {sorted(self.targets)}") from None

    def p_rows(self, g) -> list[dict]:
        if isinstance(g, int):
            return self._p_rows[g]
        return self.p_module.matrix_of(g)

    def generator(self, g) -> RatMatrix:
        return self.k_algebra.generators[g] if isinstance(g, int) else g

    def __str__(self) -> str:
        return self.name


def family_pair(family: Family) -> PairSpec:
    """Conjugation action of the family's symmetry algebra on its space."""
    space = make_space(family)
    k = symmetry_algebra(family)
    m = family.ambient_size
    full = make_space("full", m) if family.tag != "full" else space
    targets = {
        "trivial": TRIVIAL,
        "p": Module("p", space.basis, "ad", space._coords),
        "k": Module("k", k.generators, "ad"),
        "full": Module("full", full.basis, "ad", full._coords),
    }
    if family.tag == "full":
        grading = tuple(tuple(-1 if i == t else 1 for i in range(m)) for t in range(m))
    elif family.is_symplectic:
        n = family.size
        grading = tuple(tuple(-1 if i % n == t else 1 for i in range(m)) for t in range(n))
    else:
        grading = tuple(tuple(-1 if i in (0, t) else 1 for i in range(m)) for t in range(1, m))
    return PairSpec(f"{k}/{family}", k, space, "ad", targets, grading)


def sphere_pair(n: int) -> PairSpec:
    """so(2n-1) acting on p = C^(2n-1), the tangent space of the pair (so(2n), so(2n-1))."""
    if n < 2:
        raise ValueError("sphere pair needs n >= 2")
    m = 2 * n - 1
    k = lie_generators("so", m)
    space = make_space("euclidean", m)
    targets = {
        "trivial": TRIVIAL,
        "p": Module("p", space.basis, "defining", space._coords),
        "k": Module("k", k.generators, "ad"),
    }
    grading = tuple(tuple(-1 if i in (0, t) else 1 for i in range(m)) for t in range(1, m))
    return PairSpec(f"so({2 * n})/so({m})", k, space, "defining", targets, grading)


# ---------------------------------------------------------------------------
# operators

def _columns(pair: PairSpec, degree: int, U: Module, graded: bool) -> list[tuple[int, int]]:
    """Domain basis (subset mask, target index), optionally restricted to the fixed block."""
    masks = subsets(pair.dim_p, degree)
    cols = [(s, u) for s in masks for u in range(U.dim)]
    if not graded or not pair.grading:
        return cols
    chars = []
    for d in pair.grading:
        cp = pair.p_module.character(d)
        cu = U.character(d)
        if cp is None or cu is None:
            continue
        chars.append((cp, cu))

    def fixed(s: int, u: int) -> bool:
        for cp, cu in chars:
            sign = cu[u]
            for i in indices_of(s):
                sign *= cp[i]
            if sign < 0:
                return False
        return True

    return [c for c in cols if fixed(*c)]


def _between_sign(rest: int, a: int, b: int) -> int:
    lo, hi = (a, b) if a < b else (b, a)
    between = (rest >> (lo + 1)) & ((1 << max(hi - lo - 1, 0)) - 1)
    return -1 if between.bit_count() & 1 else 1


def _operator_columns(pair: PairSpec, g, degree: int, U: Module,
                      columns: Sequence[tuple[int, int]]) -> dict[int, dict[tuple[int, int], object]]:
    """Images of the given domain basis vectors, keyed by column position."""
    prow = pair.p_rows(g)
    urow = U.matrix_of(pair.generator(g))
    # columns of the target action: u -> {u': coefficient}
    ucol: list[dict[int, object]] = [dict() for _ in range(U.dim)]
    for i, row in enumerate(urow):
        for t, x in row.items():
            ucol[t][i] = x
    out = {}
    for pos, (s_prime, u) in enumerate(columns):
        img: dict[tuple[int, int], object] = {}
        for u2, x in ucol[u].items():
            img[(s_prime, u2)] = x
        for i in indices_of(s_prime):
            rest = s_prime & ~(1 << i)
            for t, x in prow[i].items():
                if rest >> t & 1:
                    continue
                key = (rest | (1 << t), u)
                val = -x * _between_sign(rest, t, i)
                new = img.get(key, 0) + val
                if new:
                    img[key] = new
                else:
                    img.pop(key, None)
        out[pos] = img
    return out


def _row_index(pair: PairSpec, degree: int, U: Module) -> dict[tuple[int, int], int]:
    return {(s, u): i * U.dim + u for i, s in enumerate(subsets(pair.dim_p, degree)) for u in range(U.dim)}


def action_operator(pair: PairSpec, g, degree: int, target: str = "trivial",
                    budget: Budget = DEFAULT_BUDGET) -> SparseOperator:
    """Matrix of ``g`` on ``Lambda^degree p* (x) U`` in the subset-major basis."""
    if degree > pair.dim_p or degree < 0:
        raise ValueError(f"degree {degree} out of range for dim p = {pair.dim_p}")
    U = pair.target(target)
    ncols = comb(pair.dim_p, degree) * U.dim
    _check_columns(ncols, budget)
    cols = _columns(pair, degree, U, graded=False)
    index = _row_index(pair, degree, U)
    triples = []
    for pos, img in _operator_columns(pair, g, degree, U, cols).items():
        for key, v in img.items():
            triples.append((index[key], pos, v))
    return SparseOperator(ncols, ncols, tuple(triples))


def _check_columns(ncols: int, budget: Budget) -> None:
    if not budget.force and ncols > budget.max_columns:
        raise BudgetExceeded(f"{ncols} columns exceed the oracle budget of {budget.max_columns}")


def invariant_dimension(pair: PairSpec, degree: int, target: str = "trivial",
                        budget: Budget = DEFAULT_BUDGET, graded: bool = True) -> int:
    """Dimension of the common kernel of all generator operators in one degree."""
    if degree < 0 or degree > pair.dim_p:
        return 0
    U = pair.target(target)
    _check_columns(comb(pair.dim_p, degree) * U.dim, budget)
    cols = _columns(pair, degree, U, graded)
    if not cols:
        return 0
    index = _row_index(pair, degree, U)
    ops = []
    for gi in range(pair.k_algebra.dim):
        triples = []
        for pos, img in _operator_columns(pair, gi, degree, U, cols).items():
            for key, v in img.items():
                triples.append((index[key], pos, v))
        ops.append(SparseOperator(len(cols), len(index), tuple(triples)))
    ech = stacked_echelon(ops)
    return len(cols) - ech.rank


def invariant_table(pair: PairSpec, target: str = "trivial", degrees: Sequence[int] | None = None,
                    budget: Budget = DEFAULT_BUDGET, graded: bool = True) -> dict[int, int | None]:
    """Degree -> invariant dimension; None where the column budget is exceeded."""
    degrees = range(pair.dim_p + 1) if degrees is None else degrees
    out: dict[int, int | None] = {}
    for k in degrees:
        try:
            out[k] = invariant_dimension(pair, k, target, budget, graded)
        except BudgetExceeded:
            out[k] = None
    return out


def form_vector(pair: PairSpec, F: AltForm, target: str) -> list:
    """Coordinates of a form in the operator basis (subset-major, then target index)."""
    U = pair.target(target)
    if F.space != pair.p_space:
        raise ValueError("form lives on a different space")
    vec = [0] * (comb(pair.dim_p, F.degree) * U.dim)
    pos = {s: i for i, s in enumerate(subsets(pair.dim_p, F.degree))}
    for s, v in F.table.items():
        if U.action == "zero":
            c = (v,) if not isinstance(v, RatMatrix) else (v.entries[0],)
        else:
            c = U.coords.coords(v)
        for u, x in enumerate(c):
            vec[pos[s] * U.dim + u] = x
    return vec


def is_invariant(pair: PairSpec, F: AltForm, target: str) -> bool:
    vec = form_vector(pair, F, target)
    return all(not any(action_operator(pair, gi, F.degree, target, Budget(force=True)).apply(vec))
               for gi in range(pair.k_algebra.dim))


# ---------------------------------------------------------------------------
# sphere case

@dataclass(frozen=True)
class Covariant4:
    omega1: AltForm  # degree 2n-3, values in so(2n-1)
    omega2: AltForm  # degree 2,    values in so(2n-1)
    theta1: AltForm  # degree 2n-2, values in C^(2n-1)
    theta2: AltForm  # degree 1,    values in C^(2n-1)

    def as_dict(self) -> dict[str, AltForm]:
        return {"omega1": self.omega1, "omega2": self.omega2,
                "theta1": self.theta1, "theta2": self.theta2}


def _complement_sign(idx: tuple, tail: tuple) -> int:
    """Sign of the permutation sorting ``idx + tail``."""
    seq = list(idx) + list(tail)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def _antisym(m: int, i: int, j: int) -> RatMatrix:
    return RatMatrix.unit(m, i, j) - RatMatrix.unit(m, j, i)


def determinant_invariant(n: int) -> AltForm:
    """The top-degree form on C^(2n-1) with value 1 on the full basis."""
    space = make_space("euclidean", 2 * n - 1)
    return AltForm(space, space.dim, None, {(1 << space.dim) - 1: 1})


def sphere_covariants(n: int, verify: bool = True) -> Covariant4:
    """The four covariants on C^(2n-1) built from the determinant and the dot product."""
    pair = sphere_pair(n)
    space = pair.p_space
    m = space.dim
    full = (1 << m) - 1

    omega1 = {}
    for idx in combinations(range(m), 2 * n - 3):
        i, j = indices_of(full & ~mask_of(idx))
        # sum over i<j of det[v.., e_i, e_j] e_i ^ e_j
        omega1[mask_of(idx)] = _antisym(m, i, j).scale(_complement_sign(idx, (i, j)))
    omega2 = {mask_of((i, j)): _antisym(m, i, j) for i, j in combinations(range(m), 2)}
    theta1 = {}
    for idx in combinations(range(m), 2 * n - 2):
        (i,) = indices_of(full & ~mask_of(idx))
        theta1[mask_of(idx)] = RatMatrix.unit(m, i, 0, cols=1).scale(_complement_sign(idx, (i,)))
    cov = Covariant4(
        AltForm(space, 2 * n - 3, (m, m), omega1),
        AltForm(space, 2, (m, m), omega2),
        AltForm(space, 2 * n - 2, (m, 1), theta1),
        generic_element(space),
    )
    if verify:
        for name, F in cov.as_dict().items():
            target = "k" if name.startswith("omega") else "p"
            if not is_invariant(pair, F, target):
                raise AssertionError(f"{name} is not annihilated by so({m})")
    return cov


def span_rank(pair: PairSpec, forms: Sequence[AltForm], target: str) -> int:
    """Rank of the forms' coordinate vectors, counted per degree."""
    by_degree: dict[int, list] = {}
    for F in forms:
        by_degree.setdefault(F.degree, []).append(form_vector(pair, F, target))
    return sum(rank(rows) for rows in by_degree.values())
