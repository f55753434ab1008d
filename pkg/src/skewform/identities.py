"""Trace identities, vanishing theorems, basis certification and relations.

Every verdict here is decided by exact computation over all basis subsets.
Families may be passed as :class:`Family` objects or as ``(tag, n)`` where
``n`` is the rank index (the orthogonal families then have size ``2n + 1``).
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from typing import Callable, Sequence

from . import diagrams
from .altforms import (AltForm, embed_scalar, first_nonzero, indices_of, power, sparse_coefficients,
                       trace_form, unit_form, wedge, wedge_all, zero_form)
from .config import DEFAULT_BUDGET, Budget, BudgetExceeded
from .exact_linalg import RatMatrix, Rational, rank, rat, solve
from .matspaces import Family, MatrixSpaceSpec, family_from, involution, make_space
from .reports import FAILS, HOLDS, SKIPPED, CheckReport, stopwatch


class InconsistentSystem(ArithmeticError):
    """A relation system with no solution: the expected relation does not exist."""


class InhomogeneousRelation(ValueError):
    pass


def resolve(family, n: int | None = None) -> Family:
    if isinstance(family, Family):
        return family
    return family_from(family, n=n)


def _rank_index(fam: Family) -> int:
    return fam.size if fam.tag == "full" else fam.n


# ---------------------------------------------------------------------------
# the permutation-sum oracle

def _perm_sign(p: Sequence[int]) -> int:
    sign = 1
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                sign = -sign
    return sign


def standard_poly_direct(matrices: Sequence[RatMatrix], max_k: int = 8) -> RatMatrix:
    """Signed sum of all k! ordered products."""
    k = len(matrices)
    if k > max_k:
        raise ValueError(f"{k}! terms exceed the guardrail of {max_k}!")
    if k == 0:
        raise ValueError("needs at least one matrix")
    size = matrices[0].shape
    if size[0] != size[1] or any(a.shape != size for a in matrices):
        raise ValueError("matrices must be square of one size")
    total = RatMatrix.zero(size[0])
    for p in permutations(range(k)):
        prod = matrices[p[0]]
        for i in p[1:]:
            prod = prod @ matrices[i]
        total = total + prod if _perm_sign(p) > 0 else total - prod
    return total


# ---------------------------------------------------------------------------
# report plumbing

def _witness(F: AltForm) -> dict | None:
    hit = first_nonzero(F)
    if hit is None:
        return None
    idx, coeff = hit
    return {"subset": list(idx), "coefficient": coeff}


def _run(name: str, fam: Family, body: Callable[[], tuple], config_hash: str = "") -> CheckReport:
    """``body`` returns (verdict, witness, details); budget overruns become skips."""
    with stopwatch() as ms:
        try:
            verdict, witness, details = body()
        except BudgetExceeded as exc:
            verdict, witness, details = SKIPPED, None, {"reason": str(exc)}
    return CheckReport(name, str(fam), _rank_index(fam), verdict, witness, ms[0],
                       config_hash, details)


def _zero_verdict(F: AltForm, details: dict | None = None) -> tuple:
    w = _witness(F)
    return (HOLDS if w is None else FAILS), w, details or {}


# ---------------------------------------------------------------------------
# vanishing and trace identities

def check_vanishing_power(family, n: int | None = None, k: int = 0,
                          budget: Budget = DEFAULT_BUDGET, config_hash: str = "") -> CheckReport:
    """Holds iff X^k is identically zero."""
    fam = resolve(family, n)

    def body():
        return _zero_verdict(power(make_space(fam), k, budget), {"k": k})

    return _run(f"vanishing_power[k={k}]", fam, body, config_hash)


def check_trace_vanishing(family, n: int | None = None, degree: int = 1,
                          budget: Budget = DEFAULT_BUDGET, config_hash: str = "") -> CheckReport:
    """Holds iff Tr(X^degree) is identically zero."""
    fam = resolve(family, n)
    space = make_space(fam)
    if degree > space.dim:
        raise ValueError(f"degree {degree} exceeds dim {space.dim} of {fam}")

    def body():
        return _zero_verdict(trace_form(power(space, degree, budget)), {"degree": degree})

    return _run(f"trace_vanishing[deg={degree}]", fam, body, config_hash)


# ---------------------------------------------------------------------------
# trace generators

def generator_degree(fam: Family, h: int) -> int:
    if fam.tag == "full":
        return 2 * h + 1
    if fam.tag in ("sympl_plus", "orth_plus"):
        return 4 * h + 1
    return 4 * h + 3


def generator_count(fam: Family) -> int:
    if fam.tag == "euclidean":
        raise ValueError("no trace generators on a vector space")
    if fam.tag == "full":
        return fam.size
    if fam.is_orthogonal and not fam.structure_supported:
        raise ValueError(f"{fam}: structure theorems need odd size")
    return fam.n + 1 if fam.tag == "orth_plus" else fam.n


def basis_power_range(fam: Family) -> range:
    """Exponents j of the X^j that form a free basis over the smaller invariant algebra."""
    n = _rank_index(fam)
    top = {"full": 2 * n - 1, "sympl_plus": 4 * n - 3, "sympl_minus": 4 * n - 1,
           "orth_minus": 4 * n - 1, "orth_plus": 4 * n + 1}[fam.tag]
    return range(top + 1)


@dataclass(frozen=True)
class TraceGenerator:
    space: MatrixSpaceSpec
    index: int
    degree: int
    form: AltForm

    def __str__(self) -> str:
        return f"T{self.index}"


def invariant_generators(family, n: int | None = None,
                         budget: Budget = DEFAULT_BUDGET) -> list[TraceGenerator]:
    fam = resolve(family, n)
    space = make_space(fam)
    out = []
    for h in range(generator_count(fam)):
        deg = generator_degree(fam, h)
        form = trace_form(power(space, deg, budget))
        if form.is_zero():
            raise ArithmeticError(f"T{h} = Tr(X^{deg}) vanishes on {fam}")
        out.append(TraceGenerator(space, h, deg, form))
    return out


def monomial(gens: Sequence[TraceGenerator], space: MatrixSpaceSpec) -> AltForm:
    return wedge_all([g.form for g in gens], space)


def _per_degree_ranks(forms: Sequence[AltForm]) -> dict[int, tuple[int, int]]:
    """degree -> (number of forms, rank of their coefficient vectors)."""
    groups: dict[int, list[AltForm]] = defaultdict(list)
    for F in forms:
        groups[F.degree].append(F)
    out = {}
    for d in sorted(groups):
        rows = [sparse_coefficients(F) for F in groups[d]]
        out[d] = (len(rows), rank(rows))
    return out


def _compare_tables(ranks: dict, expected: dict[int, int] | None, total: int) -> tuple:
    table = {d: {"count": c, "rank": r, "expected": None if expected is None else expected.get(d, 0)}
             for d, (c, r) in ranks.items()}
    if expected is not None:
        for d, e in expected.items():
            if d not in table and e:
                table[d] = {"count": 0, "rank": 0, "expected": e}
    count = sum(c for c, _ in ranks.values())
    bad = [d for d, row in sorted(table.items())
           if row["rank"] != row["count"] or (row["expected"] is not None and row["expected"] != row["count"])]
    details = {"per_degree": dict(sorted(table.items())), "total": count, "closed_form": total}
    if bad or count != total:
        d = bad[0] if bad else None
        witness = {"degree": d, "row": table.get(d), "total": count, "closed_form": total}
        return FAILS, witness, details
    return HOLDS, None, details


def certify_exterior_invariants(family, n: int | None = None, budget: Budget = DEFAULT_BUDGET,
                                config_hash: str = "") -> CheckReport:
    """All products of distinct generators are independent and fill the invariant count."""
    fam = resolve(family, n)

    def body():
        space = make_space(fam)
        gens = invariant_generators(fam, budget=budget)
        forms = [monomial(c, space) for r in range(len(gens) + 1) for c in combinations(gens, r)]
        expected = None if fam.tag == "full" else diagrams.invariant_dims(fam)
        return _compare_tables(_per_degree_ranks(forms), expected,
                               diagrams.closed_form(fam, kind="invariants"))

    return _run("exterior_invariants", fam, body, config_hash)


def basis_forms(fam: Family, budget: Budget = DEFAULT_BUDGET) -> list[tuple[tuple, int, AltForm]]:
    """(generator indices, j, M ^ X^j) over monomials M in all but the top generator."""
    space = make_space(fam)
    gens = invariant_generators(fam, budget=budget)[:-1]
    out = []
    for r in range(len(gens) + 1):
        for c in combinations(gens, r):
            M = embed_scalar(monomial(c, space))
            for j in basis_power_range(fam):
                out.append((tuple(g.index for g in c), j, wedge(M, power(space, j, budget))))
    return out


def certify_basis(family, n: int | None = None, budget: Budget = DEFAULT_BUDGET,
                  config_hash: str = "") -> CheckReport:
    """Free-module basis: full rank per degree and the covariant count is reached."""
    fam = resolve(family, n)

    def body():
        forms = [F for _, _, F in basis_forms(fam, budget)]
        expected = None if fam.tag == "full" else diagrams.covariant_dims(fam)
        return _compare_tables(_per_degree_ranks(forms), expected, diagrams.closed_form(fam))

    return _run("free_basis", fam, body, config_hash)


def parity_sign(fam: Family, k: int) -> int:
    """Sign e with (coefficient of X^k)* = e (coefficient), * the family's involution."""
    s = fam.involution_sign
    return s ** k * (-1) ** (k * (k - 1) // 2)


def check_parity_split(family, n: int | None = None, budget: Budget = DEFAULT_BUDGET,
                       config_hash: str = "") -> CheckReport:
    """Every coefficient of each basis power is fixed or negated by the involution as predicted."""
    fam = resolve(family, n)
    if fam.involution_sign is None:
        raise ValueError(f"{fam} has no involution")

    def body():
        space = make_space(fam)
        split = {"fixed": [], "negated": []}
        for j in basis_power_range(fam):
            e = parity_sign(fam, j)
            split["fixed" if e > 0 else "negated"].append(j)
            for key, A in power(space, j, budget).table.items():
                if involution(fam, A) != A.scale(e):
                    return FAILS, {"power": j, "subset": list(indices_of(key)), "coefficient": A}, split
        return HOLDS, None, split

    return _run("parity_split", fam, body, config_hash)


# ---------------------------------------------------------------------------
# relations in A[t]

@dataclass(frozen=True)
class Term:
    coeff: Rational
    gens: tuple  # generator indices, wedged left to right
    t_power: int


class RelationExpr:
    """A formal element sum c * T_{i1}..T_{ir} t^p of A[t]."""

    def __init__(self, family: Family, terms: Sequence, declared_degree: int, validate: bool = True):
        self.family = family
        self.declared_degree = declared_degree
        count = generator_count(family)
        clean = []
        for t in terms:
            t = t if isinstance(t, Term) else Term(*t)
            if any(not 0 <= g < count for g in t.gens):
                raise IndexError(f"generator index out of range in {t.gens} for {family}")
            if t.t_power < 0:
                raise ValueError("negative power of t")
            if rat(t.coeff) != 0:
                clean.append(Term(rat(t.coeff), tuple(t.gens), t.t_power))
        self.terms = tuple(clean)
        if validate and not self.is_homogeneous:
            raise InhomogeneousRelation(
                f"term degrees {sorted(set(self.term_degrees()))} differ from {declared_degree}")

    def term_degree(self, t: Term) -> int:
        return sum(generator_degree(self.family, g) for g in t.gens) + t.t_power

    def term_degrees(self) -> list[int]:
        return [self.term_degree(t) for t in self.terms]

    @property
    def is_homogeneous(self) -> bool:
        return all(d == self.declared_degree for d in self.term_degrees())

    def coefficients(self) -> dict[tuple, Rational]:
        return {(t.gens, t.t_power): t.coeff for t in self.terms}

    def normalized(self, key: tuple) -> dict[tuple, Rational] | None:
        """Coefficients scaled so the term ``key`` has coefficient 1; None if absent."""
        c = self.coefficients()
        if key not in c:
            return None
        lead = c[key]
        return {k: rat(Fraction(v) / lead) for k, v in c.items()}

    def __str__(self) -> str:
        parts = []
        for t in self.terms:
            mono = "".join(f"T{g}" for g in t.gens)
            tp = "" if t.t_power == 0 else ("t" if t.t_power == 1 else f"t^{t.t_power}")
            body = "*".join(x for x in (mono, tp) if x) or "1"
            parts.append(f"{t.coeff}*{body}")
        return " + ".join(parts) if parts else "0"

    def __repr__(self) -> str:
        return f"RelationExpr({self.family}, {self})"


def printed_relation(family, n: int | None = None, validate: bool = True) -> RelationExpr:
    """The kernel generator as commonly stated for each family, with T's left of t."""
    fam = resolve(family, n)
    r = _rank_index(fam)
    half = Fraction(1, 2)
    tag = fam.tag
    if tag == "full":
        terms = [(1, (r - i - 1,), 2 * i) for i in range(r)] + [(-r, (), 2 * r - 1)]
        deg = 2 * r - 1
    elif tag == "sympl_plus":
        terms = [(r, (), 4 * r - 3)] + [(-half, (r - i - 1,), 4 * i) for i in range(r)]
        deg = 4 * r - 3
    elif tag == "sympl_minus":
        terms = [(1, (r - i - 1,), 4 * i) for i in range(r)] + [(-2 * r, (), 4 * r - 1)]
        deg = 4 * r - 1
    elif tag == "orth_minus":
        terms = [(2 * r + 1, (), 4 * r - 1)] + [(-1, (r - i - 1,), 4 * i) for i in range(r)]
        deg = 4 * r - 1
    elif tag == "orth_plus":
        # as stated this one mixes degrees 4n+1 and 4n+3
        terms = [(2 * r + 2, (), 4 * r + 1)] + [(-1, (r - i,), 4 * i + 2) for i in range(r + 1)]
        deg = 4 * r + 1
    else:
        raise ValueError(f"no relation for {fam}")
    return RelationExpr(fam, terms, deg, validate=validate)


def _parity_consistent(expr: RelationExpr) -> bool:
    """Every term is a product of odd-degree generators times an even power of t, or has
    no generators; reordering factors then introduces no sign."""
    return all(not t.gens or t.t_power % 2 == 0 for t in expr.terms)


def apply_pi(expr: RelationExpr, budget: Budget = DEFAULT_BUDGET) -> AltForm:
    """Substitute t -> X: sum of c * (T_i1 ^ .. ^ T_ir) ^ X^p as a matrix-valued form."""
    if not expr.is_homogeneous:
        raise InhomogeneousRelation(f"cannot map an inhomogeneous expression: {expr}")
    fam = expr.family
    space = make_space(fam)
    m = fam.ambient_size
    gens = {g.index: g for g in invariant_generators(fam, budget=budget)} if any(t.gens for t in expr.terms) else {}
    total = zero_form(space, expr.declared_degree, (m, m))
    for t in expr.terms:
        M = embed_scalar(monomial([gens[i] for i in t.gens], space)) if t.gens else unit_form(space)
        total = total + wedge(M, power(space, t.t_power, budget)).scale(t.coeff)
    return total


def verify_relation(family, n: int | None = None, budget: Budget = DEFAULT_BUDGET,
                    config_hash: str = "") -> CheckReport:
    """The family's kernel generator maps to zero (orth_plus: the derived generator)."""
    fam = resolve(family, n)

    def body():
        printed = printed_relation(fam, validate=False)
        if printed.is_homogeneous:
            if not _parity_consistent(printed):
                raise ArithmeticError(f"term ordering of {printed} is sign-sensitive")
            return _zero_verdict(apply_pi(printed, budget), {"relation": str(printed)})
        derived = derive_relation(fam, budget=budget)
        verdict, witness, details = _zero_verdict(apply_pi(derived.expr, budget))
        details.update(derived.as_dict())
        if not derived.unique:
            return FAILS, {"reason": "derived relation is not unique"}, details
        return verdict, witness, details

    return _run("relation", fam, body, config_hash)


@dataclass
class DerivedRelation:
    family: Family
    top: int
    expr: RelationExpr  # T_top - sum c M t^j, which maps to zero
    solution: dict  # (generator indices, j) -> c in T_top = sum c M X^j
    unique: bool
    printed_homogeneous: bool
    printed_match: bool

    def as_dict(self) -> dict:
        return {
            "derived": str(self.expr),
            "solution": [{"gens": list(g), "power": j, "coeff": c}
                         for (g, j), c in sorted(self.solution.items(), key=lambda kv: (kv[0][1], kv[0][0]))],
            "unique": self.unique,
            "homogeneous": self.expr.is_homogeneous,
            "printed_homogeneous": self.printed_homogeneous,
            "printed_match": self.printed_match,
        }


def derive_relation(family, n: int | None = None, budget: Budget = DEFAULT_BUDGET) -> DerivedRelation:
    """Solve T_top = sum c * (monomial in lower generators) ^ X^j exactly."""
    fam = resolve(family, n)
    space = make_space(fam)
    gens = invariant_generators(fam, budget=budget)
    top = gens[-1]
    lower = gens[:-1]
    D = top.degree
    unknowns = []
    columns = []
    for r in range(len(lower) + 1):
        for c in combinations(lower, r):
            j = D - sum(g.degree for g in c)
            if j < 0 or j not in basis_power_range(fam):
                continue
            F = wedge(embed_scalar(monomial(c, space)), power(space, j, budget))
            unknowns.append((tuple(g.index for g in c), j))
            columns.append(sparse_coefficients(F))
    target = sparse_coefficients(embed_scalar(top.form))
    size = max([0] + [max(col, default=-1) + 1 for col in columns + [target]])
    rows: list[dict] = [dict() for _ in range(size)]
    for c, col in enumerate(columns):
        for i, v in col.items():
            rows[i][c] = v
    used = [i for i in range(size) if rows[i] or target.get(i)]
    sol = solve([rows[i] for i in used], [target.get(i, 0) for i in used], ncols=len(columns))
    if sol is None:
        raise InconsistentSystem(f"T{top.index} is not in the span of the candidate products on {fam}")
    solution = {u: c for u, c in zip(unknowns, sol.x) if c}
    terms = [(1, (top.index,), 0)] + [(-c, g, j) for (g, j), c in solution.items()]
    expr = RelationExpr(fam, terms, D)
    printed = printed_relation(fam, validate=False)
    match = False
    if printed.is_homogeneous:
        norm = printed.normalized(((top.index,), 0))
        match = norm == expr.normalized(((top.index,), 0))
    return DerivedRelation(fam, top.index, expr, solution, sol.unique,
                           printed.is_homogeneous, match)


def shifted_relation(family, n: int | None = None, j: int = 1) -> RelationExpr:
    """Y^j times the sympl_minus generator with the top power of Y dropped.

    Y^j T_{n-1} = -sum_{i>=1} Y^(4i+j) T_{n-i-1}, written with T's on the left;
    moving Y^j past an odd generator costs the same sign on both sides.  Terms
    whose generator index would be negative are absent.
    """
    fam = resolve(family, n)
    if fam.tag != "sympl_minus":
        raise ValueError("shifted relation is stated for sympl_minus")
    r = fam.n
    upper = min(r - 1, r - j // 4)
    terms = [(1, (r - i - 1,), 4 * i + j) for i in range(upper + 1)]
    return RelationExpr(fam, terms, 4 * r - 1 + j)


def derived_consequence_checks(family, n: int | None = None, budget: Budget = DEFAULT_BUDGET,
                               config_hash: str = "") -> list[CheckReport]:
    """Consequences of multiplying the relation by powers of t."""
    fam = resolve(family, n)
    r = _rank_index(fam)
    if fam.tag == "sympl_minus":
        reports = []
        for j in range(1, 4):
            expr = shifted_relation(fam, j=j)

            def body(expr=expr, j=j):
                return _zero_verdict(apply_pi(expr, budget), {"j": j, "relation": str(expr)})

            reports.append(_run(f"shifted_relation[j={j}]", fam, body, config_hash))
        return reports
    k = {"full": 2 * r, "sympl_plus": 4 * r - 2, "orth_minus": 4 * r, "orth_plus": 4 * r + 2}[fam.tag]
    return [check_vanishing_power(fam, k=k, budget=budget, config_hash=config_hash)]


def structure_series(family, n: int | None = None, kind: str = "covariants") -> dict[int, int]:
    """Per-degree dimensions predicted by the structure theorems.

    Invariants: exterior algebra on the generators.  Covariants: free module over
    the algebra on all but the top generator, with basis X^j for j in the basis range.
    """
    fam = resolve(family, n)
    degrees = [generator_degree(fam, h) for h in range(generator_count(fam))]
    if kind == "covariants":
        degrees = degrees[:-1]
    elif kind != "invariants":
        raise ValueError(f"unknown kind {kind!r}")
    series = {0: 1}
    for d in degrees:
        nxt = dict(series)
        for k, c in series.items():
            nxt[k + d] = nxt.get(k + d, 0) + c
        series = nxt
    if kind == "covariants":
        out: dict[int, int] = {}
        for k, c in series.items():
            for j in basis_power_range(fam):
                out[k + j] = out.get(k + j, 0) + c
        series = out
    return dict(sorted(series.items()))
