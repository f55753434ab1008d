"""Matrix subspaces, their involutions, and the Lie algebras acting on them.

Families and their size parameter:

========================  ==========  ===========================
family                    parameter   space
========================  ==========  ===========================
``full(m)``               m           all m x m matrices
``sympl_plus(n)``         n           A^s = A in M_2n
``sympl_minus(n)``        n           A^s = -A in M_2n  (= sp(2n))
``orth_plus(m)``          m           symmetric m x m
``orth_minus(m)``         m           antisymmetric m x m
``euclidean(m)``          m           column vectors C^m
========================  ==========  ===========================

``A^s = -J A^t J`` with ``J = (0 Id; -Id 0)``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache

from .exact_linalg import CoordinateMap, RatMatrix, Rational, block_matrix, rank

FAMILIES = ("full", "sympl_plus", "sympl_minus", "orth_plus", "orth_minus")


class FamilyError(ValueError):
    pass


@dataclass(frozen=True)
class Family:
    tag: str
    size: int

    def __post_init__(self):
        tag = self.tag.replace("-", "_")
        object.__setattr__(self, "tag", tag)
        if tag not in FAMILIES + ("euclidean",):
            raise FamilyError(f"unknown family {self.tag!r}")
        if self.size < 1:
            raise FamilyError("family size must be positive")

    @property
    def ambient_size(self) -> int:
        return 2 * self.size if self.tag.startswith("sympl") else self.size

    @property
    def n(self) -> int:
        """The rank index used in the structure theorems."""
        if self.tag.startswith("sympl") or self.tag == "full":
            return self.size
        return (self.size - 1) // 2

    @property
    def involution_sign(self) -> int | None:
        """+1 for the fixed space of the involution, -1 for the anti-fixed one."""
        if self.tag.endswith("_plus"):
            return 1
        if self.tag.endswith("_minus"):
            return -1
        return None

    @property
    def is_symplectic(self) -> bool:
        return self.tag.startswith("sympl")

    @property
    def is_orthogonal(self) -> bool:
        return self.tag.startswith("orth")

    @property
    def structure_supported(self) -> bool:
        """Orthogonal structure theorems are stated for odd ambient size only."""
        return not (self.is_orthogonal and self.size % 2 == 0)

    def __str__(self) -> str:
        return f"{self.tag}({self.size})"


def family_from(tag: str, n: int | None = None, m: int | None = None) -> Family:
    """Build a family from CLI-style arguments (``--n`` for symplectic, ``--m`` otherwise)."""
    tag = tag.replace("-", "_")
    if tag.startswith("sympl"):
        if n is None:
            if m is None or m % 2:
                raise FamilyError("symplectic families need --n (or an even --m)")
            n = m // 2
        return Family(tag, n)
    if m is None:
        if n is None:
            raise FamilyError("a size is required")
        if tag == "full":
            m = n
        else:
            m = 2 * n + 1
    return Family(tag, m)


@lru_cache(maxsize=None)
def J(n: int) -> RatMatrix:
    """The block matrix (0 Id; -Id 0) of size 2n."""
    z = RatMatrix.zero(n)
    i = RatMatrix.identity(n)
    return block_matrix([[z, i], [-i, z]])


@lru_cache(maxsize=None)
def J_inverse(n: int) -> RatMatrix:
    return -J(n)


def symplectic_transpose(A: RatMatrix) -> RatMatrix:
    if not A.is_square or A.rows % 2:
        raise ValueError("symplectic transpose needs a square matrix of even size")
    j = J(A.rows // 2)
    return -(j @ A.transpose() @ j)


def involution(family: Family, A: RatMatrix) -> RatMatrix:
    """The transpose defining the family: symplectic for sympl_*, ordinary for orth_*."""
    if family.is_symplectic:
        return symplectic_transpose(A)
    if family.is_orthogonal:
        return A.transpose()
    raise ValueError(f"{family} has no involution")


def in_family(family: Family, A: RatMatrix) -> bool:
    m = family.ambient_size
    if A.shape != (m, m):
        return False
    if family.tag == "full":
        return True
    return involution(family, A) == A.scale(family.involution_sign)


def _orth_basis(m: int, sign: int) -> list[RatMatrix]:
    out = []
    for i in range(m):
        for j in range(i, m):
            if i == j:
                if sign > 0:
                    out.append(RatMatrix.unit(m, i, i))
                continue
            out.append(RatMatrix.unit(m, i, j) + RatMatrix.unit(m, j, i).scale(sign))
    return out


@dataclass(frozen=True, eq=False)
class MatrixSpaceSpec:
    family: Family
    ambient_size: int
    basis: tuple
    dim: int
    _coords: CoordinateMap = field(repr=False, compare=False, default=None)

    @property
    def key(self) -> tuple:
        return (self.family.tag, self.family.size)

    def __eq__(self, other) -> bool:
        return isinstance(other, MatrixSpaceSpec) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    @property
    def value_shape(self) -> tuple[int, int]:
        return self.basis[0].shape if self.basis else (self.ambient_size, self.ambient_size)

    def coords(self, A: RatMatrix) -> tuple[Rational, ...]:
        return self._coords.coords(A)

    def contains(self, A: RatMatrix) -> bool:
        return self._coords.contains(A)

    def vector(self, coords) -> RatMatrix:
        """The element with the given coordinates."""
        if len(coords) != self.dim:
            raise ValueError("coordinate length does not match dimension")
        out = RatMatrix.zero(*self.value_shape)
        for c, b in zip(coords, self.basis):
            if c:
                out = out + b.scale(c)
        return out

    def __str__(self) -> str:
        return str(self.family)


def expected_dim(family: Family) -> int:
    m = family.ambient_size
    n = family.size
    return {
        "full": m * m,
        "sympl_plus": n * (2 * n - 1),
        "sympl_minus": n * (2 * n + 1),
        "orth_minus": m * (m - 1) // 2,
        "orth_plus": m * (m + 1) // 2,
        "euclidean": m,
    }[family.tag]


@lru_cache(maxsize=None)
def _make_space(tag: str, size: int) -> MatrixSpaceSpec:
    family = Family(tag, size)
    m = family.ambient_size
    if tag == "full":
        basis = [RatMatrix.unit(m, i, j) for i in range(m) for j in range(m)]
    elif tag == "orth_plus":
        basis = _orth_basis(m, 1)
    elif tag == "orth_minus":
        basis = _orth_basis(m, -1)
    elif tag == "sympl_plus":
        # A -> A J is an isomorphism of M^+ onto antisymmetric matrices
        basis = [s @ J_inverse(size) for s in _orth_basis(m, -1)]
    elif tag == "sympl_minus":
        basis = [s @ J_inverse(size) for s in _orth_basis(m, 1)]
    else:  # euclidean
        basis = [RatMatrix.unit(m, i, 0, cols=1) for i in range(m)]
    if tag.startswith("orth") and m % 2 == 0:
        warnings.warn(f"{family}: even orthogonal size is supported by the oracle only",
                      stacklevel=3)
    space = MatrixSpaceSpec(family, m, tuple(basis), len(basis), CoordinateMap(basis))
    assert space.dim == expected_dim(family)
    return space


def make_space(family: Family | str, size: int | None = None) -> MatrixSpaceSpec:
    if not isinstance(family, Family):
        family = Family(family, size)
    return _make_space(family.tag, family.size)


# ---------------------------------------------------------------------------
# Lie algebras

@dataclass(frozen=True, eq=False)
class LieAlgebraSpec:
    kind: str
    size: int
    generators: tuple

    @property
    def dim(self) -> int:
        return len(self.generators)

    @property
    def matrix_size(self) -> int:
        return self.generators[0].rows

    def bracket(self, a: RatMatrix, b: RatMatrix) -> RatMatrix:
        return ad_action(a, b)

    def is_closed(self) -> bool:
        """Every bracket of two generators lies in their span."""
        cm = CoordinateMap(list(self.generators))
        g = self.generators
        return all(cm.contains(ad_action(g[i], g[j]))
                   for i in range(len(g)) for j in range(i + 1, len(g)))

    def __str__(self) -> str:
        return f"{self.kind}({self.size})"


@lru_cache(maxsize=None)
def _lie(kind: str, size: int) -> LieAlgebraSpec:
    if kind == "sp":
        if size % 2:
            raise ValueError("sp(m) needs even m")
        gens = make_space("sympl_minus", size // 2).basis
    elif kind == "so":
        gens = tuple(_orth_basis(size, -1))
    elif kind == "gl":
        gens = tuple(RatMatrix.unit(size, i, j) for i in range(size) for j in range(size))
    else:
        raise ValueError(f"unknown Lie algebra kind {kind!r}")
    return LieAlgebraSpec(kind, size, tuple(gens))


def lie_generators(kind: str, size: int | None = None) -> LieAlgebraSpec:
    """Basis of sp(size), so(size) or gl(size); also accepts ``"sp(4)"``-style strings."""
    if size is None:
        kind, _, rest = kind.partition("(")
        size = int(rest.rstrip(")"))
    return _lie(kind, size)


def ad_action(g: RatMatrix, A: RatMatrix) -> RatMatrix:
    if g.shape != A.shape:
        raise ValueError(f"size mismatch {g.shape} vs {A.shape}")
    return g @ A - A @ g


def trace(A: RatMatrix) -> Rational:
    return A.trace()


def project_traceless(A: RatMatrix) -> RatMatrix:
    if not A.is_square:
        raise ValueError("traceless projection of a non-square matrix")
    t = A.trace()
    if not t:
        return A
    from fractions import Fraction
    return A - RatMatrix.identity(A.rows).scale(Fraction(t) / A.rows)


def symmetry_algebra(family: Family) -> LieAlgebraSpec:
    """The Lie algebra acting by conjugation on the family's space."""
    m = family.ambient_size
    if family.tag == "full":
        return lie_generators("gl", m)
    if family.is_symplectic:
        return lie_generators("sp", m)
    return lie_generators("so", m)


def spans_direct_sum(*spaces: MatrixSpaceSpec) -> int:
    """Rank of the union of the given bases (as flattened vectors)."""
    rows = [b.entries for s in spaces for b in s.basis]
    return rank(rows)
