"""Alternating multilinear maps on a based vector space with scalar or matrix values.

A degree-k form is stored by its values on increasing basis tuples
``(e_i1, ..., e_ik)``, keyed by the bitmask of ``{i1, ..., ik}``.  Absent keys
are zero and zero coefficients are pruned after every operation, so a form
is zero exactly when its table is empty.

The product is the shuffle product

    (G ^ H)(v_1..v_{h+k}) = sum over (h,k)-shuffles  sign * G(..) H(..)

with the left factor's value multiplied on the left.  On a matrix space the
generic element ``X`` (``X(x) = x``) satisfies ``X^k = St_k``.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Sequence

from .config import DEFAULT_BUDGET, Budget, BudgetExceeded
from .exact_linalg import RatMatrix, Rational, det, rat
from .matspaces import MatrixSpaceSpec

Scalar = None  # value_shape of scalar-valued forms


def mask_of(indices: Sequence[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def indices_of(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def subsets(d: int, k: int) -> list[int]:
    """k-subsets of range(d) as bitmasks, in lexicographic order of index tuples."""
    return [mask_of(c) for c in combinations(range(d), k)]


def shuffle_sign(s1: int, s2: int) -> int:
    """(-1) ** #{(a, b) in s1 x s2 : a > b}."""
    inv = 0
    while s2:
        low = s2 & -s2
        b = low.bit_length() - 1
        inv += (s1 >> (b + 1)).bit_count()
        s2 ^= low
    return -1 if inv & 1 else 1


class AltForm:
    """Immutable alternating form; see module docstring for the storage layout."""

    __slots__ = ("space", "degree", "value_shape", "table")

    def __init__(self, space: MatrixSpaceSpec, degree: int, value_shape, table: dict):
        if degree < 0:
            raise ValueError("negative degree")
        self.space = space
        self.degree = degree
        self.value_shape = tuple(value_shape) if value_shape is not None else None
        clean = {}
        for key, v in table.items():
            if key.bit_count() != degree or key >> space.dim:
                raise ValueError(f"subset key {key:b} invalid for degree {degree}")
            if self.value_shape is None:
                if isinstance(v, RatMatrix):
                    raise TypeError("matrix coefficient in a scalar form")
                v = rat(v)
                if v:
                    clean[key] = v
            else:
                if not isinstance(v, RatMatrix) or v.shape != self.value_shape:
                    raise TypeError("coefficient shape does not match value_shape")
                if not v.is_zero():
                    clean[key] = v
        self.table = clean

    @classmethod
    def _trusted(cls, space, degree, value_shape, table) -> "AltForm":
        obj = cls.__new__(cls)
        obj.space = space
        obj.degree = degree
        obj.value_shape = value_shape
        obj.table = table
        return obj

    @property
    def is_scalar(self) -> bool:
        return self.value_shape is None

    @property
    def value_kind(self) -> str:
        return "scalar" if self.is_scalar else f"matrix{self.value_shape}"

    def is_zero(self) -> bool:
        return not self.table

    def coefficient(self, indices: Sequence[int]):
        """Value on the basis tuple in the given (any) order."""
        idx = list(indices)
        if len(idx) != self.degree:
            raise ValueError("wrong number of indices")
        if len(set(idx)) != len(idx):
            return self._zero_value()
        sign = _perm_sign_to_sorted(idx)
        v = self.table.get(mask_of(idx))
        if v is None:
            return self._zero_value()
        return v if sign > 0 else _neg(v)

    def _zero_value(self):
        return 0 if self.is_scalar else RatMatrix.zero(*self.value_shape)

    def _compatible(self, other: "AltForm") -> None:
        if self.space != other.space:
            raise ValueError(f"forms live on different spaces: {self.space} vs {other.space}")
        if self.degree != other.degree or self.value_shape != other.value_shape:
            raise ValueError("forms have different degree or value kind")

    def __add__(self, other: "AltForm") -> "AltForm":
        self._compatible(other)
        acc = _Accumulator(self.value_shape)
        for k, v in self.table.items():
            acc.add(k, v, 1)
        for k, v in other.table.items():
            acc.add(k, v, 1)
        return AltForm._trusted(self.space, self.degree, self.value_shape, acc.result())

    def __neg__(self) -> "AltForm":
        return self.scale(-1)

    def __sub__(self, other: "AltForm") -> "AltForm":
        return self + (-other)

    def scale(self, c) -> "AltForm":
        c = rat(c)
        if c == 0:
            return AltForm._trusted(self.space, self.degree, self.value_shape, {})
        if self.is_scalar:
            table = {k: rat(c * v) for k, v in self.table.items()}
        else:
            table = {k: v.scale(c) for k, v in self.table.items()}
        return AltForm._trusted(self.space, self.degree, self.value_shape, table)

    def __rmul__(self, c) -> "AltForm":
        return self.scale(c)

    def __xor__(self, other: "AltForm") -> "AltForm":
        return wedge(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AltForm):
            return NotImplemented
        return (self.space == other.space and self.degree == other.degree
                and self.value_shape == other.value_shape and self.table == other.table)

    def __hash__(self):
        return hash((self.space.key, self.degree, self.value_shape, frozenset(self.table)))

    def __repr__(self) -> str:
        return (f"AltForm({self.space}, degree={self.degree}, {self.value_kind}, "
                f"{len(self.table)} nonzero)")


def _neg(v):
    return -v


def _perm_sign_to_sorted(idx: list[int]) -> int:
    sign = 1
    for i in range(len(idx)):
        for j in range(i + 1, len(idx)):
            if idx[i] > idx[j]:
                sign = -sign
    return sign


class _Accumulator:
    """Sums coefficients per subset using mutable buffers; prunes zeros at the end."""

    def __init__(self, value_shape):
        self.value_shape = value_shape
        self.buf: dict[int, object] = {}

    def add(self, key: int, v, sign: int) -> None:
        buf = self.buf
        if self.value_shape is None:
            buf[key] = buf.get(key, 0) + (v if sign > 0 else -v)
            return
        cur = buf.get(key)
        e = v.entries
        if cur is None:
            buf[key] = list(e) if sign > 0 else [-x for x in e]
        elif sign > 0:
            for i, x in enumerate(e):
                if x:
                    cur[i] += x
        else:
            for i, x in enumerate(e):
                if x:
                    cur[i] -= x

    def result(self) -> dict:
        out = {}
        if self.value_shape is None:
            for k, v in self.buf.items():
                if v:
                    out[k] = rat(v)
            return out
        r, c = self.value_shape
        for k, e in self.buf.items():
            if any(e):
                if any(isinstance(x, Fraction) for x in e):
                    e = [rat(x) for x in e]
                out[k] = RatMatrix._raw(r, c, tuple(e))
        return out


# ---------------------------------------------------------------------------
# constructors

def zero_form(space: MatrixSpaceSpec, degree: int, value_shape=None) -> AltForm:
    return AltForm._trusted(space, degree, value_shape, {})


def constant_form(space: MatrixSpaceSpec, value) -> AltForm:
    """Degree-0 form with the given value (a scalar or a matrix)."""
    if isinstance(value, RatMatrix):
        return AltForm(space, 0, value.shape, {0: value})
    return AltForm(space, 0, None, {0: value})


def unit_form(space: MatrixSpaceSpec) -> AltForm:
    """The identity-matrix valued degree-0 form (unit of the covariant algebra)."""
    m = space.ambient_size
    return AltForm._trusted(space, 0, (m, m), {0: RatMatrix.identity(m)})


def generic_element(space: MatrixSpaceSpec) -> AltForm:
    """The degree-1 form x -> x."""
    shape = space.value_shape
    return AltForm(space, 1, shape, {1 << i: b for i, b in enumerate(space.basis)})


def scalar_form(space: MatrixSpaceSpec, degree: int, table: dict) -> AltForm:
    """Scalar form from a dict keyed by bitmasks or index tuples."""
    t = {}
    for k, v in table.items():
        if isinstance(k, tuple):
            sign = _perm_sign_to_sorted(list(k))
            k = mask_of(k)
            v = rat(v) * sign
        t[k] = t.get(k, 0) + v
    return AltForm(space, degree, None, t)


# ---------------------------------------------------------------------------
# products

def _product(a, b):
    if isinstance(a, RatMatrix):
        if isinstance(b, RatMatrix):
            return a @ b
        return a.scale(b)
    if isinstance(b, RatMatrix):
        return b.scale(a)
    return a * b


def _product_shape(G: AltForm, H: AltForm):
    if G.value_shape is None:
        return H.value_shape
    if H.value_shape is None:
        return G.value_shape
    if G.value_shape[1] != H.value_shape[0]:
        raise ValueError(f"values of shapes {G.value_shape} and {H.value_shape} do not multiply")
    return (G.value_shape[0], H.value_shape[1])


def wedge(G: AltForm, H: AltForm) -> AltForm:
    if G.space != H.space:
        raise ValueError(f"forms live on different spaces: {G.space} vs {H.space}")
    shape = _product_shape(G, H)
    space = G.space
    d = space.dim
    h, k = G.degree, H.degree
    if h + k > d or not G.table or not H.table:
        return zero_form(space, h + k, shape)
    acc = _Accumulator(shape)
    htab = H.table
    if len(htab) <= comb(d - h, k):
        for s1, g in G.table.items():
            for s2, hv in htab.items():
                if s1 & s2:
                    continue
                acc.add(s1 | s2, _product(g, hv), shuffle_sign(s1, s2))
    else:
        full = (1 << d) - 1
        for s1, g in G.table.items():
            free = indices_of(full & ~s1)
            for c in combinations(free, k):
                s2 = mask_of(c)
                hv = htab.get(s2)
                if hv is None:
                    continue
                acc.add(s1 | s2, _product(g, hv), shuffle_sign(s1, s2))
    return AltForm._trusted(space, h + k, shape, acc.result())


def wedge_all(forms: Sequence[AltForm], space: MatrixSpaceSpec | None = None) -> AltForm:
    """Left-to-right product; the empty product is the scalar 1 on ``space``."""
    if not forms:
        if space is None:
            raise ValueError("empty product needs a space")
        return constant_form(space, 1)
    out = forms[0]
    for f in forms[1:]:
        out = wedge(out, f)
    return out


def add(F: AltForm, G: AltForm) -> AltForm:
    return F + G


def scalar_multiply(c, F: AltForm) -> AltForm:
    return F.scale(c)


def is_zero(F: AltForm) -> bool:
    return F.is_zero()


def equals(F: AltForm, G: AltForm) -> bool:
    return F == G


# ---------------------------------------------------------------------------
# powers of the generic element

_POWERS: dict[tuple, list[AltForm]] = {}


def estimated_entries(space: MatrixSpaceSpec, k: int) -> int:
    r, c = space.value_shape
    return sum(comb(space.dim, j) for j in range(min(k, space.dim) + 1)) * r * c


def check_budget(space: MatrixSpaceSpec, k: int, budget: Budget = DEFAULT_BUDGET) -> None:
    if budget.force:
        return
    if space.dim > budget.max_dim:
        raise BudgetExceeded(f"{space}: dimension {space.dim} exceeds max_dim {budget.max_dim}")
    est = estimated_entries(space, k)
    if est > budget.max_table_entries:
        raise BudgetExceeded(
            f"{space}: powers up to {k} need ~{est} table entries "
            f"(budget {budget.max_table_entries})")


def power(space: MatrixSpaceSpec, k: int, budget: Budget = DEFAULT_BUDGET) -> AltForm:
    """X^k computed as X^(k-1) ^ X, memoizing every lower power per space."""
    if k < 0:
        raise ValueError("negative power")
    m = space.ambient_size
    if k > space.dim:
        return zero_form(space, k, (m, m))
    # checked even on a cache hit so verdicts do not depend on call history
    check_budget(space, k, budget)
    cache = _POWERS.setdefault(space.key, [])
    if len(cache) > k:
        return cache[k]
    if not cache:
        cache.append(unit_form(space))
    X = generic_element(space)
    while len(cache) <= k:
        cache.append(wedge(cache[-1], X))
    return cache[k]


def clear_power_cache() -> None:
    _POWERS.clear()


# ---------------------------------------------------------------------------
# trace, embedding, evaluation, flattening

def trace_form(F: AltForm) -> AltForm:
    if F.is_scalar:
        raise TypeError("trace of a scalar-valued form")
    table = {}
    for k, v in F.table.items():
        t = v.trace()
        if t:
            table[k] = t
    return AltForm._trusted(F.space, F.degree, None, table)


def embed_scalar(F: AltForm, size: int | None = None) -> AltForm:
    """Scalar form tensored with the identity matrix."""
    if not F.is_scalar:
        raise TypeError("embed_scalar expects a scalar-valued form")
    m = F.space.ambient_size if size is None else size
    ident = RatMatrix.identity(m)
    return AltForm._trusted(F.space, F.degree, (m, m),
                            {k: ident.scale(v) for k, v in F.table.items()})


def _coords_of(space: MatrixSpaceSpec, v) -> tuple:
    if isinstance(v, RatMatrix):
        return space.coords(v)
    v = tuple(rat(x) for x in v)
    if len(v) != space.dim:
        raise ValueError(f"vector has {len(v)} coordinates, space has dimension {space.dim}")
    return v


def evaluate(F: AltForm, vectors: Sequence):
    """F(v_1, ..., v_k) for vectors given as coordinates or as elements of the space."""
    vecs = [_coords_of(F.space, v) for v in vectors]
    if len(vecs) != F.degree:
        raise ValueError(f"form of degree {F.degree} applied to {len(vecs)} vectors")
    if F.degree == 0:
        return F.table.get(0, F._zero_value())
    acc = _Accumulator(F.value_shape)
    for key, coeff in F.table.items():
        idx = indices_of(key)
        minor = RatMatrix.from_rows([[v[i] for i in idx] for v in vecs])
        c = det(minor)
        if c:
            acc.add(0, _product(c, coeff) if F.is_scalar else coeff.scale(c), 1)
    res = acc.result().get(0)
    return F._zero_value() if res is None else res


def coefficient_vector(F: AltForm) -> list[Rational]:
    """Flatten over subsets in lexicographic order, then matrix entries row-major."""
    out: list[Rational] = []
    width = 1 if F.is_scalar else F.value_shape[0] * F.value_shape[1]
    zero = [0] * width
    for key in subsets(F.space.dim, F.degree) if F.degree <= F.space.dim else []:
        v = F.table.get(key)
        if v is None:
            out.extend(zero)
        elif F.is_scalar:
            out.append(v)
        else:
            out.extend(v.entries)
    return out


def sparse_coefficients(F: AltForm) -> dict[int, Rational]:
    """Same coordinates as :func:`coefficient_vector`, as a sparse dict."""
    width = 1 if F.is_scalar else F.value_shape[0] * F.value_shape[1]
    position = {key: i for i, key in enumerate(subsets(F.space.dim, F.degree))}
    out = {}
    for key, v in F.table.items():
        base = position[key] * width
        if F.is_scalar:
            out[base] = v
        else:
            for j, x in enumerate(v.entries):
                if x:
                    out[base + j] = x
    return out


def first_nonzero(F: AltForm):
    """(indices, coefficient) of the lexicographically first nonzero entry, or None."""
    if not F.table:
        return None
    key = min(F.table, key=indices_of)
    return indices_of(key), F.table[key]
