"""Exact rational scalars, dense matrices and sparse elimination.

Scalars are plain Python ``int`` when integral and ``fractions.Fraction``
otherwise; :func:`rat` performs that normalization.  Nothing in the package
ever touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from numbers import Rational as _RationalABC
from typing import Iterable, NamedTuple, Sequence, Union

Rational = Union[int, Fraction]


def rat(x) -> Rational:
    """Normalize ``x`` to an exact rational: ``int`` if integral, else ``Fraction``."""
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, _RationalABC):
        return rat(Fraction(x.numerator, x.denominator))
    if isinstance(x, str):
        return rat(Fraction(x))
    raise TypeError(f"not an exact rational: {x!r}")


def rat_str(x: Rational) -> str:
    return str(x)


class RatMatrix:
    """Immutable dense matrix with exact rational entries (row-major)."""

    __slots__ = ("rows", "cols", "entries", "_hash", "_nz")

    def __init__(self, rows: int, cols: int, entries: Iterable):
        entries = tuple(rat(e) for e in entries)
        if len(entries) != rows * cols:
            raise ValueError(f"expected {rows * cols} entries, got {len(entries)}")
        self.rows = rows
        self.cols = cols
        self.entries = entries
        self._hash = None
        self._nz = None

    @classmethod
    def _raw(cls, rows: int, cols: int, entries: tuple) -> "RatMatrix":
        # entries already normalized
        obj = cls.__new__(cls)
        obj.rows = rows
        obj.cols = cols
        obj.entries = entries
        obj._hash = None
        obj._nz = None
        return obj

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "RatMatrix":
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), ncols, [e for r in rows for e in r])

    @classmethod
    def zero(cls, rows: int, cols: int | None = None) -> "RatMatrix":
        cols = rows if cols is None else cols
        return cls._raw(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls._raw(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def unit(cls, n: int, i: int, j: int, cols: int | None = None) -> "RatMatrix":
        """Elementary matrix E_ij."""
        cols = n if cols is None else cols
        e = [0] * (n * cols)
        e[i * cols + j] = 1
        return cls._raw(n, cols, tuple(e))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, ij: tuple[int, int]) -> Rational:
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def tolist(self) -> list[list[Rational]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def _check_shape(self, other: "RatMatrix") -> None:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        self._check_shape(other)
        return RatMatrix._raw(self.rows, self.cols,
                              tuple(rat(a + b) for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        self._check_shape(other)
        return RatMatrix._raw(self.rows, self.cols,
                              tuple(rat(a - b) for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "RatMatrix":
        return RatMatrix._raw(self.rows, self.cols, tuple(-a for a in self.entries))

    def scale(self, c) -> "RatMatrix":
        c = rat(c)
        if c == 1:
            return self
        return RatMatrix._raw(self.rows, self.cols, tuple(rat(c * a) for a in self.entries))

    def __mul__(self, c) -> "RatMatrix":
        if isinstance(c, RatMatrix):
            return self @ c
        return self.scale(c)

    __rmul__ = scale

    def _row_nonzeros(self) -> list[list[tuple[int, Rational]]]:
        if self._nz is None:
            c = self.cols
            e = self.entries
            self._nz = [[(j, e[i * c + j]) for j in range(c) if e[i * c + j]]
                        for i in range(self.rows)]
        return self._nz

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        n, p = self.rows, other.cols
        out = [0] * (n * p)
        onz = other._row_nonzeros()
        a = self.entries
        k_dim = self.cols
        for i in range(n):
            base = i * p
            for k in range(k_dim):
                aik = a[i * k_dim + k]
                if not aik:
                    continue
                for j, bkj in onz[k]:
                    out[base + j] += aik * bkj
        if any(isinstance(x, Fraction) for x in out):
            out = [rat(x) for x in out]
        return RatMatrix._raw(n, p, tuple(out))

    def transpose(self) -> "RatMatrix":
        r, c, e = self.rows, self.cols, self.entries
        return RatMatrix._raw(c, r, tuple(e[i * c + j] for j in range(c) for i in range(r)))

    @property
    def T(self) -> "RatMatrix":
        return self.transpose()

    def trace(self) -> Rational:
        if not self.is_square:
            raise ValueError("trace of a non-square matrix")
        return rat(sum(self.entries[i * self.cols + i] for i in range(self.rows)))

    def is_zero(self) -> bool:
        return not any(self.entries)

    def nonzero_positions(self) -> list[tuple[int, int]]:
        c = self.cols
        return [divmod(k, c) for k, x in enumerate(self.entries) if x]

    def block(self, r0: int, r1: int, c0: int, c1: int) -> "RatMatrix":
        return RatMatrix.from_rows([self.row(i)[c0:c1] for i in range(r0, r1)])

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self.entries))
        return self._hash

    def __repr__(self) -> str:
        return f"RatMatrix({self.tolist()!r})"


def block_matrix(blocks: Sequence[Sequence[RatMatrix]]) -> RatMatrix:
    rows = []
    for brow in blocks:
        for i in range(brow[0].rows):
            rows.append([x for b in brow for x in b.row(i)])
    return RatMatrix.from_rows(rows)


@dataclass(frozen=True)
class SparseOperator:
    """Sparse linear map given by (row, col, value) triples."""

    domain_dim: int
    codomain_dim: int
    triples: tuple

    def __post_init__(self):
        seen = set()
        clean = []
        for r, c, v in self.triples:
            if not (0 <= r < self.codomain_dim and 0 <= c < self.domain_dim):
                raise ValueError(f"index ({r}, {c}) out of range")
            if (r, c) in seen:
                raise ValueError(f"duplicate entry at ({r}, {c})")
            seen.add((r, c))
            v = rat(v)
            if v:
                clean.append((r, c, v))
        object.__setattr__(self, "triples", tuple(sorted(clean)))

    @classmethod
    def from_dict(cls, domain_dim: int, codomain_dim: int, entries: dict) -> "SparseOperator":
        return cls(domain_dim, codomain_dim, tuple((r, c, v) for (r, c), v in entries.items()))

    def rows(self) -> list[dict[int, Rational]]:
        """Row-compressed form, one dict per codomain index (empty rows dropped)."""
        out: dict[int, dict[int, Rational]] = {}
        for r, c, v in self.triples:
            out.setdefault(r, {})[c] = v
        return [out[r] for r in sorted(out)]

    def to_dense(self) -> RatMatrix:
        e = [0] * (self.codomain_dim * self.domain_dim)
        for r, c, v in self.triples:
            e[r * self.domain_dim + c] = v
        return RatMatrix._raw(self.codomain_dim, self.domain_dim, tuple(e))

    def apply(self, vec: Sequence) -> list[Rational]:
        if len(vec) != self.domain_dim:
            raise ValueError("vector length does not match domain")
        out = [0] * self.codomain_dim
        for r, c, v in self.triples:
            if vec[c]:
                out[r] += v * vec[c]
        return [rat(x) for x in out]

    def __matmul__(self, other: "SparseOperator") -> "SparseOperator":
        if self.domain_dim != other.codomain_dim:
            raise ValueError("dimension mismatch in composition")
        by_row: dict[int, list] = {}
        for r, c, v in other.triples:
            by_row.setdefault(r, []).append((c, v))
        acc: dict[tuple[int, int], Rational] = {}
        for r, k, v in self.triples:
            for c, w in by_row.get(k, ()):
                acc[(r, c)] = acc.get((r, c), 0) + v * w
        return SparseOperator.from_dict(other.domain_dim, self.codomain_dim, acc)

    def __sub__(self, other: "SparseOperator") -> "SparseOperator":
        if (self.domain_dim, self.codomain_dim) != (other.domain_dim, other.codomain_dim):
            raise ValueError("dimension mismatch")
        acc = {(r, c): v for r, c, v in self.triples}
        for r, c, v in other.triples:
            acc[(r, c)] = acc.get((r, c), 0) - v
        return SparseOperator.from_dict(self.domain_dim, self.codomain_dim, acc)

    def is_zero(self) -> bool:
        return not self.triples


# ---------------------------------------------------------------------------
# elimination engine

def _integer_row(row: dict) -> dict[int, int]:
    """Clear denominators and divide out the content; leading entry positive."""
    den = 1
    for v in row.values():
        if isinstance(v, Fraction):
            den = den * v.denominator // gcd(den, v.denominator)
    if den != 1:
        row = {c: int(v * den) for c, v in row.items()}
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            break
    lead = row[min(row)]
    if lead < 0:
        g = -g
    if g not in (0, 1):
        row = {c: v // g for c, v in row.items()}
    return row


class Echelon:
    """Incremental fraction-free row echelon form over sparse rows.

    Rows are inserted in order; the pivot of a row is its first nonzero
    column after reduction against earlier pivots.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.pivots: dict[int, dict[int, int]] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, row: dict) -> dict[int, int]:
        row = {c: v for c, v in row.items() if v}
        if not row:
            return row
        row = _integer_row(row)
        pivots = self.pivots
        while row:
            lead = min(row)
            p = pivots.get(lead)
            if p is None:
                break
            a = p[lead]
            b = row[lead]
            g = gcd(a, b)
            a //= g
            b //= g
            new = {c: a * v for c, v in row.items()} if a != 1 else dict(row)
            for c, v in p.items():
                x = new.get(c, 0) - b * v
                if x:
                    new[c] = x
                else:
                    new.pop(c, None)
            row = _integer_row(new) if new else new
        return row

    def insert(self, row: dict) -> bool:
        """Add a row; return True if it increased the rank."""
        row = self.reduce(row)
        if not row:
            return False
        self.pivots[min(row)] = row
        return True

    def reduced(self) -> dict[int, dict[int, Rational]]:
        """Fully reduced echelon rows with unit pivots, keyed by pivot column."""
        out: dict[int, dict[int, Rational]] = {}
        for col in sorted(self.pivots, reverse=True):
            row = dict(self.pivots[col])
            for c in sorted(k for k in row if k != col and k in out):
                if c not in row:
                    continue
                f = row[c]
                for cc, vv in out[c].items():
                    x = row.get(cc, 0) - f * vv
                    if x:
                        row[cc] = x
                    else:
                        row.pop(cc, None)
            lead = row[col]
            out[col] = {c: rat(Fraction(v) / lead) for c, v in row.items()}
        return out


def _as_rows(M) -> tuple[list[dict], int]:
    if isinstance(M, SparseOperator):
        return M.rows(), M.domain_dim
    if isinstance(M, RatMatrix):
        rows = [{j: v for j, v in enumerate(M.row(i)) if v} for i in range(M.rows)]
        return rows, M.cols
    rows = list(M)
    if rows and all(isinstance(r, dict) for r in rows):
        # sparse rows: column count is the largest index seen
        ncols = max((max(r, default=-1) for r in rows), default=-1) + 1
        return [{j: rat(v) for j, v in r.items() if v} for r in rows], ncols
    rows = [list(r) for r in rows]
    ncols = len(rows[0]) if rows else 0
    if any(len(r) != ncols for r in rows):
        raise ValueError("ragged rows")
    return [{j: rat(v) for j, v in enumerate(r) if v} for r in rows], ncols


def echelon(M) -> Echelon:
    rows, ncols = _as_rows(M)
    ech = Echelon(ncols)
    for r in rows:
        ech.insert(r)
        if ech.rank == ncols:
            break
    return ech


def stacked_echelon(operators: Sequence[SparseOperator], columns: Sequence[int] | None = None) -> Echelon:
    """Echelon form of the vertical stack of several operators on a common domain.

    ``columns`` restricts the domain to the listed coordinates (in that order).
    """
    if not operators:
        raise ValueError("no operators")
    dom = operators[0].domain_dim
    if any(op.domain_dim != dom for op in operators):
        raise ValueError("operators have different domains")
    if columns is None:
        colmap = None
        ncols = dom
    else:
        colmap = {c: i for i, c in enumerate(columns)}
        ncols = len(columns)
    ech = Echelon(ncols)
    for op in operators:
        rows: dict[int, dict] = {}
        for r, c, v in op.triples:
            if colmap is not None:
                c = colmap.get(c)
                if c is None:
                    continue
            rows.setdefault(r, {})[c] = v
        for r in sorted(rows):
            ech.insert(rows[r])
            if ech.rank == ncols:
                return ech
    return ech


def _bareiss_rank(rows: list[list[int]], ncols: int) -> int:
    m = [list(r) for r in rows]
    nrows = len(m)
    rank = 0
    prev = 1
    for col in range(ncols):
        piv = next((i for i in range(rank, nrows) if m[i][col]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        p = m[rank][col]
        for i in range(rank + 1, nrows):
            f = m[i][col]
            mi = m[i]
            mr = m[rank]
            for j in range(col, ncols):
                mi[j] = (p * mi[j] - f * mr[j]) // prev
        prev = p
        rank += 1
        if rank == nrows:
            break
    return rank


def _integerize(rows: Sequence[Sequence]) -> list[list[int]]:
    out = []
    for r in rows:
        den = 1
        for v in r:
            if isinstance(v, Fraction):
                den = den * v.denominator // gcd(den, v.denominator)
        out.append([int(v * den) for v in r])
    return out


def rank(M) -> int:
    """Exact rank of a ``RatMatrix``, ``SparseOperator`` or list of rows."""
    if isinstance(M, RatMatrix):
        if M.rows == 0 or M.cols == 0:
            return 0
        return _bareiss_rank(_integerize(M.tolist()), M.cols)
    return echelon(M).rank


def nullspace(M) -> list[tuple[Rational, ...]]:
    """Basis of the kernel; one vector per free column, in column order."""
    ech = echelon(M)
    return _kernel_from_echelon(ech)


def _kernel_from_echelon(ech: Echelon) -> list[tuple[Rational, ...]]:
    red = ech.reduced()
    free = [c for c in range(ech.ncols) if c not in red]
    basis = []
    for f in free:
        v = [0] * ech.ncols
        v[f] = 1
        for p, row in red.items():
            x = row.get(f)
            if x:
                v[p] = rat(-x)
        basis.append(tuple(v))
    return basis


class Solution(NamedTuple):
    x: tuple
    unique: bool


def solve(A, b: Sequence, ncols: int | None = None) -> Solution | None:
    """One exact solution of ``A x = b`` or ``None`` when inconsistent.

    ``A`` may also be a list of sparse rows (dicts); ``ncols`` then fixes the
    number of unknowns.
    """
    rows, found = _as_rows(A)
    if ncols is None:
        ncols = found
    elif ncols < found:
        raise ValueError(f"row index {found - 1} out of range for {ncols} unknowns")
    nrows = A.rows if isinstance(A, RatMatrix) else (
        A.codomain_dim if isinstance(A, SparseOperator) else len(rows))
    if isinstance(A, SparseOperator):
        dense = A.to_dense()
        rows, ncols = _as_rows(dense)
    if len(b) != nrows:
        raise ValueError(f"right-hand side has length {len(b)}, expected {nrows}")
    ech = Echelon(ncols + 1)
    for r, bi in zip(rows, b):
        r = dict(r)
        bi = rat(bi)
        if bi:
            r[ncols] = bi
        ech.insert(r)
    if ncols in ech.pivots:
        return None
    red = ech.reduced()
    x = [0] * ncols
    for p, row in red.items():
        x[p] = rat(row.get(ncols, 0))
    return Solution(tuple(x), len(red) == ncols)


def det(M: RatMatrix) -> Rational:
    """Determinant by fraction-free (Bareiss) elimination."""
    if not M.is_square:
        raise ValueError("determinant of a non-square matrix")
    n = M.rows
    if n == 0:
        return 1
    rows = M.tolist()
    den = 1
    for r in rows:
        for v in r:
            if isinstance(v, Fraction):
                den = den * v.denominator // gcd(den, v.denominator)
    m = [[int(v * den) for v in r] for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k]), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return rat(Fraction(sign * m[n - 1][n - 1], den ** n))


class CoordinateMap:
    """Coordinates of matrices with respect to a fixed linearly independent list."""

    def __init__(self, basis: Sequence[RatMatrix]):
        if not basis:
            self.basis = ()
            self._pivots = ()
            self._inverse = ()
            return
        shape = basis[0].shape
        if any(b.shape != shape for b in basis):
            raise ValueError("basis matrices of different shapes")
        self.basis = tuple(basis)
        self.shape = shape
        # rows = basis vectors; pivot columns give an invertible square block
        ech = Echelon(shape[0] * shape[1])
        for b in basis:
            if not ech.insert({k: v for k, v in enumerate(b.entries) if v}):
                raise ValueError("basis matrices are linearly dependent")
        pivots = sorted(ech.pivots)
        square = RatMatrix.from_rows([[b.entries[p] for p in pivots] for b in basis])
        self._pivots = tuple(pivots)
        self._inverse = _inverse(square)

    def __len__(self) -> int:
        return len(self.basis)

    def coords(self, A: RatMatrix, check: bool = True) -> tuple[Rational, ...]:
        """Coordinates c with sum(c_i * basis_i) == A; ValueError if A is outside the span."""
        if not self.basis:
            if check and not A.is_zero():
                raise ValueError("matrix is not in the span")
            return ()
        y = [A.entries[p] for p in self._pivots]
        n = len(self.basis)
        inv = self._inverse
        # c * square = y  =>  c = y * square^{-1}
        c = tuple(rat(sum(y[k] * inv[k][i] for k in range(n) if y[k])) for i in range(n))
        if check:
            recon = [0] * len(A.entries)
            for ci, b in zip(c, self.basis):
                if ci:
                    for k, v in enumerate(b.entries):
                        if v:
                            recon[k] += ci * v
            if tuple(rat(x) for x in recon) != A.entries:
                raise ValueError("matrix is not in the span")
        return c

    def contains(self, A: RatMatrix) -> bool:
        try:
            self.coords(A)
        except ValueError:
            return False
        return True


def _inverse(M: RatMatrix) -> list[list[Rational]]:
    n = M.rows
    aug = [[Fraction(x) for x in M.row(i)] + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next(i for i in range(col, n) if aug[i][col])
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for i in range(n):
            if i != col and aug[i][col]:
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[col])]
    return [[rat(x) for x in row[n:]] for row in aug]


def matrix_inverse(M: RatMatrix) -> RatMatrix:
    if not M.is_square:
        raise ValueError("inverse of a non-square matrix")
    if det(M) == 0:
        raise ValueError("singular matrix")
    return RatMatrix.from_rows(_inverse(M))
