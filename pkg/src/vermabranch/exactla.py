"""Exact rational linear algebra over vectorized matrix spaces.

Matrices are square grids of `fractions.Fraction` stored sparsely; subspaces
live in the column-major vectorization Q^(n*n) and are kept in reduced row
echelon form, so equality, membership and dimension are exact and canonical.
No floating point is used anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

Rational = Fraction

SparseVec = dict  # index -> nonzero Fraction


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _q(x):
    """Canonical exact scalar: plain int when integral (much faster), else
    Fraction.  Mixed int/Fraction arithmetic stays exact in Python."""
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    return _q(Fraction(x))


def _inv(x):
    """Exact reciprocal; never uses integer division."""
    if isinstance(x, int):
        if x in (1, -1):
            return x
        return Fraction(1, x)
    return 1 / x


# ---------------------------------------------------------------------------
# sparse vector helpers
# ---------------------------------------------------------------------------

def _vec_axpy(dst: SparseVec, c: Fraction, src: SparseVec) -> None:
    """dst += c*src in place, dropping zero entries."""
    if not c:
        return
    for k, v in src.items():
        w = dst.get(k, 0) + c * v
        if w:
            dst[k] = w
        else:
            dst.pop(k, None)


def _vec_scale(vec: SparseVec, c: Fraction) -> SparseVec:
    return {k: c * v for k, v in vec.items()} if c else {}


def _as_sparse(vector) -> SparseVec:
    if isinstance(vector, Mapping):
        return {int(k): _q(v) for k, v in vector.items() if v}
    return {i: _q(v) for i, v in enumerate(vector) if v}


# ---------------------------------------------------------------------------
# MatrixElement
# ---------------------------------------------------------------------------

class MatrixElement:
    """Immutable square matrix over Q with sparse storage."""

    __slots__ = ("dim", "_data", "_hash")

    def __init__(self, dim: int, data: Mapping):
        if dim <= 0:
            raise ValueError("matrix dimension must be positive")
        self.dim = dim
        self._data = {k: _q(v) for k, v in data.items() if v}
        self._hash = None

    # -- constructors

    @classmethod
    def zero(cls, dim: int) -> "MatrixElement":
        return cls(dim, {})

    @classmethod
    def identity(cls, dim: int) -> "MatrixElement":
        return cls(dim, {(i, i): 1 for i in range(dim)})

    @classmethod
    def unit(cls, dim: int, i: int, j: int) -> "MatrixElement":
        """The matrix unit E_ij (0-indexed)."""
        return cls(dim, {(i, j): 1})

    @classmethod
    def diagonal(cls, values: Sequence) -> "MatrixElement":
        return cls(len(values), {(i, i): _q(v) for i, v in enumerate(values) if v})

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "MatrixElement":
        n = len(rows)
        data = {}
        for i, row in enumerate(rows):
            if len(row) != n:
                raise ValueError("matrix must be square")
            for j, v in enumerate(row):
                if v:
                    data[(i, j)] = _q(v)
        return cls(n, data)

    # -- accessors

    def entry(self, i: int, j: int) -> Fraction:
        return _frac(self._data.get((i, j), 0))

    def items(self):
        return self._data.items()

    def rows(self):
        out = [[Fraction(0)] * self.dim for _ in range(self.dim)]
        for (i, j), v in self._data.items():
            out[i][j] = v
        return out

    def is_zero(self) -> bool:
        return not self._data

    def is_diagonal(self) -> bool:
        return all(i == j for (i, j) in self._data)

    def diagonal_entries(self):
        return tuple(self._data.get((i, i), 0) for i in range(self.dim))

    def transpose(self) -> "MatrixElement":
        return MatrixElement(self.dim, {(j, i): v for (i, j), v in self._data.items()})

    def trace(self) -> Fraction:
        return _frac(sum(v for (i, j), v in self._data.items() if i == j))

    # -- arithmetic

    def _check(self, other: "MatrixElement") -> None:
        if self.dim != other.dim:
            raise ValueError("dimension mismatch: %d vs %d" % (self.dim, other.dim))

    def __add__(self, other: "MatrixElement") -> "MatrixElement":
        self._check(other)
        data = dict(self._data)
        for k, v in other._data.items():
            w = data.get(k, 0) + v
            if w:
                data[k] = w
            else:
                data.pop(k, None)
        return MatrixElement(self.dim, data)

    def __sub__(self, other: "MatrixElement") -> "MatrixElement":
        return self + (-other)

    def __neg__(self) -> "MatrixElement":
        return MatrixElement(self.dim, {k: -v for k, v in self._data.items()})

    def scale(self, c) -> "MatrixElement":
        c = _q(c)
        if not c:
            return MatrixElement.zero(self.dim)
        return MatrixElement(self.dim, {k: c * v for k, v in self._data.items()})

    def __rmul__(self, c) -> "MatrixElement":
        return self.scale(c)

    def __matmul__(self, other: "MatrixElement") -> "MatrixElement":
        self._check(other)
        by_row = {}
        for (k, j), v in other._data.items():
            by_row.setdefault(k, []).append((j, v))
        data = {}
        for (i, k), u in self._data.items():
            for j, v in by_row.get(k, ()):
                key = (i, j)
                w = data.get(key, 0) + u * v
                if w:
                    data[key] = w
                else:
                    data.pop(key, None)
        return MatrixElement(self.dim, data)

    # -- vectorization (column-major)

    def vectorize(self) -> SparseVec:
        n = self.dim
        return {j * n + i: v for (i, j), v in self._data.items()}

    @classmethod
    def from_vector(cls, dim: int, vec: Mapping) -> "MatrixElement":
        data = {}
        for idx, v in vec.items():
            if v:
                data[(idx % dim, idx // dim)] = _q(v)
        return cls(dim, data)

    # -- identity / hashing

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MatrixElement)
            and self.dim == other.dim
            and self._data == other._data
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dim, tuple(sorted(self._data.items()))))
        return self._hash

    def __repr__(self):
        if len(self._data) > 8:
            return "MatrixElement(dim=%d, %d entries)" % (self.dim, len(self._data))
        ent = ", ".join("E[%d,%d]=%s" % (i, j, v) for (i, j), v in sorted(self._data.items()))
        return "MatrixElement(dim=%d, %s)" % (self.dim, ent or "0")


def bracket(x: MatrixElement, y: MatrixElement) -> MatrixElement:
    """Lie bracket XY - YX, exact."""
    if x.dim != y.dim:
        raise ValueError("bracket: dimension mismatch %d vs %d" % (x.dim, y.dim))
    return (x @ y) - (y @ x)


# ---------------------------------------------------------------------------
# Subspace: canonical reduced row echelon span
# ---------------------------------------------------------------------------

class Subspace:
    """Span of vectors in Q^ambient_dim, held in reduced row echelon form.

    Rows are sparse dicts sorted by pivot; pivot entries are 1 and cleared
    from all other rows, so two equal subspaces have identical row data.
    """

    __slots__ = ("ambient_dim", "rows", "_hash")

    def __init__(self, ambient_dim: int, rows=(), _canonical=False):
        self.ambient_dim = ambient_dim
        if _canonical:
            self.rows = list(rows)
        else:
            self.rows = _rref([_as_sparse(r) for r in rows])
        self._hash = None

    @property
    def dim(self) -> int:
        return len(self.rows)

    def reduce(self, vector) -> SparseVec:
        """Remainder of vector after elimination against the basis."""
        vec = _as_sparse(vector)
        for row in self.rows:
            piv = min(row)
            c = vec.get(piv)
            if c:
                _vec_axpy(vec, -c, row)
        return vec

    def contains_vector(self, vector) -> bool:
        return not self.reduce(vector)

    def contains_matrix(self, mat: MatrixElement) -> bool:
        return self.contains_vector(mat.vectorize())

    def coordinates_of(self, vector):
        """Coefficients w.r.t. the echelon basis, or None if not a member."""
        vec = _as_sparse(vector)
        coords = []
        for row in self.rows:
            piv = min(row)
            c = vec.get(piv, 0)
            coords.append(c)
            if c:
                _vec_axpy(vec, -c, row)
        return None if vec else coords

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains_vector(dict(r)) for r in other.rows)

    def sum(self, other: "Subspace") -> "Subspace":
        if self.ambient_dim != other.ambient_dim:
            raise ValueError("ambient dimension mismatch")
        rows = [dict(r) for r in self.rows] + [dict(r) for r in other.rows]
        return Subspace(self.ambient_dim, rows)

    def intersect(self, other: "Subspace") -> "Subspace":
        """Zassenhaus: echelonize (u|u) and (w|0); zero-left rows span the meet."""
        if self.ambient_dim != other.ambient_dim:
            raise ValueError("ambient dimension mismatch")
        n = self.ambient_dim
        doubled = []
        for r in self.rows:
            row = dict(r)
            row.update({k + n: v for k, v in r.items()})
            doubled.append(row)
        doubled.extend(dict(r) for r in other.rows)
        reduced = _rref(doubled)
        out = []
        for row in reduced:
            if min(row) >= n:
                out.append({k - n: v for k, v in row.items()})
        return Subspace(n, out, _canonical=True)

    def dense_basis(self):
        out = []
        for row in self.rows:
            dense = [Fraction(0)] * self.ambient_dim
            for k, v in row.items():
                dense[k] = v
            out.append(tuple(dense))
        return tuple(out)

    def matrices(self):
        """Basis as matrices; ambient_dim must be a perfect square."""
        n = math.isqrt(self.ambient_dim)
        if n * n != self.ambient_dim:
            raise ValueError("ambient space is not a vectorized matrix space")
        return [MatrixElement.from_vector(n, row) for row in self.rows]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subspace)
            and self.ambient_dim == other.ambient_dim
            and self.rows == other.rows
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(
                (self.ambient_dim, tuple(tuple(sorted(r.items())) for r in self.rows))
            )
        return self._hash

    def __repr__(self):
        return "Subspace(ambient=%d, dim=%d)" % (self.ambient_dim, self.dim)


def _rref(rows) -> list:
    """Reduced row echelon form of sparse rows; destructive on the input list."""
    basis = []  # kept sorted by pivot index
    for row in rows:
        for b in basis:
            piv = min(b)
            c = row.get(piv)
            if c:
                _vec_axpy(row, -c, b)
        if not row:
            continue
        piv = min(row)
        inv = _inv(row[piv])
        if inv != 1:
            row = {k: inv * v for k, v in row.items()}
        for b in basis:
            c = b.get(piv)
            if c:
                _vec_axpy(b, -c, row)
        basis.append(row)
        basis.sort(key=min)
    return basis


def echelon_span(vectors: Iterable, ambient_dim=None) -> Subspace:
    """Canonical echelon span of coordinate vectors.

    Empty input yields the zero subspace (ambient_dim then required).
    """
    vectors = list(vectors)
    if ambient_dim is None:
        dense = [v for v in vectors if not isinstance(v, Mapping)]
        if not dense:
            raise ValueError("ambient_dim required for empty or sparse input")
        ambient_dim = len(dense[0])
    return Subspace(ambient_dim, [_as_sparse(v) for v in vectors])


def span_of_matrices(mats: Iterable[MatrixElement], dim=None) -> Subspace:
    mats = list(mats)
    if dim is None:
        if not mats:
            raise ValueError("dim required for an empty spanning set")
        dim = mats[0].dim
    return Subspace(dim * dim, [m.vectorize() for m in mats])


# ---------------------------------------------------------------------------
# kernels of small linear maps
# ---------------------------------------------------------------------------

def _kernel_of_columns(columns, ncols: int):
    """Coefficient vectors kappa with sum_i kappa_i * columns[i] = 0."""
    support = sorted(set().union(*[set(c) for c in columns])) if columns else []
    rows = [[col.get(idx, 0) for col in columns] for idx in support]
    # dense RREF over the small ncols-wide system
    pivots = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, len(rows)):
            if rows[i][c]:
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = _inv(rows[r][c])
        rows[r] = [inv * v for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    kernel = []
    for fc in free:
        vec = [0] * ncols
        vec[fc] = 1
        for ri, pc in enumerate(pivots):
            vec[pc] = -rows[ri][fc]
        kernel.append(tuple(vec))
    return kernel


def kernel_on_subspace(images, space: Subspace) -> Subspace:
    """Kernel of a linear map given by basis images, as a subspace of `space`."""
    kappa = _kernel_of_columns([_as_sparse(v) for v in images], space.dim)
    out = []
    for coeffs in kappa:
        vec = {}
        for c, row in zip(coeffs, space.rows):
            _vec_axpy(vec, c, row)
        out.append(vec)
    return Subspace(space.ambient_dim, out)


# ---------------------------------------------------------------------------
# Lie-algebraic predicates
# ---------------------------------------------------------------------------

def _ambient_subspace(ambient) -> Subspace:
    return getattr(ambient, "algebra", ambient)


def _matrix_dim(space: Subspace) -> int:
    n = math.isqrt(space.ambient_dim)
    if n * n != space.ambient_dim:
        raise ValueError("ambient space is not a vectorized matrix space")
    return n


@dataclass(frozen=True)
class NilpotencyReport:
    bracket_closed: bool
    nilpotent: bool
    lcs_length: int


def _bracket_span(left_mats, right_mats, n: int) -> Subspace:
    prods = [bracket(a, b) for a in left_mats for b in right_mats]
    return span_of_matrices([p for p in prods if not p.is_zero()], n)


def nilpotent_subalgebra_test(sub: Subspace, ambient) -> NilpotencyReport:
    """Bracket closure and lower-central-series nilpotency of a subspace."""
    alg = _ambient_subspace(ambient)
    n = _matrix_dim(alg)
    if not alg.contains_subspace(sub):
        raise ValueError("subspace does not lie in the ambient algebra")
    basis = sub.matrices()
    derived = _bracket_span(basis, basis, n)
    closed = sub.contains_subspace(derived)
    if not closed:
        return NilpotencyReport(False, False, 0)
    term = sub
    steps = 0
    while term.dim:
        nxt = _bracket_span(basis, term.matrices(), n)
        steps += 1
        if nxt.dim == term.dim:
            return NilpotencyReport(True, False, steps)
        term = nxt
    # a zero subspace is vacuously nilpotent with an empty series
    return NilpotencyReport(True, True, steps)


def ad_operator_columns(z: MatrixElement, ambient) -> list:
    """Columns of ad(z) in the echelon basis coordinates of the algebra."""
    alg = _ambient_subspace(ambient)
    _matrix_dim(alg)
    if not alg.contains_matrix(z):
        raise ValueError("element does not lie in the ambient algebra")
    columns = []
    for b in alg.matrices():
        coords = alg.coordinates_of(bracket(z, b).vectorize())
        if coords is None:
            raise ValueError("ambient subspace is not bracket-closed")
        columns.append({i: c for i, c in enumerate(coords) if c})
    return columns


def _int_forward_echelon(rows) -> list:
    """Fraction-free forward elimination of sparse rows (rank/span only).

    Rows are scaled to integers and gcd-reduced after every elimination, so
    the arithmetic stays on small Python ints.
    """
    basis = []
    for row in rows:
        row = _integerize(row)
        while row:
            piv = min(row)
            hit = next((b for b in basis if min(b) == piv), None)
            if hit is None:
                break
            a, c = hit[piv], row[piv]
            row = {
                k: a * row.get(k, 0) - c * hit.get(k, 0)
                for k in set(row) | set(hit)
            }
            row = {k: v for k, v in row.items() if v}
            row = _gcd_reduce(row)
        if row:
            basis.append(row)
            basis.sort(key=min)
    return basis


def _integerize(row):
    lcm = 1
    for v in row.values():
        if isinstance(v, Fraction):
            lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
    if lcm == 1:
        return {k: int(v) for k, v in row.items() if v}
    return {k: int(v * lcm) for k, v in row.items() if v}


def _gcd_reduce(row):
    g = 0
    for v in row.values():
        g = math.gcd(g, abs(v))
        if g == 1:
            return row
    if g > 1:
        return {k: v // g for k, v in row.items()}
    return row


def nilpotent_operator_chain(columns: list) -> bool:
    """Whether the sparse coordinate operator has a vanishing image chain."""
    current = [dict(col) for col in columns if col]
    dim = None
    while True:
        basis = _int_forward_echelon(current)
        if not basis:
            return True
        if dim is not None and len(basis) >= dim:
            return False
        dim = len(basis)
        current = []
        for row in basis:
            vec = {}
            for j, c in row.items():
                _vec_axpy(vec, c, columns[j])
            current.append(vec)


def ad_nilpotent(z: MatrixElement, ambient) -> bool:
    """Whether ad(z) is nilpotent on the ambient algebra.

    The operator matrix of ad(z) in the echelon basis of the algebra is
    built once; the exact image chain then runs in coordinate space and
    reaches zero exactly when ad(z) is nilpotent.
    """
    return nilpotent_operator_chain(ad_operator_columns(z, ambient))


def weight_decomposition(commuting_family, space: Subspace):
    """Simultaneous eigenspace split of a subspace under ad of a diagonal family.

    Returns a list of (weight tuple, Subspace) pairs, sorted by weight
    (descending), whose dimensions add up to dim(space).  A shortfall means
    the action is not semisimple with rational eigenvalues and raises.
    """
    n = _matrix_dim(space)
    parts = [((), space)]
    for h in commuting_family:
        if not h.is_diagonal():
            raise ValueError("weight_decomposition requires a diagonal family")
        diag = h.diagonal_entries()
        candidates = sorted({di - dj for di in diag for dj in diag}, reverse=True)
        new_parts = []
        for wt, part in parts:
            covered = 0
            for c in candidates:
                images = [
                    (bracket(h, b) - c * b).vectorize() for b in part.matrices()
                ]
                eig = kernel_on_subspace(images, part)
                if eig.dim:
                    new_parts.append((wt + (c,), eig))
                    covered += eig.dim
            if covered != part.dim:
                raise ValueError(
                    "non-semisimple action detected: invalid Cartan choice"
                )
        parts = new_parts
    parts.sort(key=lambda p: p[0], reverse=True)
    return parts
