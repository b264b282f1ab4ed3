"""Classical matrix Lie algebras, root data, characters and Weyl groups.

All realizations carry a diagonal Cartan: type A as trace-zero (or full gl)
matrices, types B/D as so(m) for the anti-diagonal symmetric form and type C
as sp(2n) for the anti-diagonal symplectic form.  With these choices the
upper-triangular intersection is the standard Borel and weights live in
epsilon-coordinates read off the first diagonal entries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .exactla import (
    MatrixElement,
    Subspace,
    _frac,
    _inv,
    bracket,
    span_of_matrices,
    weight_decomposition,
)

WEYL_RANK_CAP = 6


class RankCapError(ValueError):
    """Raised when an enumeration exceeds the configured rank cap."""


# ---------------------------------------------------------------------------
# Weights
# ---------------------------------------------------------------------------

class Weight:
    """A rational vector of epsilon-coordinates; exact component arithmetic."""

    __slots__ = ("coords",)

    def __init__(self, coords: Iterable):
        self.coords = tuple(_frac(c) for c in coords)

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __add__(self, other: "Weight") -> "Weight":
        return Weight(a + b for a, b in zip(self.coords, other.coords))

    def __sub__(self, other: "Weight") -> "Weight":
        return Weight(a - b for a, b in zip(self.coords, other.coords))

    def __neg__(self) -> "Weight":
        return Weight(-a for a in self.coords)

    def scale(self, c) -> "Weight":
        c = _frac(c)
        return Weight(c * a for a in self.coords)

    def dot(self, other: "Weight") -> Fraction:
        return sum((a * b for a, b in zip(self.coords, other.coords)), Fraction(0))

    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def int_coords(self):
        if not self.is_integral():
            raise ValueError("weight is not integral: %r" % (self,))
        return tuple(int(c) for c in self.coords)

    @classmethod
    def zero(cls, n: int) -> "Weight":
        return cls((0,) * n)

    def __eq__(self, other):
        return isinstance(other, Weight) and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __repr__(self):
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


# ---------------------------------------------------------------------------
# Classical types and realizations
# ---------------------------------------------------------------------------

_RANK_MIN = {"A": 1, "B": 2, "C": 2, "D": 3}


@dataclass(frozen=True)
class ClassicalType:
    family: str
    rank: int

    def __post_init__(self):
        if self.family not in _RANK_MIN:
            raise ValueError("unsupported family %r" % (self.family,))
        if self.rank < _RANK_MIN[self.family]:
            raise ValueError(
                "rank %d below the validity bound for family %s"
                % (self.rank, self.family)
            )

    def __str__(self):
        return "%s%d" % (self.family, self.rank)


@dataclass
class AlgebraRealization:
    """A matrix Lie algebra with a distinguished diagonal Cartan.

    `eps_probes` are diagonal matrices dual to the epsilon-coordinates: the
    tuple of ad-eigenvalues under the probes is the coordinate vector of a
    weight.  For type A (sl variant) the probes are the gl matrix units, which
    keeps root coordinates canonical (coordinates summing to zero).
    """

    type: Optional[ClassicalType]
    label: str
    matrix_dim: int
    algebra: Subspace
    cartan_basis: list
    eps_probes: list
    eps_positions: list
    bilinear_form: Optional[MatrixElement] = None
    has_center: bool = False
    _datum: Optional["RootDatum"] = field(default=None, repr=False)
    _cartan_solver: Optional[list] = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @property
    def rank(self) -> int:
        return len(self.cartan_basis)

    @property
    def eps_dim(self) -> int:
        return len(self.eps_probes)

    def eps_params(self, h: MatrixElement) -> Weight:
        """Epsilon-parameters of a diagonal Cartan element."""
        if not h.is_diagonal():
            raise ValueError("not a diagonal Cartan element")
        diag = h.diagonal_entries()
        return Weight(diag[p] for p in self.eps_positions)

    def weight_value(self, w: Weight, h: MatrixElement) -> Fraction:
        return w.dot(self.eps_params(h))

    def cartan_element(self, params: Weight) -> MatrixElement:
        """The Cartan element with prescribed epsilon-parameters."""
        if self._cartan_solver is None:
            cols = [self.eps_params(h).coords for h in self.cartan_basis]
            self._cartan_solver = _solve_factor(cols)
        coeffs = _solve_apply(self._cartan_solver, tuple(params))
        if coeffs is None:
            raise ValueError("parameters not realizable in the Cartan")
        out = MatrixElement.zero(self.matrix_dim)
        for c, h in zip(coeffs, self.cartan_basis):
            if c:
                out = out + h.scale(c)
        return out


def _solve_factor(columns):
    """Echelon data for solving sum_j x_j * columns[j] = target exactly."""
    ncols = len(columns)
    nrows = len(columns[0]) if columns else 0
    rows = [[col[i] for col in columns] for i in range(nrows)]
    aug = [row + [Fraction(0)] for row in rows]
    return [aug, ncols]


def _solve_apply(factor, target):
    aug0, ncols = factor
    rows = [row[:-1] + [_frac(t)] for row, t in zip(aug0, target)]
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(rows)) if rows[i][c]), None)
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
    for i in range(r, len(rows)):
        if rows[i][-1]:
            return None
    sol = [Fraction(0)] * ncols
    for ri, pc in enumerate(pivots):
        sol[pc] = rows[ri][-1]
    return sol


def _anti_identity(m: int) -> MatrixElement:
    return MatrixElement(m, {(i, m - 1 - i): Fraction(1) for i in range(m)})


def _symplectic_form(n: int) -> MatrixElement:
    m = 2 * n
    data = {}
    for i in range(m):
        data[(i, m - 1 - i)] = Fraction(1 if i < n else -1)
    return MatrixElement(m, data)


def _form_algebra(m: int, g: MatrixElement) -> Subspace:
    """{X : X^T G + G X = 0} computed as an exact kernel."""
    units = [(i, j) for i in range(m) for j in range(m)]
    from .exactla import _kernel_of_columns

    images = []
    for (i, j) in units:
        e = MatrixElement.unit(m, i, j)
        images.append(((e.transpose() @ g) + (g @ e)).vectorize())
    kernel = _kernel_of_columns(images, len(units))
    mats = []
    for coeffs in kernel:
        data = {}
        for c, (i, j) in zip(coeffs, units):
            if c:
                data[(i, j)] = c
        mats.append(MatrixElement(m, data))
    return span_of_matrices(mats, m)


def build_classical(ctype: ClassicalType, with_center: bool = False) -> AlgebraRealization:
    """Standard split realization; `with_center` selects gl over sl in type A."""
    fam, n = ctype.family, ctype.rank
    if with_center and fam != "A":
        raise ValueError("central variant only exists for family A")
    if fam == "A":
        m = n + 1
        units = [MatrixElement.unit(m, i, j) for i in range(m) for j in range(m) if i != j]
        if with_center:
            diag = [MatrixElement.unit(m, i, i) for i in range(m)]
            label = "gl%d" % m
        else:
            diag = [
                MatrixElement.unit(m, i, i) - MatrixElement.unit(m, i + 1, i + 1)
                for i in range(m - 1)
            ]
            label = "sl%d" % m
        algebra = span_of_matrices(units + diag, m)
        probes = [MatrixElement.unit(m, i, i) for i in range(m)]
        return AlgebraRealization(
            type=ctype,
            label=label,
            matrix_dim=m,
            algebra=algebra,
            cartan_basis=diag,
            eps_probes=probes,
            eps_positions=list(range(m)),
            has_center=with_center,
        )
    if fam == "B":
        m = 2 * n + 1
        form = _anti_identity(m)
        label = "so%d" % m
    elif fam == "D":
        m = 2 * n
        form = _anti_identity(m)
        label = "so%d" % m
    else:  # C
        m = 2 * n
        form = _symplectic_form(n)
        label = "sp%d" % m
    algebra = _form_algebra(m, form)
    cartan = [
        MatrixElement.unit(m, i, i) - MatrixElement.unit(m, m - 1 - i, m - 1 - i)
        for i in range(n)
    ]
    for h in cartan:
        if not algebra.contains_matrix(h):
            raise AssertionError("Cartan element escaped the realization")
    return AlgebraRealization(
        type=ctype,
        label=label,
        matrix_dim=m,
        algebra=algebra,
        cartan_basis=cartan,
        eps_probes=list(cartan),
        eps_positions=list(range(n)),
        bilinear_form=form,
    )


# ---------------------------------------------------------------------------
# Root data
# ---------------------------------------------------------------------------

def regular_order_key(w: Weight):
    """Sort key for the fixed regular functional (decreasing eps-weights)."""
    n = len(w.coords)
    value = sum((Fraction(n - i) * c for i, c in enumerate(w.coords)), Fraction(0))
    return (value, w.coords)


@dataclass
class RootDatum:
    eps_dim: int
    roots: tuple
    positive_roots: tuple
    simple_roots: tuple
    rho: Weight
    root_spaces: dict
    zero_space: Optional[Subspace] = None

    def coroot_pairing(self, lam: Weight, alpha: Weight) -> Fraction:
        return 2 * lam.dot(alpha) / alpha.dot(alpha)

    def reflect(self, w: Weight, alpha: Weight) -> Weight:
        return w - alpha.scale(self.coroot_pairing(w, alpha))

    def is_dominant(self, lam: Weight) -> bool:
        return all(self.coroot_pairing(lam, a) >= 0 for a in self.simple_roots)

    def is_dominant_integral(self, lam: Weight) -> bool:
        return all(
            (p := self.coroot_pairing(lam, a)) >= 0 and p.denominator == 1
            for a in self.simple_roots
        )

    def dominant_representative(self, w: Weight) -> Weight:
        while True:
            for a in self.simple_roots:
                if self.coroot_pairing(w, a) < 0:
                    w = self.reflect(w, a)
                    break
            else:
                return w

    def sub_datum(self, roots: Iterable[Weight]) -> "RootDatum":
        """Datum of a root subsystem (e.g. a Levi factor), same coordinates."""
        rootset = set(roots)
        for r in rootset:
            if r not in self.root_spaces:
                raise ValueError("not a root of the ambient datum: %r" % (r,))
            if -r not in rootset:
                raise ValueError("root subset is not symmetric")
        pos = tuple(sorted((r for r in rootset if r in set(self.positive_roots)),
                           key=regular_order_key, reverse=True))
        simple = _indecomposables(pos)
        rho = _half_sum(pos, self.eps_dim)
        return RootDatum(
            eps_dim=self.eps_dim,
            roots=tuple(sorted(rootset, key=regular_order_key, reverse=True)),
            positive_roots=pos,
            simple_roots=simple,
            rho=rho,
            root_spaces={r: self.root_spaces[r] for r in rootset},
            zero_space=self.zero_space,
        )


def _indecomposables(positive: Sequence[Weight]) -> tuple:
    """Simple roots, ordered along the coordinate chain (lexicographically)."""
    pos = set(positive)
    simple = [
        a for a in positive
        if not any((a - b) in pos for b in pos if b != a)
    ]
    simple.sort(key=lambda a: a.coords, reverse=True)
    return tuple(simple)


def _half_sum(positive: Sequence[Weight], eps_dim: int) -> Weight:
    total = Weight.zero(eps_dim)
    for a in positive:
        total = total + a
    return total.scale(Fraction(1, 2))


def datum_from_decomposition(eps_dim: int, parts) -> RootDatum:
    """Build a RootDatum from (weight, subspace) pairs of an adjoint action."""
    root_spaces = {}
    zero_space = None
    for wt, space in parts:
        w = Weight(wt)
        if w.is_zero():
            zero_space = space
            continue
        if space.dim != 1:
            raise ValueError("root space of dimension %d at %r" % (space.dim, w))
        root_spaces[w] = space
    roots = tuple(sorted(root_spaces, key=regular_order_key, reverse=True))
    zero_key = regular_order_key(Weight.zero(eps_dim))[0]
    if any(regular_order_key(r)[0] == zero_key for r in roots):
        raise ValueError("a root vanishes on the fixed regular element")
    positive = tuple(r for r in roots if regular_order_key(r)[0] > zero_key)
    if len(positive) * 2 != len(roots):
        raise ValueError("regular functional failed to split the roots")
    simple = _indecomposables(positive)
    rho = _half_sum(positive, eps_dim)
    return RootDatum(
        eps_dim=eps_dim,
        roots=roots,
        positive_roots=positive,
        simple_roots=simple,
        rho=rho,
        root_spaces=root_spaces,
        zero_space=zero_space,
    )


def root_datum(g: AlgebraRealization) -> RootDatum:
    """Roots of g for its diagonal Cartan, with the fixed positive system."""
    if g._datum is None:
        parts = weight_decomposition(g.eps_probes, g.algebra)
        datum = datum_from_decomposition(g.eps_dim, parts)
        if datum.zero_space is None or datum.zero_space.dim != g.rank:
            raise ValueError("zero-weight space does not match the Cartan")
        g._datum = datum
    return g._datum


# ---------------------------------------------------------------------------
# Freudenthal weight multiplicities
# ---------------------------------------------------------------------------

def freudenthal_character(datum: RootDatum, lam: Weight) -> dict:
    """Full weight multiset of the simple module with highest weight lam.

    Standard Freudenthal recursion, processed level by level in the simple
    root lattice; non-dominant weights are filled in from their dominant
    Weyl representative.
    """
    if not datum.is_dominant_integral(lam):
        raise ValueError("highest weight is not dominant integral: %r" % (lam,))
    rho = datum.rho
    lam_rho_sq = (lam + rho).dot(lam + rho)
    mult = {lam: 1}
    level = {lam}
    while level:
        candidates = set()
        for mu in level:
            for a in datum.simple_roots:
                candidates.add(mu - a)
        dominant = [mu for mu in candidates if datum.is_dominant(mu)]
        rest = [mu for mu in candidates if not datum.is_dominant(mu)]
        nxt = set()
        for mu in dominant:
            m = _freudenthal_mult(datum, lam, mu, mult, lam_rho_sq)
            if m:
                mult[mu] = m
                nxt.add(mu)
        for mu in rest:
            m = mult.get(datum.dominant_representative(mu), 0)
            if m:
                mult[mu] = m
                nxt.add(mu)
        level = nxt
    return mult


def _freudenthal_mult(datum, lam, mu, mult, lam_rho_sq):
    rho = datum.rho
    denom = lam_rho_sq - (mu + rho).dot(mu + rho)
    if denom == 0:
        if mu == lam:
            return mult[lam]
        raise AssertionError("Freudenthal denominator vanished off the top weight")
    total = Fraction(0)
    for a in datum.positive_roots:
        nu = mu + a
        while True:
            m = mult.get(nu, 0)
            if not m:
                break
            total += m * nu.dot(a)
            nu = nu + a
    value = 2 * total / denom
    if value.denominator != 1 or value < 0:
        raise AssertionError("non-integral Freudenthal multiplicity")
    return int(value)


def weyl_dimension(datum: RootDatum, lam: Weight) -> int:
    """Weyl dimension formula; independent oracle for character sizes."""
    num = Fraction(1)
    for a in datum.positive_roots:
        num *= Fraction((lam + datum.rho).dot(a), datum.rho.dot(a))
    if num.denominator != 1:
        raise AssertionError("Weyl dimension came out non-integral")
    return int(num)


# ---------------------------------------------------------------------------
# Weyl groups as signed permutations
# ---------------------------------------------------------------------------

class WeylElement:
    """Signed permutation of epsilon-coordinates: (w.v)[i] = signs[i]*v[perm[i]]."""

    __slots__ = ("perm", "signs")

    def __init__(self, perm: Sequence[int], signs: Sequence[int]):
        self.perm = tuple(perm)
        self.signs = tuple(signs)

    @classmethod
    def identity(cls, n: int) -> "WeylElement":
        return cls(tuple(range(n)), (1,) * n)

    def apply(self, w: Weight) -> Weight:
        return Weight(self.signs[i] * w[self.perm[i]] for i in range(len(self.perm)))

    def apply_params(self, params):
        return tuple(self.signs[i] * params[self.perm[i]] for i in range(len(self.perm)))

    def compose(self, other: "WeylElement") -> "WeylElement":
        """self after other: (self*other).v = self(other(v))."""
        perm = tuple(other.perm[self.perm[i]] for i in range(len(self.perm)))
        signs = tuple(self.signs[i] * other.signs[self.perm[i]] for i in range(len(self.perm)))
        return WeylElement(perm, signs)

    def inverse(self) -> "WeylElement":
        n = len(self.perm)
        perm = [0] * n
        signs = [1] * n
        for i in range(n):
            perm[self.perm[i]] = i
            signs[self.perm[i]] = self.signs[i]
        return WeylElement(perm, signs)

    def minus_count(self) -> int:
        return sum(1 for s in self.signs if s < 0)

    def __eq__(self, other):
        return (
            isinstance(other, WeylElement)
            and self.perm == other.perm
            and self.signs == other.signs
        )

    def __hash__(self):
        return hash((self.perm, self.signs))

    def __repr__(self):
        return "WeylElement(perm=%r, signs=%r)" % (self.perm, self.signs)


def reflection_element(datum: RootDatum, alpha: Weight) -> WeylElement:
    """The reflection s_alpha as a signed permutation of coordinates."""
    n = datum.eps_dim
    perm = [None] * n
    signs = [0] * n
    for k in range(n):
        e = Weight([Fraction(1) if i == k else Fraction(0) for i in range(n)])
        img = datum.reflect(e, alpha)
        hits = [(i, c) for i, c in enumerate(img.coords) if c]
        if len(hits) != 1 or abs(hits[0][1]) != 1:
            raise ValueError("reflection is not a signed permutation")
        j, c = hits[0]
        # e_k maps to c*e_j, i.e. coordinate j of the image reads sign*coord k
        perm[j] = k
        signs[j] = 1 if c > 0 else -1
    return WeylElement(perm, signs)


def weyl_group(datum: RootDatum) -> list:
    """Full enumeration of the Weyl group generated by simple reflections."""
    if len(datum.simple_roots) > WEYL_RANK_CAP:
        raise RankCapError(
            "Weyl enumeration capped at rank %d" % WEYL_RANK_CAP
        )
    gens = [reflection_element(datum, a) for a in datum.simple_roots]
    seen = {WeylElement.identity(datum.eps_dim)}
    frontier = list(seen)
    while frontier:
        new = []
        for w in frontier:
            for s in gens:
                x = s.compose(w)
                if x not in seen:
                    seen.add(x)
                    new.append(x)
        frontier = new
    return sorted(seen, key=lambda w: (w.perm, w.signs))
