"""Symmetric pair catalog: involutions, fixed subalgebras and restricted roots.

Every involution is stored as conjugation by an explicit rational matrix
(the factor swap of the group case is conjugation by the block permutation),
so fixed spaces, the projection (Z + tau Z)/2 and all nilpotency checks stay
pure exact linear algebra.  The distinguished Cartan is diagonal and every
catalog conjugator is diagonal or a permutation-reflection, hence tau j = j
by construction.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .exactla import (
    MatrixElement,
    Subspace,
    kernel_on_subspace,
    span_of_matrices,
    weight_decomposition,
)
from .liealg import (
    AlgebraRealization,
    ClassicalType,
    RootDatum,
    Weight,
    _solve_apply,
    _solve_factor,
    build_classical,
    datum_from_decomposition,
)

PAIR_KINDS = ("gl_down_gl", "sl_s_glgl", "so_down_so", "sp_down_gl", "group_case")


@dataclass(frozen=True)
class PairSpec:
    """Catalog identifier with parameters, e.g. PairSpec('sl_s_glgl', p=2, q=2)."""

    kind: str
    params: tuple

    def __init__(self, kind: str, **params):
        if kind not in PAIR_KINDS:
            raise ValueError("unknown pair kind %r (known: %s)" % (kind, ", ".join(PAIR_KINDS)))
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "params", tuple(sorted(params.items())))

    def get(self, key):
        return dict(self.params)[key]

    @property
    def id(self) -> str:
        return self.kind + ":" + ",".join("%s=%s" % kv for kv in self.params)

    @classmethod
    def parse(cls, text: str) -> "PairSpec":
        kind, _, rest = text.partition(":")
        kind = kind.strip()
        params = {}
        if rest.strip():
            for item in rest.split(","):
                m = re.fullmatch(r"\s*(\w+)\s*=\s*([\w]+)\s*", item)
                if not m:
                    raise ValueError("malformed pair parameter %r" % item)
                key, val = m.group(1), m.group(2)
                params[key] = val if key == "type" else int(val)
        return cls(kind, **params)

    def __str__(self):
        return self.id


class Involution:
    """Algebra involution realized as conjugation Z -> A Z A^{-1}."""

    def __init__(self, conjugator: MatrixElement, is_inner: bool):
        self.conjugator = conjugator
        self.is_inner = is_inner
        sq = conjugator @ conjugator
        if sq != MatrixElement.identity(conjugator.dim):
            raise ValueError("conjugator must square to the identity")

    def __call__(self, x: MatrixElement) -> MatrixElement:
        return self.conjugator @ x @ self.conjugator


@dataclass
class TauSplit:
    plus: Subspace
    minus: Subspace
    pr: Subspace


@dataclass
class SymmetricPair:
    spec: PairSpec
    g: AlgebraRealization
    tau: Involution
    fixed: Subspace
    minus: Subspace
    j_tau_basis: list
    j_tau_probes: list
    factor: Optional[AlgebraRealization] = None
    _restricted_datum: Optional[RootDatum] = field(default=None, repr=False)
    _restrict_matrix: Optional[list] = field(default=None, repr=False)
    _jtau_solver: Optional[list] = field(default=None, repr=False)
    _tau_star_matrix: Optional[list] = field(default=None, repr=False)
    _ambient_restricted_roots: Optional[set] = field(default=None, repr=False)

    @property
    def label(self) -> str:
        return self.spec.id

    @property
    def restricted_eps_dim(self) -> int:
        return len(self.j_tau_probes)

    def acts_trivially_on_j(self) -> bool:
        return all(self.tau(h) == h for h in self.g.cartan_basis)

    # -- weight plumbing between j and j^tau

    def restrict_weight(self, w: Weight) -> Weight:
        """Restriction of a j-weight to j^tau, in the pair's coordinates."""
        if self._restrict_matrix is None:
            self._restrict_matrix = [
                self.g.eps_params(p).coords for p in self.j_tau_probes
            ]
        return Weight(
            sum((wi * ri for wi, ri in zip(w.coords, row)), Fraction(0))
            for row in self._restrict_matrix
        )

    def jtau_params(self, h: MatrixElement) -> tuple:
        """Coordinates of a j^tau element in the probe parametrization."""
        if self._jtau_solver is None:
            cols = [p.diagonal_entries() for p in self.j_tau_probes]
            self._jtau_solver = _solve_factor(cols)
        sol = _solve_apply(self._jtau_solver, h.diagonal_entries())
        if sol is None:
            raise ValueError("element is not in the span of the j^tau probes")
        return tuple(sol)

    def jtau_element(self, params) -> MatrixElement:
        out = MatrixElement.zero(self.g.matrix_dim)
        for c, p in zip(params, self.j_tau_probes):
            if c:
                out = out + p.scale(c)
        return out

    def tau_star(self, alpha: Weight) -> Weight:
        """Pullback of a j-weight along tau (tau permutes the root spaces)."""
        if self._tau_star_matrix is None:
            self._tau_star_matrix = [
                self.g.eps_params(self.tau(p)).coords for p in self.g.eps_probes
            ]
        return Weight(
            sum((ai * mi for ai, mi in zip(alpha.coords, row)), Fraction(0))
            for row in self._tau_star_matrix
        )

    def ambient_restricted_roots(self) -> set:
        """Nonzero j^tau-weights of g: the restricted root set of the pair."""
        if self._ambient_restricted_roots is None:
            parts = weight_decomposition(self.j_tau_probes, self.g.algebra)
            self._ambient_restricted_roots = {
                Weight(wt) for wt, _ in parts if any(wt)
            }
        return self._ambient_restricted_roots


def tau_split(pair: SymmetricPair, space: Subspace) -> TauSplit:
    """(V cap g^tau, V cap g^{-tau}, pr_tau(V)) for a subspace V of g."""
    plus = space.intersect(pair.fixed)
    minus = space.intersect(pair.minus)
    half = Fraction(1, 2)
    projected = [
        (b + pair.tau(b)).scale(half) for b in space.matrices()
    ]
    pr = span_of_matrices(
        [m for m in projected if not m.is_zero()], pair.g.matrix_dim
    )
    return TauSplit(plus=plus, minus=minus, pr=pr)


def restricted_root_data(pair: SymmetricPair) -> RootDatum:
    """Root datum of (g^tau, j^tau) in the pair's restricted coordinates."""
    if pair._restricted_datum is None:
        parts = weight_decomposition(pair.j_tau_probes, pair.fixed)
        try:
            datum = datum_from_decomposition(pair.restricted_eps_dim, parts)
        except ValueError as exc:
            raise ValueError(
                "restricted datum failed (j^tau is not a Cartan of g^tau?): %s" % exc
            ) from exc
        pair._restricted_datum = datum
    return pair._restricted_datum


# ---------------------------------------------------------------------------
# catalog construction
# ---------------------------------------------------------------------------

def _eigen_subspace(pair_tau, algebra: Subspace, sign: int, dim: int) -> Subspace:
    images = []
    for b in algebra.matrices():
        images.append((pair_tau(b) - b.scale(sign)).vectorize())
    return kernel_on_subspace(images, algebra)


def _block_embed(x: MatrixElement, total: int, offset: int) -> MatrixElement:
    return MatrixElement(total, {(i + offset, j + offset): v for (i, j), v in x.items()})


def _doubled_realization(factor: AlgebraRealization) -> AlgebraRealization:
    m = factor.matrix_dim
    total = 2 * m
    basis = factor.algebra.matrices()
    algebra = span_of_matrices(
        [_block_embed(b, total, 0) for b in basis]
        + [_block_embed(b, total, m) for b in basis],
        total,
    )
    cartan = [_block_embed(h, total, 0) for h in factor.cartan_basis] + [
        _block_embed(h, total, m) for h in factor.cartan_basis
    ]
    probes = [_block_embed(p, total, 0) for p in factor.eps_probes] + [
        _block_embed(p, total, m) for p in factor.eps_probes
    ]
    positions = list(factor.eps_positions) + [p + m for p in factor.eps_positions]
    return AlgebraRealization(
        type=None,
        label="%s+%s" % (factor.label, factor.label),
        matrix_dim=total,
        algebra=algebra,
        cartan_basis=cartan,
        eps_probes=probes,
        eps_positions=positions,
        has_center=factor.has_center,
    )


def _conjugator_and_probes(spec: PairSpec):
    kind = spec.kind
    if kind == "gl_down_gl":
        n, l = spec.get("n"), spec.get("l")
        if n < 1 or not 1 <= l <= n + 1:
            raise ValueError("gl_down_gl requires n >= 1 and 1 <= l <= n+1")
        g = build_classical(ClassicalType("A", n), with_center=True)
        diag = [1] * (n + 1)
        diag[l - 1] = -1
        conj = MatrixElement.diagonal(diag)
        return g, Involution(conj, is_inner=True), list(g.eps_probes), None
    if kind == "sl_s_glgl":
        p, q = spec.get("p"), spec.get("q")
        if p < 1 or q < 1 or p + q < 2:
            raise ValueError("sl_s_glgl requires p, q >= 1")
        g = build_classical(ClassicalType("A", p + q - 1))
        conj = MatrixElement.diagonal([1] * p + [-1] * q)
        return g, Involution(conj, is_inner=True), list(g.eps_probes), None
    if kind == "so_down_so":
        m = spec.get("m")
        if m < 4:
            raise ValueError("so_down_so requires m >= 4")
        if m % 2 == 0:
            n = m // 2
            g = build_classical(ClassicalType("B", n))  # ambient so_{2n+1}
            diag = [1] * (2 * n + 1)
            diag[n] = -1
            conj = MatrixElement.diagonal(diag)
            return g, Involution(conj, is_inner=True), list(g.eps_probes), None
        n = (m - 1) // 2
        g = build_classical(ClassicalType("D", n + 1))  # ambient so_{2n+2}
        size = 2 * n + 2
        data = {(i, i): Fraction(1) for i in range(size) if i not in (n, n + 1)}
        data[(n, n + 1)] = Fraction(1)
        data[(n + 1, n)] = Fraction(1)
        conj = MatrixElement(size, data)
        return g, Involution(conj, is_inner=False), list(g.eps_probes[:n]), None
    if kind == "sp_down_gl":
        n = spec.get("n")
        if n < 2:
            raise ValueError("sp_down_gl requires n >= 2")
        g = build_classical(ClassicalType("C", n))
        conj = MatrixElement.diagonal([1] * n + [-1] * n)
        return g, Involution(conj, is_inner=True), list(g.eps_probes), None
    # group case
    tname = spec.get("type")
    ctype = ClassicalType(tname[0], int(tname[1:]))
    factor = build_classical(ctype)
    g = _doubled_realization(factor)
    m = factor.matrix_dim
    data = {}
    for i in range(m):
        data[(i, m + i)] = Fraction(1)
        data[(m + i, i)] = Fraction(1)
    conj = MatrixElement(2 * m, data)
    probes = [
        _block_embed(p, 2 * m, 0) + _block_embed(p, 2 * m, m)
        for p in factor.eps_probes
    ]
    return g, Involution(conj, is_inner=False), probes, factor


def build_pair(spec: PairSpec) -> SymmetricPair:
    """Construct a catalog symmetric pair with all derived subspaces."""
    g, tau, probes, factor = _conjugator_and_probes(spec)
    for b in g.algebra.matrices():
        if not g.algebra.contains_matrix(tau(b)):
            raise AssertionError("conjugator does not preserve the algebra")
    fixed = _eigen_subspace(tau, g.algebra, 1, g.matrix_dim)
    minus = _eigen_subspace(tau, g.algebra, -1, g.matrix_dim)
    if fixed.dim + minus.dim != g.dim:
        raise AssertionError("tau eigenspaces do not exhaust the algebra")
    cartan_space = span_of_matrices(g.cartan_basis, g.matrix_dim)
    jtau_space = _eigen_subspace(tau, cartan_space, 1, g.matrix_dim)
    j_tau_basis = jtau_space.matrices()
    pair = SymmetricPair(
        spec=spec,
        g=g,
        tau=tau,
        fixed=fixed,
        minus=minus,
        j_tau_basis=j_tau_basis,
        j_tau_probes=probes,
        factor=factor,
    )
    return pair


def catalog_pairs(rank_bound: int, simple_only: bool = False):
    """All catalog specs with ambient rank up to the bound."""
    specs = []
    for n in range(1, rank_bound + 1):
        for l in range(1, n + 2):
            specs.append(PairSpec("gl_down_gl", n=n, l=l))
    for total in range(2, rank_bound + 2):
        for p in range(1, total):
            q = total - p
            if p <= q:
                specs.append(PairSpec("sl_s_glgl", p=p, q=q))
    for m in range(4, 2 * rank_bound + 1):
        ambient_rank = (m // 2) if m % 2 == 0 else (m + 1) // 2
        if m % 2 == 1 and ambient_rank < 3:
            continue
        if ambient_rank <= rank_bound:
            specs.append(PairSpec("so_down_so", m=m))
    for n in range(2, rank_bound + 1):
        specs.append(PairSpec("sp_down_gl", n=n))
    if not simple_only:
        for fam, lo in (("A", 1), ("B", 2), ("C", 2), ("D", 3)):
            for r in range(lo, rank_bound // 2 + 1):
                specs.append(PairSpec("group_case", type="%s%d" % (fam, r)))
    return specs
