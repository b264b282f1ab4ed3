"""Parabolic subalgebras p(H), closedness criteria and closed-orbit censuses.

A parabolic containing the diagonal Cartan is determined by the sign pattern
of the roots on its defining hyperbolic element, so Weyl sweeps and census
deduplication work on root patterns; the exact subspaces are materialized
lazily when a report needs them.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .exactla import (
    MatrixElement,
    NilpotencyReport,
    Subspace,
    bracket,
    nilpotent_subalgebra_test,
)
from .liealg import (
    AlgebraRealization,
    RootDatum,
    Weight,
    WeylElement,
    _solve_apply,
    _solve_factor,
    root_datum,
    weyl_group,
)
from .pairs import SymmetricPair, restricted_root_data, tau_split


class IncompatibleRestrictionError(ValueError):
    """The parabolic is not stable under the pair involution."""


# ---------------------------------------------------------------------------
# ParabolicData
# ---------------------------------------------------------------------------

@dataclass
class ParabolicData:
    g: AlgebraRealization
    H: MatrixElement
    levi_roots: frozenset
    nilradical_roots: frozenset
    negative_roots: frozenset
    _l: Optional[Subspace] = field(default=None, repr=False)
    _u_plus: Optional[Subspace] = field(default=None, repr=False)
    _u_minus: Optional[Subspace] = field(default=None, repr=False)
    _space: Optional[Subspace] = field(default=None, repr=False)

    @property
    def pattern(self):
        """Canonical key: a parabolic containing j is its root sign pattern."""
        return (self.levi_roots, self.nilradical_roots)

    @property
    def datum(self) -> RootDatum:
        return root_datum(self.g)

    def _span_roots(self, roots, include_cartan=False) -> Subspace:
        datum = self.datum
        rows = []
        if include_cartan:
            rows.extend(dict(r) for r in datum.zero_space.rows)
        for a in roots:
            rows.extend(dict(r) for r in datum.root_spaces[a].rows)
        return Subspace(self.g.matrix_dim ** 2, rows)

    @property
    def l(self) -> Subspace:
        if self._l is None:
            self._l = self._span_roots(self.levi_roots, include_cartan=True)
        return self._l

    @property
    def u_plus(self) -> Subspace:
        if self._u_plus is None:
            self._u_plus = self._span_roots(self.nilradical_roots)
        return self._u_plus

    @property
    def u_minus(self) -> Subspace:
        if self._u_minus is None:
            self._u_minus = self._span_roots(self.negative_roots)
        return self._u_minus

    @property
    def space(self) -> Subspace:
        """The parabolic l + u_plus as a subspace."""
        if self._space is None:
            self._space = self._span_roots(
                self.levi_roots | self.nilradical_roots, include_cartan=True
            )
        return self._space

    @property
    def is_borel(self) -> bool:
        return not self.levi_roots

    def levi_datum(self) -> RootDatum:
        return self.datum.sub_datum(self.levi_roots)

    def nilradical_abelian(self) -> bool:
        mats = self.u_plus.matrices()
        return all(
            bracket(a, b).is_zero() for a in mats for b in mats
        )

    def is_scalar_type(self, lam: Weight) -> bool:
        return all(self.datum.coroot_pairing(lam, a) == 0 for a in self.levi_roots)

    def __eq__(self, other):
        return (
            isinstance(other, ParabolicData)
            and self.g is other.g
            and self.pattern == other.pattern
        )

    def __hash__(self):
        return hash(self.pattern)

    def __repr__(self):
        return "ParabolicData(levi=%d roots, nilradical=%d roots)" % (
            len(self.levi_roots),
            len(self.nilradical_roots),
        )


def _pattern_from_params(datum: RootDatum, params) -> tuple:
    levi, nilrad, neg = [], [], []
    for a in datum.roots:
        v = sum((c * t for c, t in zip(a.coords, params)), Fraction(0))
        if v > 0:
            nilrad.append(a)
        elif v < 0:
            neg.append(a)
        else:
            levi.append(a)
    return frozenset(levi), frozenset(nilrad), frozenset(neg)


def parabolic_from_H(g: AlgebraRealization, h: MatrixElement) -> ParabolicData:
    """Parabolic defined by the sign of the roots on a diagonal H in j."""
    if not h.is_diagonal() or not g.algebra.contains_matrix(h):
        raise ValueError("H must lie in the diagonal Cartan of the realization")
    datum = root_datum(g)
    params = g.eps_params(h).coords
    levi, nilrad, neg = _pattern_from_params(datum, params)
    return ParabolicData(
        g=g, H=h, levi_roots=levi, nilradical_roots=nilrad, negative_roots=neg
    )


def parabolic_from_simple_subset(g: AlgebraRealization, subset) -> ParabolicData:
    """Standard parabolic whose Levi system is generated by the given simples.

    H is the sum of fundamental coweights dual to the simple roots outside
    the subset, solved exactly inside the Cartan.
    """
    datum = root_datum(g)
    subset = set(subset)
    if not subset <= set(range(len(datum.simple_roots))):
        raise ValueError("subset must consist of simple root indices")
    columns = [
        tuple(a.dot(g.eps_params(hj)) for a in datum.simple_roots)
        for hj in g.cartan_basis
    ]
    target = tuple(
        Fraction(0) if i in subset else Fraction(1)
        for i in range(len(datum.simple_roots))
    )
    coeffs = _solve_apply(_solve_factor(columns), target)
    if coeffs is None:
        raise AssertionError("coweight system has no solution")
    h = MatrixElement.zero(g.matrix_dim)
    for c, hj in zip(coeffs, g.cartan_basis):
        if c:
            h = h + hj.scale(c)
    return parabolic_from_H(g, h)


# ---------------------------------------------------------------------------
# compatibility and closedness
# ---------------------------------------------------------------------------

@dataclass
class CompatibilityReport:
    tau_stable: bool
    compatible: bool
    H_fixed: Optional[MatrixElement]


@dataclass
class ClosednessReport:
    closed: bool
    pr_u: Subspace
    nil_report: NilpotencyReport
    l_tau: Optional[Subspace] = None
    p_tau: Optional[Subspace] = None
    gk_dim: Optional[int] = None

    @property
    def p_tau_levi(self):
        return (self.l_tau, self.pr_u)


def compatibility_report(p: ParabolicData, pair: SymmetricPair) -> CompatibilityReport:
    """tau-stability of p, equivalent to g^tau-compatibility for symmetric tau."""
    if p.g is not pair.g:
        raise ValueError("parabolic und pair live on different realizations")
    roots_of_p = p.levi_roots | p.nilradical_roots
    stable = {pair.tau_star(a) for a in roots_of_p} == roots_of_p
    h_fixed = None
    if stable:
        h_fixed = (p.H + pair.tau(p.H)).scale(Fraction(1, 2))
        again = parabolic_from_H(p.g, h_fixed)
        if again.pattern != p.pattern:
            raise AssertionError("p(H + tau H) differs from p for a stable parabolic")
    return CompatibilityReport(tau_stable=stable, compatible=stable, H_fixed=h_fixed)


def closedness_report(p: ParabolicData, pair: SymmetricPair) -> ClosednessReport:
    """Closedness of the symmetric-subgroup orbit through p, via pr_tau(u)."""
    if p.g is not pair.g:
        raise ValueError("parabolic and pair live on different realizations")
    split = tau_split(pair, p.u_plus)
    nil = nilpotent_subalgebra_test(split.pr, pair.g.algebra)
    closed = nil.bracket_closed and nil.nilpotent
    if not closed:
        return ClosednessReport(closed=False, pr_u=split.pr, nil_report=nil)
    l_tau = p.l.intersect(pair.fixed)
    p_tau = p.space.intersect(pair.fixed)
    if p_tau.dim != l_tau.dim + split.pr.dim:
        raise AssertionError("Levi decomposition of p^tau failed the dimension check")
    if p_tau != l_tau.sum(split.pr):
        raise AssertionError("p^tau is not spanned by l^tau and pr_tau(u)")
    gk = pair.fixed.dim - p_tau.dim
    return ClosednessReport(
        closed=True, pr_u=split.pr, nil_report=nil, l_tau=l_tau, p_tau=p_tau, gk_dim=gk
    )


def condition_iii_spot_check(
    p: ParabolicData, pair: SymmetricPair, samples: int = 20, seed: int = 20260810
) -> bool:
    """Randomized check that pr_tau(u) consists of ad-nilpotent elements.

    Basis elements are always tested; `samples` fixed-seed rational
    combinations with coefficients in {-3,...,3} follow.  This is the
    validation layer for the implemented bracket criterion.  Since ad is
    linear, the operator columns of the basis are built once and combined
    per sample.
    """
    from .exactla import ad_operator_columns, nilpotent_operator_chain

    split = tau_split(pair, p.u_plus)
    mats = split.pr.matrices()
    if not mats:
        return True
    basis_columns = [ad_operator_columns(z, pair.g.algebra) for z in mats]
    for columns in basis_columns:
        if not nilpotent_operator_chain(columns):
            return False
    rng = random.Random(seed)
    d = pair.g.algebra.dim
    for _ in range(samples):
        coeffs = [rng.randint(-3, 3) for _ in mats]
        combined = [{} for _ in range(d)]
        for c, columns in zip(coeffs, basis_columns):
            if not c:
                continue
            for j, col in enumerate(columns):
                tgt = combined[j]
                for i, v in col.items():
                    w = tgt.get(i, 0) + c * v
                    if w:
                        tgt[i] = w
                    else:
                        tgt.pop(i, None)
        if any(combined) and not nilpotent_operator_chain(combined):
            return False
    return True


@dataclass
class TensorClosednessReport:
    closed: bool
    intersection_parabolic: bool


def tensor_closedness(p1: ParabolicData, p2: ParabolicData) -> TensorClosednessReport:
    """Root-wise criterion: p1 cap p2 parabolic iff each root or its negative
    lies in both."""
    if p1.g is not p2.g:
        raise ValueError("parabolics live on different ambient algebras")
    datum = p1.datum
    r1 = p1.levi_roots | p1.nilradical_roots
    r2 = p2.levi_roots | p2.nilradical_roots
    ok = all(
        (a in r1 and a in r2) or (-a in r1 and -a in r2)
        for a in datum.positive_roots
    )
    return TensorClosednessReport(closed=ok, intersection_parabolic=ok)


# ---------------------------------------------------------------------------
# closed-orbit census
# ---------------------------------------------------------------------------

@dataclass
class OrbitCensusReport:
    total_parabolics_containing_j: int
    closed_count: int
    representatives: list  # (descriptor, ParabolicData, gk_dim)


def enumerate_weyl_translates(pair: SymmetricPair, subset):
    """Distinct parabolics containing j of the given standard type.

    Returns (pattern -> ParabolicData, pattern -> set of defining eps-params).
    """
    g = pair.g
    datum = root_datum(g)
    wgroup = weyl_group(datum)
    p0 = parabolic_from_simple_subset(g, subset)
    t0 = g.eps_params(p0.H).coords
    by_pattern = {}
    params_of = {}
    for w in wgroup:
        t = w.apply_params(t0)
        levi, nilrad, neg = _pattern_from_params(datum, t)
        key = (levi, nilrad)
        if key not in by_pattern:
            by_pattern[key] = ParabolicData(
                g=g,
                H=g.cartan_element(Weight(t)),
                levi_roots=levi,
                nilradical_roots=nilrad,
                negative_roots=neg,
            )
        params_of.setdefault(key, set()).add(t)
    return by_pattern, params_of


def _census_generators(pair: SymmetricPair):
    """Census group generators as linear maps on ambient Cartan parameters.

    Each Weyl generator of W(g^tau, j^tau) is extended by the identity on
    j^{-tau}; the extension acts on a parameter vector t through the tau
    split of the corresponding Cartan element.
    """
    rdatum = restricted_root_data(pair)
    gens = []
    from .liealg import reflection_element

    for a in rdatum.simple_roots:
        gens.append(reflection_element(rdatum, a))
    half = Fraction(1, 2)

    def make_action(sigma: WeylElement):
        def act(t):
            h = pair.g.cartan_element(Weight(t))
            hp = (h + pair.tau(h)).scale(half)
            hm = h - hp
            s = pair.jtau_params(hp)
            h2 = pair.jtau_element(sigma.apply_params(s)) + hm
            return pair.g.eps_params(h2).coords

        return act

    return [make_action(s) for s in gens]


def closed_orbit_census(pair: SymmetricPair, subset) -> OrbitCensusReport:
    """Count closed orbits among parabolics containing j of a standard type.

    Orbits of the closed set are the connected components under the action
    of W(g^tau, j^tau), extended trivially to j^{-tau}.
    """
    by_pattern, params_of = enumerate_weyl_translates(pair, subset)
    reports = {}
    for key, p in by_pattern.items():
        rep = closedness_report(p, pair)
        if rep.closed:
            reports[key] = rep

    parent = {key: key for key in reports}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    datum = root_datum(pair.g)
    actions = _census_generators(pair)
    for key in reports:
        for t in params_of[key]:
            for act in actions:
                t2 = act(t)
                levi, nilrad, _ = _pattern_from_params(datum, t2)
                key2 = (levi, nilrad)
                if key2 in reports:
                    union(key, key2)

    classes = {}
    for key in reports:
        classes.setdefault(find(key), []).append(key)

    def canon(key):
        return tuple(sorted((a.coords for a in key[1])))

    representatives = []
    for members in classes.values():
        rep_key = min(members, key=canon)
        p = by_pattern[rep_key]
        descriptor = "H=(%s)" % ", ".join(
            str(c) for c in pair.g.eps_params(p.H).coords
        )
        representatives.append((descriptor, p, reports[rep_key].gk_dim))
    representatives.sort(key=lambda r: (r[2], r[0]))
    return OrbitCensusReport(
        total_parabolics_containing_j=len(by_pattern),
        closed_count=len(classes),
        representatives=representatives,
    )


# ---------------------------------------------------------------------------
# double cosets (secondary census oracle for inner involutions)
# ---------------------------------------------------------------------------

def double_coset_count(elements, left_gens, right_gens) -> int:
    """|L \\ W / R| by orbit partitioning under generator multiplication."""
    index = {w: w for w in elements}
    parent = {w: w for w in elements}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    for w in elements:
        for s in left_gens:
            union(w, index[s.compose(w)])
        for r in right_gens:
            union(w, index[w.compose(r)])
    return len({find(w) for w in elements})


def levi_weyl_generators(p: ParabolicData):
    """Reflections in the simple roots of the Levi factor."""
    from .liealg import reflection_element

    levi = p.levi_datum()
    return [reflection_element(levi, a) for a in levi.simple_roots]
