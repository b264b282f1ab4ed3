"""Branching engine for restrictions of generalized Verma modules.

Everything is graded exactly: the symmetric algebra of u_-'' is expanded
degree by degree, tensored with the restricted Levi module and peeled into
irreducible l'-constituents, which accumulates the branching multiplicities
of the character identity.  All series arithmetic lives in the integer
displacement lattice relative to lambda restricted to j'; genericity
constraints ride along as symbolic assumptions and are never evaluated
inside the lattice.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .exactla import weight_decomposition
from .liealg import (
    RootDatum,
    Weight,
    freudenthal_character,
    regular_order_key,
    weyl_group,
)
from .pairs import PairSpec, SymmetricPair, build_pair, catalog_pairs, restricted_root_data, tau_split
from .parabolic import (
    IncompatibleRestrictionError,
    ParabolicData,
    compatibility_report,
    parabolic_from_simple_subset,
)


# ---------------------------------------------------------------------------
# Verma data
# ---------------------------------------------------------------------------

@dataclass
class VermaSpec:
    """A generalized Verma module datum: parabolic plus highest weight.

    `lam is None` means a formal generic weight of scalar type: its values
    on the Levi center stay symbolic and only displacements are tracked.
    """

    parabolic: ParabolicData
    lam: Optional[Weight]
    scalar_type: bool

    @classmethod
    def generic(cls, parabolic: ParabolicData) -> "VermaSpec":
        return cls(parabolic=parabolic, lam=None, scalar_type=True)

    @classmethod
    def of(cls, parabolic: ParabolicData, lam: Weight) -> "VermaSpec":
        datum = parabolic.datum
        for a in parabolic.levi_roots:
            pairing = datum.coroot_pairing(lam, a)
            if pairing.denominator != 1:
                raise ValueError("lambda is not integral on the Levi coroots")
            if a in set(datum.positive_roots) and pairing < 0:
                raise ValueError("lambda is not dominant for the Levi factor")
        scalar = all(datum.coroot_pairing(lam, a) == 0 for a in parabolic.levi_roots)
        return cls(parabolic=parabolic, lam=lam, scalar_type=scalar)


@dataclass(frozen=True)
class BranchEntry:
    delta_displacement: tuple
    multiplicity: int
    first_degree: int


@dataclass
class BranchingTable:
    """The summands (delta, m(delta; lambda)) of a branching identity."""

    base_offset: Optional[Weight]
    entries: tuple
    degree_bound: int
    genericity_assumptions: tuple

    def as_dict(self):
        return {e.delta_displacement: e.multiplicity for e in self.entries}

    def degrees(self):
        return {e.delta_displacement: e.first_degree for e in self.entries}

    def is_multiplicity_free(self) -> bool:
        return all(e.multiplicity == 1 for e in self.entries)

    def __len__(self):
        return len(self.entries)


def _sorted_entries(entries: Iterable[BranchEntry]) -> tuple:
    return tuple(
        sorted(entries, key=lambda e: (e.first_degree, e.delta_displacement))
    )


@dataclass
class CharacterSeries:
    """Graded displacement multiset: (degree, displacement) -> multiplicity."""

    base_offset: Optional[Weight]
    terms: dict
    degree_bound: int

    def at_degree(self, k: int) -> dict:
        return {d: m for (deg, d), m in self.terms.items() if deg == k}


# ---------------------------------------------------------------------------
# symmetric power characters
# ---------------------------------------------------------------------------

def _as_multiset(weights) -> dict:
    if isinstance(weights, dict):
        return {w: int(m) for w, m in weights.items() if m}
    out = {}
    for w in weights:
        out[w] = out.get(w, 0) + 1
    return out


def sym_power_character(weights, k: int) -> dict:
    """Weight multiset of S^k of a module with the given weight multiset.

    One-variable-at-a-time convolution: appending a weight w of multiplicity
    m multiplies the series by (1 - e^w)^{-m}, i.e. degree a contributes the
    binomial C(a+m-1, m-1).
    """
    if k < 0:
        raise ValueError("negative symmetric power")
    return sym_power_characters(weights, k)[k]


def sym_power_characters(weights, top: int) -> list:
    """All S^0 .. S^top weight multisets at once (shared recursion).

    An empty weight set yields empty layers; callers treat degree 0 as the
    neutral element then.
    """
    ms = _as_multiset(weights)
    layers = [{} for _ in range(top + 1)]
    if not ms:
        return layers
    zero = next(iter(ms))
    layers[0] = {zero - zero: 1}
    for w, m in sorted(ms.items(), key=lambda it: regular_order_key(it[0])):
        for k in range(top, 0, -1):
            acc = {}
            for a in range(1, k + 1):
                coeff = math.comb(a + m - 1, m - 1)
                shift = w.scale(a)
                for d, c in layers[k - a].items():
                    key = d + shift
                    acc[key] = acc.get(key, 0) + c * coeff
            for key, c in acc.items():
                layers[k][key] = layers[k].get(key, 0) + c
    return layers


# ---------------------------------------------------------------------------
# Levi restriction and character peeling
# ---------------------------------------------------------------------------

def restrict_finite_module(
    pair: SymmetricPair,
    l_datum: RootDatum,
    l_prime_datum: RootDatum,
    lam: Weight,
) -> dict:
    """Weight multiset of F_lambda restricted to j', exactly.

    Freudenthal runs over the Levi root datum in ambient coordinates (the
    central part of lambda rides along in the coordinates), then every
    weight is restricted to j'.
    """
    char = freudenthal_character(l_datum, lam)
    out = {}
    for w, m in char.items():
        r = pair.restrict_weight(w)
        out[r] = out.get(r, 0) + m
    return out


def decompose_character(char, datum: RootDatum):
    """Greedy peel of a semisimple module character into highest weights.

    Repeatedly selects the maximal remaining weight for the fixed regular
    order, asserts dominance, and subtracts the Freudenthal character.  A
    non-dominant maximum or a negative residual multiplicity signals an
    engine bug or an invalid input and raises.
    """
    work = dict(_as_multiset(char))
    cache = {}
    out = []
    while work:
        mu = max(work, key=regular_order_key)
        mult = work[mu]
        if mult < 0:
            raise ValueError("negative residual multiplicity at %r" % (mu,))
        if not datum.is_dominant_integral(mu):
            raise ValueError(
                "maximal weight %r is not dominant integral for the Levi" % (mu,)
            )
        if mu not in cache:
            cache[mu] = freudenthal_character(datum, mu)
        for w, m in cache[mu].items():
            c = work.get(w, 0) - mult * m
            if c:
                work[w] = c
            else:
                work.pop(w, None)
        out.append((mu, mult))
    out.sort(key=lambda t: regular_order_key(t[0]), reverse=True)
    return out


# ---------------------------------------------------------------------------
# the branching pipeline
# ---------------------------------------------------------------------------

def _restricted_weights(pair: SymmetricPair, space) -> dict:
    if space.dim == 0:
        return {}
    parts = weight_decomposition(pair.j_tau_probes, space)
    return {Weight(wt): part.dim for wt, part in parts}


def _levi_prime_datum(p: ParabolicData, pair: SymmetricPair) -> RootDatum:
    rdatum = restricted_root_data(pair)
    roots = [
        b for b in rdatum.roots if p.l.contains_subspace(rdatum.root_spaces[b])
    ]
    return rdatum.sub_datum(roots)


@dataclass
class _EngineContext:
    pair: SymmetricPair
    spec: VermaSpec
    h_fixed: object
    u_prime_weights: dict
    u_second_weights: dict
    l_prime_datum: RootDatum
    f_block: dict
    base: Optional[Weight]
    _h_params: Optional[Weight] = None

    def level_of(self, w: Weight) -> Fraction:
        if self._h_params is None:
            self._h_params = Weight(self.pair.jtau_params(self.h_fixed))
        return -w.dot(self._h_params)


def _engine_context(spec: VermaSpec, pair: SymmetricPair) -> _EngineContext:
    p = spec.parabolic
    comp = compatibility_report(p, pair)
    if not comp.compatible:
        raise IncompatibleRestrictionError(
            "restriction not discretely decomposable for this embedding"
        )
    split = tau_split(pair, p.u_minus)
    if split.plus.dim + split.minus.dim != p.u_minus.dim:
        raise AssertionError("u_- failed to split under a stable parabolic")
    u_second = _restricted_weights(pair, split.minus)
    u_prime = _restricted_weights(pair, split.plus)
    l_prime = _levi_prime_datum(p, pair)
    if spec.lam is None:
        if not spec.scalar_type:
            raise ValueError("symbolic lambda requires scalar type")
        base = None
        eps = pair.restricted_eps_dim
        f_block = {Weight.zero(eps): 1}
    else:
        base = pair.restrict_weight(spec.lam)
        restricted = restrict_finite_module(
            pair, p.levi_datum(), l_prime, spec.lam
        )
        f_block = {w - base: m for w, m in restricted.items()}
    return _EngineContext(
        pair=pair,
        spec=spec,
        h_fixed=comp.H_fixed,
        u_prime_weights=u_prime,
        u_second_weights=u_second,
        l_prime_datum=l_prime,
        f_block=f_block,
        base=base,
    )


def _convolve(a: dict, b: dict) -> dict:
    out = {}
    for w1, m1 in a.items():
        for w2, m2 in b.items():
            key = w1 + w2
            out[key] = out.get(key, 0) + m1 * m2
    return out


def character_series(spec: VermaSpec, pair: SymmetricPair, degree_bound: int) -> CharacterSeries:
    """Degree-graded displacement character of F_lambda|_{l'} (x) S(u_-'')."""
    ctx = _engine_context(spec, pair)
    powers = sym_power_characters(ctx.u_second_weights, degree_bound)
    terms = {}
    for k in range(degree_bound + 1):
        char_k = _convolve(ctx.f_block, powers[k]) if powers[k] else (
            dict(ctx.f_block) if k == 0 else {}
        )
        for w, m in char_k.items():
            terms[(k, w)] = m
    return CharacterSeries(base_offset=ctx.base, terms=terms, degree_bound=degree_bound)


def branch_multiplicities(spec: VermaSpec, pair: SymmetricPair, degree_bound: int) -> BranchingTable:
    """Branching multiplicities m(delta; lambda) up to symmetric degree N.

    With a numeric lambda the peel runs on absolute restricted weights (the
    Levi pairings of lambda matter there); the symbolic scalar case peels
    displacements directly.
    """
    ctx = _engine_context(spec, pair)
    powers = sym_power_characters(ctx.u_second_weights, degree_bound)
    acc = {}
    for k in range(degree_bound + 1):
        if not powers[k]:
            if k > 0:
                continue
            char_k = dict(ctx.f_block)
        else:
            char_k = _convolve(ctx.f_block, powers[k])
        if ctx.base is not None:
            char_k = {ctx.base + d: m for d, m in char_k.items()}
        for delta, mult in decompose_character(char_k, ctx.l_prime_datum):
            if ctx.base is not None:
                delta = delta - ctx.base
            disp = delta.int_coords()
            if disp in acc:
                acc[disp][0] += mult
            else:
                acc[disp] = [mult, k]
    entries = [
        BranchEntry(delta_displacement=d, multiplicity=m, first_degree=k)
        for d, (m, k) in acc.items()
    ]
    assumptions = _assumptions_for(spec)
    return BranchingTable(
        base_offset=ctx.base,
        entries=_sorted_entries(entries),
        degree_bound=degree_bound,
        genericity_assumptions=assumptions,
    )


def _assumptions_for(spec: VermaSpec) -> tuple:
    notes = ["identity holds in the Grothendieck group of the restricted category"]
    if spec.lam is None:
        notes.append(
            "lambda generic of scalar type: central values stay symbolic"
        )
    return tuple(notes)


def finiteness_bound(spec: VermaSpec, pair: SymmetricPair, displacement) -> Optional[int]:
    """Largest degree that can still contribute to a given displacement.

    Contributions at degree k move the level by at least k*a with a the
    minimal positive eigenvalue of -ad(H) on u_-'', so k <= level/a.
    """
    ctx = _engine_context(spec, pair)
    if not ctx.u_second_weights:
        return 0
    a_min = min(ctx.level_of(w) for w in ctx.u_second_weights)
    lvl = ctx.level_of(Weight(displacement))
    if lvl < 0:
        return None
    return int(lvl / a_min)


# ---------------------------------------------------------------------------
# character identity verification
# ---------------------------------------------------------------------------

def _inv_euler_expand(start: dict, weights: dict, level_of, level_cap) -> dict:
    """Multiply a displacement multiset by prod (1-e^w)^{-mult}, truncated."""
    current = dict(start)
    for w, m in sorted(weights.items(), key=lambda it: regular_order_key(it[0])):
        step = level_of(w)
        if step <= 0:
            raise AssertionError("u_- weight with non-positive level")
        nxt = dict(current)
        for d, c in current.items():
            base_level = level_of(d)
            a = 1
            while base_level + a * step <= level_cap:
                key = d + w.scale(a)
                nxt[key] = nxt.get(key, 0) + c * math.comb(a + m - 1, m - 1)
                a += 1
        current = {d: c for d, c in nxt.items() if level_of(d) <= level_cap}
    return current


def verify_character_identity(
    spec: VermaSpec,
    pair: SymmetricPair,
    level: int,
    table: Optional[BranchingTable] = None,
) -> bool:
    """Exact comparison of both sides of the branching character identity.

    The left side is the PBW character of the generalized Verma module
    restricted to j'; the right side is the sum of restricted-side Verma
    characters weighted by the branching table.  Both are truncated at the
    given ad(H)-level and compared as exact multisets.
    """
    ctx = _engine_context(spec, pair)
    level_cap = Fraction(level)

    def lev(w: Weight) -> Fraction:
        return ctx.level_of(w)

    u_all = dict(ctx.u_prime_weights)
    for w, m in ctx.u_second_weights.items():
        u_all[w] = u_all.get(w, 0) + m

    lhs_start = {w: m for w, m in ctx.f_block.items() if lev(w) <= level_cap}
    lhs = _inv_euler_expand(lhs_start, u_all, lev, level_cap)

    if table is None:
        if ctx.u_second_weights:
            a_min = min(lev(w) for w in ctx.u_second_weights)
            bound = int(level_cap / a_min)
        else:
            bound = 0
        table = branch_multiplicities(spec, pair, bound)

    rhs = {}
    cache = {}
    for entry in table.entries:
        delta = Weight(entry.delta_displacement)
        if lev(delta) > level_cap:
            continue
        if delta not in cache:
            if ctx.base is None:
                fchar = freudenthal_character(ctx.l_prime_datum, delta)
            else:
                absolute = freudenthal_character(ctx.l_prime_datum, ctx.base + delta)
                fchar = {w - ctx.base: m for w, m in absolute.items()}
            cache[delta] = {
                w: m for w, m in fchar.items() if lev(w) <= level_cap
            }
        expanded = _inv_euler_expand(cache[delta], ctx.u_prime_weights, lev, level_cap)
        for w, m in expanded.items():
            c = rhs.get(w, 0) + entry.multiplicity * m
            if c:
                rhs[w] = c
            else:
                rhs.pop(w, None)

    return lhs == rhs


# ---------------------------------------------------------------------------
# strongly orthogonal roots and Schmid decompositions
# ---------------------------------------------------------------------------

def strongly_orthogonal_sequence(weights, ambient_roots) -> list:
    """Greedy maximal strongly orthogonal sequence from a weight set.

    At each step the highest remaining weight (fixed regular order) that is
    strongly orthogonal to everything selected so far is appended; alpha and
    beta are strongly orthogonal when neither the sum nor the difference is
    an ambient restricted root.
    """
    roots = set(ambient_roots)
    pool = sorted(set(weights), key=regular_order_key, reverse=True)
    seq = []
    for cand in pool:
        ok = all(
            (cand + prev) not in roots and (cand - prev) not in roots
            for prev in seq
        )
        if ok:
            seq.append(cand)
    return seq


@dataclass
class SchmidReport:
    sequence: list
    support: dict  # displacement Weight -> its symmetric degree
    degree_bound: int
    multiplicity_free: bool


def schmid_decomposition(pair: SymmetricPair, p: ParabolicData, degree_bound: int) -> SchmidReport:
    """Decomposition of S(u_-^{-tau}) with the strongly-orthogonal support.

    Requires an abelian nilradical and a stable parabolic; verifies degree by
    degree that the decomposition is multiplicity-free with highest weights
    in the predicted cone and returns the truncated support.
    """
    if not p.nilradical_abelian():
        raise ValueError("nilradical is not abelian: hypothesis violated")
    comp = compatibility_report(p, pair)
    if not comp.compatible:
        raise IncompatibleRestrictionError(
            "parabolic is not stable under the involution"
        )
    split = tau_split(pair, p.u_minus)
    weights = _restricted_weights(pair, split.minus)
    seq = strongly_orthogonal_sequence(
        weights.keys(), pair.ambient_restricted_roots()
    )
    eps = pair.restricted_eps_dim
    support = {Weight.zero(eps): 0}
    for total in range(1, degree_bound + 1):
        for comb in _decreasing_tuples(len(seq), total):
            w = Weight.zero(eps)
            for a, nu in zip(comb, seq):
                w = w + nu.scale(a)
            support[w] = total
    l_tau_datum = _levi_prime_datum(p, pair)
    powers = sym_power_characters(weights, degree_bound)
    for k in range(degree_bound + 1):
        char_k = powers[k] if powers[k] else ({Weight.zero(eps): 1} if k == 0 else {})
        constituents = decompose_character(char_k, l_tau_datum)
        expected = {w for w, deg in support.items() if deg == k}
        found = set()
        for hw, mult in constituents:
            if mult != 1:
                raise AssertionError(
                    "multiplicity %d at degree %d: S(u_-^{-tau}) is not "
                    "multiplicity-free here" % (mult, k)
                )
            found.add(hw)
        if found != expected:
            raise AssertionError(
                "degree %d constituents do not match the strongly orthogonal "
                "support" % k
            )
    return SchmidReport(
        sequence=seq,
        support=support,
        degree_bound=degree_bound,
        multiplicity_free=True,
    )


def _decreasing_tuples(length: int, total: int):
    """Weakly decreasing tuples of naturals with the given sum."""
    if length == 0:
        if total == 0:
            yield ()
        return

    def rec(remaining, cap, acc):
        slots_left = length - len(acc)
        if slots_left == 0:
            if remaining == 0:
                yield tuple(acc)
            return
        for a in range(min(cap, remaining), -1, -1):
            if remaining - a > a * (slots_left - 1):
                continue
            yield from rec(remaining - a, a, acc + [a])

    yield from rec(total, total, [])


# ---------------------------------------------------------------------------
# closed-form laws
# ---------------------------------------------------------------------------

def closed_form_law(family: str, params: dict, degree_bound: int) -> BranchingTable:
    """The explicit multiplicity-free branching laws, emitted directly.

    AA: gl_{n+1} down gl_1 + gl_n at the l-th embedding; BD: so_{2n+1} down
    so_{2n}; DB: so_{2n+2} down so_{2n+1}.  Entries are displacement
    vectors against the generic base offset, all with multiplicity one.
    """
    fam = family.upper()
    entries = []
    if fam == "AA":
        n, l = params["n"], params["l"]
        if not 1 <= l <= n + 1:
            raise ValueError("AA requires 1 <= l <= n+1")
        others = [i for i in range(n + 1) if i != l - 1]
        for k in _boxed_tuples(n, degree_bound):
            disp = [0] * (n + 1)
            ind = 0
            for pos, ki in zip(others, k):
                if pos < l - 1:
                    disp[pos] = -ki
                    ind += ki
                else:
                    disp[pos] = ki
                    ind -= ki
            disp[l - 1] = ind
            entries.append(
                BranchEntry(tuple(disp), 1, sum(k))
            )
        labels = [str(i + 1) for i in others]
        assumptions = (
            "lambda_i - lambda_j not in Z for distinct i, j in {%s}" % ", ".join(labels),
        )
    elif fam in ("BD", "DB"):
        n = params["n"]
        for k in _boxed_tuples(n, degree_bound):
            entries.append(BranchEntry(tuple(-ki for ki in k), 1, sum(k)))
        assumptions = (
            "lambda_i +/- lambda_j not in Z for 1 <= i < j <= %d" % n,
        )
    else:
        raise ValueError("unknown closed-form family %r" % family)
    return BranchingTable(
        base_offset=None,
        entries=_sorted_entries(entries),
        degree_bound=degree_bound,
        genericity_assumptions=assumptions,
    )


def _boxed_tuples(length: int, total_cap: int):
    """All natural tuples with coordinate sum at most the cap."""
    for combo in itertools.product(range(total_cap + 1), repeat=length):
        if sum(combo) <= total_cap:
            yield combo


def law_setting(family: str, params: dict):
    """The (pair, Borel spec) whose engine table the closed form predicts."""
    fam = family.upper()
    if fam == "AA":
        pair = build_pair(PairSpec("gl_down_gl", n=params["n"], l=params["l"]))
    elif fam == "BD":
        pair = build_pair(PairSpec("so_down_so", m=2 * params["n"]))
    elif fam == "DB":
        pair = build_pair(PairSpec("so_down_so", m=2 * params["n"] + 1))
    else:
        raise ValueError("unknown closed-form family %r" % family)
    borel = parabolic_from_simple_subset(pair.g, set())
    return pair, VermaSpec.generic(borel)


# ---------------------------------------------------------------------------
# genericity and the multiplicity-free scan
# ---------------------------------------------------------------------------

@dataclass
class GenericityReport:
    simple_certified: Optional[bool]
    distinct_infchar: Optional[bool]


def genericity_check(
    spec: VermaSpec,
    pair: Optional[SymmetricPair] = None,
    table: Optional[BranchingTable] = None,
) -> GenericityReport:
    """Simplicity certificate for the Verma module and, given a table, the
    pairwise-distinct infinitesimal character test for its entries."""
    simple = None
    if spec.lam is not None:
        datum = spec.parabolic.datum
        levi = set(spec.parabolic.levi_roots)
        simple = True
        for beta in datum.positive_roots:
            if beta in levi:
                continue
            val = datum.coroot_pairing(spec.lam + datum.rho, beta)
            if val.denominator == 1 and val >= 1:
                simple = False
                break
    distinct = None
    if table is not None:
        if pair is None or spec.lam is None:
            raise ValueError("distinct_infchar needs the pair and a numeric lambda")
        rdatum = restricted_root_data(pair)
        base = pair.restrict_weight(spec.lam)
        shifted = [
            Weight(e.delta_displacement) + base + rdatum.rho for e in table.entries
        ]
        wgroup = weyl_group(rdatum)
        orbits = [frozenset(w.apply(x) for w in wgroup) for x in shifted]
        distinct = True
        for i in range(len(orbits)):
            for j in range(i + 1, len(orbits)):
                if orbits[i] & orbits[j]:
                    distinct = False
                    break
            if not distinct:
                break
    return GenericityReport(simple_certified=simple, distinct_infchar=distinct)


@dataclass(frozen=True)
class MfScanRow:
    spec_id: str
    dim_g: int
    dim_fixed: int
    rank_g: int
    rank_fixed: int
    passes: bool


def mf_scan(rank_bound: int, include_failing: bool = False):
    """Evaluate dim g - dim g^tau <= rank g + rank g^tau over the catalog.

    Only pairs with simple ambient algebra participate; the gl-over-gl
    family is measured in its trace-projected sl incarnation.
    """
    if rank_bound > 6:
        raise ValueError("rank bound capped at 6")
    rows = []
    seen = set()
    for spec in catalog_pairs(rank_bound, simple_only=True):
        if spec.kind == "gl_down_gl":
            if spec.get("l") != 1:
                continue
        if spec.id in seen:
            continue
        seen.add(spec.id)
        pair = build_pair(spec)
        dim_g, dim_fixed = pair.g.dim, pair.fixed.dim
        rank_g = pair.g.rank
        rank_fixed = len(pair.j_tau_basis)
        if spec.kind == "gl_down_gl":
            dim_g -= 1
            dim_fixed -= 1
            rank_g = pair.g.rank - 1
            rank_fixed -= 1
        if rank_g > rank_bound:
            continue
        passes = dim_g - dim_fixed <= rank_g + rank_fixed
        rows.append(
            MfScanRow(
                spec_id=spec.id,
                dim_g=dim_g,
                dim_fixed=dim_fixed,
                rank_g=rank_g,
                rank_fixed=rank_fixed,
                passes=passes,
            )
        )
    if include_failing:
        return rows
    return [r for r in rows if r.passes]
