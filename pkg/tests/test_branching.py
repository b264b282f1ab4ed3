import itertools
import random
from fractions import Fraction

import pytest

from vermabranch import (
    BranchingTable,
    IncompatibleRestrictionError,
    MatrixElement,
    VermaSpec,
    Weight,
    branch_multiplicities,
    character_series,
    closed_form_law,
    decompose_character,
    finiteness_bound,
    freudenthal_character,
    genericity_check,
    law_setting,
    mf_scan,
    parabolic_from_H,
    parabolic_from_simple_subset,
    restrict_finite_module,
    restricted_root_data,
    schmid_decomposition,
    strongly_orthogonal_sequence,
    sym_power_character,
    verify_character_identity,
)
from vermabranch.branching import BranchEntry, _levi_prime_datum
from vermabranch.liealg import root_datum


def W(*coords):
    return Weight(coords)


# ---------------------------------------------------------------------------
# symmetric powers
# ---------------------------------------------------------------------------

def brute_force_sym_power(weights, k):
    """Oracle: enumerate degree-k monomials in an explicit basis."""
    expanded = []
    for w, m in weights.items():
        expanded.extend([w] * m)
    zero = next(iter(weights))
    zero = zero - zero
    out = {}
    for combo in itertools.combinations_with_replacement(range(len(expanded)), k):
        total = zero
        for i in combo:
            total = total + expanded[i]
        out[total] = out.get(total, 0) + 1
    return out


def test_sym_power_two_lines():
    result = sym_power_character({W(-1, 0): 1, W(0, -1): 1}, 2)
    assert result == {W(-2, 0): 1, W(-1, -1): 1, W(0, -2): 1}


def test_sym_power_single_weight():
    for k in range(4):
        assert sym_power_character({W(2, 1): 1}, k) == {W(2 * k, k): 1}


def test_sym_power_siegel_example():
    weights = {W(-2, 0): 1, W(-1, -1): 1, W(0, -2): 1}
    result = sym_power_character(weights, 2)
    assert result == brute_force_sym_power(weights, 2)
    assert len(result) == 5 and result[W(-2, -2)] == 2


def test_sym_power_with_multiplicities_matches_brute_force():
    rng = random.Random(11)
    for _ in range(6):
        weights = {}
        for _ in range(3):
            w = W(rng.randint(-2, 2), rng.randint(-2, 2))
            weights[w] = weights.get(w, 0) + rng.randint(1, 2)
        for k in range(4):
            assert sym_power_character(weights, k) == brute_force_sym_power(weights, k)


# ---------------------------------------------------------------------------
# restriction of the Levi module
# ---------------------------------------------------------------------------

def test_restrict_borel_case_single_weight(pairs):
    pair = pairs("so_down_so", m=4)
    borel = parabolic_from_simple_subset(pair.g, set())
    lam = W(Fraction(1, 2), Fraction(1, 3))
    spec = VermaSpec.of(borel, lam)
    out = restrict_finite_module(
        pair, borel.levi_datum(), _levi_prime_datum(borel, pair), lam
    )
    assert out == {pair.restrict_weight(lam): 1}


def test_restrict_scalar_heisenberg(pairs):
    # scalar type: the Levi module is one-dimensional
    pair = pairs("sl_s_glgl", p=2, q=2)
    heis = parabolic_from_simple_subset(pair.g, {1})
    spec = VermaSpec.of(heis, W(0, 0, 0, 0))
    assert spec.scalar_type
    out = restrict_finite_module(
        pair, heis.levi_datum(), _levi_prime_datum(heis, pair), W(0, 0, 0, 0)
    )
    assert out == {W(0, 0, 0, 0): 1}


def test_restrict_siegel_levi_regular_weight(pairs):
    pair = pairs("sp_down_gl", n=2)
    siegel = parabolic_from_simple_subset(pair.g, {0})
    lam = W(2, -1)  # <lam, (e1-e2)^> = 3: a four-dimensional gl2 module
    out = restrict_finite_module(
        pair, siegel.levi_datum(), _levi_prime_datum(siegel, pair), lam
    )
    assert sum(out.values()) == 4
    assert set(out) == {W(2, -1), W(1, 0), W(0, 1), W(-1, 2)}


def test_restrict_rejects_non_dominant(pairs):
    pair = pairs("sp_down_gl", n=2)
    siegel = parabolic_from_simple_subset(pair.g, {0})
    with pytest.raises(ValueError):
        restrict_finite_module(
            pair, siegel.levi_datum(), _levi_prime_datum(siegel, pair), W(-1, 2)
        )


# ---------------------------------------------------------------------------
# character peeling
# ---------------------------------------------------------------------------

def test_decompose_torus_character(pairs):
    pair = pairs("so_down_so", m=4)
    borel = parabolic_from_simple_subset(pair.g, set())
    torus = _levi_prime_datum(borel, pair)
    char = {W(1, 0): 2, W(0, -1): 1}
    assert sorted(decompose_character(char, torus), key=repr) == sorted(
        [(W(1, 0), 2), (W(0, -1), 1)], key=repr
    )


def test_decompose_a1_adjoint_plus_trivial(algebras):
    datum = root_datum(algebras("A", 1))
    char = {W(1, -1): 1, W(0, 0): 2, W(-1, 1): 1}
    out = decompose_character(char, datum)
    assert out == [(W(1, -1), 1), (W(0, 0), 1)]


def test_decompose_siegel_sym_square(pairs):
    # Sym^2(Sym^2 C^2) = Sym^4 + det^2: highest weights (-2,-2) and (0,-4)
    pair = pairs("sp_down_gl", n=2)
    siegel = parabolic_from_simple_subset(pair.g, {0})
    ldatum = _levi_prime_datum(siegel, pair)
    char = sym_power_character({W(-2, 0): 1, W(-1, -1): 1, W(0, -2): 1}, 2)
    out = decompose_character(char, ldatum)
    assert sorted((tuple(h), m) for h, m in out) == [
        ((Fraction(-2), Fraction(-2)), 1),
        ((Fraction(0), Fraction(-4)), 1),
    ]


def test_decompose_roundtrip_random_characters(algebras):
    datum = root_datum(algebras("A", 2))
    rng = random.Random(20260810)
    dominants = [W(2, 0, -2), W(1, 0, -1), W(1, 1, -2), W(0, 0, 0), W(2, 1, -3)]
    for _ in range(5):
        combo = {}
        for lam in rng.sample(dominants, 3):
            m = rng.randint(0, 2)
            if m:
                combo[lam] = m
        char = {}
        for lam, mult in combo.items():
            for w, m in freudenthal_character(datum, lam).items():
                char[w] = char.get(w, 0) + mult * m
        out = dict(decompose_character(char, datum))
        assert out == combo


def test_decompose_rejects_non_module_character(algebras):
    datum = root_datum(algebras("A", 1))
    with pytest.raises(ValueError):
        decompose_character({W(1, -1): 1}, datum)  # missing the rest of F


# ---------------------------------------------------------------------------
# branching tables
# ---------------------------------------------------------------------------

def test_branch_gl2_down_tori(pairs):
    pair, spec = law_setting("AA", {"n": 1, "l": 1})
    table = branch_multiplicities(spec, pair, 3)
    assert table.as_dict() == {
        (0, 0): 1, (-1, 1): 1, (-2, 2): 1, (-3, 3): 1,
    }
    assert table.degrees() == {(0, 0): 0, (-1, 1): 1, (-2, 2): 2, (-3, 3): 3}


def test_branch_so5_down_so4(pairs):
    pair, spec = law_setting("BD", {"n": 2})
    table = branch_multiplicities(spec, pair, 2)
    assert table.is_multiplicity_free()
    assert set(table.as_dict()) == {
        (0, 0), (-1, 0), (0, -1), (-2, 0), (-1, -1), (0, -2),
    }


def test_branch_heisenberg_scalar_multiplicity_free(pairs):
    pair = pairs("sl_s_glgl", p=2, q=2)
    heis = parabolic_from_simple_subset(pair.g, {1})
    table = branch_multiplicities(VermaSpec.generic(heis), pair, 2)
    assert table.is_multiplicity_free()


def test_branch_incompatible_raises(pairs):
    pair = pairs("group_case", type="A1")
    twisted = parabolic_from_H(pair.g, MatrixElement.diagonal([1, -1, -1, 1]))
    with pytest.raises(IncompatibleRestrictionError):
        branch_multiplicities(VermaSpec.generic(twisted), pair, 1)


def test_branch_group_case_kostant_multiplicities(pairs, algebras):
    # tensor of two A2 Vermas: m(lambda - beta) = Kostant partition of beta
    from tests.test_liealg import kostant_partition

    pair = pairs("group_case", type="A2")
    borel = parabolic_from_simple_subset(pair.g, set())
    table = branch_multiplicities(VermaSpec.generic(borel), pair, 3)
    datum = root_datum(algebras("A", 2))
    memo = {}
    for entry in table.entries:
        disp = Weight(entry.delta_displacement)
        expected = kostant_partition(datum, -disp, memo)
        if entry.first_degree + 3 <= 3 or True:
            # entries deep in the table may still be accumulating; compare
            # only those whose finiteness bound is inside the horizon
            bound = finiteness_bound(
                VermaSpec.generic(borel), pair, entry.delta_displacement
            )
            if bound is not None and bound <= 3:
                assert entry.multiplicity == expected


def test_character_series_degree_zero_is_levi_block(pairs):
    pair = pairs("sp_down_gl", n=2)
    siegel = parabolic_from_simple_subset(pair.g, {0})
    lam = W(2, -1)
    series = character_series(VermaSpec.of(siegel, lam), pair, 2)
    base = pair.restrict_weight(lam)
    degree0 = series.at_degree(0)
    expected = restrict_finite_module(
        pair, siegel.levi_datum(), _levi_prime_datum(siegel, pair), lam
    )
    assert degree0 == {w - base: m for w, m in expected.items()}


def test_character_series_displacements_are_weight_sums(pairs):
    pair, spec = law_setting("BD", {"n": 2})
    series = character_series(spec, pair, 2)
    for (deg, disp), mult in series.terms.items():
        assert mult > 0
        total = sum(-c for c in disp.coords)
        assert total == deg  # each u'' weight lowers one coordinate by one


# ---------------------------------------------------------------------------
# character identity
# ---------------------------------------------------------------------------

def test_verify_identity_gl2(pairs):
    pair, spec = law_setting("AA", {"n": 1, "l": 1})
    assert verify_character_identity(spec, pair, 4)


def test_verify_identity_so5(pairs):
    pair, spec = law_setting("BD", {"n": 2})
    assert verify_character_identity(spec, pair, 3)


def test_verify_identity_detects_corruption(pairs):
    pair, spec = law_setting("BD", {"n": 2})
    table = branch_multiplicities(spec, pair, 2)
    corrupted = BranchingTable(
        base_offset=table.base_offset,
        entries=tuple(
            BranchEntry(e.delta_displacement, e.multiplicity + (i == 0), e.first_degree)
            for i, e in enumerate(table.entries)
        ),
        degree_bound=table.degree_bound,
        genericity_assumptions=table.genericity_assumptions,
    )
    assert not verify_character_identity(spec, pair, 2, table=corrupted)


def test_verify_identity_numeric_lambda(pairs):
    pair = pairs("sp_down_gl", n=2)
    siegel = parabolic_from_simple_subset(pair.g, {0})
    spec = VermaSpec.of(siegel, W(2, -1))
    assert verify_character_identity(spec, pair, 3)


# ---------------------------------------------------------------------------
# strongly orthogonal sequences and Schmid decomposition
# ---------------------------------------------------------------------------

def test_strongly_orthogonal_siegel(pairs):
    pair = pairs("sp_down_gl", n=2)
    seq = strongly_orthogonal_sequence(
        [W(-2, 0), W(-1, -1), W(0, -2)], pair.ambient_restricted_roots()
    )
    assert seq == [W(0, -2), W(-2, 0)]


def test_strongly_orthogonal_single_weight(pairs):
    pair = pairs("sp_down_gl", n=2)
    assert strongly_orthogonal_sequence([W(-1, -1)], pair.ambient_restricted_roots()) == [
        W(-1, -1)
    ]


def test_strongly_orthogonal_sl4_split_rank(pairs):
    from vermabranch import tau_split, weight_decomposition

    pair = pairs("sl_s_glgl", p=2, q=2)
    p22 = parabolic_from_simple_subset(pair.g, {0, 2})
    minus = tau_split(pair, p22.u_minus).minus
    weights = [Weight(w) for w, _ in weight_decomposition(pair.j_tau_probes, minus)]
    seq = strongly_orthogonal_sequence(weights, pair.ambient_restricted_roots())
    assert len(seq) == 2  # min(p, q)


def test_strongly_orthogonal_greedy_is_maximal_each_step(pairs):
    # brute-force check of the greedy choice against all candidates
    from vermabranch.liealg import regular_order_key

    pair = pairs("sp_down_gl", n=3)
    roots = pair.ambient_restricted_roots()
    weights = [W(-2, 0, 0), W(0, -2, 0), W(0, 0, -2),
               W(-1, -1, 0), W(-1, 0, -1), W(0, -1, -1)]
    seq = strongly_orthogonal_sequence(weights, roots)
    chosen = []
    for nu in seq:
        candidates = [
            w for w in weights
            if w not in chosen
            and all((w + p) not in roots and (w - p) not in roots for p in chosen)
        ]
        assert nu == max(candidates, key=regular_order_key)
        chosen.append(nu)


def test_schmid_siegel_support(pairs):
    pair = pairs("sp_down_gl", n=2)
    siegel = parabolic_from_simple_subset(pair.g, {0})
    rep = schmid_decomposition(pair, siegel, 2)
    assert rep.multiplicity_free
    assert {tuple(w): d for w, d in rep.support.items()} == {
        (0, 0): 0,
        (0, -2): 1,
        (0, -4): 2,
        (-2, -2): 2,
    }


def test_schmid_sl4_22_parabolic(pairs):
    pair = pairs("sl_s_glgl", p=2, q=2)
    p22 = parabolic_from_simple_subset(pair.g, {0, 2})
    rep = schmid_decomposition(pair, p22, 2)
    assert rep.multiplicity_free and len(rep.sequence) == 2


def test_schmid_degree_zero(pairs):
    pair = pairs("sp_down_gl", n=2)
    siegel = parabolic_from_simple_subset(pair.g, {0})
    rep = schmid_decomposition(pair, siegel, 0)
    assert list(rep.support) == [W(0, 0)]


def test_schmid_rejects_non_abelian_nilradical(pairs):
    pair = pairs("sl_s_glgl", p=2, q=2)
    heis = parabolic_from_simple_subset(pair.g, {1})
    with pytest.raises(ValueError):
        schmid_decomposition(pair, heis, 2)


# ---------------------------------------------------------------------------
# closed-form laws
# ---------------------------------------------------------------------------

def test_closed_form_aa_small():
    table = closed_form_law("AA", {"n": 1, "l": 1}, 2)
    assert table.as_dict() == {(0, 0): 1, (-1, 1): 1, (-2, 2): 1}


def test_closed_form_bd_small():
    table = closed_form_law("BD", {"n": 2}, 1)
    assert set(table.as_dict()) == {(0, 0), (-1, 0), (0, -1)}


def test_closed_form_db_small():
    table = closed_form_law("DB", {"n": 2}, 1)
    assert set(table.as_dict()) == {(0, 0), (-1, 0), (0, -1)}


def test_closed_form_all_multiplicity_one():
    for fam, params in [("AA", {"n": 2, "l": 2}), ("BD", {"n": 3}), ("DB", {"n": 2})]:
        assert closed_form_law(fam, params, 3).is_multiplicity_free()


def test_law_oracle_equivalence_small(pairs):
    for fam, params in [
        ("AA", {"n": 2, "l": 1}),
        ("AA", {"n": 2, "l": 2}),
        ("BD", {"n": 2}),
        ("DB", {"n": 2}),
    ]:
        pair, spec = law_setting(fam, params)
        engine = branch_multiplicities(spec, pair, 3)
        law = closed_form_law(fam, params, 3)
        assert engine.as_dict() == law.as_dict()
        assert engine.degrees() == law.degrees()


# ---------------------------------------------------------------------------
# genericity and scans
# ---------------------------------------------------------------------------

def test_genericity_simple_certificate(algebras):
    g = algebras("A", 1)
    borel = parabolic_from_simple_subset(g, set())
    good = VermaSpec.of(borel, W(Fraction(-1, 4), Fraction(1, 4)))
    assert genericity_check(good).simple_certified is True
    zero = VermaSpec.of(borel, W(0, 0))
    assert genericity_check(zero).simple_certified is False


def test_genericity_distinct_infchar_bd(pairs):
    pair, _ = law_setting("BD", {"n": 2})
    borel = parabolic_from_simple_subset(pair.g, set())
    spec = VermaSpec.of(borel, W(Fraction(1, 2), Fraction(1, 3)))
    table = branch_multiplicities(spec, pair, 2)
    rep = genericity_check(spec, pair, table)
    assert rep.distinct_infchar is True


def test_genericity_collision_detected(pairs):
    # lambda = 0: delta + rho' = (1,0) and (-1,0) lie on one W(D2)-orbit
    pair, _ = law_setting("BD", {"n": 2})
    borel = parabolic_from_simple_subset(pair.g, set())
    spec = VermaSpec.of(borel, W(0, 0))
    table = branch_multiplicities(spec, pair, 2)
    rep = genericity_check(spec, pair, table)
    assert rep.distinct_infchar is False


def test_mf_scan_examples():
    rows = {r.spec_id: r for r in mf_scan(4, include_failing=True)}
    assert rows["gl_down_gl:l=1,n=2"].passes  # (sl3, gl2): 8 - 4 <= 2 + 2
    assert rows["so_down_so:m=4"].passes      # (so5, so4): 10 - 6 <= 2 + 2
    r = rows["sl_s_glgl:p=2,q=2"]
    assert not r.passes and r.dim_g - r.dim_fixed == 8  # 8 > 3 + 3


def test_mf_scan_passing_families_only():
    for row in mf_scan(5):
        kind = row.spec_id.split(":")[0]
        if kind == "sl_s_glgl":
            params = dict(kv.split("=") for kv in row.spec_id.split(":")[1].split(","))
            assert min(int(params["p"]), int(params["q"])) == 1
        else:
            assert kind in ("gl_down_gl", "so_down_so")


# ---------------------------------------------------------------------------
# finiteness and the scalar-type corollary
# ---------------------------------------------------------------------------

def test_finiteness_bound_and_stability(pairs):
    pair, spec = law_setting("BD", {"n": 2})
    small = branch_multiplicities(spec, pair, 2)
    large = branch_multiplicities(spec, pair, 4)
    for disp, mult in small.as_dict().items():
        bound = finiteness_bound(spec, pair, disp)
        assert bound is not None
        if bound <= 2:
            assert large.as_dict()[disp] == mult


def test_scalar_type_matches_schmid_support(pairs):
    # Corollary: scalar lambda with multiplicity-free u'' gives exactly the
    # strongly-orthogonal support, all multiplicities one
    pair = pairs("sp_down_gl", n=2)
    siegel = parabolic_from_simple_subset(pair.g, {0})
    table = branch_multiplicities(VermaSpec.generic(siegel), pair, 3)
    schmid = schmid_decomposition(pair, siegel, 3)
    assert table.is_multiplicity_free()
    assert set(table.as_dict()) == {w.int_coords() for w in schmid.support}
    assert table.degrees() == {
        w.int_coords(): d for w, d in schmid.support.items()
    }
