"""Exact branching of generalized Verma modules over symmetric pairs.

Decides when such restrictions are discretely decomposable, computes the
branching multiplicities, Gelfand-Kirillov dimensions and closed-orbit
censuses, and verifies the explicit multiplicity-free branching laws.  All
arithmetic is exact rational.
"""

from .exactla import (
    MatrixElement,
    NilpotencyReport,
    Rational,
    Subspace,
    ad_nilpotent,
    bracket,
    echelon_span,
    nilpotent_subalgebra_test,
    span_of_matrices,
    weight_decomposition,
)
from .liealg import (
    AlgebraRealization,
    ClassicalType,
    RankCapError,
    RootDatum,
    Weight,
    WeylElement,
    build_classical,
    freudenthal_character,
    root_datum,
    weyl_dimension,
    weyl_group,
)
from .pairs import (
    Involution,
    PairSpec,
    SymmetricPair,
    build_pair,
    catalog_pairs,
    restricted_root_data,
    tau_split,
)
from .parabolic import (
    ClosednessReport,
    CompatibilityReport,
    IncompatibleRestrictionError,
    OrbitCensusReport,
    ParabolicData,
    closed_orbit_census,
    closedness_report,
    compatibility_report,
    condition_iii_spot_check,
    double_coset_count,
    parabolic_from_H,
    parabolic_from_simple_subset,
    tensor_closedness,
)
from .branching import (
    BranchEntry,
    BranchingTable,
    CharacterSeries,
    GenericityReport,
    MfScanRow,
    SchmidReport,
    VermaSpec,
    branch_multiplicities,
    character_series,
    closed_form_law,
    decompose_character,
    finiteness_bound,
    genericity_check,
    law_setting,
    mf_scan,
    restrict_finite_module,
    schmid_decomposition,
    strongly_orthogonal_sequence,
    sym_power_character,
    verify_character_identity,
)

__version__ = "0.1.0"
