"""Spectral bounds for 2-positive trace-preserving maps and their generators."""
from .config import DEFAULT_TOL, Tolerances
from .generators import (
    GeneratorSpec,
    check_generator_bound,
    gksl_generator,
    limit_formula_check,
    relaxation_rates,
    semigroup,
)
from .positivity import (
    EnsembleConfig,
    EnsembleId,
    classify,
    falsify_k_positivity,
    is_cp,
    sample_cptp,
    sample_decomposable,
)
from .spectral import (
    BoundReport,
    InequalityId,
    SpectrumReport,
    check_conjecture,
    check_map_bound,
    check_optimality,
    check_trivial_bound,
    spectrum,
)
from .superop import (
    ChoiMatrix,
    Superoperator,
    apply,
    choi,
    fixed_point,
    from_choi,
    hs_adjoint,
    mix_depolarizing,
    omega_adjoint,
    superop_from_kraus,
    trace_superop,
)
from .transition import (
    OrthonormalBasis,
    Rank2Witness,
    SchmidtWitness,
    TransitionMatrix,
    check_lemma_tg,
    eigenbasis_transition_check,
    hermitian_eigenvector,
    rank2_witness_value,
    transition_matrix,
)

__version__ = "0.1.0"
