"""Verification toolkit for the basic Leggett inequalities on pairs of +-1 observables."""

from .core import (
    CorrelatorSummary,
    DerivationTrace,
    InequalityReport,
    InternalInconsistency,
    JointDistribution,
    Kind,
    LeggettError,
    NegativeProbability,
    NonFinite,
    NotNormalized,
    Outcome,
    OutOfRange,
    SettingPair,
    check_distribution,
    check_summary,
    derivation_trace,
    leggett_bounds,
    pointwise_identity,
    random_distribution,
    summarize,
    validate_distribution,
)
from .hv import (
    MalusProductModel,
    MixedSummary,
    SettingMismatch,
    malus_marginal,
    malus_product_joint,
    mixed_triple,
)
from .montecarlo import (
    InvalidSampleSize,
    TrialCounts,
    empirical_check,
    empirical_mixed_check,
    estimate,
    sample_counts,
)
from .quantum import (
    TwoQubitState,
    ZeroVector,
    born_joint,
    random_pure_state,
    singlet_closed_form,
    state_from_spec,
)

__version__ = "0.1.0"
