"""ratinglab: skill curves, zero-sum rating systems, property verification,
and opponent-selection attack simulation."""

from .curves import (
    BisectorTable,
    CurveDomainError,
    Separable,
    SonasLike,
    Tabulated,
    ThresholdedLogistic,
    Trivial,
    eval_sigma,
    extract_bisector,
    p_close,
)
from .core import (
    ConstantK,
    GainQuery,
    RatingSumK,
    RatingSystem,
    TabulatedK,
    adjustment,
    apply_match,
    builtin_systems,
    expected_gain,
    expected_gain_definitional,
    fairness_residual,
    k_value,
)
from .verifier import (
    ChainResult,
    Grid,
    Prop,
    PropertyReport,
    Verdict,
    build_skill_chain,
    chain_length_bound,
    check_bisector_linear,
    check_draw_free,
    check_fairness,
    check_opponent_indifference,
    check_p_constant_k,
    check_p_opponent_indifference,
    check_p_separable,
    check_strong_oi,
    check_translation_invariance,
    cross_check_characterization,
    default_tolerance,
    find_max_gain_opponent,
    full_scale_report,
    verify_chain_identity,
)
from .sim import (
    DriftModel,
    ExperimentConfig,
    ExperimentResult,
    FixedOffset,
    GaussianWalk,
    GreedyGain,
    MeanReverting,
    NoDrift,
    NormalInit,
    Player,
    RandomOpponent,
    UniformInit,
    run_experiment,
    run_replicates,
    sample_outcome,
    select_opponent,
    step_drift,
    strategic_advantage,
)

__version__ = "0.1.0"
