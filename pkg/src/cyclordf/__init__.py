"""Rate-distortion functions of sampled cyclostationary Gaussian sources.

Source models are continuous-time wide-sense cyclostationary Gaussian
processes with a periodic variance profile and compactly supported
correlation; uniform sampling with a rational or irrational mismatch turns
them into discrete-time processes whose rate-distortion function is computed
by per-blocklength reverse waterfilling, limit surrogates over blocklength
grids, and phase averaging or maximization.  A Monte Carlo validator checks
the information-density statistics and moment bounds the theory relies on,
and a transform-coding baseline provides an operational dominance check.
"""

__version__ = "0.1.0"

from .codec_baseline import (
    CodecPoint,
    DominanceEntry,
    DominanceReport,
    dominance_report,
    transform_code,
)
from .errors import (
    BetaViolation,
    ConfigError,
    CyclordfError,
    DegenerateCovariance,
    InvalidModel,
    NonPositiveDistortion,
    NonPositiveEigenvalue,
    RateOutOfRange,
    SingularCovariance,
)
from .rdf_solver import (
    LimsupEstimate,
    RdfCurvePoint,
    RdfResult,
    distortion_rate_inverse,
    phase_sweep,
    rdf_block_sequence,
    rdf_fixed_block,
    rdf_oracle_small,
    rdf_phase_average,
    rdf_phase_max,
    rdf_rates,
    reverse_waterfill,
)
from .sampling import (
    CovarianceMatrix,
    EpsilonSpec,
    IrrationalEpsilon,
    MemoryConditionWarning,
    RationalEpsilon,
    SamplingClass,
    SamplingSpec,
    build_covariance,
    classify,
    max_autocorr_lag,
    sample_phase,
    split_interval,
)
from .source_models import (
    CorrelationKernel,
    CtSourceModel,
    Harmonic,
    ModelReport,
    VarianceProfile,
    eval_autocorrelation,
    eval_variance,
    validate_model,
)
from .spectrum_validator import (
    McConfig,
    McReport,
    check_info_density_stats,
    chebyshev_concentration,
    info_density_samples,
    sample_gaussian,
    uniform_integrability_stats,
)

__all__ = [
    "__version__",
    "BetaViolation",
    "CodecPoint",
    "ConfigError",
    "CorrelationKernel",
    "CovarianceMatrix",
    "CtSourceModel",
    "CyclordfError",
    "DegenerateCovariance",
    "DominanceEntry",
    "DominanceReport",
    "EpsilonSpec",
    "Harmonic",
    "InvalidModel",
    "IrrationalEpsilon",
    "LimsupEstimate",
    "McConfig",
    "McReport",
    "MemoryConditionWarning",
    "ModelReport",
    "NonPositiveDistortion",
    "NonPositiveEigenvalue",
    "RateOutOfRange",
    "RationalEpsilon",
    "RdfCurvePoint",
    "RdfResult",
    "SamplingClass",
    "SamplingSpec",
    "SingularCovariance",
    "VarianceProfile",
    "build_covariance",
    "check_info_density_stats",
    "chebyshev_concentration",
    "classify",
    "distortion_rate_inverse",
    "dominance_report",
    "eval_autocorrelation",
    "eval_variance",
    "info_density_samples",
    "max_autocorr_lag",
    "phase_sweep",
    "rdf_block_sequence",
    "rdf_fixed_block",
    "rdf_oracle_small",
    "rdf_phase_average",
    "rdf_phase_max",
    "rdf_rates",
    "reverse_waterfill",
    "sample_gaussian",
    "sample_phase",
    "split_interval",
    "transform_code",
    "uniform_integrability_stats",
    "validate_model",
]
