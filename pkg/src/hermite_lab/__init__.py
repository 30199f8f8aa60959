"""Hermite moment tests for Gaussianity with explicit finite-sample bounds."""

__version__ = "0.1.0"

from .bounds import (  # noqa: E402
    BoundReport,
    LowerRateCertificate,
    bound_report,
    exact_constant_cd,
    kurtosis_excess,
    lower_rate,
    min_Nd,
    stirling_bracket,
    thm1_lower,
    thm1_upper,
)
from .fitting import FitResult, eval_model, fit_power_exponential  # noqa: E402
from .hermite import (  # noqa: E402
    ExactPolynomial,
    GaussianMoment,
    NormalizedHermiteEvaluator,
    abs_third_moment_mc,
    eval_normalized,
    gaussian_expectation,
    hermite_coeffs,
    hermite_fourth_moment,
    poly_mul,
)
from .montecarlo import (  # noqa: E402
    ExperimentConfig,
    KsEstimate,
    KsExperimentRow,
    ks_distance,
    run_experiment,
    simulate_snd,
)
from .rng import RandomStream  # noqa: E402
from .special import chi2_sf, normal_cdf  # noqa: E402
from .statistics import (  # noqa: E402
    StatisticVector,
    TestResult,
    hermite_vector,
    hm2_statistic,
    hm4_statistic,
    ht_statistic,
    m5_statistic,
    m6_statistic,
    raw_moment_covariance,
    raw_moment_vector,
    sb_statistic,
)
