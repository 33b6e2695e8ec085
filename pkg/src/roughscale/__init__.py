"""Rough Bergomi simulation and multiscaling estimation toolkit."""

__version__ = "0.1.0"

from .acsr import AcsrFit, abs_return_acf, acsr_fit, select_tau_max
from .dataio import (
    MarketLibrary,
    MarketSeries,
    load_library_csv,
    save_library_csv,
    select_measure,
)
from .depmeas import CorrelationResult, pearson, spearman
from .errors import DataError, NumericalError, ParameterError, SchemaError
from .experiments import (
    EmpiricalHResult,
    GridConfig,
    GridResult,
    RBergomiBase,
    RealDataResult,
    bucket_correlations,
    empirical_h_experiment,
    real_data_pipeline,
    synthetic_grid,
)
from .ghe import (
    ScalingReport,
    StructureFunction,
    default_q_grid,
    estimate_hq,
    estimate_scaling,
    estimate_scaling_from_returns,
    log_returns,
    multiscaling_proxy,
    structure_function,
)
from .pathgen import (
    PathPair,
    RBergomiParams,
    fbm_covariance_rl,
    rl_covariance_matrix,
    simulate_fbm_cholesky,
    simulate_fbm_cholesky_batch,
    simulate_fbm_rl,
    simulate_fbm_rl_batch,
    simulate_rbergomi,
)
from .robust import (
    OutlierReport,
    RobustCorrelationResult,
    bivariate_outliers,
    carling_fences,
    carling_k,
    fast_mcd,
    intersect_outliers,
    robust_correlation,
)
from .rng import substream
