"""Learning-curve prediction for kernel ridge regression from data
covariance statistics and Hermite decompositions of the target."""

from .data import (
    CovarianceSpectrum,
    PreprocessConfig,
    estimate_covariance,
    normalize_samples,
    powerlaw_target,
    sample_gaussian,
    zca_whiten,
)
from .decomp import TargetDecomposition, decompose_from_dataset, gram_schmidt_decompose, grf
from .eigenframework import (
    RidgelessError,
    RiskPrediction,
    TaskSpectrum,
    learning_curve_prediction,
    predict_risk,
    solve_kappa,
    tail_corrected_ridge,
    task_spectrum_from_decomposition,
)
from .eigensystem import (
    HermiteEigensystem,
    build_eigensystem,
    degree_major_ordering,
    evaluate_eigensystem,
)
from .hermite import BACKEND, MultiIndex, hermite_1d, multi_hermite, pca_coordinates
from .kernels import (
    KernelSpec,
    LevelCoefficients,
    exponential,
    gaussian,
    kernel_matrix,
    laplace,
    level_coefficients,
    relu_nngp,
    relu_ntk,
    trace_estimate,
)
from .krr import (
    LearningCurveResult,
    empirical_learning_curve,
    krr_fit_predict,
    sample_complexity,
)
from .mehler import (
    dpk_convergence_probe,
    mehler_eigenfunction,
    mehler_eigenvalue,
    mehler_parameters,
)
from .spectral import (
    EmpiricalEigensystem,
    OverlapReport,
    compare_eigensystems,
    empirical_eigensystem,
    spectral_bins,
    subspace_overlap,
    top_bin_overlaps,
)

__version__ = "0.1.0"
