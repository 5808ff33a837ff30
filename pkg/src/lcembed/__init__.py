"""Laplace-Carleson embeddings on finite time intervals.

Carleson square tests for weighted (zen) spaces, model-space embedding
criteria for inner functions, discretised truncated Hankel operators and
admissibility of diagonal control systems.
"""

__version__ = "0.1.0"

from .errors import DivergenceError, HypothesisViolation, InputError, LCEmbedError, PoleError  # noqa: E402
from .measure import (  # noqa: E402
    CarlesonSquare,
    PositiveMeasure,
    carleson_sup,
    power_weight_constant,
    square_mass,
    widom_constant,
)
from .zen import ZenBase, delta2_ratio, finite_time_embedding_test, weight_from_base  # noqa: E402
from .inner import (  # noqa: E402
    InnerFunction,
    baranov_log_bound,
    spectrum,
    transfer_measure_disc_to_halfplane,
    transfer_measure_halfplane_to_disc,
)
from .cohn import (  # noqa: E402
    cohn_test_disc,
    model_kernel,
    paley_wiener_test,
    radial_test_disc,
    radial_test_halfplane,
    sector_test,
)
from .operators import (  # noqa: E402
    QuadratureGrid,
    discretize_hankel,
    discretize_weighted_hankel,
    embedding_matrix,
    hs_and_trace_norms,
    model_hankel_finite,
    symbol_from_measure,
    operator_norm,
    toeplitz_via_reversal,
)
from .admiss import DiagonalSystem, GeometricTail, admissibility_test  # noqa: E402

__all__ = [
    "__version__",
    "LCEmbedError", "InputError", "HypothesisViolation", "PoleError", "DivergenceError",
    "PositiveMeasure", "CarlesonSquare", "square_mass", "carleson_sup", "widom_constant",
    "power_weight_constant", "ZenBase", "weight_from_base", "delta2_ratio",
    "finite_time_embedding_test", "InnerFunction", "spectrum", "baranov_log_bound",
    "transfer_measure_disc_to_halfplane", "transfer_measure_halfplane_to_disc",
    "cohn_test_disc", "radial_test_disc", "paley_wiener_test", "radial_test_halfplane",
    "sector_test", "model_kernel", "QuadratureGrid", "discretize_hankel", "symbol_from_measure",
    "discretize_weighted_hankel", "toeplitz_via_reversal", "embedding_matrix", "operator_norm",
    "hs_and_trace_norms", "model_hankel_finite", "DiagonalSystem", "GeometricTail",
    "admissibility_test",
]
