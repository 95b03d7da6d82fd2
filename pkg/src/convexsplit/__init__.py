"""Convex splitting, its covering error, and the bounds built on it.

Dense numerical toolkit for finite-dimensional quantum states: divergences,
optimized Rényi informations, exact convex-split covering errors with
their upper and lower bounds, and protocol-level error bounds.
"""

__version__ = "0.1.0"

from .linalg import (  # noqa: E402
    fidelity,
    partial_trace,
    purified_distance,
    schatten_norm,
    tensor,
    trace_distance,
)
from .divergences import (  # noqa: E402
    hypothesis_testing_divergence,
    info_spectrum_divergence,
    neyman_pearson_test,
    petz_renyi,
    relative_entropy,
    relative_entropy_variance,
    sandwiched_renyi,
)
from .information import (  # noqa: E402
    doubly_minimized_info,
    hypothesis_testing_information,
    mutual_information,
    petz_up_information,
    sandwiched_renyi_information,
)
from .convex_split import (  # noqa: E402
    BoundReport,
    ConvexSplitInstance,
    DimensionBudgetError,
    covering_error_exact,
    exponent_upper_bound,
    oneshot_converse_lower_bound,
    sample_complexity_bounds,
    sample_complexity_exact,
    strong_converse_lower_bound,
)
from .applications import (  # noqa: E402
    ProtocolBound,
    measurement_compression_bound,
    msg_compression_exponent,
    packing_capacity_bound,
    packing_exponent_bound,
    secret_key_bound,
    state_info_coding_bound,
    wiretap_bound,
)
from .testkit import CqState  # noqa: E402
