"""Analytic Fourier multipliers of higher-order Riesz transforms.

The transforms convolve with monomial tensor kernels carrying a 1/|x|^n
singularity; their multipliers are evaluated in closed form component by
component, validated against Monte-Carlo sphere integration, and applied to
planar image filtering (steered corner detection).
"""

from .errors import (
    KernelAdmissibilityError,
    SizeCapError,
    UnsupportedDimensionError,
)
from .frame import (
    BasisMatrix,
    as_unit_vector,
    build_basis,
    evaluate_component_rotated,
    row_pair_sum,
    tprime_component,
)
from .image2d import (
    CornerReport,
    ImageBuffer,
    Kernel2dSpec,
    MultiplierGrid,
    Rectangle,
    bpq,
    build_multiplier_grid,
    corner_response_report,
    filter_image,
    find_extrema,
    multiplier_2d,
    read_pgm,
    rectangle_geometry,
    synthesize_rectangles,
    write_pgm,
    write_pgm_with_sidecar,
)
from .montecarlo import (
    ConvergenceStudy,
    McEstimate,
    SampleStream,
    SamplerKind,
    convergence_study,
    estimate,
    estimate_from_points,
    halton_point,
    muller_point,
    radical_inverse,
    sample_sphere,
    spherical_point,
)
from .multiplier import (
    ComponentValue,
    KernelSpec,
    MultiplierValue,
    SubsetTerm,
    assemble_multiplier,
    check_zero_mean,
    enumerate_matchings,
    enumerate_subsets,
    evaluate_all_components,
    evaluate_component_direct,
    evaluate_component_recursive,
    iter_subset_terms,
    level_partial_sums,
    riesz_normalization,
)
from .special_functions import (
    CoefficientTable,
    Parity,
    count_c1,
    count_c2,
    count_c3,
    digamma,
    double_factorial,
    g_a_log,
    g_a_sgn,
    gamma,
    node_weight,
    sphere_surface,
    wallis,
    z_coefficient,
)

__version__ = "0.1.0"
