"""logcone: construct, transform and verify log-concave densities on grids."""

from .errors import LogconeError
from .grid import (
    DensityGrid,
    GridSpec,
    MomentSummary,
    check_log_concave,
    is_isotropic,
    isotropic_constant,
    mass,
    moments,
    normalize,
    read_lcgrid,
    write_lcgrid,
)
from .measure_ops import (
    AffineMap,
    LinearMap,
    ProfileGrid,
    convolve,
    isotropize,
    linear_image,
    project,
    resample,
    restrict_hyperplane,
    sample_at,
    sup_distance,
    sup_profile,
    symmetrize,
    tensor_product,
)
from .spectra import (
    CovMatrix,
    FullDecomposition,
    MiddleEigen,
    SplitResult,
    eigendecompose,
    mixed_sum_eig_bounds,
    split_covariance,
)
from .lipschitz import (
    LipschitzReport,
    directional_lipschitz,
    lipschitz_scaling_product,
    profile_conv_value,
    shift_difference_integral,
    smooth_functional,
)
from .families import (
    FamilySpec,
    clt_diagonal_table,
    closure_sequence_demo,
    corpus,
    generate,
    irwin_hall_density,
    is_uniform_box,
    isotropic_corpus,
)

__version__ = "0.1.0"
