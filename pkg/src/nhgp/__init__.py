"""Structure-preserving Gaussian process regression for systems with linear
velocity constraints, plus the vertical-rolling-disk benchmark."""

from .errors import (
    DegenerateConstraintError,
    DivergenceError,
    IllConditionedKernelError,
    InsufficientDataError,
    InvalidHyperparameterError,
    InvalidInputError,
    NhgpError,
    OptimizationFailedError,
)
from .geometry import (
    adapted_pseudoinverse,
    projector_from_basis,
    projector_from_constraints,
    pseudoinverse,
)
from .kernels import (
    KernelHyperparams,
    gram_matrix,
    make_nonholonomic_kernel,
    make_standard_kernel,
    nonholonomic_kernel,
    se_ard_kernel,
    se_ard_kernel_matrix,
    standard_matrix_kernel,
)
from .regression import (
    Dataset,
    GpModel,
    KernelKind,
    fit_scalar_channel,
    fit_vector_gp,
    load_model,
    log_marginal_likelihood,
    optimize_hyperparams,
    save_model,
    train_model,
)
from .simulate import (
    DataGenConfig,
    Trajectory,
    generate_dataset,
    integrate,
    load_dataset,
    save_dataset,
)
from .systems import (
    ConstraintSystem,
    DiskParams,
    FreeParticle,
    VerticalRollingDisk,
    make_system,
)
from .evaluate import (
    ConsistencyConfig,
    EvalConfig,
    MetricsReport,
    build_report,
    consistency_sweep,
    constraint_violation,
    field_error,
    planar_error,
)

__version__ = "0.1.0"
