"""Mean-field multi-layer ReLU networks: path norms, neural trees, Maurey
subsampling, layer-scaled gradient descent, and Rademacher experiments."""

from .calculus import (
    abs_of,
    add,
    compose,
    constant_net,
    full_square_net,
    identity_net,
    lift_depth,
    max_of,
    min_of,
    negate,
    product_of,
    scale,
    square_barron,
)
from .complexity import (
    SampleSet,
    affine_rad_bound,
    deep_rad_bound,
    generalization_gap_experiment,
    rademacher_affine_exact,
    rademacher_constants,
    rademacher_deep_lower,
)
from .data import DataDistribution, Dataset, dataset_from_csv, label, random_net
from .errors import (
    ArchitectureMismatch,
    ArityMismatch,
    DegenerateNet,
    DepthMismatch,
    DimensionMismatch,
    Diverged,
    MFNetsError,
    ShapeError,
    ZeroLayer,
)
from .maurey import MaureyResult, l2_distance, maurey_subsample, rate_sweep
from .nets import MeanFieldNet, NeuralTree, net_to_tree, path_count, tree_to_net
from .norms import (
    PathNormReport,
    balance,
    d_hw_upper,
    hilbert_complexity,
    layer_l2_norms,
    lipschitz_bound_check,
    path_norm_proxy,
    path_norm_proxy_brute,
    path_norm_proxy_tree,
)
from .serialize import load, save
from .training import (
    RiskSpec,
    TrainConfig,
    TrajectoryLog,
    dissipation_residual,
    gd_step,
    gradients,
    train,
    train_regularized,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
