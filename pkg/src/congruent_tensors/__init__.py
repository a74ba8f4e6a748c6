"""Tensor calculus of congruent families on finite sample spaces."""

from .backend import ACTIVE_BACKEND
from .classify import (
    Decomposition,
    center_component,
    decompose_on_M,
    decompose_on_P,
    probe_vectors_V,
)
from .errors import GeometryError
from .markov import (
    MarkovKernel,
    Statistic,
    apply_K_r,
    formal_derivative,
    is_congruent,
    kernel_from_statistic,
    pushforward,
    random_congruent_kernel,
)
from .measures import RMeasure, center, norm, power_map, product, signed_measure
from .models import (
    ParametrizedModel,
    amari_chentsov,
    bernoulli,
    categorical_simplex,
    exponential_family,
    fisher_metric,
    log_derivative,
    model_tensor,
    model_tensor_via_roots,
    pushforward_model,
)
from .partitions import (
    Partition,
    enumerate_partitions,
    partition,
    partition_of_multiindex,
    refines,
)
from .tensors import (
    L_n_eval,
    TensorFieldOracle,
    canonical_component,
    linear_combination_oracle,
    permute,
    pullback_markov,
    tau_P_eval,
    tau_P_oracle,
    tau_n_oracle,
    tensor_product,
)

__version__ = "0.1.0"
