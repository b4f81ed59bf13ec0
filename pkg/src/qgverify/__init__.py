"""Exact verification of fixed-point-space identities for diagram tensors."""

__version__ = "0.1.0"

from .errors import ParameterError, QGVError, ResourceError
from .partitions import FamilyKind, Partition, enumerate_family, is_noncrossing, join_block_count
from .tensors import SparseTensor, apply_partition, inner_product, sym_tensor, tensor_of_partition
from .family import GeneratorFamily
from .linalg import gram, intersection_dimension, rank
from .fixspaces import SubgroupDescriptor, fix_family, generator_family, parse_descriptor
from .generation import (
    GenerationReport,
    RankReport,
    check_generation,
    one_singleton_rank,
    prop_diff_condition3,
    stabilizer_triangularity_check,
    ygram_check,
)
from .dynamics import DynamicsReport, alternating_projection_run, friedrichs_cos
from .config import RunConfig, load_config
from .cache import load_or_enumerate

__all__ = [
    "__version__",
    "QGVError",
    "ParameterError",
    "ResourceError",
    "FamilyKind",
    "Partition",
    "enumerate_family",
    "is_noncrossing",
    "join_block_count",
    "SparseTensor",
    "apply_partition",
    "inner_product",
    "sym_tensor",
    "tensor_of_partition",
    "GeneratorFamily",
    "gram",
    "rank",
    "intersection_dimension",
    "SubgroupDescriptor",
    "fix_family",
    "generator_family",
    "parse_descriptor",
    "GenerationReport",
    "RankReport",
    "check_generation",
    "one_singleton_rank",
    "prop_diff_condition3",
    "stabilizer_triangularity_check",
    "ygram_check",
    "DynamicsReport",
    "alternating_projection_run",
    "friedrichs_cos",
    "RunConfig",
    "load_config",
    "load_or_enumerate",
]
