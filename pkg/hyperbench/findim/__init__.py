from hyperbench.findim.norms import NormedSpace, OpNorm, op_norm, op_norm_upper
from hyperbench.findim.algebras import (
    AlgebraSpec,
    BimoduleSpec,
    MultilinearMap,
    SubspaceBasis,
    algebra_from_name,
    check_module_axioms,
    commutative_sup,
    cyclic_group_algebra,
    group_algebra,
    load_algebra,
    load_cayley_table,
    local_unit_bound,
    matrix_algebra,
    operator_bimodule,
    regular_bimodule,
    scalars,
    sigma_extend,
    unitize,
    unitize_bimodule,
)
from hyperbench.findim.cochains import (
    coboundary_space,
    cocycle_space,
    delta_n,
    inner_derivation,
    lambda_check,
    normalize_cochain,
    star_actions,
)
from hyperbench.findim.zero_product import alpha_of_phi, strong_b_estimate, zero_product_pairs
from hyperbench.findim.distances import (
    cocycle_bound_check,
    derivation_defect_check,
    dist_r_lower,
    dist_upper,
    hyperref_ratio,
)
from hyperbench.findim.commutant import commutant, commutant_hyperref_check, regular_representation

__all__ = [
    "NormedSpace",
    "OpNorm",
    "op_norm",
    "op_norm_upper",
    "AlgebraSpec",
    "BimoduleSpec",
    "MultilinearMap",
    "SubspaceBasis",
    "algebra_from_name",
    "check_module_axioms",
    "commutative_sup",
    "cyclic_group_algebra",
    "group_algebra",
    "load_algebra",
    "load_cayley_table",
    "local_unit_bound",
    "matrix_algebra",
    "operator_bimodule",
    "regular_bimodule",
    "scalars",
    "sigma_extend",
    "unitize",
    "unitize_bimodule",
    "coboundary_space",
    "cocycle_space",
    "delta_n",
    "inner_derivation",
    "lambda_check",
    "normalize_cochain",
    "star_actions",
    "alpha_of_phi",
    "strong_b_estimate",
    "zero_product_pairs",
    "cocycle_bound_check",
    "derivation_defect_check",
    "dist_r_lower",
    "dist_upper",
    "hyperref_ratio",
    "commutant",
    "commutant_hyperref_check",
    "regular_representation",
]
