"""radiuslab: numerical checks for numerical-radius and operator-norm
inequality chains on dense complex matrices.

The heavy kernel (a complex cyclic Jacobi eigensolver) runs compiled when the
extension is built and falls back to pure numpy otherwise; see
``radiuslab.backend.active_backend()``.
"""

from .backend import active_backend
from .chains import (
    CHAIN_IDS,
    ChainResult,
    chain_equiv,
    chain_kittaneh,
    chain_multi_op,
    chain_power_r,
    chain_prop_phi_opconvex,
    chain_thm_main,
    chain_thm_phi_sup,
    chain_two_op_opconvex,
    chain_two_op_sup,
    tightness_report,
)
from .core import (
    adjoint,
    as_matrix,
    assert_hermitian,
    cartesian_decomposition,
    frobenius,
    load_matrix,
    matrix_from_json_dict,
    matrix_to_json_dict,
    save_matrix,
)
from .ensembles import ENSEMBLES, derive_rng, gen_random
from .funcalc import (
    QuadratureRule,
    ScalarFunctionSpec,
    affine,
    exp_minus_one,
    gauss_legendre,
    hh_scalar,
    matrix_segment_integral,
    parse_function,
    polynomial,
    power,
    psi_from_function,
    segment_integral_scalar,
)
from .harness import ExperimentConfig, run_suite, standard_config
from .maps import (
    Compression,
    CongruenceMap,
    DirectSum,
    IdentityMap,
    Mixture,
    Pinching,
    SummedFamily,
    TraceState,
    Transpose,
    UnitaryConjugation,
    apply_map,
    choi_davis_margin,
    jensen_inner_margin,
    kadison_margin,
    map_from_config,
    mixed_schwarz_margin,
    random_map,
)
from .numrange import (
    RadiusResult,
    SupSweepResult,
    numerical_radius,
    rayleigh,
    sup_convex_over_joint_range,
)
from .spectral import (
    EigenDecomposition,
    abs_operator,
    apply_function,
    eig_hermitian,
    lambda_extremes,
    operator_norm,
)

__version__ = "0.1.0"
