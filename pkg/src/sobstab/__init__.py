"""Numerics for the sharp fractional Sobolev inequality and its stability.

Subpackages by concern: closed-form constants (specfun), zonal spectral
calculus on the sphere (zonal), stereographic transport and the
extremizer family (conformal), deficit/distance/stability scans
(deficit), weak-norm remainder constants (weaknorm), and the command
line front end (cli).
"""

from .specfun import (
    SobolevParams,
    eigenvalue,
    lambda1_identity_residual,
    local_constant,
    log_gamma,
    multiplicity,
    sharp_constant,
    sphere_area,
)
from .zonal import (
    QuadratureRule,
    ZonalFunction,
    analyze,
    basis_eval,
    basis_function,
    constant,
    default_rule,
    gauss_jacobi_rule,
    inner_star,
    norm_lp,
    norm_star,
    synthesize,
)
from .conformal import (
    ManifoldPoint,
    RadialFunction,
    conformal_shift,
    manifold_zonal,
    parse_profile,
    pullback_to_sphere,
    stereo_radius,
)
from .deficit import (
    DeficitReport,
    OnManifoldError,
    OptConfig,
    ScanConfig,
    deficit,
    distance,
    estimate_alpha,
    gradient_form,
    hessian_form,
    run_scan,
    stability_ratio,
)
from .weaknorm import (
    TruncationError,
    WeakNormConstants,
    compute_constants,
    extremizer_tail_lq,
    extremizer_weak_norm,
    verify_theorem2,
    weak_norm,
)

__version__ = "0.1.0"
