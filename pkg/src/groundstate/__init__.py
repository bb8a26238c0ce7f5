"""Spectral toolkit for Schrodinger ground states on discrete compact manifolds.

Discretize a compact manifold (periodic torus grid or closed triangle
mesh), attach a sign-changing potential with positive average, and study
the lowest eigenvalue of -Laplacian + f(t)*V along a coupling schedule:
solve eigenpairs, certify where the eigenvalue is positive or negative,
and locate the unique parameter where the ground state has zero energy.
"""

from .certify import (
    Certificate,
    critical_cphi,
    fixed_operator_check,
    lower_bound_expression,
    negativity_certificate,
    positivity_threshold,
)
from .errors import (
    BracketError,
    ConfigError,
    ConvergenceError,
    InadmissibleError,
    MeshError,
    NonMonotoneError,
    ToolkitError,
)
from .manifold import (
    DiscreteManifold,
    TriangleMesh,
    build_from_mesh,
    build_torus_grid,
    icosphere,
    icosphere_mesh,
    load_off,
    normalize_volume,
    save_off,
    scale_metric,
    tetrahedron_mesh,
)
from .potential import (
    ConditionReport,
    Potential,
    make_potential,
    negative_region,
    validate_conditions,
)
from .scaling import ScalingFunction, evaluate, invert_monotone, make_scaling
from .spectrum import (
    Decomposition,
    SpectrumResult,
    decompose,
    ground_state_sign_check,
    lowest_eigenpairs,
    poincare_constant,
    rayleigh_quotient,
)
from .tstar import (
    RegimeReport,
    TStarResult,
    find_tstar,
    monotone_tail_check,
    scan_regimes,
)

__version__ = "0.1.0"

__all__ = [
    "BracketError",
    "Certificate",
    "ConditionReport",
    "ConfigError",
    "ConvergenceError",
    "Decomposition",
    "DiscreteManifold",
    "InadmissibleError",
    "MeshError",
    "NonMonotoneError",
    "Potential",
    "RegimeReport",
    "ScalingFunction",
    "SpectrumResult",
    "TStarResult",
    "ToolkitError",
    "TriangleMesh",
    "build_from_mesh",
    "build_torus_grid",
    "critical_cphi",
    "decompose",
    "evaluate",
    "find_tstar",
    "fixed_operator_check",
    "ground_state_sign_check",
    "icosphere",
    "icosphere_mesh",
    "invert_monotone",
    "load_off",
    "lower_bound_expression",
    "lowest_eigenpairs",
    "make_potential",
    "make_scaling",
    "monotone_tail_check",
    "negative_region",
    "negativity_certificate",
    "normalize_volume",
    "poincare_constant",
    "positivity_threshold",
    "rayleigh_quotient",
    "save_off",
    "scale_metric",
    "scan_regimes",
    "tetrahedron_mesh",
    "validate_conditions",
]
