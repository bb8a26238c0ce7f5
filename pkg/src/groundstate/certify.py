"""Machine-checkable evidence about the sign of the lowest eigenvalue.

Positivity: an explicit coupling threshold built from the Poincare
constant, the potential's sup norm, its integral and the volume; the
lowest eigenvalue is strictly positive for every coupling in (0, F*].
Negativity: a test function supported where V is negative whose Rayleigh
quotient is negative at an explicit coupling, which bounds the lowest
eigenvalue above by a negative number.

The proof-chain diagnostics (the closed-form lower bound in the mean
component and the compensation threshold) assume unit volume, so they are
evaluated on a volume-normalized copy of the manifold.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import InadmissibleError, ToolkitError
from .manifold import DiscreteManifold, normalize_volume
from .potential import Potential, make_potential, negative_region, require_admissible
from .scaling import ScalingFunction, invert_monotone
from .spectrum import poincare_constant

WITNESS_MARGIN = 1.1  # float headroom making the witness coupling strictly negative
BUMP_MARGIN_FACTOR = 0.1  # negative region carved at V < -0.1*|min V|
MIN_REGION_SIZE = 3


@dataclass(frozen=True)
class Certificate:
    """Evidence of lambda0's sign, serializable with all its ingredients."""

    kind: str  # "positivity_threshold" | "negativity_witness"
    ingredients: dict[str, float] = field(default_factory=dict)
    threshold: float | None = None  # positivity: F*
    test_function: np.ndarray | None = None  # negativity: bump phi
    energy: float | None = None  # negativity: C1 = integral |grad phi|^2
    potential_moment: float | None = None  # negativity: C2 = integral V phi^2
    witness_coupling: float | None = None  # negativity: s with C1 + s*C2 < 0
    witness_parameter: float | None = None  # t with f(t) = witness coupling

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"kind": self.kind, "ingredients": dict(self.ingredients)}
        if self.kind == "positivity_threshold":
            d["threshold"] = self.threshold
        else:
            d["energy_c1"] = self.energy
            d["potential_moment_c2"] = self.potential_moment
            d["witness_coupling"] = self.witness_coupling
            if self.witness_parameter is not None:
                d["witness_parameter"] = self.witness_parameter
            if self.test_function is not None:
                d["test_function"] = [float(x) for x in self.test_function]
        return d


def threshold_from_ingredients(p: float, sup_norm: float, volume: float, integral: float) -> float:
    """F* = integral / (P * ||V|| * (4 * Vol * ||V|| + integral))."""
    return integral / (p * sup_norm * (4.0 * volume * sup_norm + integral))


def positivity_threshold(
    m: DiscreteManifold, v: Potential, p: float | None = None
) -> Certificate:
    """Coupling threshold below which the lowest eigenvalue is certified positive.

    The Poincare constant is computed numerically unless an analytic value
    is supplied.
    """
    require_admissible(m, v)
    if p is None:
        p = poincare_constant(m)
    if not p > 0.0:
        raise ValueError("Poincare constant must be positive")
    fstar = threshold_from_ingredients(p, v.sup_norm, m.total_volume, v.integral)
    return Certificate(
        kind="positivity_threshold",
        threshold=fstar,
        ingredients={
            "poincare_constant": p,
            "sup_norm": v.sup_norm,
            "volume": m.total_volume,
            "integral": v.integral,
        },
    )


def fixed_operator_check(m: DiscreteManifold, v: Potential, p: float | None = None) -> bool:
    """True iff the unscaled operator -Laplacian + V is certified positive,
    i.e. the threshold reaches past coupling 1."""
    cert = positivity_threshold(m, v, p=p)
    return cert.threshold >= 1.0


def critical_cphi(m: DiscreteManifold, v: Potential) -> float:
    """Mean-component level above which the positive average compensates the
    cross term: sqrt(4 / (r^2 + 4)) with r the unit-volume integral over sup norm.

    Independent of the coupling schedule entirely.
    """
    require_admissible(m, v)
    if v.sup_norm == 0.0:
        raise ValueError("sup norm is zero")
    r = (v.integral / m.total_volume) / v.sup_norm
    return float(np.sqrt(4.0 / (r * r + 4.0)))


def unit_volume_problem(m: DiscreteManifold, v: Potential):
    """Volume-normalized manifold plus the potential rebuilt against it."""
    m1 = normalize_volume(m)
    return m1, make_potential(m1, v.values)


def lower_bound_expression(
    m: DiscreteManifold, v: Potential, s: float, c: float, p: float | None = None
) -> float:
    """Closed-form lower bound on the Rayleigh quotient of a unit-norm state
    whose mean component is c, on the unit-volume normalization:

        (1/P)(1-c^2) - s*||V||*((1-c^2) + 2c*sqrt(1-c^2)) + c^2*s*integral(V)
    """
    if not 0.0 <= c <= 1.0:
        raise ValueError("mean component c must lie in [0, 1]")
    m1, v1 = unit_volume_problem(m, v)
    if p is None:
        p = poincare_constant(m1)
    one_minus = 1.0 - c * c
    root = np.sqrt(max(one_minus, 0.0))
    return float(
        (1.0 / p) * one_minus
        - s * v1.sup_norm * (one_minus + 2.0 * c * root)
        + c * c * s * v1.integral
    )


def negativity_certificate(
    m: DiscreteManifold, v: Potential, f: ScalingFunction | None = None
) -> Certificate:
    """Explicit test function making the Rayleigh quotient negative.

    A smoothed indicator bump on the region where V is safely negative
    gives energy C1 > 0 and potential moment C2 < 0; at the witness
    coupling s = 1.1*C1/(-C2) the quotient is -0.1*C1/||phi||^2 < 0, so the
    lowest eigenvalue is negative there and beyond (for monotone f the
    corresponding parameter is reported too).
    """
    values = v.values
    if float(values.min()) >= 0.0:
        raise InadmissibleError("V is nowhere negative; no negativity witness exists")
    margin = BUMP_MARGIN_FACTOR * abs(float(values.min()))
    region = negative_region(m, v, margin)
    if region.size < MIN_REGION_SIZE:
        raise ToolkitError(
            f"negative region has only {region.size} vertices, too small to support a "
            "bump; refine the discretization"
        )
    phi = _bump_on_region(m, region, deepest=int(np.argmin(values)))
    c1 = float(phi @ (m.stiffness @ phi))
    c2 = float((m.mass_weights * values) @ (phi * phi))
    if not (c1 > 0.0 and c2 < 0.0):
        raise ToolkitError(f"degenerate bump: C1 = {c1!r}, C2 = {c2!r}")
    s_minus = WITNESS_MARGIN * c1 / (-c2)
    t_minus = None
    if f is not None and f.monotone:
        t_minus = invert_monotone(f, s_minus)
    return Certificate(
        kind="negativity_witness",
        test_function=phi,
        energy=c1,
        potential_moment=c2,
        witness_coupling=s_minus,
        witness_parameter=t_minus,
        ingredients={
            "margin": margin,
            "region_size": float(region.size),
            "rayleigh_at_witness": (c1 + s_minus * c2) / float(phi @ (m.mass_weights * phi)),
        },
    )


def _bump_on_region(m: DiscreteManifold, region: np.ndarray, deepest: int) -> np.ndarray:
    """Smoothed indicator supported on the region (two mass-weighted
    neighbor averages, re-zeroed outside).

    A region covering every vertex would smooth to a constant with zero
    energy, so in that case the seed shrinks to the single deepest vertex
    and the smoothing grows a local bump around it.
    """
    n = m.n_vertices
    mask = np.zeros(n, dtype=bool)
    mask[region] = True
    phi = np.zeros(n)
    if region.size == n:
        phi[deepest] = 1.0
    else:
        phi[region] = 1.0

    adj = m.stiffness.copy().tolil()
    adj.setdiag(0.0)
    adj = adj.tocsr()
    adj.data = np.abs(np.sign(adj.data))
    mass = m.mass_weights
    for _ in range(2):
        num = mass * phi + adj @ (mass * phi)
        den = mass + adj @ mass
        phi = num / den
        phi[~mask] = 0.0
    return phi
