"""Potentials on a discrete manifold and the admissibility conditions.

The interesting regime for the whole toolkit is a potential that changes
sign but has strictly positive volume integral; every potential therefore
carries a ConditionReport classifying it.  Samples can be given directly,
come from a file, or be evaluated from a small analytic family
(trigonometric polynomials on tori, low-degree spherical harmonics on
embedded meshes).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .errors import InadmissibleError
from .manifold import DiscreteManifold

# Relative tolerance guarding sign detection against float noise.
SIGN_RTOL = 1e-12

CLASSIFICATIONS = ("admissible", "nonneg", "nonpos", "sign_changing_nonpos_avg", "zero")


@dataclass(frozen=True)
class ConditionReport:
    changes_sign: bool
    positive_average: bool
    admissible: bool
    classification: str

    def to_dict(self):
        return {
            "changes_sign": self.changes_sign,
            "positive_average": self.positive_average,
            "admissible": self.admissible,
            "classification": self.classification,
        }


@dataclass(frozen=True)
class Potential:
    """Per-vertex samples of V with its integral, sup norm and classification."""

    values: np.ndarray
    integral: float
    sup_norm: float
    condition_report: ConditionReport

    def __post_init__(self):
        object.__setattr__(
            self, "values", np.ascontiguousarray(np.asarray(self.values, dtype=float))
        )

    def scaled(self, c: float) -> "Potential":
        """V -> c*V for c > 0; conditions are invariant, norms scale by c."""
        if not c > 0.0:
            raise ValueError("scale factor must be positive")
        return Potential(
            values=self.values * c,
            integral=self.integral * c,
            sup_norm=self.sup_norm * c,
            condition_report=self.condition_report,
        )

    def to_dict(self):
        return {
            "integral": self.integral,
            "sup_norm": self.sup_norm,
            "condition_report": self.condition_report.to_dict(),
        }


PotentialSpec = Union["Potential", np.ndarray, Sequence[float], str, Callable]


def mass_weighted_sum(mass: np.ndarray, values: np.ndarray) -> float:
    """Strict left-to-right accumulation: one fixed summation order, bit-stable."""
    acc = 0.0
    for w, v in zip(mass.tolist(), values.tolist()):
        acc += w * v
    return acc


def _classify(mass: np.ndarray, values: np.ndarray):
    integral = mass_weighted_sum(mass, values)
    sup_norm = float(np.max(np.abs(values))) if values.size else 0.0
    sigma = SIGN_RTOL * sup_norm
    vmin = float(values.min())
    vmax = float(values.max())
    changes_sign = (vmin < -sigma) and (vmax > sigma)
    positive_average = integral > 0.0
    if sup_norm == 0.0:
        classification = "zero"
    elif changes_sign:
        classification = "admissible" if positive_average else "sign_changing_nonpos_avg"
    elif vmin >= -sigma:
        classification = "nonneg"
    else:
        classification = "nonpos"
    report = ConditionReport(
        changes_sign=changes_sign,
        positive_average=positive_average,
        admissible=changes_sign and positive_average,
        classification=classification,
    )
    return integral, sup_norm, report


def make_potential(m: DiscreteManifold, spec: PotentialSpec) -> Potential:
    """Build a Potential from samples, an expression string, or a callable.

    Callables receive the manifold's vertex coordinates, shape (n, d).
    """
    if isinstance(spec, Potential):
        values = spec.values
    elif isinstance(spec, str):
        values = evaluate_expression(m, spec)
    elif callable(spec):
        values = np.asarray(spec(m.coordinates), dtype=float)
    else:
        values = np.asarray(spec, dtype=float)
    if values.shape != (m.n_vertices,):
        raise ValueError(
            f"potential sample count {values.shape} does not match {m.n_vertices} vertices"
        )
    if not np.all(np.isfinite(values)):
        raise ValueError("potential contains non-finite values")
    values = np.ascontiguousarray(values)
    integral, sup_norm, report = _classify(m.mass_weights, values)
    return Potential(values=values, integral=integral, sup_norm=sup_norm, condition_report=report)


def validate_conditions(m: DiscreteManifold, v: Potential) -> ConditionReport:
    """Recompute the sign/average conditions of V against m's volume form."""
    values = np.asarray(v.values if isinstance(v, Potential) else v, dtype=float)
    _, _, report = _classify(m.mass_weights, values)
    return report


def negative_region(m: DiscreteManifold, v: Potential, margin: float = 0.0) -> np.ndarray:
    """Indices where V < -margin (the discrete version of the set {V < 0})."""
    if margin < 0.0:
        raise ValueError("margin must be nonnegative")
    values = v.values if isinstance(v, Potential) else np.asarray(v, dtype=float)
    region = np.flatnonzero(values < -margin)
    if region.size == 0:
        raise InadmissibleError(
            f"no vertex has V < -{margin!r}; decrease the margin (min V = {values.min()!r})"
        )
    return region


def require_admissible(m: DiscreteManifold, v: Potential) -> None:
    rep = v.condition_report
    if not rep.admissible:
        missing = []
        if not rep.changes_sign:
            missing.append("V must change sign on the manifold")
        if not rep.positive_average:
            missing.append("V must have strictly positive integral")
        raise InadmissibleError(
            f"potential not admissible (classification={rep.classification}): "
            + "; ".join(missing)
        )


# ---------------------------------------------------------------------------
# Analytic families
#
# Expression strings are sums of terms:  "cos+0.1", "0.5*cos:2-0.3*sin",
# "cos:1,1+0.2" (2-torus, frequency vector dotted with the angles), and on
# meshes "z+0.25" or "0.4*z2-0.1*x" with x/y/z the embedded coordinates and
# x2/y2/z2 the zonal harmonics 3q^2-1.

_TERM = re.compile(
    r"""^\s*(?:
        (?P<coef>[0-9.eE+-]+)\s*\*\s*(?P<fun1>[a-zA-Z][a-zA-Z0-9]*)(?::(?P<freq1>[0-9,+-]+))?
      | (?P<fun2>[a-zA-Z][a-zA-Z0-9]*)(?::(?P<freq2>[0-9,+-]+))?
      | (?P<const>[0-9.eE+-]+)
    )\s*$""",
    re.VERBOSE,
)

_MESH_BASIS = {
    "x": lambda c: c[:, 0],
    "y": lambda c: c[:, 1],
    "z": lambda c: c[:, 2],
    "x2": lambda c: 3.0 * c[:, 0] ** 2 - 1.0,
    "y2": lambda c: 3.0 * c[:, 1] ** 2 - 1.0,
    "z2": lambda c: 3.0 * c[:, 2] ** 2 - 1.0,
}


def _split_terms(expr: str):
    """Split on top-level +/- (keeping signs), tolerating exponent signs."""
    terms = []
    buf = ""
    sign = 1.0
    prev = ""
    for ch in expr:
        if ch in "+-" and buf and prev not in "eE*:," and not buf.endswith(("+", "-")):
            terms.append((sign, buf))
            sign = 1.0 if ch == "+" else -1.0
            buf = ""
        elif ch in "+-" and not buf:
            sign *= 1.0 if ch == "+" else -1.0
        else:
            buf += ch
        prev = ch
    if buf:
        terms.append((sign, buf))
    return terms


def evaluate_expression(m: DiscreteManifold, expr: str) -> np.ndarray:
    """Evaluate an analytic potential expression at the manifold's vertices."""
    coords = m.coordinates
    values = np.zeros(m.n_vertices)
    terms = _split_terms(expr.strip())
    if not terms:
        raise ValueError(f"empty potential expression: {expr!r}")
    for sign, text in terms:
        match = _TERM.match(text)
        if not match:
            raise ValueError(f"cannot parse potential term {text!r} in {expr!r}")
        g = match.groupdict()
        if g["const"] is not None:
            values += sign * float(g["const"])
            continue
        coef = sign * (float(g["coef"]) if g["coef"] is not None else 1.0)
        fun = g["fun1"] or g["fun2"]
        freq_text = g["freq1"] or g["freq2"]
        if fun in ("cos", "sin"):
            if m.kind != "torus_grid":
                raise ValueError(f"term {fun!r} only applies to torus grids")
            freqs = np.ones(m.dimension, dtype=float)
            if freq_text is not None:
                freqs = np.asarray([float(f) for f in freq_text.split(",")], dtype=float)
                if freqs.size != m.dimension:
                    raise ValueError(
                        f"frequency vector {freq_text!r} does not match dimension {m.dimension}"
                    )
            lengths = np.asarray(m.descriptor["lengths"], dtype=float)
            angles = coords * (2.0 * np.pi / lengths)  # (n, d)
            phase = angles @ freqs
            values += coef * (np.cos(phase) if fun == "cos" else np.sin(phase))
        elif fun in _MESH_BASIS:
            if m.kind != "triangle_mesh":
                raise ValueError(f"term {fun!r} only applies to embedded meshes")
            values += coef * _MESH_BASIS[fun](coords)
        else:
            raise ValueError(f"unknown potential term {fun!r}")
    return values


def load_samples(path) -> np.ndarray:
    """One real per line; blank lines and '#' comments ignored."""
    vals = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                vals.append(float(line))
    return np.asarray(vals, dtype=float)
