"""Coupling schedules f(t): zero at zero, positive afterwards, growing without bound.

Built-in families (identity, power, expm1) satisfy the conditions
analytically.  Tabulated schedules are piecewise linear; since a finite
table can never certify that the limit at infinity is infinite, tables are
only required to clear a configurable growth witness and carry a note
recording that the limit is taken on trust.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import NonMonotoneError

INVERT_RTOL = 1e-12
FAMILIES = ("identity", "power", "expm1", "table")


@dataclass(frozen=True)
class ScalingFunction:
    family: str
    params: dict[str, Any] = field(default_factory=dict)
    monotone: bool = True
    notes: tuple[str, ...] = ()

    def __call__(self, t: float) -> float:
        return evaluate(self, t)

    def to_dict(self):
        d = {"family": self.family, "monotone": self.monotone}
        d.update(self.params)
        if self.notes:
            d["notes"] = list(self.notes)
        return d


def make_scaling(family: str, growth_witness: float = 1.0, **params) -> ScalingFunction:
    """Validate and construct a coupling schedule.

    power requires p > 0; table requires points starting at (0, 0) with
    positive values afterwards and a final value above `growth_witness`.
    """
    if family == "identity":
        if params:
            raise ValueError("identity takes no parameters")
        return ScalingFunction("identity", {}, monotone=True)
    if family == "power":
        p = float(params.pop("p", 1.0))
        if params:
            raise ValueError(f"unknown power parameters: {sorted(params)}")
        if not p > 0.0:
            raise ValueError("power exponent p must be positive")
        return ScalingFunction("power", {"p": p}, monotone=True)
    if family == "expm1":
        if params:
            raise ValueError("expm1 takes no parameters")
        return ScalingFunction("expm1", {}, monotone=True)
    if family == "table":
        pts = params.pop("points", None)
        if params:
            raise ValueError(f"unknown table parameters: {sorted(params)}")
        if pts is None:
            raise ValueError("table requires points=[[t, f(t)], ...]")
        arr = np.asarray(pts, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 2:
            raise ValueError("table points must be at least two (t, value) pairs")
        ts, vs = arr[:, 0], arr[:, 1]
        if np.any(np.diff(ts) <= 0.0):
            raise ValueError("table abscissae must be strictly increasing")
        if ts[0] != 0.0 or vs[0] != 0.0:
            raise ValueError("table must start at (0, 0) since f(0) = 0 is required")
        if np.any(vs[1:] <= 0.0):
            raise ValueError("table values must be strictly positive for t > 0")
        if not vs[-1] > growth_witness:
            raise ValueError(
                f"last table value {vs[-1]!r} does not exceed the growth witness "
                f"{growth_witness!r}; cannot accept a schedule meant to grow without bound"
            )
        monotone = bool(np.all(np.diff(vs) > 0.0))
        notes = (
            "unbounded growth beyond the last sample is extrapolated from the final "
            "segment and not certified by the table",
        )
        return ScalingFunction(
            "table",
            {"points": [[float(a), float(b)] for a, b in arr]},
            monotone=monotone,
            notes=notes,
        )
    raise ValueError(f"unknown scaling family {family!r} (expected one of {FAMILIES})")


def evaluate(f: ScalingFunction, t: float) -> float:
    """The coupling value s = f(t) handed to the spectral solver."""
    if t < 0.0:
        raise ValueError("coupling parameter t must be nonnegative")
    if f.family == "identity":
        return float(t)
    if f.family == "power":
        return float(t) ** f.params["p"]
    if f.family == "expm1":
        return math.expm1(t)
    if f.family == "table":
        pts = np.asarray(f.params["points"], dtype=float)
        ts, vs = pts[:, 0], pts[:, 1]
        if t <= ts[-1]:
            return float(np.interp(t, ts, vs))
        slope = (vs[-1] - vs[-2]) / (ts[-1] - ts[-2])
        return float(vs[-1] + slope * (t - ts[-1]))
    raise ValueError(f"unknown scaling family {f.family!r}")


def invert_monotone(f: ScalingFunction, s: float, t_max: float = 1e12) -> float:
    """Solve f(t) = s for monotone f by bisection on t.

    Stops when |f(t) - s| <= 1e-12 * max(1, s).
    """
    if not f.monotone:
        raise NonMonotoneError("cannot invert a non-monotone coupling schedule")
    if s < 0.0:
        raise ValueError("coupling values are nonnegative, cannot invert below zero")
    if s == 0.0:
        return 0.0
    tol = INVERT_RTOL * max(1.0, s)
    lo, hi = 0.0, 1.0
    while evaluate(f, hi) < s:
        hi *= 2.0
        if hi > t_max:
            raise ValueError(f"coupling value {s!r} not reached below t = {t_max!r}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        val = evaluate(f, mid)
        if abs(val - s) <= tol:
            return mid
        if val < s:
            lo = mid
        else:
            hi = mid
    # Bracket collapsed to rounding width; best midpoint is the answer.
    return 0.5 * (lo + hi)
