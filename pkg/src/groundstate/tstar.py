"""Sign regimes of the lowest eigenvalue along the coupling schedule, and the
unique parameter where it vanishes.

The positivity threshold and the negativity witness pin down seeds of the
positive and negative regimes; between them the lowest eigenvalue is
continuous in t, so a sign bracket plus bisection locates the zero-energy
parameter.  Uniqueness (and hence the bisection semantics) requires a
strictly monotone schedule: past the zero the eigenvalue stays negative.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .certify import Certificate, negativity_certificate, positivity_threshold
from .errors import BracketError, ConvergenceError, NonMonotoneError
from .manifold import DiscreteManifold
from .potential import Potential, require_admissible
from .scaling import ScalingFunction, evaluate, invert_monotone
from .spectrum import SpectrumResult, lowest_eigenpairs

DEFAULT_ZERO_TOL = 1e-8
MAX_BISECTIONS = 60


@dataclass(frozen=True)
class RegimeSample:
    t: float
    coupling: float
    lambda0: float
    residual: float

    def row(self):
        return (self.t, self.coupling, self.lambda0, self.residual)


@dataclass(frozen=True)
class RegimeReport:
    """Sampled sign structure of lambda0 along the schedule."""

    samples: tuple[RegimeSample, ...]
    positive_samples: tuple[int, ...]
    negative_samples: tuple[int, ...]
    bracket: tuple[float, float] | None
    sign_changes: tuple[tuple[int, int], ...]
    threshold: Certificate | None = None  # (0, F*] is certified positive
    witness: Certificate | None = None  # [s-, infinity) holds a negative witness
    t_positive_anchor: float | None = None  # f^{-1}(F*) for monotone f
    t_negative_anchor: float | None = None  # f^{-1}(s-) for monotone f

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "samples": [
                {"t": s.t, "coupling": s.coupling, "lambda0": s.lambda0, "residual": s.residual}
                for s in self.samples
            ],
            "positive_samples": list(self.positive_samples),
            "negative_samples": list(self.negative_samples),
            "bracket": list(self.bracket) if self.bracket else None,
            "sign_changes": [list(p) for p in self.sign_changes],
        }
        if self.threshold is not None:
            d["certified_coupling_threshold"] = self.threshold.threshold
        if self.witness is not None:
            d["witness_coupling"] = self.witness.witness_coupling
        if self.t_positive_anchor is not None:
            d["t_positive_anchor"] = self.t_positive_anchor
        if self.t_negative_anchor is not None:
            d["t_negative_anchor"] = self.t_negative_anchor
        return d


@dataclass(frozen=True)
class TStarResult:
    """Zero-ground-state parameter and its positive eigenfunction."""

    t_star: float
    lambda_at_tstar: float
    ground_state: np.ndarray
    iterations: int
    coupling_at_tstar: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "t_star": self.t_star,
            "lambda_at_tstar": self.lambda_at_tstar,
            "coupling_at_tstar": self.coupling_at_tstar,
            "iterations": self.iterations,
        }


def _solve_at(m, v, f, t, tol) -> RegimeSample:
    r = lowest_eigenpairs(m, v, evaluate(f, t), k=1, tol=tol)
    return RegimeSample(
        t=float(t),
        coupling=float(r.coupling_s),
        lambda0=r.lambda0,
        residual=float(r.residuals[0]),
    )


def scan_regimes(
    m: DiscreteManifold,
    v: Potential,
    f: ScalingFunction,
    t_grid: Sequence[float],
    tol: float = 1e-10,
    workers: int = 1,
) -> RegimeReport:
    """Solve lambda0 on the grid and report the sign pattern.

    The bracket, when one exists, is the last grid interval whose left end
    is positive and right end negative.  Certificates seed the regimes: the
    report carries the certified coupling prefix and the negativity
    witness, mapped into t when the schedule is invertible.
    """
    grid = np.asarray(list(t_grid), dtype=float)
    if grid.size == 0:
        raise ValueError("t grid is empty")
    if np.any(grid <= 0.0) or np.any(np.diff(grid) <= 0.0):
        raise ValueError("t grid must be positive and strictly ascending")
    require_admissible(m, v)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            samples = list(pool.map(lambda t: _solve_at(m, v, f, t, tol), grid))
    else:
        samples = [_solve_at(m, v, f, t, tol) for t in grid]

    positives = tuple(i for i, s in enumerate(samples) if s.lambda0 > 0.0)
    negatives = tuple(i for i, s in enumerate(samples) if s.lambda0 < 0.0)
    changes = tuple(
        (i, i + 1)
        for i in range(len(samples) - 1)
        if samples[i].lambda0 * samples[i + 1].lambda0 < 0.0
    )
    bracket = None
    for i, j in changes:
        if samples[i].lambda0 > 0.0 > samples[j].lambda0:
            bracket = (samples[i].t, samples[j].t)

    threshold = positivity_threshold(m, v)
    witness = negativity_certificate(m, v, f)
    t_pos = t_neg = None
    if f.monotone:
        t_pos = invert_monotone(f, threshold.threshold)
        t_neg = invert_monotone(f, witness.witness_coupling)
    return RegimeReport(
        samples=tuple(samples),
        positive_samples=positives,
        negative_samples=negatives,
        bracket=bracket,
        sign_changes=changes,
        threshold=threshold,
        witness=witness,
        t_positive_anchor=t_pos,
        t_negative_anchor=t_neg,
    )


def certified_grid(report_or_anchors, points: int = 9) -> np.ndarray:
    """Geometric t grid between the certified-positive anchor and the
    negativity-witness anchor."""
    if isinstance(report_or_anchors, RegimeReport):
        lo, hi = report_or_anchors.t_positive_anchor, report_or_anchors.t_negative_anchor
    else:
        lo, hi = report_or_anchors
    if lo is None or hi is None:
        raise BracketError("certified anchors unavailable (non-monotone schedule?)")
    if hi <= lo:
        hi = 2.0 * lo
    return np.geomspace(lo, hi, points)


def find_tstar(
    m: DiscreteManifold,
    v: Potential,
    f: ScalingFunction,
    tol: float = DEFAULT_ZERO_TOL,
    scan: RegimeReport | None = None,
    solver_tol: float = 1e-10,
    max_iter: int = MAX_BISECTIONS,
) -> TStarResult:
    """Bisect the sign change of lambda0(t) down to |lambda0| <= tol.

    Requires a strictly monotone schedule (otherwise the zero need not be
    unique and the search refuses to pick one).  The bracket comes from the
    scan when given, else from the certificate anchors, doubling t from the
    positive anchor until a negative sample or the witness parameter is hit.
    """
    if not f.monotone:
        raise NonMonotoneError(
            "find_tstar requires a strictly monotone schedule; "
            "run scan_regimes to enumerate sign changes instead"
        )
    require_admissible(m, v)

    t_lo = t_hi = None
    if scan is not None and scan.bracket is not None:
        t_lo, t_hi = scan.bracket
    else:
        threshold = (scan.threshold if scan else None) or positivity_threshold(m, v)
        witness = (scan.witness if scan else None) or negativity_certificate(m, v, f)
        t_lo = invert_monotone(f, threshold.threshold)
        t_cap = invert_monotone(f, witness.witness_coupling)
        if _solve_at(m, v, f, t_lo, solver_tol).lambda0 <= 0.0:
            raise BracketError(
                "lowest eigenvalue not positive at the certified threshold; "
                "discretization too coarse for the certified prefix"
            )
        t = t_lo
        while t_hi is None:
            t = min(2.0 * t, t_cap)
            lam = _solve_at(m, v, f, t, solver_tol).lambda0
            if lam < 0.0:
                t_hi = t
            elif lam > 0.0:
                t_lo = t
                if t >= t_cap:
                    raise BracketError(
                        "no negative sample found up to the witness parameter"
                    )
            else:  # landed exactly on the zero
                t_lo = t_hi = t
                break

    best_t = None
    best_lam = np.inf
    iterations = 0
    while iterations < max_iter:
        mid = 0.5 * (t_lo + t_hi)
        iterations += 1
        lam = _solve_at(m, v, f, mid, solver_tol).lambda0
        if abs(lam) < abs(best_lam):
            best_t, best_lam = mid, lam
        if abs(lam) <= tol:
            break
        if lam > 0.0:
            t_lo = mid
        else:
            t_hi = mid
        if (t_hi - t_lo) <= tol * max(mid, 1e-300):
            break
    else:
        raise ConvergenceError(
            f"bisection did not reach |lambda0| <= {tol!r} in {max_iter} iterations "
            f"(best |lambda0| = {abs(best_lam):.3e})",
            iterations=iterations,
        )
    if best_t is None:  # degenerate bracket: exact zero found during expansion
        best_t = t_lo
        best_lam = _solve_at(m, v, f, best_t, solver_tol).lambda0

    s_star = evaluate(f, best_t)
    r = lowest_eigenpairs(m, v, s_star, k=1, tol=solver_tol)
    return TStarResult(
        t_star=float(best_t),
        lambda_at_tstar=r.lambda0,
        ground_state=r.eigenvectors[:, 0],
        iterations=iterations,
        coupling_at_tstar=float(s_star),
    )


def monotone_tail_check(
    m: DiscreteManifold,
    v: Potential,
    f: ScalingFunction,
    t_star: float,
    probes: int = 8,
    probe_points: Sequence[float] | None = None,
    solver_tol: float = 1e-10,
) -> bool:
    """True iff lambda0 < 0 at every probe in (t_star, 10*t_star].

    Explicit probe points are filtered to the region past t_star first.
    """
    if probe_points is None:
        pts = t_star * np.power(10.0, np.arange(1, probes + 1) / probes)
    else:
        pts = np.asarray([t for t in probe_points if t > t_star], dtype=float)
    return all(_solve_at(m, v, f, t, solver_tol).lambda0 < 0.0 for t in pts)
