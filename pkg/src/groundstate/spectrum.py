"""Generalized symmetric eigenproblems for L_s = -Laplacian + s*V.

The discrete operator pair is A = K + s*diag(mass*V) against the diagonal
mass matrix M, so eigenvalues approximate those of the continuous
Schrodinger operator at coupling s.  Small problems go straight to LAPACK;
larger ones use shift-invert Lanczos (ARPACK) with the shift placed below
the spectrum via a Gershgorin bound, which keeps the factorized matrix
positive definite and makes the smallest eigenvalues the best converged.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy import linalg as sla
from scipy import sparse
from scipy.sparse import linalg as spla

from .errors import ConvergenceError
from .manifold import DiscreteManifold
from .potential import Potential

DENSE_CUTOFF = 512
DEFAULT_TOL = 1e-10
GROUND_SIGN_EPS = 1e-8
_V0_SEED = 170  # fixed Lanczos start vector -> byte-reproducible runs


@dataclass(frozen=True)
class SpectrumResult:
    """Lowest-k eigenpairs of (K + s*diag(mass*V), M)."""

    coupling_s: float
    eigenvalues: np.ndarray  # ascending, shape (k,)
    eigenvectors: np.ndarray  # mass-orthonormal columns, shape (n, k)
    residuals: np.ndarray  # ||A v - lam M v|| / ||v||_M per pair
    iterations: int

    @property
    def lambda0(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def ground_state(self) -> np.ndarray:
        return self.eigenvectors[:, 0]

    def to_dict(self) -> dict[str, Any]:
        return {
            "coupling_s": self.coupling_s,
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "residuals": [float(x) for x in self.residuals],
            "iterations": self.iterations,
        }


@dataclass(frozen=True)
class Decomposition:
    """Split of a state into its mass-mean and a mean-zero fluctuation."""

    mean_part: float
    fluctuation: np.ndarray
    fluctuation_norm_sq: float  # integral of u^2
    mean_sq: float  # mean_part^2
    total_norm_sq: float  # integral of phi^2 = fluctuation_norm_sq + Vol * mean_sq


def operator_matrices(m: DiscreteManifold, v: Potential | None, s: float):
    """Assemble (A, mass) for the coupling s; v may be None for the pure Laplacian."""
    a = m.stiffness
    if v is not None and s != 0.0:
        a = (a + sparse.diags(s * m.mass_weights * v.values)).tocsr()
    return a, m.mass_weights


def _gershgorin_lower(a: sparse.csr_matrix, mass: np.ndarray) -> float:
    """Lower bound on the generalized spectrum of (A, M) from row sums."""
    diag = a.diagonal()
    absrow = np.abs(a).sum(axis=1).A1 if hasattr(np.abs(a).sum(axis=1), "A1") else np.asarray(
        np.abs(a).sum(axis=1)
    ).ravel()
    offdiag = absrow - np.abs(diag)
    return float(np.min((diag - offdiag) / mass))


def _mass_normalize(vecs: np.ndarray, mass: np.ndarray) -> np.ndarray:
    norms = np.sqrt(np.einsum("ij,i,ij->j", vecs, mass, vecs))
    return vecs / norms


def _sign_normalize(vec: np.ndarray, mass: np.ndarray) -> np.ndarray:
    """Flip so the mass-weighted mean is positive (largest entry breaks ties)."""
    mean = float(mass @ vec)
    if abs(mean) > 1e-14 * float(np.abs(vec).max()) * float(mass.sum()):
        return vec if mean > 0.0 else -vec
    pivot = int(np.argmax(np.abs(vec)))
    return vec if vec[pivot] > 0.0 else -vec


def _residuals(a, mass, vals, vecs) -> np.ndarray:
    res = np.empty(len(vals))
    for i, lam in enumerate(vals):
        vec = vecs[:, i]
        r = a @ vec - lam * (mass * vec)
        res[i] = np.linalg.norm(r) / np.sqrt(float(vec @ (mass * vec)))
    return res


def _solve_dense(a, mass, k):
    vals, vecs = sla.eigh(a.toarray(), np.diag(mass))
    return vals[:k], vecs[:, :k], 0


def _solve_shift_invert(a, mass, k, maxiter):
    n = a.shape[0]
    sigma = _gershgorin_lower(a, mass)
    sigma -= 0.1 * (1.0 + abs(sigma))
    shifted = (a - sparse.diags(sigma * mass)).tocsc()
    lu = spla.splu(shifted)
    counter = {"n": 0}

    def apply_opinv(x):
        counter["n"] += 1
        return lu.solve(x)

    opinv = spla.LinearOperator((n, n), matvec=apply_opinv, dtype=float)
    v0 = np.random.default_rng(_V0_SEED).standard_normal(n)
    m_op = sparse.diags(mass).tocsr()
    try:
        vals, vecs = spla.eigsh(
            a,
            k=k,
            M=m_op,
            sigma=sigma,
            which="LM",
            mode="normal",
            OPinv=opinv,
            v0=v0,
            maxiter=maxiter,
            tol=0,
        )
    except spla.ArpackNoConvergence as exc:
        best = None
        if exc.eigenvalues is not None and len(exc.eigenvalues):
            best = _residuals(a, mass, exc.eigenvalues, exc.eigenvectors)
        raise ConvergenceError(
            f"eigensolver did not converge within {maxiter} iterations",
            residuals=best,
            iterations=counter["n"],
        ) from exc
    order = np.argsort(vals)
    return vals[order], vecs[:, order], counter["n"]


def lowest_eigenpairs(
    m: DiscreteManifold,
    v: Potential | None,
    s: float,
    k: int = 1,
    tol: float = DEFAULT_TOL,
    method: str = "auto",
) -> SpectrumResult:
    """Smallest k eigenpairs of the coupled operator at coupling s.

    method: "auto" picks dense LAPACK for n <= 512 and shift-invert Lanczos
    above; "dense" / "shift_invert" force a path.  Residuals above tol
    raise ConvergenceError carrying the best values seen.
    """
    n = m.n_vertices
    if k < 1:
        raise ValueError("k must be at least 1")
    if k > n:
        raise ValueError(f"k = {k} exceeds the {n} vertices of the manifold")
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    a, mass = operator_matrices(m, v, s)
    if method == "auto":
        method = "dense" if (n <= DENSE_CUTOFF or k > n - 2) else "shift_invert"
    if method == "dense":
        vals, vecs, its = _solve_dense(a, mass, k)
    elif method == "shift_invert":
        if k > n - 2:
            raise ValueError("shift-invert path requires k <= n - 2")
        vals, vecs, its = _solve_shift_invert(a, mass, k, maxiter=10 * n)
    else:
        raise ValueError(f"unknown method {method!r}")
    vecs = _mass_normalize(np.ascontiguousarray(vecs), mass)
    vecs[:, 0] = _sign_normalize(vecs[:, 0], mass)
    res = _residuals(a, mass, vals, vecs)
    if np.any(res > tol):
        raise ConvergenceError(
            f"eigenpair residuals {res.max():.3e} above tolerance {tol:.3e}",
            residuals=res,
            iterations=its,
        )
    return SpectrumResult(
        coupling_s=float(s),
        eigenvalues=np.asarray(vals, dtype=float),
        eigenvectors=vecs,
        residuals=res,
        iterations=its,
    )


def rayleigh_quotient(m: DiscreteManifold, v: Potential | None, s: float, phi) -> float:
    """(phi^T K phi + s * sum(mass*V*phi^2)) / sum(mass*phi^2)."""
    phi = np.asarray(phi, dtype=float)
    denom = float(phi @ (m.mass_weights * phi))
    if denom == 0.0:
        raise ValueError("Rayleigh quotient of the zero vector is undefined")
    num = float(phi @ (m.stiffness @ phi))
    if v is not None and s != 0.0:
        num += s * float((m.mass_weights * v.values) @ (phi * phi))
    return num / denom


def poincare_constant(m: DiscreteManifold, tol: float = DEFAULT_TOL) -> float:
    """P = 1/mu_1 with mu_1 the first nonzero eigenvalue of (K, M).

    This is the constant for which the mean-zero inequality
    integral(u^2) <= P * integral(|grad u|^2) holds verbatim.
    """
    r = lowest_eigenpairs(m, None, 0.0, k=2, tol=tol)
    mu1 = float(r.eigenvalues[1])
    if mu1 < 1e-12:
        raise ConvergenceError(
            f"first nonzero eigenvalue {mu1:.3e} is numerically zero; "
            "manifold appears disconnected"
        )
    return 1.0 / mu1


def decompose(m: DiscreteManifold, phi) -> Decomposition:
    """Write phi as mean + fluctuation with mass-weighted mean zero."""
    phi = np.asarray(phi, dtype=float)
    if not np.all(np.isfinite(phi)):
        raise ValueError("cannot decompose a non-finite vector")
    mass = m.mass_weights
    mean = float(mass @ phi) / m.total_volume
    u = phi - mean
    u_sq = float(u @ (mass * u))
    total = float(phi @ (mass * phi))
    return Decomposition(
        mean_part=mean,
        fluctuation=u,
        fluctuation_norm_sq=u_sq,
        mean_sq=mean * mean,
        total_norm_sq=total,
    )


def ground_state_sign_check(r: SpectrumResult) -> bool:
    """True iff the (sign-normalized) first eigenvector never dips below
    -1e-8 times its maximum entry -- the discrete ground-state sign property."""
    vec = r.eigenvectors[:, 0]
    top = float(vec.max())
    bottom = float(vec.min())
    if top <= 0.0:  # normalized upside down or identically nonpositive
        top, bottom = -bottom, -top
    return bottom > -GROUND_SIGN_EPS * top
