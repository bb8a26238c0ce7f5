"""Independent dense reference computations used to cross-check the toolkit.

Everything here is built from plain numpy, without importing the package
under test: periodic finite-difference operators are assembled index by
index, eigenvalues come from numpy.linalg.eigh, and the zero crossing of
the lowest eigenvalue is located by plain bisection.  Keep it that way --
these routines are the oracle side of the dual-route checks.
"""

import numpy as np

TWO_PI = 2.0 * np.pi


def circle_points(n, length=TWO_PI):
    return np.arange(n) * (length / n)


def circle_hamiltonian(n, length, potential, coupling):
    """Dense FD matrix of -d2/dx2 + coupling*V on a periodic grid."""
    h = length / n
    a = np.zeros((n, n))
    idx = np.arange(n)
    a[idx, idx] = 2.0 / h**2 + coupling * potential
    a[idx, (idx + 1) % n] -= 1.0 / h**2
    a[idx, (idx - 1) % n] -= 1.0 / h**2
    return a


def circle_eigvals(n, length, potential, coupling):
    a = circle_hamiltonian(n, length, potential, coupling)
    return np.linalg.eigvalsh(a)


def circle_lambda0(n, length, potential, coupling):
    return circle_eigvals(n, length, potential, coupling)[0]


def torus2_hamiltonian(nx, ny, lx, ly, potential, coupling):
    """Dense FD matrix of -Laplace + coupling*V on a periodic nx*ny grid.

    Vertex (i, j) maps to row i*ny + j; potential is flat in that order.
    """
    hx, hy = lx / nx, ly / ny
    n = nx * ny
    a = np.zeros((n, n))
    for i in range(nx):
        for j in range(ny):
            r = i * ny + j
            a[r, r] = 2.0 / hx**2 + 2.0 / hy**2 + coupling * potential[r]
            a[r, ((i + 1) % nx) * ny + j] -= 1.0 / hx**2
            a[r, ((i - 1) % nx) * ny + j] -= 1.0 / hx**2
            a[r, i * ny + (j + 1) % ny] -= 1.0 / hy**2
            a[r, i * ny + (j - 1) % ny] -= 1.0 / hy**2
    return a


def generalized_lowest(a_dense, mass, k=1):
    """Smallest k eigenvalues of A x = lam M x with diagonal positive M.

    Solved by symmetrizing with M^{-1/2}, independent of any generalized
    LAPACK driver the implementation might use.
    """
    d = 1.0 / np.sqrt(np.asarray(mass, dtype=float))
    b = d[:, None] * np.asarray(a_dense, dtype=float) * d[None, :]
    b = 0.5 * (b + b.T)
    return np.linalg.eigvalsh(b)[:k]


def fd_circle_mode(n, length, k):
    """Closed-form FD eigenvalue (2/h^2)(1 - cos(2 pi k / n))."""
    h = length / n
    return (2.0 / h**2) * (1.0 - np.cos(TWO_PI * k / n))


def bisect_tstar_circle(n=512, length=TWO_PI, shift=0.1, lo=0.05, hi=0.5,
                        width_tol=1e-13):
    """Zero of lambda0(t) for V = cos(x) + shift with f(t) = t, by bisection."""
    x = circle_points(n, length)
    v = np.cos(x) + shift
    flo = circle_lambda0(n, length, v, lo)
    fhi = circle_lambda0(n, length, v, hi)
    if not (flo > 0.0 > fhi):
        raise RuntimeError("bisection bracket invalid: %g %g" % (flo, fhi))
    while hi - lo > width_tol * hi:
        mid = 0.5 * (lo + hi)
        if circle_lambda0(n, length, v, mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# Frozen reference values (computed with this module; regenerate by running
# `python tests/dense_oracle.py`).
TSTAR_CIRCLE_512 = 0.20355307772481057
LAMBDA0_CIRCLE_256_S01 = 0.005021427688276958
LAMBDA0_CIRCLE_256_S1 = -0.2785027567486049


if __name__ == "__main__":
    n, length = 256, TWO_PI
    x = circle_points(n, length)
    v = np.cos(x) + 0.1
    print("TSTAR_CIRCLE_512 =", repr(bisect_tstar_circle()))
    print("LAMBDA0_CIRCLE_256_S01 =", repr(circle_lambda0(n, length, v, 0.1)))
    print("LAMBDA0_CIRCLE_256_S1 =", repr(circle_lambda0(n, length, v, 1.0)))
