"""Discrete compact manifolds and their mass/stiffness operators.

A manifold is represented by a diagonal mass matrix (the discrete volume
form) and a sparse symmetric stiffness matrix realizing the Dirichlet
energy, so every Laplacian eigenproblem in the toolkit is the generalized
symmetric problem  K v = lam M v.  Two constructions are provided:

* periodic tori (1D/2D) with second-order centered finite differences,
* closed triangle meshes with cotangent weights and lumped vertex areas.

Both give a stiffness that annihilates constants and has nonnegative
generalized spectrum, which is what "compact, no boundary" means here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import sparse

from .errors import MeshError

_SYMMETRY_RTOL = 1e-12
_NULLVEC_RTOL = 1e-10


@dataclass(frozen=True)
class DiscreteManifold:
    """Vertex-based discretization of a compact Riemannian manifold.

    mass_weights is the per-vertex volume form; stiffness is the symmetric
    positive-semidefinite operator whose quadratic form approximates the
    Dirichlet energy integral of the gradient squared.  coordinates holds
    the points the vertices sample (axis coordinates for tori, embedded 3D
    positions for meshes) so analytic potentials can be evaluated.
    """

    n_vertices: int
    mass_weights: np.ndarray
    stiffness: sparse.csr_matrix
    total_volume: float
    kind: str  # "torus_grid" | "triangle_mesh"
    dimension: int
    coordinates: np.ndarray
    descriptor: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        mass = np.ascontiguousarray(np.asarray(self.mass_weights, dtype=float))
        object.__setattr__(self, "mass_weights", mass)
        k = self.stiffness.tocsr()
        object.__setattr__(self, "stiffness", k)
        if mass.shape != (self.n_vertices,):
            raise ValueError("mass_weights length must equal n_vertices")
        if k.shape != (self.n_vertices, self.n_vertices):
            raise ValueError("stiffness shape must be (n, n)")
        if np.any(mass <= 0.0) or not np.all(np.isfinite(mass)):
            raise ValueError("mass weights must be strictly positive and finite")
        scale = _spnorm(k)
        asym = _spnorm(k - k.T)
        if asym > _SYMMETRY_RTOL * max(scale, 1e-300):
            raise ValueError(f"stiffness not symmetric: |K-K^T|/|K| = {asym / scale:.3e}")
        drift = np.linalg.norm(k @ np.ones(self.n_vertices))
        if drift > _NULLVEC_RTOL * max(scale, 1e-300):
            raise ValueError(f"stiffness does not annihilate constants: {drift:.3e}")

    @property
    def mass_matrix(self) -> sparse.dia_matrix:
        return sparse.diags(self.mass_weights)

    def to_dict(self) -> dict[str, Any]:
        return {
            "n_vertices": self.n_vertices,
            "total_volume": self.total_volume,
            "kind": self.kind,
            "dimension": self.dimension,
            "descriptor": self.descriptor,
        }


@dataclass(frozen=True)
class TriangleMesh:
    """Embedded triangle mesh: (n, 3) vertex positions, (m, 3) face indices."""

    vertices: np.ndarray
    faces: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.vertices, dtype=float))
        f = np.ascontiguousarray(np.asarray(self.faces, dtype=np.int64))
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", f)
        if v.ndim != 2 or v.shape[1] != 3:
            raise MeshError("vertices must be an (n, 3) array")
        if f.ndim != 2 or f.shape[1] != 3:
            raise MeshError("faces must be an (m, 3) array of vertex triples")
        if f.size and (f.min() < 0 or f.max() >= len(v)):
            raise MeshError("face references a vertex index out of range")

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def edge_face_counts(self) -> dict[tuple[int, int], int]:
        counts: dict[tuple[int, int], int] = {}
        for a, b, c in self.faces:
            for i, j in ((a, b), (b, c), (c, a)):
                key = (min(i, j), max(i, j))
                counts[key] = counts.get(key, 0) + 1
        return counts

    def is_closed(self) -> bool:
        return all(c == 2 for c in self.edge_face_counts().values())

    def face_areas(self) -> np.ndarray:
        p = self.vertices[self.faces]
        cross = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
        return 0.5 * np.linalg.norm(cross, axis=1)


def _spnorm(a) -> float:
    return sparse.linalg.norm(a) if a.nnz else 0.0


def _axis_params(dim, lengths, resolution):
    lv = np.atleast_1d(np.asarray(lengths, dtype=float))
    rv = np.atleast_1d(np.asarray(resolution, dtype=np.int64))
    if lv.size == 1:
        lv = np.repeat(lv, dim)
    if rv.size == 1:
        rv = np.repeat(rv, dim)
    if lv.size != dim or rv.size != dim:
        raise ValueError("lengths/resolution must be scalars or length-dim sequences")
    if np.any(lv <= 0.0):
        raise ValueError("torus lengths must be positive")
    if np.any(rv < 4):
        raise ValueError("resolution must be at least 4 points per axis")
    return lv, rv


def _circle_operators(n: int, length: float):
    """Periodic second-order FD pair (K, mass) on n points of a circle."""
    h = length / n
    idx = np.arange(n)
    rows = np.concatenate([idx, idx, idx])
    cols = np.concatenate([idx, (idx + 1) % n, (idx - 1) % n])
    vals = np.concatenate([np.full(n, 2.0 / h), np.full(n, -1.0 / h), np.full(n, -1.0 / h)])
    k = sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))
    return k, np.full(n, h)


def build_torus_grid(dim: int, lengths, resolution) -> DiscreteManifold:
    """Uniform periodic grid on a flat torus (dim 1 or 2).

    The stiffness is the centered finite-difference Laplacian scaled by the
    cell volume, so (K, M) has exactly the classical FD spectrum
    (2/h^2)(1 - cos(2 pi k / n)) per axis.
    """
    if dim not in (1, 2):
        raise ValueError("dim must be 1 or 2")
    lv, rv = _axis_params(dim, lengths, resolution)
    if dim == 1:
        n = int(rv[0])
        k, mass = _circle_operators(n, float(lv[0]))
        coords = (np.arange(n) * (lv[0] / n)).reshape(-1, 1)
    else:
        nx, ny = int(rv[0]), int(rv[1])
        kx, mx = _circle_operators(nx, float(lv[0]))
        ky, my = _circle_operators(ny, float(lv[1]))
        # Tensor product: vertex (i, j) -> row i*ny + j.
        k = sparse.kron(kx, sparse.diags(my)) + sparse.kron(sparse.diags(mx), ky)
        k = k.tocsr()
        mass = np.repeat(mx, ny) * np.tile(my, nx)
        xs = np.arange(nx) * (lv[0] / nx)
        ys = np.arange(ny) * (lv[1] / ny)
        coords = np.column_stack([np.repeat(xs, ny), np.tile(ys, nx)])
    mass = np.ascontiguousarray(mass)
    return DiscreteManifold(
        n_vertices=mass.size,
        mass_weights=mass,
        stiffness=k,
        total_volume=float(mass.sum()),
        kind="torus_grid",
        dimension=dim,
        coordinates=coords,
        descriptor={
            "construction": "torus_grid",
            "dim": dim,
            "lengths": [float(x) for x in lv],
            "resolution": [int(x) for x in rv],
        },
    )


def build_from_mesh(mesh: TriangleMesh, descriptor: dict | None = None) -> DiscreteManifold:
    """Cotangent-weight stiffness and lumped (barycentric) mass for a closed mesh."""
    if mesh.faces.shape[0] == 0:
        raise MeshError("mesh has no faces")
    counts = mesh.edge_face_counts()
    boundary = sum(1 for c in counts.values() if c != 2)
    if boundary:
        raise MeshError(f"mesh is not closed: {boundary} edges not shared by exactly two faces")

    areas = mesh.face_areas()
    scale = float(np.sqrt(areas.max())) if len(areas) else 1.0
    if np.any(areas <= (1e-12 * scale) ** 2):
        raise MeshError("mesh contains degenerate (zero-area) faces")

    p = mesh.vertices[mesh.faces]  # (m, 3, 3)
    n = mesh.n_vertices
    rows, cols, vals = [], [], []
    # Per corner c of each face, cot(angle at c) weights the opposite edge.
    for c in range(3):
        a, b = (c + 1) % 3, (c + 2) % 3
        u = p[:, a] - p[:, c]
        v = p[:, b] - p[:, c]
        cosn = np.einsum("ij,ij->i", u, v)
        sinn = np.linalg.norm(np.cross(u, v), axis=1)
        cot = cosn / sinn
        if not np.all(np.isfinite(cot)):
            raise MeshError("non-finite cotangent weight (degenerate corner angle)")
        w = 0.5 * cot
        i, j = mesh.faces[:, a], mesh.faces[:, b]
        rows.extend([i, j, i, j])
        cols.extend([j, i, i, j])
        vals.extend([-w, -w, w, w])
    k = sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
    )
    k = (0.5 * (k + k.T)).tocsr()  # kill rounding asymmetry from summed duplicates

    mass = np.zeros(n)
    np.add.at(mass, mesh.faces.ravel(), np.repeat(areas / 3.0, 3))
    if np.any(mass <= 0.0):
        raise MeshError("mesh has isolated vertices (zero lumped area)")

    desc = {"construction": "triangle_mesh", "n_faces": int(len(mesh.faces))}
    if descriptor:
        desc.update(descriptor)
    return DiscreteManifold(
        n_vertices=n,
        mass_weights=mass,
        stiffness=k,
        total_volume=float(mass.sum()),
        kind="triangle_mesh",
        dimension=2,
        coordinates=mesh.vertices.copy(),
        descriptor=desc,
    )


def scale_metric(m: DiscreteManifold, t: float) -> DiscreteManifold:
    """Metric scaling g -> t*g at the operator level: Laplacian becomes 1/t of itself.

    Mass weights are kept fixed (the geometric volume is deliberately not
    rescaled; the descriptor records this), so the generalized spectrum is
    exactly 1/t times the original.
    """
    if not t > 0.0:
        raise ValueError("metric scale t must be positive")
    desc = dict(m.descriptor)
    desc["metric_scale_t"] = float(t) * desc.get("metric_scale_t", 1.0)
    desc["volume_policy"] = "mass weights held fixed under metric scaling"
    return DiscreteManifold(
        n_vertices=m.n_vertices,
        mass_weights=m.mass_weights,
        stiffness=(m.stiffness * (1.0 / t)).tocsr(),
        total_volume=m.total_volume,
        kind=m.kind,
        dimension=m.dimension,
        coordinates=m.coordinates,
        descriptor=desc,
    )


def normalize_volume(m: DiscreteManifold) -> DiscreteManifold:
    """Rescale the metric so that the total volume is exactly 1.

    Under g -> c*g the volume form picks up c^(d/2) and the Dirichlet energy
    c^(d/2 - 1); choosing c = Vol^(-2/d) lands at unit volume.  Used by the
    certification diagnostics, which are stated for unit-volume manifolds.
    """
    vol = m.total_volume
    d = m.dimension
    mass_factor = 1.0 / vol  # c^(d/2)
    stiff_factor = vol ** (2.0 / d - 1.0)  # c^(d/2 - 1)
    desc = dict(m.descriptor)
    desc["volume_normalized_from"] = vol
    return DiscreteManifold(
        n_vertices=m.n_vertices,
        mass_weights=m.mass_weights * mass_factor,
        stiffness=(m.stiffness * stiff_factor).tocsr(),
        total_volume=1.0,
        kind=m.kind,
        dimension=d,
        coordinates=m.coordinates,
        descriptor=desc,
    )


# ---------------------------------------------------------------------------
# Mesh sources


def load_off(path) -> TriangleMesh:
    """Read an OFF file (triangular faces only)."""
    with open(path) as fh:
        tokens = []
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                tokens.extend(line.split())
    if not tokens or tokens[0] != "OFF":
        raise MeshError(f"{path}: missing OFF header")
    try:
        nv, nf = int(tokens[1]), int(tokens[2])
        pos = 4  # skip edge count
        verts = np.array(tokens[pos:pos + 3 * nv], dtype=float).reshape(nv, 3)
        pos += 3 * nv
        faces = []
        for _ in range(nf):
            cnt = int(tokens[pos])
            if cnt != 3:
                raise MeshError(f"{path}: only triangular faces supported, got {cnt}-gon")
            faces.append([int(tokens[pos + 1]), int(tokens[pos + 2]), int(tokens[pos + 3])])
            pos += 1 + cnt
    except (IndexError, ValueError) as exc:
        raise MeshError(f"{path}: truncated or malformed OFF data") from exc
    return TriangleMesh(vertices=verts, faces=np.array(faces, dtype=np.int64))


def save_off(path, mesh: TriangleMesh) -> None:
    with open(path, "w") as fh:
        fh.write("OFF\n")
        fh.write(f"{mesh.n_vertices} {len(mesh.faces)} 0\n")
        for v in mesh.vertices:
            fh.write(f"{float(v[0])!r} {float(v[1])!r} {float(v[2])!r}\n")
        for f in mesh.faces:
            fh.write(f"3 {f[0]} {f[1]} {f[2]}\n")


def tetrahedron_mesh(radius: float = 1.0) -> TriangleMesh:
    """Regular tetrahedron surface (smallest closed complex, handy in tests)."""
    v = np.array(
        [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]]
    ) / np.sqrt(3.0) * radius
    f = np.array([[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]], dtype=np.int64)
    return TriangleMesh(vertices=v, faces=f)


def icosphere_mesh(radius: float = 1.0, subdivisions: int = 3) -> TriangleMesh:
    """Icosahedron subdivided `subdivisions` times, vertices projected to the sphere."""
    if subdivisions < 0:
        raise ValueError("subdivisions must be nonnegative")
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    verts = [
        (-1, phi, 0), (1, phi, 0), (-1, -phi, 0), (1, -phi, 0),
        (0, -1, phi), (0, 1, phi), (0, -1, -phi), (0, 1, -phi),
        (phi, 0, -1), (phi, 0, 1), (-phi, 0, -1), (-phi, 0, 1),
    ]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    verts = [np.asarray(v, dtype=float) for v in verts]

    def push(p):
        verts.append(p)
        return len(verts) - 1

    for _ in range(subdivisions):
        midpoint: dict[tuple[int, int], int] = {}

        def mid(i, j):
            key = (min(i, j), max(i, j))
            if key not in midpoint:
                midpoint[key] = push(0.5 * (verts[i] + verts[j]))
            return midpoint[key]

        next_faces = []
        for a, b, c in faces:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            next_faces.extend([(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)])
        faces = next_faces

    pts = np.array(verts)
    pts *= radius / np.linalg.norm(pts, axis=1, keepdims=True)
    return TriangleMesh(vertices=pts, faces=np.array(faces, dtype=np.int64))


def icosphere(radius: float = 1.0, subdivisions: int = 3) -> DiscreteManifold:
    mesh = icosphere_mesh(radius, subdivisions)
    return build_from_mesh(
        mesh, descriptor={"source": f"icosphere(radius={radius}, subdivisions={subdivisions})"}
    )
