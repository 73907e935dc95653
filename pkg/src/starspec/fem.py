"""P1 finite elements for mixed Dirichlet-Neumann Laplacian eigenvalues on
polygons: ear-clipping triangulation with Delaunay flips, uniform red
refinement, sparse assembly, and Richardson-extrapolated spectra.

FEM eigenvalues from a conforming space are variational upper bounds; they
are never used as lower bounds anywhere in the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .exact import EigList
from .geom import BC, Polygon

DENSE_DOF_LIMIT = 2000


class MeshFailure(RuntimeError):
    pass


class SolverFailure(RuntimeError):
    pass


@dataclass
class Mesh:
    nodes: np.ndarray  # (N, 2) float
    triangles: np.ndarray  # (T, 3) int, positively oriented
    boundary_edges: np.ndarray  # (B, 2) int node pairs
    boundary_tags: list[BC]
    boundary_src: list[int]  # polygon edge id each boundary edge came from

    def max_diameter(self) -> float:
        p = self.nodes[self.triangles]
        d = [np.linalg.norm(p[:, i] - p[:, j], axis=1) for i, j in ((0, 1), (1, 2), (2, 0))]
        return float(np.max(d))

    def min_angle_deg(self) -> float:
        p = self.nodes[self.triangles]
        angles = []
        for i in range(3):
            a = p[:, (i + 1) % 3] - p[:, i]
            b = p[:, (i + 2) % 3] - p[:, i]
            cosang = np.sum(a * b, axis=1) / (
                np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1)
            )
            angles.append(np.degrees(np.arccos(np.clip(cosang, -1, 1))))
        return float(np.min(angles))

    def areas(self) -> np.ndarray:
        p = self.nodes[self.triangles]
        return 0.5 * np.abs(
            (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
            - (p[:, 2, 0] - p[:, 0, 0]) * (p[:, 1, 1] - p[:, 0, 1])
        )


@dataclass
class DiscreteProblem:
    stiffness: sp.csr_matrix  # on free nodes
    mass: sp.csr_matrix
    free_nodes: np.ndarray  # indices of free nodes in the mesh
    total_mass: float  # sum of the unrestricted mass matrix (= mesh area)


@dataclass
class FemSpectrum:
    level_values: list[np.ndarray]  # eigenvalues per refinement level
    extrapolated: np.ndarray
    error_estimate: np.ndarray
    observed_order: np.ndarray


# -- triangulation ----------------------------------------------------------


def _ear_clip(vertices: np.ndarray) -> list[tuple[int, int, int]]:
    """Triangulate a simple CCW polygon (collinear vertices allowed)."""
    n = len(vertices)
    idx = list(range(n))
    tris = []
    guard = 0
    while len(idx) > 3:
        guard += 1
        if guard > 4 * n * n:
            raise MeshFailure("ear clipping stalled; polygon may be degenerate")
        clipped = False
        m = len(idx)
        for pos in range(m):
            i0, i1, i2 = idx[pos - 1], idx[pos], idx[(pos + 1) % m]
            a, b, c = vertices[i0], vertices[i1], vertices[i2]
            area2 = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            if area2 <= 1e-14:
                continue  # reflex or flat corner
            if _any_point_in_triangle(vertices, [j for j in idx if j not in (i0, i1, i2)], a, b, c):
                continue
            tris.append((i0, i1, i2))
            idx.pop(pos)
            clipped = True
            break
        if not clipped:
            raise MeshFailure("no clippable ear found; polygon may be degenerate")
    i0, i1, i2 = idx
    a, b, c = vertices[i0], vertices[i1], vertices[i2]
    if (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]) <= 1e-14:
        raise MeshFailure("degenerate final triangle")
    tris.append((i0, i1, i2))
    return tris


def _any_point_in_triangle(vertices, candidates, a, b, c) -> bool:
    for j in candidates:
        p = vertices[j]
        d1 = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
        d2 = (c[0] - b[0]) * (p[1] - b[1]) - (c[1] - b[1]) * (p[0] - b[0])
        d3 = (a[0] - c[0]) * (p[1] - c[1]) - (a[1] - c[1]) * (p[0] - c[0])
        if d1 > -1e-12 and d2 > -1e-12 and d3 > -1e-12:
            return True
    return False


def _delaunay_flips(nodes: np.ndarray, tris: list[list[int]], fixed_edges: set) -> None:
    """Local edge flips toward the Delaunay criterion; fixed edges stay."""

    def in_circumcircle(a, b, c, d) -> bool:
        # sign normalized by triangle orientation so the test is order-free
        orient = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        mat = np.array(
            [
                [a[0] - d[0], a[1] - d[1], (a[0] - d[0]) ** 2 + (a[1] - d[1]) ** 2],
                [b[0] - d[0], b[1] - d[1], (b[0] - d[0]) ** 2 + (b[1] - d[1]) ** 2],
                [c[0] - d[0], c[1] - d[1], (c[0] - d[0]) ** 2 + (c[1] - d[1]) ** 2],
            ]
        )
        return math.copysign(1.0, orient) * np.linalg.det(mat) > 1e-12

    for _ in range(50):
        edge_map: dict[tuple[int, int], list[int]] = {}
        for t, tri in enumerate(tris):
            for i in range(3):
                e = tuple(sorted((tri[i], tri[(i + 1) % 3])))
                edge_map.setdefault(e, []).append(t)
        flipped = False
        for e, owners in edge_map.items():
            if len(owners) != 2 or e in fixed_edges:
                continue
            t1, t2 = owners
            a, b = e
            c = next(v for v in tris[t1] if v not in e)
            d = next(v for v in tris[t2] if v not in e)
            if not in_circumcircle(nodes[tris[t1][0]], nodes[tris[t1][1]], nodes[tris[t1][2]], nodes[d]):
                continue
            # flip only if the quad a-c-b-d is strictly convex
            def orient(p, q, r):
                return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])

            if (
                orient(nodes[c], nodes[a], nodes[d]) <= 1e-14
                or orient(nodes[d], nodes[b], nodes[c]) <= 1e-14
            ):
                continue
            tris[t1] = [c, a, d]
            tris[t2] = [d, b, c]
            flipped = True
            break
        if not flipped:
            return


def triangulate(poly: Polygon, h_target: float) -> Mesh:
    """Mesh the polygon: ear clipping, Delaunay flips, then uniform red
    refinement until the maximum element diameter is at most h_target."""
    if h_target <= 0:
        raise MeshFailure("h_target must be positive")
    if poly.area() < 1e-14:
        raise MeshFailure("zero-area polygon")
    verts = np.array(poly.vertices, dtype=float)
    tris = [list(t) for t in _ear_clip(verts)]
    fixed = {
        tuple(sorted((i, (i + 1) % poly.n_edges))) for i in range(poly.n_edges)
    }
    _delaunay_flips(verts, tris, fixed)
    bedges = np.array([[i, (i + 1) % poly.n_edges] for i in range(poly.n_edges)])
    mesh = Mesh(
        nodes=verts,
        triangles=_orient_ccw(verts, np.array(tris, dtype=int)),
        boundary_edges=bedges,
        boundary_tags=list(poly.edge_tags),
        boundary_src=list(range(poly.n_edges)),
    )
    while mesh.max_diameter() > h_target:
        mesh = refine(mesh)
    return mesh


def _orient_ccw(nodes: np.ndarray, tris: np.ndarray) -> np.ndarray:
    p = nodes[tris]
    det = (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1]) - (
        p[:, 2, 0] - p[:, 0, 0]
    ) * (p[:, 1, 1] - p[:, 0, 1])
    out = tris.copy()
    flip = det < 0
    out[flip, 1], out[flip, 2] = tris[flip, 2], tris[flip, 1]
    return out


def refine(mesh: Mesh) -> Mesh:
    """Uniform red refinement: every triangle into four; nested spaces."""
    nodes = list(map(tuple, mesh.nodes))
    midpoint: dict[tuple[int, int], int] = {}

    def mid(i: int, j: int) -> int:
        key = (i, j) if i < j else (j, i)
        if key not in midpoint:
            p = (
                0.5 * (mesh.nodes[i][0] + mesh.nodes[j][0]),
                0.5 * (mesh.nodes[i][1] + mesh.nodes[j][1]),
            )
            midpoint[key] = len(nodes)
            nodes.append(p)
        return midpoint[key]

    new_tris = []
    for a, b, c in mesh.triangles:
        ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
        new_tris.extend([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]])
    new_bedges, new_tags, new_src = [], [], []
    for (i, j), tag, src in zip(mesh.boundary_edges, mesh.boundary_tags, mesh.boundary_src):
        m = mid(int(i), int(j))
        new_bedges.extend([[i, m], [m, j]])
        new_tags.extend([tag, tag])
        new_src.extend([src, src])
    return Mesh(
        nodes=np.array(nodes, dtype=float),
        triangles=np.array(new_tris, dtype=int),
        boundary_edges=np.array(new_bedges, dtype=int),
        boundary_tags=new_tags,
        boundary_src=new_src,
    )


# -- assembly and solve -----------------------------------------------------


def assemble(mesh: Mesh) -> DiscreteProblem:
    """P1 stiffness and consistent mass over free nodes; Dirichlet nodes
    (anything on a Dirichlet boundary edge) are eliminated, Neumann edges
    contribute nothing (natural condition)."""
    nn = len(mesh.nodes)
    p = mesh.nodes[mesh.triangles]  # (T, 3, 2)
    x, y = p[..., 0], p[..., 1]
    b = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1)
    c = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1)
    area = 0.5 * (x[:, 0] * b[:, 0] + x[:, 1] * b[:, 1] + x[:, 2] * b[:, 2])
    if np.any(area <= 0):
        raise MeshFailure("mesh contains non-positively-oriented triangles")
    ke = (
        b[:, :, None] * b[:, None, :] + c[:, :, None] * c[:, None, :]
    ) / (4.0 * area[:, None, None])
    me_ref = (np.ones((3, 3)) + np.eye(3)) / 12.0
    me = area[:, None, None] * me_ref[None]
    rows = np.repeat(mesh.triangles, 3, axis=1).ravel()
    cols = np.tile(mesh.triangles, (1, 3)).ravel()
    K = sp.coo_matrix((ke.ravel(), (rows, cols)), shape=(nn, nn)).tocsr()
    M = sp.coo_matrix((me.ravel(), (rows, cols)), shape=(nn, nn)).tocsr()
    dirichlet = set()
    for (i, j), tag in zip(mesh.boundary_edges, mesh.boundary_tags):
        if tag is BC.DIRICHLET:
            dirichlet.add(int(i))
            dirichlet.add(int(j))
    free = np.array(sorted(set(range(nn)) - dirichlet), dtype=int)
    return DiscreteProblem(
        stiffness=K[np.ix_(free, free)].tocsr(),
        mass=M[np.ix_(free, free)].tocsr(),
        free_nodes=free,
        total_mass=float(M.sum()),
    )


def lowest_eigs(prob: DiscreteProblem, k: int) -> EigList:
    """k smallest eigenvalues of the generalized problem (K, M)."""
    n = prob.stiffness.shape[0]
    if k == 0:
        return EigList((), ())
    if k > n:
        raise SolverFailure(f"requested {k} eigenvalues from {n} DOF")
    try:
        if n <= DENSE_DOF_LIMIT:
            vals = scipy.linalg.eigh(
                prob.stiffness.toarray(),
                prob.mass.toarray(),
                eigvals_only=True,
                subset_by_index=(0, k - 1),
            )
        else:
            vals = spla.eigsh(
                prob.stiffness,
                k=k,
                M=prob.mass,
                sigma=-0.1,
                which="LM",
                v0=np.full(n, 1.0 / math.sqrt(n)),  # deterministic restarts
                return_eigenvectors=False,
            )
            vals = np.sort(vals)
    except Exception as exc:  # pragma: no cover - backend failures
        raise SolverFailure(str(exc)) from exc
    vals = np.maximum(vals, 0.0)  # clip solver noise on Neumann kernels
    return EigList(tuple(float(v) for v in vals), tuple("fem" for _ in vals))


def dn_spectrum(poly: Polygon, k: int, levels: int, h0: float = 0.25) -> FemSpectrum:
    """Eigenvalues on `levels` nested refinements starting from mesh size h0,
    with Richardson extrapolation using the empirically observed order."""
    if levels < 2:
        raise ValueError("levels must be >= 2")
    mesh = triangulate(poly, h0)
    level_values = []
    for _ in range(levels):
        vals = np.array(lowest_eigs(assemble(mesh), k).values)
        level_values.append(vals)
        mesh = refine(mesh)
    return _extrapolate(level_values)


def _extrapolate(level_values: list[np.ndarray]) -> FemSpectrum:
    last = level_values[-1]
    prev = level_values[-2]
    k = len(last)
    extr = np.empty(k)
    orders = np.empty(k)
    for i in range(k):
        ratio = 4.0  # order-2 default
        if len(level_values) >= 3:
            d1 = level_values[-3][i] - prev[i]
            d2 = prev[i] - last[i]
            if d2 > 1e-14 and d1 / d2 > 1.2:
                ratio = min(d1 / d2, 8.0)
        orders[i] = math.log2(ratio)
        extr[i] = last[i] + (last[i] - prev[i]) / (ratio - 1.0)
    err = np.abs(last - prev) + np.abs(extr - last)
    return FemSpectrum(
        level_values=level_values,
        extrapolated=extr,
        error_estimate=err,
        observed_order=orders,
    )


# -- debug output -----------------------------------------------------------


def mesh_text_dump(mesh: Mesh) -> str:
    lines = [f"nodes {len(mesh.nodes)}"]
    for i, (x, y) in enumerate(mesh.nodes):
        lines.append(f"n {i} {x:.17g} {y:.17g}")
    lines.append(f"triangles {len(mesh.triangles)}")
    for a, b, c in mesh.triangles:
        lines.append(f"t {a} {b} {c}")
    lines.append(f"boundary_edges {len(mesh.boundary_edges)}")
    for (i, j), tag, src in zip(mesh.boundary_edges, mesh.boundary_tags, mesh.boundary_src):
        lines.append(f"b {i} {j} {tag.value} {src}")
    return "\n".join(lines) + "\n"


def mesh_svg(mesh: Mesh, size: int = 640) -> str:
    lo = mesh.nodes.min(axis=0)
    hi = mesh.nodes.max(axis=0)
    span = max(hi[0] - lo[0], hi[1] - lo[1], 1e-12)
    pad = 0.05 * span

    def tx(p):
        return (
            (p[0] - lo[0] + pad) / (span + 2 * pad) * size,
            size - (p[1] - lo[1] + pad) / (span + 2 * pad) * size,
        )

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">'
    ]
    for a, b, c in mesh.triangles:
        pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in map(tx, mesh.nodes[[a, b, c]]))
        parts.append(
            f'<polygon points="{pts}" fill="none" stroke="#bbbbbb" stroke-width="0.5"/>'
        )
    colors = {BC.DIRICHLET: "#d62728", BC.NEUMANN: "#1f77b4"}
    for (i, j), tag in zip(mesh.boundary_edges, mesh.boundary_tags):
        (x1, y1), (x2, y2) = tx(mesh.nodes[i]), tx(mesh.nodes[j])
        parts.append(
            f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
            f'stroke="{colors[tag]}" stroke-width="2"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
