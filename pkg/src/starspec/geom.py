"""Geometric data model for star waveguides.

A star waveguide is a bounded center polygon with half-infinite branches
attached along designated "cut" edges.  This module owns the polygon /
cross-section / configuration types, validation, truncation (center plus
finite branch stubs, used for Dirichlet upper bounds) and mirror-symmetry
reduction of truncated domains.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Sequence

SYMMETRY_TOL = 1e-12
CUT_WIDTH_RTOL = 1e-9


class InvalidGeometry(ValueError):
    pass


class StubOverlap(InvalidGeometry):
    pass


class NotSymmetric(InvalidGeometry):
    pass


class BC(Enum):
    DIRICHLET = "D"
    NEUMANN = "N"


class EdgeRole(Enum):
    WALL = "wall"
    CUT = "cut"


@dataclass(frozen=True)
class CrossSection:
    """Branch cross-section with a closed-form first Dirichlet eigenvalue."""

    kind: str  # "interval" | "rectangle" | "disk"
    dims: tuple[float, ...]

    def __post_init__(self):
        expected = {"interval": 1, "rectangle": 2, "disk": 1}
        if self.kind not in expected:
            raise InvalidGeometry(f"unknown cross-section kind {self.kind!r}")
        if len(self.dims) != expected[self.kind]:
            raise InvalidGeometry(f"{self.kind} needs {expected[self.kind]} dims")
        if any(d <= 0 for d in self.dims):
            raise InvalidGeometry("cross-section dimensions must be positive")

    @staticmethod
    def interval(width: float) -> "CrossSection":
        return CrossSection("interval", (float(width),))

    @staticmethod
    def rectangle(a: float, b: float) -> "CrossSection":
        return CrossSection("rectangle", (float(a), float(b)))

    @staticmethod
    def disk(radius: float) -> "CrossSection":
        return CrossSection("disk", (float(radius),))


@dataclass(frozen=True)
class Branch:
    edge: int  # index of the cut edge (2D) or cut face (3D)
    cross_section: CrossSection


@dataclass(frozen=True)
class Polygon:
    """Simple positively oriented polygon with per-edge condition and role tags.

    Edge i runs from vertex i to vertex (i+1) mod n.
    """

    vertices: tuple[tuple[float, float], ...]
    edge_tags: tuple[BC, ...]
    edge_roles: tuple[EdgeRole, ...]

    def __post_init__(self):
        n = len(self.vertices)
        if n < 3:
            raise InvalidGeometry("polygon needs at least 3 vertices")
        if len(self.edge_tags) != n or len(self.edge_roles) != n:
            raise InvalidGeometry("edge_tags/edge_roles length must match vertex count")

    @property
    def n_edges(self) -> int:
        return len(self.vertices)

    def edge(self, i: int) -> tuple[tuple[float, float], tuple[float, float]]:
        return self.vertices[i], self.vertices[(i + 1) % self.n_edges]

    def edge_length(self, i: int) -> float:
        (x0, y0), (x1, y1) = self.edge(i)
        return math.hypot(x1 - x0, y1 - y0)

    def signed_area(self) -> float:
        s = 0.0
        for i in range(self.n_edges):
            (x0, y0), (x1, y1) = self.edge(i)
            s += x0 * y1 - x1 * y0
        return 0.5 * s

    def area(self) -> float:
        return abs(self.signed_area())

    def is_simple(self) -> bool:
        n = self.n_edges
        for i in range(n):
            for j in range(i + 1, n):
                if j == i or (j + 1) % n == i or (i + 1) % n == j:
                    continue  # adjacent edges share a vertex
                if _segments_intersect(*self.edge(i), *self.edge(j)):
                    return False
        return True

    def contains_point(self, x: float, y: float) -> bool:
        """Even-odd rule; points on the boundary are not guaranteed either way."""
        inside = False
        for i in range(self.n_edges):
            (x0, y0), (x1, y1) = self.edge(i)
            if (y0 > y) != (y1 > y):
                xi = x0 + (y - y0) / (y1 - y0) * (x1 - x0)
                if x < xi:
                    inside = not inside
        return inside

    def outward_normal(self, i: int) -> tuple[float, float]:
        (x0, y0), (x1, y1) = self.edge(i)
        dx, dy = x1 - x0, y1 - y0
        length = math.hypot(dx, dy)
        # positively oriented polygon: outward normal is the right-hand normal
        return dy / length, -dx / length


def simple_polygon(
    vertices: Sequence[Sequence[float]],
    edge_tags: Optional[Sequence[BC]] = None,
    edge_roles: Optional[Sequence[EdgeRole]] = None,
) -> Polygon:
    """Polygon constructor defaulting to all-Dirichlet walls, fixing orientation."""
    verts = [tuple(map(float, v)) for v in vertices]
    n = len(verts)
    tags = tuple(edge_tags) if edge_tags is not None else (BC.DIRICHLET,) * n
    roles = tuple(edge_roles) if edge_roles is not None else (EdgeRole.WALL,) * n
    poly = Polygon(tuple(verts), tags, roles)
    if poly.signed_area() < 0:
        # reverse; edge k (v_k -> v_{k+1}) becomes edge n-1-k in reversed order
        verts_r = tuple(reversed(verts))
        tags_r = tuple(tags[n - 1 - k] for k in range(n))
        roles_r = tuple(roles[n - 1 - k] for k in range(n))
        poly = Polygon(verts_r, tags_r, roles_r)
    return poly


def _orient(ax, ay, bx, by, cx, cy) -> float:
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def _segments_intersect(p, q, r, s) -> bool:
    """Proper or touching intersection of closed segments pq and rs."""
    d1 = _orient(*r, *s, *p)
    d2 = _orient(*r, *s, *q)
    d3 = _orient(*p, *q, *r)
    d4 = _orient(*p, *q, *s)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != 0 and d2 != 0:
        return True

    def on_seg(a, b, c):
        return (
            min(a[0], b[0]) - 1e-14 <= c[0] <= max(a[0], b[0]) + 1e-14
            and min(a[1], b[1]) - 1e-14 <= c[1] <= max(a[1], b[1]) + 1e-14
        )

    if d1 == 0 and on_seg(r, s, p):
        return True
    if d2 == 0 and on_seg(r, s, q):
        return True
    if d3 == 0 and on_seg(p, q, r):
        return True
    if d4 == 0 and on_seg(p, q, s):
        return True
    return False


@dataclass(frozen=True)
class SymmetrySpec:
    """Mirror symmetries of a (truncated) domain.

    axes is a subset of {"horizontal", "vertical"}: "horizontal" is the
    reflection (x, y) -> (x, -y) across the horizontal axis y = 0,
    "vertical" is (x, y) -> (-x, y) across x = 0.
    """

    axes: tuple[str, ...]

    def __post_init__(self):
        for a in self.axes:
            if a not in ("horizontal", "vertical"):
                raise InvalidGeometry(f"unknown symmetry axis {a!r}")
        if len(set(self.axes)) != len(self.axes):
            raise InvalidGeometry("duplicate symmetry axis")


@dataclass(frozen=True)
class Box3:
    """Axis-aligned 3D box center for the separable mode.

    axis_bcs[d] is a pair of BCs for the two faces orthogonal to axis d;
    cut faces are identified by index 2*d (low face) or 2*d+1 (high face).
    """

    dims: tuple[float, float, float]
    axis_bcs: tuple[tuple[BC, BC], tuple[BC, BC], tuple[BC, BC]]

    def __post_init__(self):
        if any(d <= 0 for d in self.dims):
            raise InvalidGeometry("box dimensions must be positive")


@dataclass(frozen=True)
class StarWaveguideConfig:
    name: str
    center: Polygon | Box3
    branches: tuple[Branch, ...]
    symmetry: Optional[SymmetrySpec] = None
    # pure-spectrum mode: allow centers with no Dirichlet wall (e.g. the
    # Y-junction triangle, whose mixed operator degenerates to pure Neumann)
    allow_no_dirichlet: bool = False

    @property
    def is_3d(self) -> bool:
        return isinstance(self.center, Box3)


@dataclass(frozen=True)
class ValidatedConfig:
    cfg: StarWaveguideConfig

    def __getattr__(self, item):
        return getattr(self.cfg, item)


def validate_config(cfg: StarWaveguideConfig) -> ValidatedConfig:
    if cfg.is_3d:
        _validate_3d(cfg)
    else:
        _validate_2d(cfg)
    return ValidatedConfig(cfg)


def _validate_2d(cfg: StarWaveguideConfig) -> None:
    poly: Polygon = cfg.center  # type: ignore[assignment]
    if poly.signed_area() <= 0:
        raise InvalidGeometry("center polygon must be positively oriented")
    if not poly.is_simple():
        raise InvalidGeometry("center polygon is self-intersecting")
    cut_edges = [i for i, r in enumerate(poly.edge_roles) if r is EdgeRole.CUT]
    for i in cut_edges:
        if poly.edge_tags[i] is not BC.NEUMANN:
            raise InvalidGeometry(f"cut edge {i} must carry the Neumann tag")
    if not cfg.allow_no_dirichlet and BC.DIRICHLET not in poly.edge_tags:
        raise InvalidGeometry(
            "center has no Dirichlet edge; certification needs one "
            "(pass allow_no_dirichlet for pure-spectrum use)"
        )
    seen = set()
    for br in cfg.branches:
        if br.edge in seen:
            raise InvalidGeometry(f"two branches share cut edge {br.edge}")
        seen.add(br.edge)
        if br.edge not in cut_edges:
            raise InvalidGeometry(f"branch references non-cut edge {br.edge}")
        if br.cross_section.kind != "interval":
            raise InvalidGeometry("2D branches must have interval cross-sections")
        width = br.cross_section.dims[0]
        cut_len = poly.edge_length(br.edge)
        if abs(width - cut_len) > CUT_WIDTH_RTOL * max(1.0, abs(cut_len)):
            raise InvalidGeometry(
                f"branch width {width} does not match cut edge length {cut_len}"
            )
    uncovered = [i for i in cut_edges if i not in seen]
    if uncovered:
        raise InvalidGeometry(f"cut edges {uncovered} have no branch attached")
    if cfg.symmetry is not None:
        _check_symmetry(poly, cfg.symmetry)


def _validate_3d(cfg: StarWaveguideConfig) -> None:
    box: Box3 = cfg.center  # type: ignore[assignment]
    seen = set()
    for br in cfg.branches:
        if not 0 <= br.edge < 6:
            raise InvalidGeometry(f"cut face index {br.edge} out of range")
        if br.edge in seen:
            raise InvalidGeometry(f"two branches share cut face {br.edge}")
        seen.add(br.edge)
        axis, side = divmod(br.edge, 2)
        if box.axis_bcs[axis][side] is not BC.NEUMANN:
            raise InvalidGeometry(f"cut face {br.edge} must carry the Neumann tag")
        cs = br.cross_section
        if cs.kind == "rectangle":
            face_dims = sorted(d for k, d in enumerate(box.dims) if k != axis)
            if sorted(cs.dims) != face_dims:
                raise InvalidGeometry("rectangular branch must match the cut face")
        elif cs.kind == "disk":
            face_dims = [d for k, d in enumerate(box.dims) if k != axis]
            if 2 * cs.dims[0] > min(face_dims) * (1 + CUT_WIDTH_RTOL):
                raise InvalidGeometry("disk branch does not fit inside the cut face")
        else:
            raise InvalidGeometry("3D branches must be rectangles or disks")


def _reflect(axis: str, p: tuple[float, float]) -> tuple[float, float]:
    return (p[0], -p[1]) if axis == "horizontal" else (-p[0], p[1])


def _check_symmetry(poly: Polygon, sym: SymmetrySpec) -> None:
    verts = set()
    for v in poly.vertices:
        verts.add((round(v[0] / SYMMETRY_TOL), round(v[1] / SYMMETRY_TOL)))
    for axis in sym.axes:
        for v in poly.vertices:
            r = _reflect(axis, v)
            key = (round(r[0] / SYMMETRY_TOL), round(r[1] / SYMMETRY_TOL))
            if key not in verts:
                raise NotSymmetric(
                    f"vertex {v} has no mirror partner across the {axis} axis"
                )


def truncate(vcfg: ValidatedConfig, length: float) -> Polygon:
    """Center plus a straight branch stub of the given length on every cut.

    All edges of the result are Dirichlet walls, so the truncated domain is a
    Dirichlet subdomain of the full waveguide and its eigenvalues are upper
    bounds for the waveguide ones.
    """
    cfg = vcfg.cfg
    if cfg.is_3d:
        raise InvalidGeometry("truncate applies to 2D configs only")
    if length <= 0:
        raise InvalidGeometry("truncation length must be positive")
    poly: Polygon = cfg.center  # type: ignore[assignment]
    cut_edges = {br.edge for br in cfg.branches}
    verts: list[tuple[float, float]] = []
    for i in range(poly.n_edges):
        p, q = poly.edge(i)
        verts.append(p)
        if i in cut_edges:
            nx, ny = poly.outward_normal(i)
            verts.append((p[0] + nx * length, p[1] + ny * length))
            verts.append((q[0] + nx * length, q[1] + ny * length))
    out = simple_polygon(verts)
    if not out.is_simple():
        raise StubOverlap(
            f"branch stubs of length {length} self-intersect; shorten the stubs"
        )
    return out


def symmetry_reduce(
    poly: Polygon, sym: Optional[SymmetrySpec]
) -> list[tuple[Polygon, tuple[int, int]]]:
    """Reduce an all-Dirichlet (or mixed) polygon by its declared mirrors.

    Returns 2^{#axes} reduced domains with parities (j, k); j is the parity
    across the vertical axis x = 0, k across the horizontal axis y = 0.
    Axis edges get Neumann for even parity, Dirichlet for odd.  Axes that are
    not declared keep parity index 0.
    """
    if sym is None or not sym.axes:
        return [(poly, (0, 0))]
    _check_symmetry(poly, sym)
    use_v = "vertical" in sym.axes
    use_h = "horizontal" in sym.axes
    out = []
    for j in range(2 if use_v else 1):
        for k in range(2 if use_h else 1):
            reduced = poly
            if use_v:
                reduced = _clip_halfplane(reduced, "vertical", BC.DIRICHLET if j else BC.NEUMANN)
            if use_h:
                reduced = _clip_halfplane(reduced, "horizontal", BC.DIRICHLET if k else BC.NEUMANN)
            out.append((reduced, (j, k)))
    return out


def _clip_halfplane(poly: Polygon, axis: str, axis_tag: BC) -> Polygon:
    """Sutherland-Hodgman clip to x >= 0 (vertical axis) or y >= 0 (horizontal).

    New edges lying on the axis line receive axis_tag; surviving edges keep
    the tag of the polygon edge they came from.
    """
    coord = 0 if axis == "vertical" else 1

    def val(p):
        return p[coord]

    n = poly.n_edges
    # each emitted vertex carries the id of the polygon edge that follows it
    out_pts: list[tuple[float, float]] = []
    out_src: list[Optional[int]] = []  # source edge id of edge starting at pt
    for i in range(n):
        p, q = poly.edge(i)
        vp, vq = val(p), val(q)
        if vp >= -SYMMETRY_TOL:
            out_pts.append(p)
            out_src.append(i)
            if vq < -SYMMETRY_TOL and vp > SYMMETRY_TOL:
                t = vp / (vp - vq)
                out_pts.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
                out_src.append(None)  # axis edge starts here
        elif vq >= -SYMMETRY_TOL:
            if vq > SYMMETRY_TOL:
                t = vp / (vp - vq)
                out_pts.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
                out_src.append(i)
    if len(out_pts) < 3:
        raise NotSymmetric(f"clipping across the {axis} axis left no area")
    # drop duplicate consecutive points
    pts, src = [], []
    for p, s in zip(out_pts, out_src):
        if pts and math.hypot(p[0] - pts[-1][0], p[1] - pts[-1][1]) < 1e-13:
            if src[-1] is None:
                src[-1] = s
            continue
        pts.append(p)
        src.append(s)
    if len(pts) > 1 and math.hypot(pts[0][0] - pts[-1][0], pts[0][1] - pts[-1][1]) < 1e-13:
        pts.pop()
        src.pop()
    tags, roles = [], []
    for i in range(len(pts)):
        a, b = pts[i], pts[(i + 1) % len(pts)]
        if abs(val(a)) <= 1e-12 and abs(val(b)) <= 1e-12:
            tags.append(axis_tag)
            roles.append(EdgeRole.WALL)
        elif src[i] is not None:
            tags.append(poly.edge_tags[src[i]])
            roles.append(poly.edge_roles[src[i]])
        else:
            # split edge whose start point was produced by clipping
            prev = src[i - 1] if src[i - 1] is not None else 0
            tags.append(poly.edge_tags[prev])
            roles.append(poly.edge_roles[prev])
    return Polygon(tuple(pts), tuple(tags), tuple(roles))


def enlarge_center(vcfg: ValidatedConfig, depth: float) -> ValidatedConfig:
    """Move every cut outward by absorbing a branch segment of the given depth."""
    cfg = vcfg.cfg
    if cfg.is_3d:
        raise InvalidGeometry("enlarge_center applies to 2D configs only")
    if depth <= 0:
        raise InvalidGeometry("depth must be positive")
    poly: Polygon = cfg.center  # type: ignore[assignment]
    cut_edges = {br.edge for br in cfg.branches}
    verts: list[tuple[float, float]] = []
    tags: list[BC] = []
    roles: list[EdgeRole] = []
    new_cut_index: dict[int, int] = {}
    for i in range(poly.n_edges):
        p, q = poly.edge(i)
        if i in cut_edges:
            nx, ny = poly.outward_normal(i)
            p2 = (p[0] + nx * depth, p[1] + ny * depth)
            q2 = (q[0] + nx * depth, q[1] + ny * depth)
            verts.extend([p, p2, q2])
            tags.extend([BC.DIRICHLET, BC.NEUMANN, BC.DIRICHLET])
            roles.extend([EdgeRole.WALL, EdgeRole.CUT, EdgeRole.WALL])
            new_cut_index[i] = len(verts) - 2
        else:
            verts.append(p)
            tags.append(poly.edge_tags[i])
            roles.append(poly.edge_roles[i])
    new_poly = Polygon(tuple(verts), tuple(tags), tuple(roles))
    if not new_poly.is_simple():
        raise StubOverlap(f"enlarging the center by {depth} makes it self-intersect")
    branches = tuple(replace(b, edge=new_cut_index[b.edge]) for b in cfg.branches)
    return validate_config(replace(cfg, center=new_poly, branches=branches))


# -- config files -----------------------------------------------------------


def load_config(path: str) -> ValidatedConfig:
    with open(path) as f:
        raw = json.load(f)
    return validate_config(config_from_dict(raw))


def config_from_dict(raw: dict) -> StarWaveguideConfig:
    center_raw = raw["center"]
    if "dims" in center_raw:
        center: Polygon | Box3 = Box3(
            dims=tuple(float(d) for d in center_raw["dims"]),
            axis_bcs=tuple(
                (BC(a), BC(b)) for a, b in center_raw["axis_bcs"]
            ),  # type: ignore[arg-type]
        )
    else:
        center = Polygon(
            vertices=tuple(tuple(map(float, v)) for v in center_raw["vertices"]),
            edge_tags=tuple(BC(t) for t in center_raw["edge_tags"]),
            edge_roles=tuple(EdgeRole(r) for r in center_raw["edge_roles"]),
        )
    branches = tuple(
        Branch(
            edge=int(b["edge"]),
            cross_section=CrossSection(
                b["cross_section"]["type"],
                tuple(float(d) for d in b["cross_section"]["dims"]),
            ),
        )
        for b in raw.get("branches", [])
    )
    sym = None
    if "symmetry" in raw:
        sym = SymmetrySpec(axes=tuple(raw["symmetry"]["axes"]))
    return StarWaveguideConfig(
        name=raw["name"],
        center=center,
        branches=branches,
        symmetry=sym,
        allow_no_dirichlet=bool(raw.get("allow_no_dirichlet", False)),
    )


def config_to_dict(cfg: StarWaveguideConfig) -> dict:
    if cfg.is_3d:
        box: Box3 = cfg.center  # type: ignore[assignment]
        center = {
            "dims": list(box.dims),
            "axis_bcs": [[a.value, b.value] for a, b in box.axis_bcs],
        }
    else:
        poly: Polygon = cfg.center  # type: ignore[assignment]
        center = {
            "vertices": [list(v) for v in poly.vertices],
            "edge_tags": [t.value for t in poly.edge_tags],
            "edge_roles": [r.value for r in poly.edge_roles],
        }
    out = {
        "name": cfg.name,
        "center": center,
        "branches": [
            {
                "edge": b.edge,
                "cross_section": {
                    "type": b.cross_section.kind,
                    "dims": list(b.cross_section.dims),
                },
            }
            for b in cfg.branches
        ],
    }
    if cfg.symmetry is not None:
        out["symmetry"] = {"axes": list(cfg.symmetry.axes)}
    if cfg.allow_no_dirichlet:
        out["allow_no_dirichlet"] = True
    return out
