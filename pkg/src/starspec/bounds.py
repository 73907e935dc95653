"""Composable one-sided spectral bounds with replayable derivation traces.

Rules: Neumann-cut bracketing (lower bounds transport from the center
operator to the waveguide), Dirichlet domain monotonicity (upper bounds
from subdomains), anisotropic scaling, zero-extension Neumann enclosure,
direct sums of decompositions, and branch threshold floors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .exact import (
    Direction,
    EigList,
    box_eigs,
    cross_section_threshold,
    equilateral_eigs,
    interval_eigs,
    right_triangle_dn_lower_bound,
    y_alpha_threshold,
)
from .geom import CrossSection, Polygon


class DirectionMismatch(ValueError):
    pass


class NonPositiveCoeff(ValueError):
    pass


class ContainmentViolation(ValueError):
    pass


class MixedDirections(ValueError):
    pass


@dataclass(frozen=True)
class OperatorRef:
    """Symbolic handle for a spectral problem; bounds combine only when the
    handles match."""

    name: str
    detail: str = ""


@dataclass(frozen=True)
class TraceStep:
    rule: str
    params: dict
    value: float


@dataclass(frozen=True)
class SpectralBound:
    operator: str
    index: int  # eigenvalue index, 1-based
    value: float
    direction: Direction
    trace: tuple[TraceStep, ...]
    tol: float = 0.0  # accumulated floating-point tolerance budget

    def extended(self, step: TraceStep, *, operator=None, value=None, tol_add=0.0):
        return SpectralBound(
            operator=operator if operator is not None else self.operator,
            index=self.index,
            value=value if value is not None else self.value,
            direction=self.direction,
            trace=self.trace + (step,),
            tol=self.tol + tol_add,
        )


def lower_bound(operator: str, index: int, value: float, rule: str, params: dict, tol: float = 0.0) -> SpectralBound:
    return SpectralBound(
        operator, index, value, Direction.LOWER,
        (TraceStep(rule, params, value),), tol,
    )


def upper_bound(operator: str, index: int, value: float, rule: str, params: dict, tol: float = 0.0) -> SpectralBound:
    return SpectralBound(
        operator, index, value, Direction.UPPER,
        (TraceStep(rule, params, value),), tol,
    )


def bounds_from_eiglist(operator: str, eigs: EigList, direction: Direction, rule: str, params: dict) -> list[SpectralBound]:
    out = []
    for i, (v, prov) in enumerate(zip(eigs.values, eigs.provenance), start=1):
        p = dict(params)
        p["index"] = i
        p["provenance"] = prov
        out.append(
            SpectralBound(operator, i, v, direction, (TraceStep(rule, p, v),), 0.0)
        )
    return out


# -- rules ------------------------------------------------------------------


def dn_bracket(center_bounds: list[SpectralBound], waveguide_op: str) -> list[SpectralBound]:
    """Transport lower bounds on the mixed-condition center operator to the
    waveguide Laplacian: inserting Neumann cuts can only lower eigenvalues,
    so each lambda_j of the waveguide dominates lambda_j of the center."""
    out = []
    for b in center_bounds:
        if b.direction is not Direction.LOWER:
            raise DirectionMismatch("cut bracketing transports lower bounds only")
        step = TraceStep("dn-bracket", {"from": b.operator, "index": b.index}, b.value)
        out.append(b.extended(step, operator=waveguide_op))
    return out


def dirichlet_monotone(sub_bounds: list[SpectralBound], waveguide_op: str) -> list[SpectralBound]:
    """Transport upper bounds on a Dirichlet subdomain to the waveguide:
    shrinking a Dirichlet domain raises every eigenvalue."""
    out = []
    for b in sub_bounds:
        if b.direction is not Direction.UPPER:
            raise DirectionMismatch("domain monotonicity transports upper bounds only")
        step = TraceStep(
            "dirichlet-monotone", {"from": b.operator, "index": b.index}, b.value
        )
        out.append(b.extended(step, operator=waveguide_op))
    return out


def scale_bound(
    src: list[SpectralBound],
    coeffs: tuple[float, float],
    target_op: str,
    cap_at_one: bool = False,
) -> list[SpectralBound]:
    """Lower bounds under the diagonal map diag(c1, c2) of the domain:
    lambda_k(image) >= min(c_i^-2) * lambda_k(source).  With cap_at_one the
    factor is additionally capped at 1 (a weaker but simpler one-sided form)."""
    c1, c2 = coeffs
    if c1 <= 0 or c2 <= 0:
        raise NonPositiveCoeff("scaling coefficients must be positive")
    factor = min(c1**-2, c2**-2)
    if cap_at_one:
        factor = min(factor, 1.0)
    out = []
    for b in src:
        if b.direction is not Direction.LOWER:
            raise DirectionMismatch("scale_bound transports lower bounds only")
        v = factor * b.value
        step = TraceStep(
            "scale",
            {"coeffs": [c1, c2], "factor": factor, "input": b.value, "cap_at_one": cap_at_one},
            v,
        )
        out.append(b.extended(step, operator=target_op, value=v, tol_add=1e-13 * abs(v)))
    return out


def _point_in_or_on(poly: Polygon, x: float, y: float, tol: float) -> bool:
    if poly.contains_point(x, y):
        return True
    for i in range(poly.n_edges):
        (x0, y0), (x1, y1) = poly.edge(i)
        dx, dy = x1 - x0, y1 - y0
        L2 = dx * dx + dy * dy
        t = max(0.0, min(1.0, ((x - x0) * dx + (y - y0) * dy) / L2))
        px, py = x0 + t * dx, y0 + t * dy
        if math.hypot(x - px, y - py) <= tol:
            return True
    return False


def check_containment(inner: Polygon, outer: Polygon, tol: float = 1e-10, samples: int = 16) -> None:
    for i in range(inner.n_edges):
        p, q = inner.edge(i)
        for s in range(samples + 1):
            t = s / samples
            x, y = p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])
            if not _point_in_or_on(outer, x, y, tol):
                raise ContainmentViolation(
                    f"point ({x}, {y}) of the inner domain lies outside the enclosure"
                )


def neumann_enclosure(
    dn_op: str,
    center: Polygon | None,
    enclosure: Polygon | None,
    enclosure_eigs: EigList,
    enclosure_name: str = "enclosure",
) -> list[SpectralBound]:
    """Zero-extension lower bounds: test functions of the mixed problem on C
    extend by zero across Dirichlet edges into the Neumann problem on an
    enclosing domain M, so lambda_k(C, mixed) >= lambda_k(M, Neumann).

    center is None (or equal to enclosure) for the pure tag-relaxation case
    M = C; otherwise geometric containment is checked by edge sampling."""
    if center is not None and enclosure is not None and center is not enclosure:
        check_containment(center, enclosure)
    out = []
    for i, v in enumerate(enclosure_eigs.values, start=1):
        step = TraceStep(
            "neumann-enclosure",
            {"enclosure": enclosure_name, "index": i, "provenance": enclosure_eigs.provenance[i - 1]},
            v,
        )
        out.append(
            SpectralBound(dn_op, i, v, Direction.LOWER, (step,), 0.0)
        )
    return out


def neumann_enclosure_bounds(
    dn_op: str,
    center: Polygon | None,
    enclosure: Polygon | None,
    enclosure_bounds: list[SpectralBound],
    enclosure_name: str = "enclosure",
) -> list[SpectralBound]:
    """Like neumann_enclosure, but the enclosure spectrum is itself known
    only through lower bounds (e.g. produced by scale_bound)."""
    if center is not None and enclosure is not None and center is not enclosure:
        check_containment(center, enclosure)
    out = []
    for b in enclosure_bounds:
        if b.direction is not Direction.LOWER:
            raise DirectionMismatch("enclosure transports lower bounds only")
        step = TraceStep(
            "neumann-enclosure",
            {"enclosure": enclosure_name, "index": b.index, "from": b.operator},
            b.value,
        )
        out.append(b.extended(step, operator=dn_op))
    return out


def direct_sum_eigs(parts: list[EigList], k: int | None = None) -> EigList:
    """Sorted multiset merge of the spectra of disjoint summands."""
    pairs = []
    for p in parts:
        pairs.extend(zip(p.values, p.provenance))
    pairs.sort(key=lambda t: t[0])
    if k is not None:
        pairs = pairs[:k]
    return EigList(tuple(v for v, _ in pairs), tuple(pr for _, pr in pairs))


def direct_sum_bounds(
    parts: list[list[SpectralBound]], sum_op: str, k: int
) -> list[SpectralBound]:
    """First k merged lower bounds for a direct-sum operator.

    Each part's bound list covers its lowest eigenvalues; since a part's
    eigenvalues beyond the listed ones still dominate its last listed bound,
    each part is tail-extended by repeating that last bound before merging.
    """
    dirs = {b.direction for bs in parts for b in bs}
    if len(dirs) > 1:
        raise MixedDirections("direct sum parts must share a single direction")
    if dirs and next(iter(dirs)) is not Direction.LOWER:
        raise DirectionMismatch("direct_sum_bounds merges lower bounds")
    entries: list[tuple[float, SpectralBound]] = []
    for bs in parts:
        if not bs:
            continue
        for b in bs:
            entries.append((b.value, b))
        last = bs[-1]
        for _ in range(k - len(bs)):
            entries.append((last.value, last))
    entries.sort(key=lambda t: t[0])
    out = []
    for i, (v, src) in enumerate(entries[:k], start=1):
        step = TraceStep(
            "direct-sum", {"part_operator": src.operator, "part_index": src.index}, v
        )
        out.append(
            SpectralBound(sum_op, i, v, Direction.LOWER, src.trace + (step,), src.tol)
        )
    return out


def branch_threshold_floor(branch: CrossSection, operator: str = "branch") -> SpectralBound:
    """The half-cylinder branch operator with Neumann at the cut is bounded
    below by the first Dirichlet eigenvalue of its cross-section."""
    v = cross_section_threshold(branch)
    return lower_bound(
        operator,
        1,
        v,
        "branch-floor",
        {"cross_section": branch.kind, "dims": list(branch.dims)},
        tol=1e-13 * v,
    )


# -- trace replay and serialization ----------------------------------------


def _replay_step(step: TraceStep, prev: float | None) -> float:
    p = step.params
    rule = step.rule
    if rule == "interval-eig":
        return interval_eigs(p["length"], p["bc"], p["index"])[p["index"] - 1]
    if rule == "box-eig":
        return box_eigs(tuple(p["dims"]), tuple(p["bcs"]), p["index"])[p["index"] - 1]
    if rule == "equilateral-eig":
        return equilateral_eigs(p["side"], p["bc"], p["index"])[p["index"] - 1]
    if rule == "right-triangle-floor":
        return right_triangle_dn_lower_bound(p["alpha"])
    if rule == "y-threshold":
        return y_alpha_threshold(p["alpha"])
    if rule == "branch-floor":
        return cross_section_threshold(CrossSection(p["cross_section"], tuple(p["dims"])))
    if rule == "scale":
        return p["factor"] * p["input"]
    if rule in ("dn-bracket", "dirichlet-monotone", "direct-sum", "neumann-enclosure"):
        return step.value if prev is None else prev
    # frozen numerical inputs (fem-upper, assumption, sector-eig, ...) replay
    # as recorded
    return step.value


def replay_bound(bound: SpectralBound) -> float:
    """Recompute the bound value by replaying its trace."""
    prev: float | None = None
    for step in bound.trace:
        prev = _replay_step(step, prev)
    return float(prev) if prev is not None else bound.value


def trace_to_json(bound: SpectralBound) -> list[dict]:
    return [
        {"rule": s.rule, "params": s.params, "value": s.value} for s in bound.trace
    ]


def bound_to_json(bound: SpectralBound) -> dict:
    return {
        "operator": bound.operator,
        "index": bound.index,
        "value": bound.value,
        "direction": bound.direction.value,
        "tol": bound.tol,
        "trace": trace_to_json(bound),
    }
