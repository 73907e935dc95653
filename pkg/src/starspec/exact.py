"""Closed-form spectra and analytic eigenvalue bounds.

Intervals, boxes with mixed per-side conditions, equilateral triangles,
circular sectors (via Bessel zeros), plus the special-purpose analytic
lower bounds used by the certification rules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import jv

PI2 = math.pi**2


class ConvergenceFailure(RuntimeError):
    pass


class CapsTooSmall(ValueError):
    pass


class OutOfRange(ValueError):
    pass


class Direction(Enum):
    LOWER = "lower"
    UPPER = "upper"
    ESTIMATE = "estimate"


@dataclass(frozen=True)
class EigList:
    """Sorted nondecreasing eigenvalue list with per-value provenance labels."""

    values: tuple[float, ...]
    provenance: tuple[str, ...]

    def __post_init__(self):
        if any(b < a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("eigenvalue list must be nondecreasing")
        if len(self.values) != len(self.provenance):
            raise ValueError("provenance length mismatch")

    def __len__(self):
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]


def _sorted_prefix(pairs: list[tuple[float, str]], k: int) -> EigList:
    pairs.sort(key=lambda p: p[0])
    head = pairs[:k]
    return EigList(tuple(v for v, _ in head), tuple(p for _, p in head))


def interval_eigs(length: float, bc: str, k: int) -> EigList:
    """First k eigenvalues of -u'' on (0, length) with endpoint conditions bc.

    bc is one of "DD", "NN", "DN", "ND".
    """
    if length <= 0:
        raise ValueError("length must be positive")
    if k < 1:
        raise ValueError("k must be >= 1")
    if bc not in ("DD", "NN", "DN", "ND"):
        raise ValueError(f"unknown boundary pair {bc!r}")
    if bc == "DD":
        vals = [((n * math.pi / length) ** 2, f"interval-DD(n={n})") for n in range(1, k + 1)]
    elif bc == "NN":
        vals = [((n * math.pi / length) ** 2, f"interval-NN(n={n})") for n in range(k)]
    else:
        vals = [
            (((n - 0.5) * math.pi / length) ** 2, f"interval-{bc}(n={n})")
            for n in range(1, k + 1)
        ]
    return EigList(tuple(v for v, _ in vals), tuple(p for _, p in vals))


def box_eigs(dims: tuple[float, ...], bcs: tuple[str, ...], k: int) -> EigList:
    """First k eigenvalues of the separable box Laplacian.

    The k-th smallest sum uses at most the k-th smallest value on each axis,
    so taking k values per axis makes the sorted k-prefix complete.
    """
    d = len(dims)
    if d not in (1, 2, 3) or len(bcs) != d:
        raise ValueError("dims/bcs must have matching length 1, 2 or 3")
    if k < 1:
        raise ValueError("k must be >= 1")
    axes = [interval_eigs(dims[i], bcs[i], k) for i in range(d)]
    pairs: list[tuple[float, str]] = []

    def rec(axis: int, total: float, label: list[str]):
        if axis == d:
            pairs.append((total, "box[" + ",".join(label) + "]"))
            return
        for v, p in zip(axes[axis].values, axes[axis].provenance):
            label.append(p)
            rec(axis + 1, total + v, label)
            label.pop()

    rec(0, 0.0, [])
    return _sorted_prefix(pairs, k)


def equilateral_eigs(side: float, bc: str, k: int) -> EigList:
    """Equilateral-triangle Laplacian spectrum for all-Dirichlet or all-Neumann.

    Eigenvalues are 16 pi^2 / (9 side^2) * (m^2 + m n + n^2); Dirichlet
    indices run over m, n >= 1, Neumann over m, n >= 0.  Unordered pairs
    with m != n count twice, diagonal pairs once.
    """
    if side <= 0:
        raise ValueError("side must be positive")
    if k < 1:
        raise ValueError("k must be >= 1")
    if bc not in ("dirichlet", "neumann"):
        raise ValueError("bc must be 'dirichlet' or 'neumann'")
    lo = 1 if bc == "dirichlet" else 0
    scale = 16 * PI2 / (9 * side**2)
    # m^2 + mn + n^2 >= 3/4 (m+n)^2 for m,n >= 0; a cap of lo + k + 2 index
    # values per axis safely covers the k smallest lattice values
    cap = lo + k + 2
    pairs: list[tuple[float, str]] = []
    for m in range(lo, cap + 1):
        for n in range(m, cap + 1):
            v = scale * (m * m + m * n + n * n)
            mult = 1 if m == n else 2
            for _ in range(mult):
                pairs.append((v, f"equilateral-{bc[0].upper()}(m={m},n={n})"))
    return _sorted_prefix(pairs, k)


# -- Bessel machinery -------------------------------------------------------


def bessel_j(s: float, x: float) -> float:
    """Bessel function J_s(x) for order s >= 0, x >= 0."""
    if s < 0 or x < 0:
        raise ValueError("bessel_j needs s >= 0 and x >= 0")
    return float(jv(s, x))


def bessel_zero_lower_bound(s: float, k: int) -> float:
    """Analytic lower bound for the k-th positive zero of J_s.

    j_{s,k} > s + k pi - 1/2 for s > 1/2 and
    j_{s,k} > s + k pi - pi/2 + 1/2 for s > -1/2; the larger applicable
    bound is returned.
    """
    if s <= -0.5:
        raise OutOfRange("lower bound requires s > -1/2")
    if k < 1:
        raise ValueError("k must be >= 1")
    b = s + k * math.pi - math.pi / 2 + 0.5
    if s > 0.5:
        b = max(b, s + k * math.pi - 0.5)
    return b


def bessel_zero(s: float, k: int, max_iter: int = 200) -> float:
    """k-th positive zero of J_s via sign-change bracketing and bisection.

    Consecutive zeros of J_s (s >= 0) are separated by more than 3 for the
    small orders used here, so a unit-step scan cannot skip a zero.
    """
    if s < 0:
        raise ValueError("order must be >= 0")
    if k < 1:
        raise ValueError("k must be >= 1")
    from scipy.optimize import brentq

    # all positive zeros exceed s; start just above the analytic floor
    x = max(s + 1e-6, bessel_zero_lower_bound(s, 1) - 1.5, 1e-6)
    step = 1.0
    f_prev = bessel_j(s, x)
    found = 0
    for _ in range(max_iter * max(k, 1)):
        x_next = x + step
        f_next = bessel_j(s, x_next)
        if f_prev == 0.0:
            found += 1
            if found == k:
                return x
        elif f_prev * f_next < 0:
            found += 1
            if found == k:
                root = brentq(lambda t: bessel_j(s, t), x, x_next, xtol=1e-13, rtol=1e-13, maxiter=max_iter)
                return float(root)
        x, f_prev = x_next, f_next
    raise ConvergenceFailure(f"could not locate zero {k} of J_{s}")


def sector_dn_eigs(
    alpha: float,
    radius: float,
    k: int,
    index_caps: tuple[int, int] = (0, 0),
) -> EigList:
    """Eigenvalues of the circular-sector operator with Dirichlet on the arc
    and Neumann on the two radii: (j_{pi n / alpha, k'} / radius)^2.

    The sorted k-prefix is certified complete by checking that the first
    omitted index in each direction already exceeds the k-th kept value
    (via the analytic zero lower bound); caps (0, 0) grow automatically.
    """
    if not 0 < alpha < math.pi:
        raise ValueError("alpha must lie in (0, pi)")
    if radius <= 0 or k < 1:
        raise ValueError("radius must be positive and k >= 1")
    n_max, k_max = index_caps
    auto = n_max == 0 or k_max == 0
    if auto:
        n_max, k_max = max(2, k), max(2, k)
    for _ in range(20):
        pairs = []
        for n in range(n_max + 1):
            s = math.pi * n / alpha
            for kk in range(1, k_max + 1):
                z = bessel_zero(s, kk)
                pairs.append(((z / radius) ** 2, f"sector(n={n},k={kk})"))
        out = _sorted_prefix(pairs, k)
        if len(out) < k:
            if not auto:
                raise CapsTooSmall("caps give fewer than k candidates")
            n_max += 2
            k_max += 2
            continue
        top = out.values[-1]
        # first omitted candidates: (n_max+1, 1) and (*, k_max+1)
        lb_n = (bessel_zero_lower_bound(math.pi * (n_max + 1) / alpha, 1) / radius) ** 2
        lb_k = (bessel_zero_lower_bound(0.0, k_max + 1) / radius) ** 2
        if lb_n > top and lb_k > top:
            return out
        if not auto:
            raise CapsTooSmall(
                "cannot certify the sorted prefix complete with the given caps"
            )
        n_max += 2
        k_max += 2
    raise CapsTooSmall("automatic cap growth did not certify completeness")


def sector_gap_certificate(alpha: float, nu: float, n_scan: int = 8, k_scan: int = 8) -> dict:
    """Certify that every sector mode except the fundamental exceeds nu.

    Scans the analytic zero lower bound over a finite index window and closes
    the tails by monotonicity: the bound grows in the order s (so large n is
    dominated by the last scanned n) and in the zero index k (likewise).
    Returns the scan evidence; "certified" is True when every non-fundamental
    candidate bound squared exceeds nu.
    """
    if not 0 < alpha < math.pi:
        raise ValueError("alpha must lie in (0, pi)")
    scanned = []
    ok = True
    for n in range(n_scan + 1):
        s = math.pi * n / alpha
        for kk in range(1, k_scan + 1):
            if n == 0 and kk == 1:
                continue
            v = bessel_zero_lower_bound(s, kk) ** 2
            scanned.append({"n": n, "k": kk, "floor": v})
            ok = ok and v > nu
    # tails: n > n_scan has s larger than every scanned order with k = 1;
    # k > k_scan dominates the scanned k = k_scan row
    tail_n = bessel_zero_lower_bound(math.pi * (n_scan + 1) / alpha, 1) ** 2
    tail_k = bessel_zero_lower_bound(0.0, k_scan + 1) ** 2
    ok = ok and tail_n > nu and tail_k > nu
    fundamental = bessel_zero(0.0, 1) ** 2
    return {
        "certified": bool(ok),
        "scanned": scanned,
        "tail_floors": {"order": tail_n, "zero_index": tail_k},
        "fundamental": fundamental,
        "fundamental_below": fundamental < nu,
    }


# -- special-purpose analytic bounds ---------------------------------------


def right_triangle_dn_lower_bound(alpha: float) -> float:
    """Lower bound pi^2 (1 + tan^2(alpha)/4) for the first eigenvalue of the
    right-triangle operator with Dirichlet on the short leg and hypotenuse
    and Neumann on the long leg (the odd half of the bent-guide center)."""
    if not 0 < alpha < math.pi / 2:
        raise OutOfRange("alpha must lie in (0, pi/2)")
    return PI2 * (1 + math.tan(alpha) ** 2 / 4)


def cross_section_threshold(cs) -> float:
    """First Dirichlet eigenvalue of a branch cross-section."""
    if cs.kind == "interval":
        (w,) = cs.dims
        return PI2 / w**2
    if cs.kind == "rectangle":
        a, b = cs.dims
        return PI2 * (1 / a**2 + 1 / b**2)
    if cs.kind == "disk":
        (r,) = cs.dims
        return (bessel_zero(0.0, 1) / r) ** 2
    raise ValueError(f"unknown cross-section kind {cs.kind!r}")


def y_alpha_threshold(alpha: float) -> float:
    """Lower bound for the second mixed-condition eigenvalue of the Y-junction
    center with half-opening alpha, from the Neumann triangle enclosure plus
    the anisotropic contraction to an equilateral triangle.

    alpha < pi/3: 16 pi^2 sin^4(a) / (9 cos^2(a) (2 - cos a)^2);
    alpha > pi/3: 16 pi^2 / (3 tan^2(a)); both give 16 pi^2 / 9 at pi/3.
    """
    if not 0 < alpha < math.pi / 2:
        raise OutOfRange("alpha must lie in (0, pi/2)")
    if alpha <= math.pi / 3:
        s, c = math.sin(alpha), math.cos(alpha)
        return 16 * PI2 * s**4 / (9 * c**2 * (2 - c) ** 2)
    return 16 * PI2 / (3 * math.tan(alpha) ** 2)


def y_alpha_enclosure_triangle(alpha: float) -> tuple[float, float]:
    """Base length and height of the isosceles Neumann enclosure triangle of
    the convex-pentagon Y-junction center (alpha < pi/3)."""
    if not 0 < alpha < math.pi / 3:
        raise OutOfRange("enclosure triangle applies for alpha in (0, pi/3)")
    s, c = math.sin(alpha), math.cos(alpha)
    return (2 - c) * c / s**2, (2 - c) / (2 * s)
