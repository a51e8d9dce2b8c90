"""Fermat–Torricelli point (geometric median) of four anchors in R^3.

The minimiser of ``sum_k |a_k - x|`` is found by first testing each anchor
for optimality, then running Weiszfeld iterations accelerated by guarded
Newton steps.  The core loop works on Python floats: for four points the
per-call overhead of numpy would dominate the run time, and the optimizer
calls this millions of times.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from .errors import NonConvergence
from .qubit import TOL

MAX_ITERS = 100_000
STEP_TOL = 1e-12
ANCHOR_HIT = 1e-13


@dataclass(frozen=True, eq=False)
class FTSolution:
    point: np.ndarray
    total_distance: float
    at_anchor: int | None = None


def total_distance(anchors, point) -> float:
    anchors = np.asarray(anchors, dtype=float)
    return float(np.linalg.norm(anchors - np.asarray(point, dtype=float), axis=1).sum())


_dist = math.dist


def _fsum(pts, wts, x):
    return sum(w * _dist(p, x) for p, w in zip(pts, wts))


def _merge(anchors):
    """Group coincident anchors: unique points, multiplicities, first index."""
    scale = max(1.0, max(abs(c) for a in anchors for c in a))
    pts, wts, first = [], [], []
    for i, a in enumerate(anchors):
        for g, p in enumerate(pts):
            if _dist(a, p) <= 1e-14 * scale:
                wts[g] += 1
                break
        else:
            pts.append(a)
            wts.append(1)
            first.append(i)
    return pts, wts, first


def _pull(pts, wts, i):
    """Net unit-vector pull on unique anchor ``i`` from the other anchors."""
    rx = ry = rz = 0.0
    a = pts[i]
    for j, (p, w) in enumerate(zip(pts, wts)):
        if j == i:
            continue
        d = _dist(p, a)
        rx += w * (p[0] - a[0]) / d
        ry += w * (p[1] - a[1]) / d
        rz += w * (p[2] - a[2]) / d
    return rx, ry, rz


def is_anchor_optimal(anchors, index: int) -> bool:
    """True iff anchor ``index`` is a Fermat–Torricelli point of the set.

    Coincident anchors are merged; the anchor is optimal iff the net pull of
    the remaining anchors does not exceed its multiplicity.
    """
    anchors = [tuple(map(float, a)) for a in np.asarray(anchors, dtype=float)]
    pts, wts, first = _merge(anchors)
    target = anchors[index]
    g = min(range(len(pts)), key=lambda k: _dist(pts[k], target))
    r = _pull(pts, wts, g)
    return math.sqrt(r[0] ** 2 + r[1] ** 2 + r[2] ** 2) <= wts[g] + TOL


def _solve3(h, g):
    """Solve the symmetric 3x3 system ``h s = g``; None if near singular."""
    (a, b, c), (_, d, e), (_, _, f) = h
    c00 = d * f - e * e
    c01 = c * e - b * f
    c02 = b * e - c * d
    det = a * c00 + b * c01 + c * c02
    scale = abs(a) + abs(d) + abs(f)
    if abs(det) <= 1e-12 * scale ** 3:
        return None
    c11 = a * f - c * c
    c12 = b * c - a * e
    c22 = a * d - b * b
    return (
        (c00 * g[0] + c01 * g[1] + c02 * g[2]) / det,
        (c01 * g[0] + c11 * g[1] + c12 * g[2]) / det,
        (c02 * g[0] + c12 * g[1] + c22 * g[2]) / det,
    )


def _iterate(pts, wts, x, max_iters):
    fx = _fsum(pts, wts, x)
    for _ in range(max_iters):
        dists = [_dist(p, x) for p in pts]
        hit = min(range(len(pts)), key=dists.__getitem__)
        if dists[hit] < ANCHOR_HIT:
            # vanilla Weiszfeld is undefined on an anchor; step off along the pull
            r = _pull(pts, wts, hit)
            rn = math.sqrt(r[0] ** 2 + r[1] ** 2 + r[2] ** 2)
            t = min(_dist(p, pts[hit]) for j, p in enumerate(pts) if j != hit) / 2
            while t > 1e-300:
                y = (x[0] + t * r[0] / rn, x[1] + t * r[1] / rn, x[2] + t * r[2] / rn)
                fy = _fsum(pts, wts, y)
                if fy < fx:
                    break
                t /= 2
            else:
                return x, fx, True
            x, fx = y, fy
            continue
        sw = sx = sy = sz = 0.0
        gx = gy = gz = 0.0
        h00 = h01 = h02 = h11 = h12 = h22 = 0.0
        for p, w, d in zip(pts, wts, dists):
            k = w / d
            sw += k
            sx += k * p[0]
            sy += k * p[1]
            sz += k * p[2]
            ux, uy, uz = (x[0] - p[0]) / d, (x[1] - p[1]) / d, (x[2] - p[2]) / d
            gx += w * ux
            gy += w * uy
            gz += w * uz
            h00 += k * (1 - ux * ux)
            h11 += k * (1 - uy * uy)
            h22 += k * (1 - uz * uz)
            h01 -= k * ux * uy
            h02 -= k * ux * uz
            h12 -= k * uy * uz
        y = None
        s = _solve3(((h00, h01, h02), (h01, h11, h12), (h02, h12, h22)), (gx, gy, gz))
        if s is not None:
            y = (x[0] - s[0], x[1] - s[1], x[2] - s[2])
            fy = _fsum(pts, wts, y)
            if fy > fx:
                y = None
        if y is None:
            y = (sx / sw, sy / sw, sz / sw)
            fy = _fsum(pts, wts, y)
        step = _dist(x, y)
        if fy <= fx:
            x, fx = y, fy
        if step < STEP_TOL or fy > fx:
            return x, fx, True
    return x, fx, False


def _perturbation_optimal(pts, wts, x, fx, h=1e-4):
    for d in product((-1, 0, 1), repeat=3):
        if d == (0, 0, 0):
            continue
        n = math.sqrt(sum(c * c for c in d))
        y = tuple(x[i] + h * d[i] / n for i in range(3))
        if _fsum(pts, wts, y) < fx - TOL:
            return False
    return True


def _start(pts, wts):
    """Best of the weighted centroid and the pairwise midpoints.

    Newton crawls in from afar when the minimiser sits between two nearly
    coincident anchors; their midpoint is already within their separation.
    """
    total = sum(wts)
    cands = [tuple(sum(w * p[i] for p, w in zip(pts, wts)) / total for i in range(3))]
    for a, b in combinations(pts, 2):
        cands.append(((a[0] + b[0]) / 2, (a[1] + b[1]) / 2, (a[2] + b[2]) / 2))
    return min(cands, key=lambda c: _fsum(pts, wts, c))


def ft_solve(anchors):
    """Scalar core: returns ``(point_tuple, total_distance, at_anchor)``."""
    pts, wts, first = _merge(anchors)
    if len(pts) == 1:
        return pts[0], 0.0, 0
    for g in range(len(pts)):
        r = _pull(pts, wts, g)
        if math.sqrt(r[0] ** 2 + r[1] ** 2 + r[2] ** 2) <= wts[g] + TOL:
            return pts[g], _fsum(pts, wts, pts[g]), first[g]
    x0 = _start(pts, wts)
    x, fx, done = _iterate(pts, wts, x0, MAX_ITERS)
    if not done and not _perturbation_optimal(pts, wts, x, fx):
        raise NonConvergence("Weiszfeld iteration did not converge")
    return x, fx, None


def ft_point(anchors) -> FTSolution:
    """Fermat–Torricelli point of the four rows of ``anchors``."""
    arr = np.asarray(anchors, dtype=float)
    if arr.shape != (4, 3) or not np.all(np.isfinite(arr)):
        raise ValueError("expected four finite anchors in R^3")
    x, fx, at = ft_solve([tuple(a) for a in arr.tolist()])
    return FTSolution(np.array(x, dtype=float), float(fx), at)


def ft_sum(anchors) -> float:
    """Minimal distance sum only; skips building an FTSolution."""
    return ft_solve([tuple(a) for a in np.asarray(anchors, dtype=float).tolist()])[1]


def ft_sum_upper_batch(anchors: np.ndarray, iters: int = 200) -> np.ndarray:
    """Vectorised upper bound on the minimal distance sum for ``(N, 4, 3)`` anchors.

    Runs plain Weiszfeld from the centroid and keeps the best of the iterate
    and the four anchors. Every returned value is a distance sum at an actual
    point, hence never below the true minimum.
    """
    a = np.asarray(anchors, dtype=float)
    x = a.mean(axis=1)
    best = np.min(np.linalg.norm(a[:, :, None, :] - a[:, None, :, :], axis=3).sum(axis=2), axis=1)
    for _ in range(iters):
        d = np.linalg.norm(a - x[:, None, :], axis=2)
        d = np.maximum(d, 1e-15)
        w = 1.0 / d
        x = (w[:, :, None] * a).sum(axis=1) / w.sum(axis=1)[:, None]
    cur = np.linalg.norm(a - x[:, None, :], axis=2).sum(axis=1)
    return np.minimum(best, cur)
