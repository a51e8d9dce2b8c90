"""Closed-form incompatibility of two symmetric target families.

``perp``: m1 = (sin t, 0, cos t), m2 = x, m3 = y, with three regimes split
at theta0 = arccos(sqrt2 - 1) and theta1 (found numerically).

``y``: m_j = z cos g + e_j sin g with e_j a planar trine, with regimes
split at gamma0 = arctan(2 sqrt2) and gamma1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .errors import OutOfRange, RootNotBracketed
from .mur import mur_lower_bound
from .qubit import TOL, Triplet

SQRT2 = math.sqrt(2.0)
HALF_PI = math.pi / 2
# generous slack for angles that arrive through a degree round trip
_ANGLE_SLACK = 1e-12


def _check_angle(a: float, name: str) -> float:
    a = float(a)
    if not (-_ANGLE_SLACK <= a <= HALF_PI + _ANGLE_SLACK):
        raise OutOfRange(f"{name} = {a} outside [0, pi/2]")
    return min(max(a, 0.0), HALF_PI)


@dataclass(frozen=True)
class Thresholds:
    theta0: float
    theta1: float
    gamma0: float
    gamma1: float

    def degrees(self) -> dict:
        return {k: math.degrees(v) for k, v in self.__dict__.items()}


def _m3_curve_sin(t: float) -> float:
    """sin(theta) along the M3 parametric curve."""
    return math.tan(t) ** 2 * (1 + 3 * math.cos(t)) ** 2 / 8 - 1


def _m3_curve_value(t: float) -> float:
    c = math.cos(t)
    return (1 - c) / c * math.sqrt(1 + 3 * c * c)


@lru_cache(maxsize=1)
def thresholds() -> Thresholds:
    theta0 = math.acos(SQRT2 - 1)
    # M2/M3 switch: the curve meets sin(theta) = sqrt(1 - cos^4 t)
    t1 = brentq(lambda t: _m3_curve_sin(t) - math.sqrt(1 - math.cos(t) ** 4), 0.5, 1.4, xtol=1e-15)
    theta1 = math.asin(_m3_curve_sin(t1))
    gamma0 = math.atan(2 * SQRT2)
    gamma1 = math.atan(SQRT2 / 79 * (5 * math.sqrt(337) + 129))
    return Thresholds(theta0, theta1, gamma0, gamma1)


# ---------------------------------------------------------------- perp family


def perp_triplet(theta: float) -> Triplet:
    theta = _check_angle(theta, "theta")
    return Triplet.from_blochs([[math.sin(theta), 0.0, math.cos(theta)], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])


@dataclass(frozen=True)
class PerpSolution:
    theta: float
    value: float
    regime: str
    n3: float
    beta_plus: float
    beta_minus: float
    kappa: float
    t_param: float | None

    def triplet(self) -> Triplet:
        """Optimal approximation ``n3 m3, (b+ m+ +- b- m-)/2``."""
        m1, m2, m3 = perp_triplet(self.theta).blochs
        hp = (m1 + m2) / np.linalg.norm(m1 + m2)
        dm = np.linalg.norm(m1 - m2)
        # at theta = pi/2 m1 = m2 and the minus-direction is arbitrary in the XZ plane
        hm = (m1 - m2) / dm if dm > 1e-12 else np.array([0.0, 0.0, 1.0])
        n1 = (self.beta_plus * hp + self.beta_minus * hm) / 2
        n2 = (self.beta_plus * hp - self.beta_minus * hm) / 2
        return Triplet.from_blochs([n1, n2, self.n3 * m3])


def _perp_m3_t(theta: float) -> float:
    target = math.sin(theta)
    lo, hi = 1e-9, HALF_PI - 1e-6
    f = lambda t: _m3_curve_sin(t) - target  # noqa: E731
    if f(lo) * f(hi) > 0:
        raise RootNotBracketed(f"M3 curve inversion failed at theta = {theta}")
    return brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)


def delta_perp(theta: float) -> PerpSolution:
    theta = _check_angle(theta, "theta")
    th = thresholds()
    c = math.cos(theta)
    d_plus, d_minus = math.sqrt(1 + c), math.sqrt(1 - c)
    if theta <= th.theta0:
        value = 2 * math.sqrt(2 + c) - 2
        root = math.sqrt(d_plus ** 2 + 1)
        n3 = 1 / root
        bp, bm = d_plus / root + d_minus, d_plus / root - d_minus
        return PerpSolution(theta, value, "M1", n3, bp, bm, 0.0, None)
    if theta <= th.theta1:
        value = 2 * math.sqrt(3 + c - 2 * math.sqrt(c) - 2 * math.sin(theta))
        return PerpSolution(theta, value, "M2", math.sqrt(c), 2 * d_minus, 0.0, 0.0, None)
    t = _perp_m3_t(theta)
    u = math.sin(t)
    return PerpSolution(theta, _m3_curve_value(t), "M3", math.cos(t), 2 * u, 0.0, d_minus - u, t)


# ------------------------------------------------------------------- Y family


def trine() -> np.ndarray:
    """Unit vectors e_1 = x, e_2, e_3 at 120 degrees in the XY plane."""
    a = 2 * math.pi / 3
    return np.array([[math.cos(k * a), math.sin(k * a), 0.0] for k in range(3)])


def y_triplet(gamma: float) -> Triplet:
    gamma = _check_angle(gamma, "gamma")
    z = np.array([0.0, 0.0, 1.0])
    return Triplet.from_blochs(math.cos(gamma) * z + math.sin(gamma) * trine())


def y_candidate(x: float, y: float) -> Triplet:
    """The invariant candidate ``n_j = x z + y e_j``."""
    z = np.array([0.0, 0.0, 1.0])
    return Triplet.from_blochs(x * z + y * trine())


def y_jm_boundary(x: float) -> float:
    """Largest ``y`` keeping ``x z + y e_j`` jointly measurable."""
    if abs(x) > 1 + TOL:
        raise OutOfRange(f"|x| = {abs(x)} exceeds 1")
    ax = min(abs(x), 1.0)
    if ax >= 1 / 9:
        return (1 - ax) / SQRT2
    return (2 / 3) * math.sqrt(1 - 9 * ax * ax)


@dataclass(frozen=True)
class YSolution:
    gamma: float
    value: float
    regime: str
    x: float
    y: float
    alpha: float

    def triplet(self) -> Triplet:
        return y_candidate(self.x, self.y)


def _y_alpha(gamma: float) -> float:
    """z-coordinate of the targets' Fermat–Torricelli point."""
    c, s = math.cos(gamma), math.sin(gamma)
    if s <= 4 * SQRT2 * c:
        return s / SQRT2 - c
    return 3 * c


def _golden(f, a, b, tol=1e-12):
    inv = (math.sqrt(5) - 1) / 2
    c, d = b - inv * (b - a), a + inv * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv * (b - a)
            fd = f(d)
    return (a + b) / 2


def _y_r3(gamma: float):
    c, s = math.cos(gamma), math.sin(gamma)

    def obj(phi):
        x, yt = math.cos(phi) / 3, math.sin(phi) / 3
        return (c - x) ** 2 + 4 * (s - 2 * yt) ** 2

    grid = np.linspace(0.0, 2 * math.pi, 721)
    i = int(np.argmin([obj(p) for p in grid]))
    phi = _golden(obj, grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)])
    x, y = math.cos(phi) / 3, 2 * math.sin(phi) / 3
    return 2 * math.sqrt(obj(phi)), x, y


def _y_r2_point(gamma: float):
    c, s = math.cos(gamma), math.sin(gamma)
    # equal pattern terms 3(c - x) = |p_k - q_k| on the ellipse y = (2/3) sqrt(1 - 9 x^2)
    f = lambda x: s - (2 / 3) * math.sqrt(1 - 9 * x * x) - SQRT2 * (c - x)  # noqa: E731
    x = brentq(f, 0.0, 1 / 9, xtol=1e-15)
    return x, (2 / 3) * math.sqrt(1 - 9 * x * x)


def delta_y(gamma: float) -> YSolution:
    gamma = _check_angle(gamma, "gamma")
    th = thresholds()
    c, s = math.cos(gamma), math.sin(gamma)
    alpha = _y_alpha(gamma)
    if gamma <= th.gamma0:
        value = 2 * c + 2 * SQRT2 * s - 2
        rep = mur_lower_bound(y_triplet(gamma))
        n1 = rep.optimal.blochs[0] if rep.optimal is not None else y_triplet(gamma).blochs[0]
        return YSolution(gamma, value, "R1", float(n1[2]), float(n1[0]), alpha)
    if gamma <= th.gamma1:
        value = SQRT2 * s + 4 * c - 2 * math.sqrt(2 / 3 - (s - SQRT2 * c) ** 2)
        x, y = _y_r2_point(gamma)
        return YSolution(gamma, value, "R2", x, y, alpha)
    value, x, y = _y_r3(gamma)
    return YSolution(gamma, value, "R3", x, y, alpha)
