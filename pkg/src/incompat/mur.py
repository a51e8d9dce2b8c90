"""Measurement uncertainty bound for unbiased observable triplets.

For targets with anchors ``p_k`` and Fermat–Torricelli point ``p_f`` the
worst-case total statistical distance of any jointly measurable
approximation is at least ``2*delta`` with
``delta = sum_k |p_k - p_f| / 4 - 1``.  The bound is attained iff
``delta <= min_k |p_k - p_f|``, and then the optimal triplet and a
four-direction randomized implementation are explicit.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import (
    AlreadyCompatible,
    BiasedInput,
    DegenerateAnchor,
    DegenerateMaximizer,
    NotOnBoundary,
    NotSaturable,
)
from .fermat import FTSolution, ft_point
from .jm import GAMMA, ParentPOVM, anchors, jm_margin
from .qubit import TOL, ZHAT, Observable, ScaledOperator, Triplet


@dataclass(frozen=True, eq=False)
class MURReport:
    delta: float
    p_anchors: np.ndarray
    p_ft: FTSolution
    min_anchor_dist: float
    saturable: bool
    optimal: Triplet | None = None
    directions: np.ndarray | None = None

    @property
    def bound(self) -> float:
        """The lower bound ``2*delta`` on the worst-case uncertainty."""
        return 2 * self.delta

    @property
    def trivial(self) -> bool:
        return self.delta <= TOL


def _require_unbiased(t: Triplet):
    if not t.is_unbiased:
        raise BiasedInput("targets must be unbiased (pass them through unbias first)")


def mur_lower_bound(targets: Triplet) -> MURReport:
    _require_unbiased(targets)
    p = anchors(targets)
    ft = ft_point(p)
    dists = np.linalg.norm(p - ft.point, axis=1)
    delta = ft.total_distance / 4 - 1
    min_dist = float(dists.min())
    saturable = delta <= min_dist + TOL
    directions = None
    if np.all(dists > TOL):
        directions = (ft.point - p) / dists[:, None]
    optimal = None
    if saturable and delta > TOL and directions is not None:
        optimal = _optimal_from(targets, delta, directions)
    return MURReport(delta, p, ft, min_dist, saturable, optimal, directions)


def _optimal_from(targets, delta, directions):
    n = targets.blochs + (delta / 4) * (GAMMA @ directions)
    return Triplet.from_blochs(n)


def optimal_triplet(targets: Triplet) -> Triplet:
    """The jointly measurable triplet attaining the bound ``2*delta``."""
    rep = mur_lower_bound(targets)
    if rep.delta <= TOL:
        raise AlreadyCompatible(f"delta = {rep.delta:.3g}: the targets are jointly measurable")
    if not rep.saturable:
        raise NotSaturable(
            f"delta = {rep.delta:.12g} exceeds min anchor distance {rep.min_anchor_dist:.12g}"
        )
    if rep.directions is None:
        raise DegenerateAnchor("an anchor coincides with the Fermat–Torricelli point")
    return rep.optimal


def _bias_terms(targets: Triplet, approx: Triplet) -> np.ndarray:
    return np.abs(GAMMA.T @ (targets.biases - approx.biases))


def _pattern_terms(targets: Triplet, approx: Triplet):
    diff = anchors(targets) - anchors(approx)
    return diff, np.linalg.norm(diff, axis=1) + _bias_terms(targets, approx)


def worst_case_uncertainty(targets: Triplet, approx: Triplet) -> float:
    """``max_rho sum_j d_rho(M_j, N_j)``, attained on one of four sign patterns."""
    _, terms = _pattern_terms(targets, approx)
    return 2 * float(terms.max())


def worst_case_state(targets: Triplet, approx: Triplet) -> np.ndarray:
    """A pure state attaining ``worst_case_uncertainty`` (lowest pattern index on ties)."""
    diff, terms = _pattern_terms(targets, approx)
    # saturated optima tie all four patterns up to roundoff
    k = int(np.flatnonzero(terms >= terms.max() - 1e-12)[0])
    norm = np.linalg.norm(diff[k])
    if norm <= TOL:
        warnings.warn("worst-case state is not unique; returning +z", DegenerateMaximizer, stacklevel=2)
        return ZHAT.copy()
    b = float(GAMMA[:, k] @ (targets.biases - approx.biases))
    sign = -1.0 if b < 0 else 1.0
    return sign * diff[k] / norm


@dataclass(frozen=True, eq=False)
class RandomizedImplementation:
    """Pick setting ``k`` with probability ``probabilities[k]``, measure sharply
    along ``directions[k]`` and relabel outcome ``mu_k`` as ``gamma[j, k] * mu_k``
    for observable ``j``."""

    probabilities: np.ndarray
    directions: np.ndarray
    triplet: Triplet

    @staticmethod
    def postprocess(j: int, mu: int, k: int, mu_k: int) -> int:
        """Deterministic response ``p_j(mu | k, mu_k)`` in {0, 1}; ``j`` is 1-based."""
        return (1 + mu * GAMMA[j - 1, k] * mu_k) // 2

    def setting(self, k: int, mu_k: int) -> ScaledOperator:
        """``P_k * O_{mu_k|k}`` for setting ``k`` and sharp outcome ``mu_k``."""
        return ScaledOperator(self.probabilities[k] / 2, self.probabilities[k] * mu_k * self.directions[k] / 2)

    def parent(self) -> ParentPOVM:
        """The eight-outcome parent ``M(w) = sum_{k,mu_k} P_k prod_j p_j(w_j|k,mu_k) O_{mu_k|k}``."""
        elements = {}
        for w in product((1, -1), repeat=3):
            acc = ScaledOperator(0.0, np.zeros(3))
            for k, mu_k in product(range(4), (1, -1)):
                weight = 1
                for j in (1, 2, 3):
                    weight *= self.postprocess(j, w[j - 1], k, mu_k)
                if weight:
                    acc = acc + self.setting(k, mu_k)
            elements[w] = acc
        return ParentPOVM(elements)

    def implemented(self) -> Triplet:
        """Marginals ``sum_{k,mu_k} p_j(+|k,mu_k) P_k O_{mu_k|k}`` as observables."""
        obs = []
        for j in (1, 2, 3):
            acc = ScaledOperator(0.0, np.zeros(3))
            for k, mu_k in product(range(4), (1, -1)):
                if self.postprocess(j, 1, k, mu_k):
                    acc = acc + self.setting(k, mu_k)
            obs.append(Observable(2 * acc.c - 1, 2 * acc.v))
        return Triplet(tuple(obs))


def _directions(vectors, lengths):
    out = np.tile(ZHAT, (4, 1))
    ok = lengths > TOL
    out[ok] = vectors[ok] / lengths[ok, None]
    return out


def randomized_implementation(t: Triplet, tol: float = 1e-6) -> RandomizedImplementation:
    """Four-setting implementation of a triplet on the measurability boundary.

    Probabilities are ``|q_k - q_f| / S`` with ``S`` the distance sum, which is
    4 on the boundary; normalising by ``S`` keeps them a distribution when the
    margin is only zero to within ``tol``.
    """
    _require_unbiased(t)
    verdict = jm_margin(t)
    if abs(verdict.margin) > tol:
        raise NotOnBoundary(f"jm margin {verdict.margin:.3e} is not zero")
    q = anchors(t)
    d = q - verdict.ft.point
    lengths = np.linalg.norm(d, axis=1)
    probs = lengths / lengths.sum()
    return RandomizedImplementation(probs, _directions(d, lengths), t)


def implement_optimal(targets: Triplet) -> RandomizedImplementation:
    """Four ideal measurements along ``-e_k`` with probabilities ``(|p_k - p_f| - delta)/4``."""
    rep = mur_lower_bound(targets)
    if rep.delta <= TOL:
        raise AlreadyCompatible(f"delta = {rep.delta:.3g}: the targets are jointly measurable")
    if not rep.saturable or rep.directions is None:
        raise NotSaturable("the bound cannot be attained for these targets")
    lengths = np.linalg.norm(rep.p_anchors - rep.p_ft.point, axis=1)
    probs = np.clip((lengths - rep.delta) / 4, 0.0, None)
    weights = probs > TOL
    dirs = np.tile(ZHAT, (4, 1))
    dirs[weights] = -rep.directions[weights]
    return RandomizedImplementation(probs, dirs, rep.optimal)
