"""Numerical incompatibility: min over jointly measurable triplets of the
worst-case total statistical distance to the targets.

The search runs over unconstrained bloch-triplets ``n``; each one is pulled
radially onto the jointly measurable set, ``n -> n * min(1, 4 / S(n))``,
where ``S`` is the Fermat–Torricelli distance sum of its anchors.  ``S`` is
homogeneous of degree one, so this is the exact boundary point on the ray.
A quadratic penalty on ``S/4 - 1`` removes the flat directions this
creates outside the set without moving the minimum.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import BiasedInput, NonConvergence, TooLarge
from .fermat import ft_sum, ft_sum_upper_batch
from .jm import GAMMA, anchors, jm_feasible_general, jm_margin
from .mur import mur_lower_bound, worst_case_uncertainty
from .qubit import TOL, Observable, Triplet
from .symmetry import find_graded_symmetries, invariant_basis

log = logging.getLogger(__name__)

AGREEMENT_TOL = 1e-4
MAX_GRID_POINTS = 10 ** 8


@dataclass(frozen=True)
class OptimizerOptions:
    restarts: int = 32
    seed: int = 0
    max_iters: int = 2000
    step_tolerance: float = 1e-10
    penalty_weight: float = 100.0
    use_closed_form: bool = True
    use_symmetry: bool = True
    biased: bool = False

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1:
            raise ValueError("restarts and max_iters must be positive")
        if self.step_tolerance <= 0 or self.penalty_weight < 0:
            raise ValueError("step_tolerance must be > 0 and penalty_weight >= 0")


@dataclass(frozen=True, eq=False)
class IncompatibilityResult:
    delta_num: float
    optimal: Triplet
    lower_bound: float
    gap: float
    saturated: bool
    method: str
    restart_values: tuple = field(default=())

    @property
    def restart_spread(self) -> float:
        """Difference between the two best restarts (0 for closed forms)."""
        if len(self.restart_values) < 2:
            return 0.0
        return self.restart_values[1] - self.restart_values[0]


class _Objective:
    """Penalised worst-case uncertainty on reduced coordinates."""

    def __init__(self, targets: Triplet, basis: np.ndarray, penalty: float, biased: bool):
        self.p = anchors(targets)
        self.basis = basis
        self.dim = basis.shape[1]
        self.penalty = penalty
        self.biased = biased

    def split(self, c):
        n = (self.basis @ c[: self.dim]).reshape(3, 3)
        x = np.clip(c[self.dim:], -1.0, 1.0) if self.biased else np.zeros(3)
        return n, x

    def project(self, c):
        """Jointly measurable (blochs, biases) for coordinates ``c``, plus the raw sum S."""
        n, x = self.split(c)
        s = ft_sum(GAMMA.T @ n)
        if s > 4.0:
            n = n * (4.0 / s)
        if self.biased:
            n = n * (1 - np.abs(x))[:, None]
        return n, x, s

    def __call__(self, c):
        n, x, s = self.project(c)
        diff = self.p - GAMMA.T @ n
        terms = np.sqrt((diff * diff).sum(axis=1))
        if self.biased:
            terms = terms + np.abs(GAMMA.T @ x)
        excess = max(0.0, s / 4.0 - 1.0)
        return 2.0 * terms.max() + self.penalty * excess * excess

    def triplet(self, c) -> Triplet:
        n, x, _ = self.project(c)
        # a raw S a hair above 4 can leave |x| + |n| = 1 + O(eps)
        return Triplet(tuple(Observable(float(b), v) for b, v in zip(x, n)))


def _reduction(targets: Triplet, use_symmetry: bool):
    if not use_symmetry:
        return np.eye(9), []
    syms = find_graded_symmetries(targets)
    return invariant_basis(syms), syms


def _starts(obj: _Objective, targets: Triplet, rng: np.random.Generator, count: int):
    """Deterministic starting points inside the jointly measurable set."""
    d = obj.dim
    extra = 3 if obj.biased else 0
    base = obj.basis.T @ targets.blochs.ravel()
    starts = []
    for i in range(count):
        c = base.copy() if i == 0 else rng.normal(size=d)
        if not np.any(c):
            c = rng.normal(size=d)
        s = ft_sum(GAMMA.T @ (obj.basis @ c).reshape(3, 3))
        scale = min(1.0, 4.0 / s) if s > 0 else 1.0
        if i > 0:
            scale *= rng.uniform(0.3, 1.0)
        x = rng.uniform(-0.2, 0.2, size=extra) if extra else np.zeros(0)
        starts.append(np.concatenate([c * scale, x]))
    return starts


def _local_search(obj: _Objective, x0: np.ndarray, opts: OptimizerOptions):
    dim = len(x0)
    best_x, best_f = x0, obj(x0)
    step = 0.1
    # Nelder-Mead stalls on kinks; re-seeding a fresh simplex at the incumbent recovers
    for _ in range(6):
        simplex = np.vstack([best_x] + [best_x + step * e for e in np.eye(dim)])
        res = minimize(
            obj,
            best_x,
            method="Nelder-Mead",
            options={
                "initial_simplex": simplex,
                "xatol": opts.step_tolerance,
                "fatol": opts.step_tolerance,
                "maxiter": opts.max_iters,
                "maxfev": 4 * opts.max_iters,
                "adaptive": dim > 4,
            },
        )
        improved = best_f - res.fun
        if res.fun < best_f:
            best_x, best_f = res.x, res.fun
        if improved <= opts.step_tolerance:
            break
        step = max(step / 4, 1e-6)
    return best_x, best_f


def incompatibility(targets: Triplet, opts: OptimizerOptions | None = None) -> IncompatibilityResult:
    """Exact incompatibility of unbiased ``targets``."""
    opts = opts or OptimizerOptions()
    if not targets.is_unbiased:
        raise BiasedInput("incompatibility is defined for unbiased targets")
    rep = mur_lower_bound(targets)
    bound = rep.bound
    if rep.delta <= TOL:
        return IncompatibilityResult(0.0, targets, bound, -bound, True, "closed_form")
    if opts.use_closed_form and rep.saturable and rep.optimal is not None:
        value = worst_case_uncertainty(targets, rep.optimal)
        return IncompatibilityResult(value, rep.optimal, bound, value - bound, True, "closed_form")

    basis, syms = _reduction(targets, opts.use_symmetry)
    method = "symmetric_reduced" if basis.shape[1] < 9 else "general"
    obj = _Objective(targets, basis, opts.penalty_weight, opts.biased)
    rng = np.random.default_rng(opts.seed)
    runs = []
    for i, x0 in enumerate(_starts(obj, targets, rng, opts.restarts)):
        x, f = _local_search(obj, x0, opts)
        runs.append((f, i, x))
    runs.sort(key=lambda r: (r[0], r[1]))
    optimal = obj.triplet(runs[0][2])
    value = worst_case_uncertainty(targets, optimal)
    values = tuple(r[0] for r in runs)
    if len(values) > 1 and values[1] - values[0] > AGREEMENT_TOL:
        raise NonConvergence(
            f"best restarts disagree: {values[0]:.10g} vs {values[1]:.10g} ({method}, d={obj.dim})"
        )
    log.debug("incompatibility %s d=%d value=%.12g spread=%.3g", method, obj.dim, value, values[-1] - values[0])
    gap = value - bound
    return IncompatibilityResult(value, optimal, bound, gap, gap <= 1e-6, method, values)


def brute_force_incompatibility(targets: Triplet, grid_steps: int, use_symmetry: bool = True,
                                chunk: int = 50_000) -> float:
    """Upper bound on the incompatibility from a grid over reduced coordinates.

    Grid points are pulled radially into the jointly measurable set with an
    upper estimate of the Fermat–Torricelli sum, so every evaluated triplet is
    jointly measurable and the result never undercuts the true value.
    """
    if not targets.is_unbiased:
        raise BiasedInput("brute force is defined for unbiased targets")
    basis, _ = _reduction(targets, use_symmetry)
    d = basis.shape[1]
    if grid_steps ** d > MAX_GRID_POINTS:
        raise TooLarge(f"{grid_steps}^{d} grid points exceed {MAX_GRID_POINTS}")
    p = anchors(targets)
    if jm_margin(targets).jointly_measurable:
        return 0.0
    # |n_j| <= 1 bounds coordinate i by the sum of the block norms of basis column i
    reach = np.linalg.norm(basis.T.reshape(d, 3, 3), axis=2).sum(axis=1)
    axes = [np.linspace(-r, r, grid_steps) for r in reach]
    total = grid_steps ** d
    best = math.inf
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        digits = np.stack(np.unravel_index(idx, (grid_steps,) * d), axis=1)
        coords = np.stack([axes[i][digits[:, i]] for i in range(d)], axis=1)
        n = (coords @ basis.T).reshape(-1, 3, 3)
        q = np.einsum("jk,njc->nkc", GAMMA, n)
        s = ft_sum_upper_batch(q)
        lam = np.minimum(1.0, 4.0 / np.maximum(s, 1e-300))
        diff = p[None] - lam[:, None, None] * q
        vals = 2 * np.linalg.norm(diff, axis=2).max(axis=1)
        best = min(best, float(vals.min()))
    return best


@dataclass(frozen=True)
class VerifyReport:
    jm_margin: float
    jointly_measurable: bool
    worst_case: float
    bound: float
    respects_bound: bool
    meets_bound: bool


def verify_candidate(targets: Triplet, candidate: Triplet) -> VerifyReport:
    """Joint measurability of ``candidate`` and how its worst case compares with the bound.

    ``meets_bound`` means the candidate is jointly measurable and attains the
    lower bound (so it is optimal); biased candidates are judged by the
    general feasibility oracle.
    """
    if not targets.is_unbiased:
        raise BiasedInput("targets must be unbiased")
    verdict = jm_margin(candidate) if candidate.is_unbiased else jm_feasible_general(candidate)
    bound = mur_lower_bound(targets).bound
    wc = worst_case_uncertainty(targets, candidate)
    respects = wc >= bound - TOL
    meets = verdict.jointly_measurable and wc <= max(bound, 0.0) + TOL
    return VerifyReport(verdict.margin, verdict.jointly_measurable, wc, bound, respects, meets)
