"""Joint measurability of observable triplets.

For unbiased triplets the test is closed form: with anchors
``q_k = sum_j gamma[j, k] n_j`` the triplet is jointly measurable iff the
Fermat–Torricelli distance sum of the anchors is at most 4.  Biased
triplets go through a convex feasibility problem over all eight-outcome
parents with the given marginals.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import BiasedInput, IndexOutOfRange, NonConvergence, NotPositive
from .fermat import FTSolution, ft_point
from .qubit import TOL, Observable, ScaledOperator, Triplet

log = logging.getLogger(__name__)


def gamma(j: int, k: int) -> int:
    """Sign ``(-1)^(j*floor(k/2) + k*floor(j/2))`` for j in 1..3, k in 0..3."""
    if not (1 <= j <= 3 and 0 <= k <= 3):
        raise IndexOutOfRange(f"gamma index out of range: j={j}, k={k}")
    return -1 if (j * (k // 2) + k * (j // 2)) % 2 else 1


# rows j = 1..3, columns k = 0..3
GAMMA = np.array([[gamma(j, k) for k in range(4)] for j in range(1, 4)], dtype=int)

SIGN_PATTERNS = tuple(product((1, -1), repeat=3))


def anchors(t) -> np.ndarray:
    """The four anchors ``q_k`` as a (4, 3) array; accepts a Triplet or (3, 3) blochs."""
    blochs = t.blochs if isinstance(t, Triplet) else np.asarray(t, dtype=float)
    return GAMMA.T @ blochs


@dataclass(frozen=True, eq=False)
class JMVerdict:
    margin: float
    jointly_measurable: bool
    ft: FTSolution | None = None
    boundary: bool = False
    parent: ParentPOVM | None = None


def _verdict(margin, ft=None, tol=TOL, parent=None):
    return JMVerdict(margin, margin >= -tol, ft, abs(margin) <= tol, parent)


def jm_margin(t: Triplet, tol: float = TOL) -> JMVerdict:
    """Margin ``4 - sum_k |q_k - q_f|`` of an unbiased triplet."""
    if not t.is_unbiased:
        raise BiasedInput("jm_margin needs an unbiased triplet; unbias it or use jm_feasible_general")
    ft = ft_point(anchors(t))
    return _verdict(4.0 - ft.total_distance, ft, tol)


def unbias(t: Triplet) -> Triplet:
    return Triplet(tuple(Observable(0.0, o.bloch) for o in t))


@dataclass(frozen=True, eq=False)
class ParentParams:
    """Free coefficients of an eight-outcome parent with fixed marginals.

    ``z_jk`` and ``zv_jk`` are ordered as (21, 31, 32).
    """

    z: float
    z_jk: np.ndarray
    zv_jk: np.ndarray
    zv: np.ndarray


PAIRS = ((1, 0), (2, 0), (2, 1))


def parent_elements(t: Triplet, params: ParentParams) -> dict:
    """The eight operators ``M(mu)`` built from a triplet and free coefficients."""
    x, n = t.biases, t.blochs
    out = {}
    for mu in SIGN_PATTERNS:
        m = np.array(mu)
        mu0 = mu[0] * mu[1] * mu[2]
        pair = np.array([mu[a] * mu[b] for a, b in PAIRS])
        c = 1 + m @ x + pair @ params.z_jk - mu0 * params.z
        v = m @ n + pair @ params.zv_jk - mu0 * params.zv
        out[mu] = ScaledOperator(c / 8, v / 8)
    return out


@dataclass(frozen=True, eq=False)
class ParentPOVM:
    """Eight-outcome POVM keyed by sign patterns ``(w1, w2, w3)``."""

    elements: dict

    @property
    def min_margin(self) -> float:
        return min(op.margin for op in self.elements.values())

    def completeness_error(self) -> float:
        c = sum(op.c for op in self.elements.values())
        v = sum(op.v for op in self.elements.values())
        return max(abs(c - 1.0), float(np.max(np.abs(v))))

    def is_valid(self, tol: float = TOL) -> bool:
        return self.min_margin >= -tol and self.completeness_error() <= 1e-12


def parent_povm_8(t: Triplet, ft) -> ParentPOVM:
    """Canonical parent ``M(w) = (I + (sum_j w_j n_j - w1 w2 w3 ft)·σ) / 8``."""
    if not t.is_unbiased:
        raise BiasedInput("the canonical parent is defined for unbiased triplets")
    ft = np.asarray(ft, dtype=float)
    n = t.blochs
    elements = {}
    for w in SIGN_PATTERNS:
        op = ScaledOperator(1 / 8, (np.array(w) @ n - w[0] * w[1] * w[2] * ft) / 8)
        if op.margin < -TOL:
            raise NotPositive(w, op.margin)
        elements[w] = op
    return ParentPOVM(elements)


def marginal(p: ParentPOVM, j: int) -> Observable:
    """Observable ``j`` (1-based) obtained by summing out the other two outcomes."""
    if not 1 <= j <= 3:
        raise IndexOutOfRange(f"observable index must be 1..3, got {j}")
    plus = [op for w, op in p.elements.items() if w[j - 1] == 1]
    c = sum(op.c for op in plus)
    v = sum(op.v for op in plus)
    return Observable(2 * c - 1, 2 * v)


def marginals(p: ParentPOVM) -> Triplet:
    return Triplet(tuple(marginal(p, j) for j in (1, 2, 3)))


def random_parent_povm(rng: np.random.Generator, biased: bool = True, fill: float | None = None) -> ParentPOVM:
    """A random valid eight-outcome POVM.

    Weights ``c`` are Dirichlet (or all 1/8 when ``biased`` is False) and the
    vector parts sum to zero; they are scaled so every element stays positive,
    with ``fill`` in (0, 1] setting how close the tightest element gets to
    rank one.
    """
    c = rng.dirichlet(np.ones(8)) if biased else np.full(8, 1 / 8)
    v = rng.normal(size=(8, 3))
    v -= v.mean(axis=0)
    room = np.min(c / np.linalg.norm(v, axis=1))
    if fill is None:
        fill = rng.uniform(0.2, 1.0)
    v *= room * fill
    return ParentPOVM({w: ScaledOperator(c[i], v[i]) for i, w in enumerate(SIGN_PATTERNS)})


def jm_feasible_general(t: Triplet, tol: float = TOL) -> JMVerdict:
    """Decide joint measurability of an arbitrary (possibly biased) triplet.

    Minimises ``max_mu (|v_mu| - c_mu)`` over the 16 free parent coefficients
    as a second-order cone program; the triplet is jointly measurable iff the
    optimum is at most ``tol``.  The reported margin is minus the optimum.
    """
    import cvxpy as cp

    x, n = t.biases, t.blochs
    z = cp.Variable()
    zjk = cp.Variable(3)
    zv = cp.Variable(3)
    zvjk = cp.Variable((3, 3))
    s = cp.Variable()
    cons = []
    for mu in SIGN_PATTERNS:
        m = np.array(mu, dtype=float)
        mu0 = mu[0] * mu[1] * mu[2]
        pair = np.array([mu[a] * mu[b] for a, b in PAIRS], dtype=float)
        c = 1 + m @ x + pair @ zjk - mu0 * z
        v = m @ n + pair @ zvjk - mu0 * zv
        cons.append(cp.norm(v, 2) - c <= s)
    prob = cp.Problem(cp.Minimize(s), cons)
    try:
        prob.solve(solver=cp.CLARABEL)
    except cp.error.SolverError as exc:
        raise NonConvergence(f"feasibility solver failed: {exc}") from exc
    if prob.status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
        raise NonConvergence(f"feasibility solver status {prob.status}")
    if prob.status == cp.OPTIMAL_INACCURATE:
        log.warning("feasibility solve inaccurate for %s", t)
    params = ParentParams(float(z.value), zjk.value, zvjk.value, zv.value)
    return _verdict(-float(prob.value), None, tol, ParentPOVM(parent_elements(t, params)))
