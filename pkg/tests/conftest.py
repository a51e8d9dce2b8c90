"""Shared strategies and independent oracles.

The oracles deliberately avoid the package's own machinery: operators become
2x2 complex matrices, geometric medians and parent POVMs go through cvxpy in
raw variables, and worst cases are found by searching over states.
"""
from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st
from scipy.optimize import minimize

from incompat.qubit import Observable, Triplet

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

PAULI = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]])
ID2 = np.eye(2)
PATTERNS = [(a, b, c) for a in (1, -1) for b in (1, -1) for c in (1, -1)]


# ------------------------------------------------------------------ matrices

def op_matrix(c, v):
    return c * ID2 + np.tensordot(np.asarray(v, dtype=float), PAULI, axes=1)


def density(r):
    return op_matrix(0.5, 0.5 * np.asarray(r, dtype=float))


def effect_matrix(obs: Observable, outcome: int):
    return op_matrix((1 + outcome * obs.bias) / 2, outcome * obs.bloch / 2)


def min_eig(c, v):
    return float(np.linalg.eigvalsh(op_matrix(c, v)).min())


def born(obs, r, outcome):
    return float(np.real(np.trace(density(r) @ effect_matrix(obs, outcome))))


def distance_oracle(a, b, r):
    """Twice the summed absolute differences of Born probabilities."""
    return 2 * sum(abs(born(a, r, s) - born(b, r, s)) for s in (1, -1))


def worst_case_oracle(targets, approx, samples=2000, seed=0):
    """Max over pure states of the summed distances, by sampling plus local polish."""
    rng = np.random.default_rng(seed)

    def total(r):
        return sum(distance_oracle(m, n, r) for m, n in zip(targets, approx))

    pts = rng.normal(size=(samples, 3))
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    vals = [total(p) for p in pts]
    best = pts[int(np.argmax(vals))]

    def neg(angles):
        th, ph = angles
        return -total([math.sin(th) * math.cos(ph), math.sin(th) * math.sin(ph), math.cos(th)])

    th0 = math.acos(max(-1.0, min(1.0, best[2])))
    res = minimize(neg, [th0, math.atan2(best[1], best[0])], method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
    return max(-res.fun, max(vals))


# ------------------------------------------------------------- convex oracles

def median_oracle(points):
    """Geometric median of the rows of ``points`` as a second-order cone program."""
    import cvxpy as cp

    pts = np.asarray(points, dtype=float)
    x = cp.Variable(3)
    prob = cp.Problem(cp.Minimize(sum(cp.norm(pts[k] - x) for k in range(len(pts)))))
    prob.solve(solver=cp.CLARABEL)
    return np.asarray(x.value), float(prob.value)


def raw_jm_oracle(t: Triplet):
    """Best worst-element slack over eight (c, v) operators with the right marginals.

    Positive means a strictly positive parent exists; negative means none does.
    """
    import cvxpy as cp

    c = cp.Variable(8)
    v = cp.Variable((8, 3))
    s = cp.Variable()
    cons = [cp.sum(c) == 1, cp.sum(v, axis=0) == 0]
    for j, o in enumerate(t):
        plus = [i for i, w in enumerate(PATTERNS) if w[j] == 1]
        # N_{+|j} = (1 + x_j)/2 I + n_j/2 . sigma
        cons.append(sum(c[i] for i in plus) == (1 + o.bias) / 2)
        cons.append(sum(v[i] for i in plus) == o.bloch / 2)
    cons += [cp.norm(v[i]) <= c[i] - s for i in range(8)]
    prob = cp.Problem(cp.Maximize(s), cons)
    prob.solve(solver=cp.CLARABEL)
    return float(prob.value)


# ----------------------------------------------------------------- strategies

def unit_vectors():
    return st.tuples(*[st.floats(-1, 1, allow_nan=False)] * 3).filter(
        lambda v: 0.1 < math.sqrt(sum(c * c for c in v))
    ).map(lambda v: tuple(c / math.sqrt(sum(x * x for x in v)) for c in v))


def ball_vectors(radius=1.0):
    return st.tuples(unit_vectors(), st.floats(0, 1)).map(
        lambda a: tuple(radius * a[1] * c for c in a[0])
    )


def observables(biased=True):
    @st.composite
    def build(draw):
        n = np.array(draw(ball_vectors()))
        room = 1 - np.linalg.norm(n)
        x = draw(st.floats(-1, 1)) * max(room, 0.0) if biased else 0.0
        return Observable(x, n)

    return build()


def triplets(biased=False):
    return st.tuples(observables(biased), observables(biased), observables(biased)).map(Triplet)


def sharp_triplets():
    return st.tuples(unit_vectors(), unit_vectors(), unit_vectors()).map(Triplet.from_blochs)


def rotations():
    return st.integers(0, 2 ** 32 - 1).map(random_rotation)


def random_rotation(seed):
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    return q


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_unit(rng, size=None):
    v = rng.normal(size=(size or 1, 3))
    v /= np.linalg.norm(v, axis=1)[:, None]
    return v if size else v[0]


def random_unbiased_triplet(rng, max_norm=1.0):
    """Random directions with lengths drawn in [0, max_norm]."""
    dirs = random_unit(rng, 3)
    return Triplet.from_blochs(dirs * rng.uniform(0, max_norm, size=(3, 1)))


def incompat_oracle(targets: Triplet, allow_bias=False):
    """Global incompatibility as one cone program.

    Jointly measurable triplets are exactly the marginals of eight-outcome
    parents, a convex set, and the worst case is a max of norms of affine
    maps, so the minimum is a second-order cone program.
    """
    import cvxpy as cp

    c = cp.Variable(8)
    v = cp.Variable((8, 3))
    t = cp.Variable()
    cons = [cp.sum(c) == 1, cp.sum(v, axis=0) == 0]
    cons += [cp.norm(v[i]) <= c[i] for i in range(8)]
    n, x = [], []
    for j in range(3):
        plus = [i for i, w in enumerate(PATTERNS) if w[j] == 1]
        n.append(2 * sum(v[i] for i in plus))
        x.append(2 * sum(c[i] for i in plus) - 1)
    if not allow_bias:
        cons += [xj == 0 for xj in x]
    m = targets.blochs
    for mu in (1, -1):
        for nu in (1, -1):
            g = (mu, nu, mu * nu)
            p = sum(g[j] * m[j] for j in range(3))
            q = sum(g[j] * n[j] for j in range(3))
            b = sum(g[j] * x[j] for j in range(3))
            cons.append(2 * (cp.norm(p - q) + cp.abs(b)) <= t)
    prob = cp.Problem(cp.Minimize(t), cons)
    prob.solve(solver=cp.CLARABEL)
    return float(prob.value)


def pytest_terminal_summary(terminalreporter):
    lines = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            lines += [v for k, v in getattr(rep, "user_properties", []) if k == "acceptance"]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


def rank_one_parent(rng):
    """Eight-outcome POVM whose elements are all rank one: ``c_w (I + u_w . sigma)``.

    Completeness needs ``sum c_w = 1`` and ``sum c_w u_w = 0``; a random
    objective picks a random vertex of that polytope, floored so no weight
    vanishes.
    """
    from scipy.optimize import linprog

    from incompat.jm import ParentPOVM
    from incompat.qubit import ScaledOperator

    while True:
        u = rng.normal(size=(8, 3))
        u /= np.linalg.norm(u, axis=1)[:, None]
        a_eq = np.vstack([np.ones(8), u.T])
        res = linprog(rng.normal(size=8), A_eq=a_eq, b_eq=[1, 0, 0, 0], bounds=[(0.01, 1)] * 8)
        if res.status == 0:
            c = res.x
            return ParentPOVM({w: ScaledOperator(c[i], c[i] * u[i]) for i, w in enumerate(PATTERNS)})
