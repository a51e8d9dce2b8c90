"""Graded reflection symmetries of triplets and the averaging map.

A graded symmetry is a reflection ``g`` with ``g m_j = w_j m_{s(j)}`` for a
permutation ``s`` and signs ``w``.  Averaging any jointly measurable
candidate over such a symmetry keeps it jointly measurable and never
increases the worst-case uncertainty against invariant targets, so the
optimizer may search the invariant subspace only.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations, product

import numpy as np
import scipy.linalg

from .errors import InvalidNormal, NotSymmetric
from .fermat import ft_point
from .jm import anchors
from .qubit import TOL, Triplet

DETECT_TOL = 1e-8


def reflect(normal, v) -> np.ndarray:
    """Householder reflection ``v - 2 (n·v) n`` across the plane orthogonal to ``normal``."""
    n = np.asarray(normal, dtype=float)
    if abs(np.linalg.norm(n) - 1) > TOL:
        raise InvalidNormal(f"mirror normal must be a unit vector, |n| = {np.linalg.norm(n)}")
    v = np.asarray(v, dtype=float)
    return v - 2 * np.multiply.outer(v @ n, n) if v.ndim > 1 else v - 2 * (n @ v) * n


@dataclass(frozen=True, eq=False)
class GradedSymmetry:
    """``perm`` maps 0-based positions; ``signs`` are the +-1 gradings."""

    normal: np.ndarray
    perm: tuple
    signs: tuple

    @property
    def matrix(self) -> np.ndarray:
        n = self.normal
        return np.eye(3) - 2 * np.outer(n, n)

    @property
    def parity(self) -> int:
        return self.signs[0] * self.signs[1] * self.signs[2]

    def image(self, blochs) -> np.ndarray:
        """Rows ``w_j g n_{s(j)}``; a triplet is invariant iff this equals its blochs."""
        b = np.asarray(blochs, dtype=float)
        g = self.matrix
        return np.array([self.signs[j] * (g @ b[self.perm[j]]) for j in range(3)])

    def action(self) -> np.ndarray:
        """The 9x9 linear map ``blochs.ravel() -> image(blochs).ravel()``."""
        a = np.zeros((9, 9))
        g = self.matrix
        for j in range(3):
            s = self.perm[j]
            a[3 * j:3 * j + 3, 3 * s:3 * s + 3] = self.signs[j] * g
        return a

    def is_invariant(self, t, tol: float = DETECT_TOL) -> bool:
        b = t.blochs if isinstance(t, Triplet) else np.asarray(t, dtype=float)
        return bool(np.all(np.abs(self.image(b) - b) <= tol * max(1.0, np.abs(b).max())))

    def key(self):
        n = self.normal
        i = int(np.argmax(np.abs(n)))
        n = n if n[i] > 0 else -n
        return self.perm, self.signs, tuple(np.round(n, 7))


def _unit(v):
    norm = np.linalg.norm(v)
    return v / norm if norm > 1e-12 else None


def candidate_normals(blochs) -> list:
    m = np.asarray(blochs, dtype=float)
    hats = [u for u in (_unit(v) for v in m) if u is not None]
    cands = list(hats)
    for a, b in combinations(hats, 2):
        cands += [a + b, a - b, np.cross(a, b)]
    cands += list(np.eye(3))
    return [u for u in (_unit(c) for c in cands) if u is not None]


def find_graded_symmetries(t: Triplet, tol: float = DETECT_TOL) -> list:
    """All graded symmetries whose mirror lies in a finite triplet-derived set."""
    m = t.blochs
    found, seen = [], set()
    scale = max(1.0, np.abs(m).max())
    for n in candidate_normals(m):
        gm = reflect(n, m)
        for perm in permutations(range(3)):
            if any(perm[perm[j]] != j for j in range(3)):
                continue
            for signs in product((1, -1), repeat=3):
                if any(signs[j] != signs[perm[j]] for j in range(3)):
                    continue
                target = np.array([signs[j] * m[perm[j]] for j in range(3)])
                if np.all(np.abs(gm - target) <= tol * scale):
                    sym = GradedSymmetry(n, perm, signs)
                    if sym.key() not in seen:
                        seen.add(sym.key())
                        found.append(sym)
    return found


def symmetrize(candidate: Triplet, sym: GradedSymmetry) -> Triplet:
    """Average ``n'_j = (n_j + w_j g n_{s(j)}) / 2``."""
    if not candidate.is_unbiased:
        raise ValueError("symmetrize expects an unbiased candidate")
    b = candidate.blochs
    return Triplet.from_blochs((b + sym.image(b)) / 2)


def invariant_basis(syms, dim: int = 9) -> np.ndarray:
    """Orthonormal basis (9, d) of bloch-triplets fixed by every symmetry in ``syms``."""
    if not syms:
        return np.eye(dim)
    stacked = np.vstack([np.eye(9) - s.action() for s in syms])
    return scipy.linalg.null_space(stacked, rcond=1e-10)


def ft_symmetry_check(t: Triplet, sym: GradedSymmetry, tol: float = 1e-7) -> bool:
    """True iff the Fermat–Torricelli point satisfies ``g q_f = w1 w2 w3 q_f``."""
    if not sym.is_invariant(t):
        raise NotSymmetric("triplet is not invariant under this symmetry")
    qf = ft_point(anchors(t)).point
    return bool(np.linalg.norm(reflect(sym.normal, qf) - sym.parity * qf) <= tol)
