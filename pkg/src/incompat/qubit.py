"""Two-outcome qubit observables, states and operators in Bloch form.

An observable with bias ``x`` and Bloch vector ``n`` has effects
``N_± = (I ± (x + n·σ)) / 2``; it is a valid POVM iff ``|x| + |n| <= 1``.
Operators are kept as ``c·I + v·σ`` and never expanded into matrices.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidObservable, InvalidState

TOL = 1e-9

ZHAT = np.array([0.0, 0.0, 1.0])


def as_vector(v) -> np.ndarray:
    """Return ``v`` as a finite float array of shape (3,)."""
    arr = np.array(v, dtype=float).reshape(-1)
    if arr.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {np.shape(v)}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector components must be finite")
    return arr


def _check_state(state) -> np.ndarray:
    r = as_vector(state)
    if np.linalg.norm(r) > 1 + TOL:
        raise InvalidState(f"Bloch vector {r} lies outside the unit ball")
    return r


@dataclass(frozen=True, eq=False)
class Observable:
    """Two-outcome qubit POVM with bias ``bias`` and Bloch vector ``bloch``."""

    bias: float
    bloch: np.ndarray

    def __post_init__(self):
        vec = as_vector(self.bloch)
        vec.setflags(write=False)
        bias = float(self.bias)
        if not np.isfinite(bias):
            raise InvalidObservable("bias must be finite")
        if abs(bias) + np.linalg.norm(vec) > 1 + TOL:
            raise InvalidObservable(
                f"|bias| + |bloch| = {abs(bias) + np.linalg.norm(vec):.12g} exceeds 1"
            )
        object.__setattr__(self, "bias", bias)
        object.__setattr__(self, "bloch", vec)

    @property
    def is_unbiased(self) -> bool:
        return self.bias == 0.0

    def effect(self, outcome: int) -> ScaledOperator:
        """The effect ``N_outcome`` for ``outcome`` in {+1, -1}."""
        s = _sign(outcome)
        return ScaledOperator((1 + s * self.bias) / 2, s * self.bloch / 2)

    def __eq__(self, other):
        if not isinstance(other, Observable):
            return NotImplemented
        return self.bias == other.bias and np.array_equal(self.bloch, other.bloch)

    def __hash__(self):
        return hash((self.bias, tuple(self.bloch)))

    def __repr__(self):
        return f"Observable(bias={self.bias!r}, bloch={self.bloch.tolist()!r})"


def make_observable(bias: float, bloch) -> Observable:
    return Observable(bias, bloch)


@dataclass(frozen=True)
class Triplet:
    """Three ordered observables; Python index 0 is observable j = 1."""

    obs: tuple

    def __post_init__(self):
        obs = tuple(self.obs)
        if len(obs) != 3 or not all(isinstance(o, Observable) for o in obs):
            raise ValueError("a Triplet holds exactly three Observables")
        object.__setattr__(self, "obs", obs)

    @classmethod
    def from_blochs(cls, blochs, biases: Sequence[float] | None = None) -> Triplet:
        blochs = np.asarray(blochs, dtype=float).reshape(3, 3)
        if biases is None:
            biases = (0.0, 0.0, 0.0)
        return cls(tuple(Observable(b, n) for b, n in zip(biases, blochs)))

    @property
    def blochs(self) -> np.ndarray:
        return np.array([o.bloch for o in self.obs])

    @property
    def biases(self) -> np.ndarray:
        return np.array([o.bias for o in self.obs])

    @property
    def is_unbiased(self) -> bool:
        return all(o.is_unbiased for o in self.obs)

    def __iter__(self):
        return iter(self.obs)

    def __getitem__(self, i) -> Observable:
        return self.obs[i]

    def __len__(self):
        return 3


@dataclass(frozen=True, eq=False)
class ScaledOperator:
    """The Hermitian qubit operator ``c·I + v·σ``."""

    c: float
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "c", float(self.c))
        object.__setattr__(self, "v", as_vector(self.v))

    @property
    def trace(self) -> float:
        return 2 * self.c

    @property
    def margin(self) -> float:
        return positivity_margin(self)

    def __add__(self, other: ScaledOperator) -> ScaledOperator:
        return ScaledOperator(self.c + other.c, self.v + other.v)

    def __mul__(self, k: float) -> ScaledOperator:
        return ScaledOperator(k * self.c, k * self.v)

    __rmul__ = __mul__

    def __repr__(self):
        return f"ScaledOperator(c={self.c!r}, v={self.v.tolist()!r})"


def positivity_margin(op: ScaledOperator) -> float:
    """``c - |v|``: the smaller eigenvalue of ``c·I + v·σ``."""
    return op.c - float(np.linalg.norm(op.v))


def outcome_probability(obs: Observable, state, outcome: int) -> float:
    r = _check_state(state)
    s = _sign(outcome)
    return (1 + s * (obs.bias + float(obs.bloch @ r))) / 2


def statistical_distance(a: Observable, b: Observable, state) -> float:
    """Twice the total-variation distance of the outcome statistics on ``state``."""
    r = _check_state(state)
    return 2 * abs((a.bias - b.bias) + float(r @ (a.bloch - b.bloch)))


def total_statistical_distance(targets: Iterable[Observable], approx: Iterable[Observable], state) -> float:
    return sum(statistical_distance(m, n, state) for m, n in zip(targets, approx))


def _sign(outcome: int) -> int:
    if outcome not in (1, -1):
        raise ValueError(f"outcome must be +1 or -1, got {outcome!r}")
    return outcome
