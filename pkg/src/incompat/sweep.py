"""Angle sweeps over the two symmetric families, analytic next to numeric."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import OutOfRange
from .families import delta_perp, delta_y, perp_triplet, y_triplet
from .io import fmt
from .mur import mur_lower_bound
from .optimizer import OptimizerOptions, incompatibility

FAMILIES = {
    "perp": (perp_triplet, delta_perp),
    "y": (y_triplet, delta_y),
}

COLUMNS = ("parameter_deg", "analytic", "numeric", "regime", "bound_2delta", "saturable")

# numeric column: always search, never the closed-form shortcut
SWEEP_OPTIONS = OptimizerOptions(restarts=8, use_closed_form=False)


@dataclass(frozen=True)
class SweepRow:
    parameter_deg: float
    analytic: float
    numeric: float
    regime: str
    bound_2delta: float
    saturable: bool

    def cells(self) -> list:
        return [fmt(self.parameter_deg), fmt(self.analytic), fmt(self.numeric), self.regime,
                fmt(self.bound_2delta), "true" if self.saturable else "false"]


def sweep_angles(start: float, stop: float, steps: int) -> np.ndarray:
    if steps < 1:
        raise OutOfRange("steps must be at least 1")
    if not (0 <= start <= 90 and 0 <= stop <= 90):
        raise OutOfRange(f"angles must lie in [0, 90] degrees, got {start}..{stop}")
    return np.linspace(start, stop, steps) if steps > 1 else np.array([float(start)])


def pair_to_theta(pair_deg: float) -> float:
    """Perp-family angle for the pair angle ``p`` with ``|cos 2p| = m1 . m2``, ``p`` in [0, 45]."""
    if not 0 <= pair_deg <= 45:
        raise OutOfRange(f"pair angle must lie in [0, 45] degrees, got {pair_deg}")
    return 90.0 - 2.0 * pair_deg


def sweep_row(family: str, deg: float, opts: OptimizerOptions = SWEEP_OPTIONS,
              pair_angle: bool = False) -> SweepRow:
    """One row; with ``pair_angle`` the perp family is indexed by its pair angle instead."""
    try:
        make, exact = FAMILIES[family]
    except KeyError:
        raise OutOfRange(f"unknown family {family!r}; choose from {sorted(FAMILIES)}") from None
    if pair_angle and family != "perp":
        raise OutOfRange("the pair angle only applies to the perp family")
    angle = math.radians(pair_to_theta(deg) if pair_angle else deg)
    targets = make(angle)
    sol = exact(angle)
    rep = mur_lower_bound(targets)
    numeric = incompatibility(targets, opts).delta_num
    return SweepRow(float(deg), sol.value, numeric, sol.regime, rep.bound, bool(rep.saturable))


def sweep(family: str, start: float, stop: float, steps: int,
          opts: OptimizerOptions = SWEEP_OPTIONS, pair_angle: bool = False) -> list:
    return [sweep_row(family, float(d), opts, pair_angle) for d in sweep_angles(start, stop, steps)]


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow(r.cells())
    return buf.getvalue()


def sweep_options(restarts: int | None = None, seed: int | None = None) -> OptimizerOptions:
    changes = {k: v for k, v in (("restarts", restarts), ("seed", seed)) if v is not None}
    return replace(SWEEP_OPTIONS, **changes)
