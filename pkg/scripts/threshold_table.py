"""Print the regime switch angles of both families and the values there."""
from __future__ import annotations

import math

from incompat.families import delta_perp, delta_y, thresholds


def main() -> None:
    th = thresholds()
    rows = [
        ("perp", "theta0", th.theta0, delta_perp),
        ("perp", "theta1", th.theta1, delta_perp),
        ("y", "gamma0", th.gamma0, delta_y),
        ("y", "gamma1", th.gamma1, delta_y),
    ]
    print(f"{'family':<6} {'switch':<7} {'degrees':>12} {'value':>18}  regimes")
    for family, name, angle, fn in rows:
        below, above = fn(angle - 1e-7), fn(angle + 1e-7)
        print(f"{family:<6} {name:<7} {math.degrees(angle):>12.7f} {fn(angle).value:>18.15f}  "
              f"{below.regime} -> {above.regime}")


if __name__ == "__main__":
    main()
