"""Triplet files and number formatting.

A triplet file is JSON::

    {"observables": [{"bias": 0, "bloch": [1, 0, 0]}, ...]}

Floats are written with 17 significant digits so a dump/load round trip is
exact.
"""
from __future__ import annotations

import json
from pathlib import Path

from .errors import InvalidObservable, ParseError
from .qubit import Observable, Triplet


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def fmt_vec(v) -> str:
    return "[" + ", ".join(fmt(c) for c in v) + "]"


def triplet_to_text(t: Triplet) -> str:
    rows = [f'    {{"bias": {fmt(o.bias)}, "bloch": {fmt_vec(o.bloch)}}}' for o in t]
    return '{\n  "observables": [\n' + ",\n".join(rows) + "\n  ]\n}\n"


def triplet_from_text(text: str) -> Triplet:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or not isinstance(data.get("observables"), list):
        raise ParseError('expected an object with an "observables" list')
    entries = data["observables"]
    if len(entries) != 3:
        raise ParseError(f"expected exactly three observables, got {len(entries)}")
    obs = []
    for i, e in enumerate(entries):
        if not isinstance(e, dict) or "bloch" not in e:
            raise ParseError(f"observable {i + 1}: expected {{bias, bloch}}")
        bias, bloch = e.get("bias", 0.0), e["bloch"]
        if isinstance(bias, bool) or not isinstance(bias, (int, float)):
            raise ParseError(f"observable {i + 1}: bias must be a number")
        if (not isinstance(bloch, list) or len(bloch) != 3
                or any(isinstance(c, bool) or not isinstance(c, (int, float)) for c in bloch)):
            raise ParseError(f"observable {i + 1}: bloch must be three numbers")
        try:
            obs.append(Observable(float(bias), [float(c) for c in bloch]))
        except InvalidObservable as exc:
            raise InvalidObservable(f"observable {i + 1}: {exc}") from exc
    return Triplet(tuple(obs))


def load_triplet(path) -> Triplet:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    return triplet_from_text(text)


def save_triplet(t: Triplet, path) -> None:
    Path(path).write_text(triplet_to_text(t))
