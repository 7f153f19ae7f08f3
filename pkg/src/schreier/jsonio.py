"""Canonical serialization helpers shared by the CLI and reports.

Rationals serialize as "p/q" strings, never floats; approximate values
carry an explicit error-bound field.
"""

from __future__ import annotations

import json
from fractions import Fraction


def frac_str(v) -> str:
    v = Fraction(v)
    return f"{v.numerator}/{v.denominator}"


def value_json(v, error_bound: float | None = None) -> dict:
    if isinstance(v, Fraction) or isinstance(v, int):
        return {"exact": frac_str(v)}
    out = {"approx": repr(float(v))}
    if error_bound is not None:
        out["error_bound"] = repr(float(error_bound))
    return out


def canonical(obj) -> str:
    """Deterministic JSON text: sorted keys, stable separators."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def parse_arg_json(text: str):
    """Inline JSON, or @path to read it from a file."""
    if text.startswith("@"):
        with open(text[1:], "r", encoding="utf-8") as fh:
            return json.load(fh)
    return json.loads(text)
