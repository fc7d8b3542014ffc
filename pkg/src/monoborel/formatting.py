"""Deterministic JSON rendering with 17 significant digits for floats."""

from __future__ import annotations

import json
import math

from .series import fmt_float


def _render(obj) -> str:
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return json.dumps(str(obj))
        return fmt_float(obj) if obj != int(obj) or abs(obj) >= 1e17 else f"{obj:.1f}"
    if isinstance(obj, complex):
        return _render([obj.real, obj.imag])
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_render(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_render(v) for v in obj) + "]"
    if hasattr(obj, "item"):
        return _render(obj.item())
    raise TypeError(f"cannot render {type(obj).__name__}")


def dumps(obj) -> str:
    return _render(obj)


def complex_pairs(values):
    return [[float(complex(z).real), float(complex(z).imag)] for z in values]
