"""Points of the extended complex plane and their JSON form."""
from __future__ import annotations

import json
import math

import numpy as np

from .errors import ConfigInvalid

INF = complex(math.inf, 0.0)


def is_inf(a) -> bool:
    if a is None:
        return True
    if isinstance(a, str):
        return a.strip().lower() in ("inf", "infinity", "oo")
    return bool(np.isinf(abs(complex(a))))


def as_point(a) -> complex:
    """Normalise a pole/point to a Python complex (``INF`` for infinity)."""
    if is_inf(a):
        return INF
    return complex(a)


def parse_point(obj) -> complex:
    """Parse ``[re, im]``, a real number, or the string ``"inf"``."""
    if isinstance(obj, str):
        if is_inf(obj):
            return INF
        if obj.strip().startswith("["):
            try:
                return parse_point(json.loads(obj))
            except json.JSONDecodeError as exc:
                raise ConfigInvalid(f"cannot parse point {obj!r}") from exc
        try:
            return complex(obj.replace(" ", "").replace("i", "j"))
        except ValueError as exc:
            raise ConfigInvalid(f"cannot parse point {obj!r}") from exc
    if isinstance(obj, (list, tuple)):
        if len(obj) != 2:
            raise ConfigInvalid(f"complex numbers are [re, im] pairs, got {obj!r}")
        return complex(float(obj[0]), float(obj[1]))
    if isinstance(obj, (int, float, complex)):
        return complex(obj)
    raise ConfigInvalid(f"cannot parse point {obj!r}")


def point_to_json(a):
    a = as_point(a)
    if is_inf(a):
        return "inf"
    return [a.real, a.imag]


def double_factorial_odd(k: int) -> int:
    """(2k-1)!! = 1*3*...*(2k-1); equals 1 for k = 0."""
    out = 1
    for j in range(1, 2 * k, 2):
        out *= j
    return out
