"""Backend selection for the hot loops.

The compiled extension ``hitlab._kernels`` is used when it imports; the
pure-Python module ``hitlab._kernels_py`` implements the same functions and
is the fallback. Setting ``HITLAB_PURE=1`` forces the fallback.

Torus walks use 128-bit wraparound fixed point: a position on the circle is
stored as ``round(p * 2**128) mod 2**128``.
"""
from __future__ import annotations

import os

from . import _kernels_py

FOUND, HORIZON, AMBIGUOUS = 0, 1, 2
ONE = 1 << 128

try:
    if os.environ.get("HITLAB_PURE"):
        raise ImportError("pure backend requested")
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

BACKENDS = {"python": _kernels_py}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled
DEFAULT = "compiled" if _compiled is not None else "python"


def get(name: str | None = None):
    """Kernel module by name (``"compiled"`` or ``"python"``); None picks the default."""
    name = name or DEFAULT
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}") from None


def _round_div(num: int, den: int) -> int:
    return (2 * num + den) // (2 * den)


def encode(circ, t: int) -> int:
    """Fixed-point position of ``circ`` at time ``t`` (error <= 1/2 ulp)."""
    return _round_div(circ.pos(t) << 128, circ.L) % ONE


def shift(circ, m: int) -> int:
    """Fixed-point displacement after ``m`` steps (error <= 1/2 ulp)."""
    return _round_div(((m * circ.A) % circ.L) << 128, circ.L) % ONE


def window(W: int, L: int) -> tuple[int, int]:
    """``(floor, ceil)`` of the window width ``W/L`` in fixed point."""
    lo = (W << 128) // L
    hi = -((-(W << 128)) // L)
    return lo, hi
