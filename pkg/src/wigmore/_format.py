"""Number formatting shared by reports, sweeps and the command line."""

from __future__ import annotations

import math


def fmt12(x: float) -> str:
    """12 significant digits; infinities spelled out, never 'nan'."""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):  # no code path should produce one; fail loudly
        raise ValueError("refusing to format NaN")
    return f"{x:.12g}"


def json_number(x: float):
    """JSON-safe value: infinities become the strings 'inf' / '-inf'."""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(fmt12(x))
