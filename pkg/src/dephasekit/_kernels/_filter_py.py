"""Pure-numpy evaluation of the pulse-sequence filter function.

Reference implementation used when the compiled extension is unavailable
(or forced via DEPHASEKIT_FORCE_FALLBACK=1).  Semantics are identical to
``_filter_cy``: both evaluate

    F(x) = 1/2 | -1 + (-1)^n e^{ix} + 2 sum_j (-1)^{j+1} e^{i x s_j} |^2

for normalized pulse positions 0 < s_1 < ... < s_n < 1, which is the
expansion of the alternating-sign sum over free-evolution intervals with
boundary times 0 and 1.
"""
from __future__ import annotations

import numpy as np

BACKEND = "numpy"


def filter_grid(fractions, x) -> np.ndarray:
    """Evaluate the generic filter function on an array of x = omega*t values.

    Parameters
    ----------
    fractions : float array, shape (n,)
        Normalized pulse times, strictly increasing in (0, 1).
    x : float scalar or array
        Dimensionless evaluation points, x >= 0.
    """
    x = np.asarray(x, dtype=np.float64)
    fr = np.ascontiguousarray(fractions, dtype=np.float64)
    n = fr.shape[0]
    if n == 0:
        return 2.0 * np.sin(0.5 * x) ** 2

    end_sign = -1.0 if n % 2 else 1.0
    re = end_sign * np.cos(x) - 1.0
    im = end_sign * np.sin(x)
    sign = 2.0
    for s in fr:
        xs = x * s
        re += sign * np.cos(xs)
        im += sign * np.sin(xs)
        sign = -sign
    return 0.5 * (re * re + im * im)
