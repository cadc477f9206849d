"""Backend selection for the hot kernels.

The compiled ``_kernels`` extension is used when it imported successfully,
unless ``PLAUSIBILITY_PURE=1`` is set. Inputs that do not fit its 64-bit
representation are routed to the pure-Python twin automatically, so results
never depend on the backend.
"""

import math
import os

from . import _kernels_py as pure

compiled = None
if os.environ.get("PLAUSIBILITY_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as compiled
    except ImportError:  # extension not built
        compiled = None

BACKEND = "cython" if compiled is not None else "python"

_U64 = 1 << 64
_I64_LO, _I64_HI = -(1 << 63), (1 << 63) - 1


def subset_matrix(masks):
    if compiled is not None and all(0 <= m < _U64 for m in masks):
        return compiled.subset_matrix(masks)
    return pure.subset_matrix(masks)


def closure(weak_base, strict_base):
    if compiled is not None:
        return compiled.closure(weak_base, strict_base)
    return pure.closure(weak_base, strict_base)


def measure_relation(values):
    """Values may be Fractions; they are scaled to a common denominator first."""
    if compiled is not None:
        den = 1
        for v in values:
            d = getattr(v, "denominator", 1)
            den = den * d // math.gcd(den, d)
        ints = [int(v * den) for v in values]
        if all(_I64_LO <= x <= _I64_HI for x in ints):
            return compiled.measure_relation(ints)
    return pure.measure_relation(values)


def pivot(rows, r, c):
    if compiled is not None:
        return compiled.pivot(rows, r, c)
    return pure.pivot(rows, r, c)

