"""Hot integer kernels with a compiled core and a pure-Python fallback.

The compiled extension is used when it imported cleanly and
``CAPKERNEL_PURE`` is not set in the environment.  Calls that overflow the
compiled int64 path are retried transparently on Python integers.
"""

import os

from . import _pure

try:
    if os.environ.get("CAPKERNEL_PURE"):
        raise ImportError("pure kernels forced by CAPKERNEL_PURE")
    from . import _ckernels as _compiled
except ImportError:
    _compiled = None

BACKEND = "compiled" if _compiled is not None else "pure"


def hnf(M, ncols):
    if _compiled is not None and M:
        try:
            return _compiled.hnf(M, ncols)
        except OverflowError:
            pass
    return _pure.hnf(M, ncols)


def snf(M, ncols):
    if _compiled is not None and M and ncols:
        try:
            return _compiled.snf(M, ncols)
        except OverflowError:
            pass
    return _pure.snf(M, ncols)


def smooth_norms_in_box(regrep, height, primes):
    if _compiled is not None:
        try:
            return _compiled.smooth_norms_in_box(regrep, height, primes)
        except OverflowError:
            pass
    return _pure.smooth_norms_in_box(regrep, height, primes)


def set_max_bits(bits):
    """Set the bit-length ceiling for the pure path (0 disables it)."""
    _pure.MAX_BITS = int(bits)
