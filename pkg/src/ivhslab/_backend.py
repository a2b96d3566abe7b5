"""Dispatch between the compiled row-reduction kernel and the Python twin.

The C kernel handles odd primes below 2^62; everything else (p = 2, or a
missing build) falls through to the pure Python implementation, which is
bit-compatible where outputs are canonical.
"""

from __future__ import annotations

from array import array

try:
    from . import _rowred as _c
except ImportError:  # pragma: no cover - depends on build environment
    _c = None

from . import _rowred_py as _py

using_c = _c is not None


def make_buffer(values) -> array:
    return array("Q", values)


def zero_buffer(n: int) -> array:
    return array("Q", bytes(8 * n))


def _pick(p: int):
    if _c is not None and p >= 3 and p & 1 and p < (1 << 62):
        return _c
    return _py


def rank(buf, rows: int, cols: int, p: int) -> int:
    """Rank by forward elimination; the buffer is clobbered."""
    return _pick(p).rank(buf, rows, cols, p)


def rref(buf, rows: int, cols: int, p: int) -> int:
    """In-place reduced row echelon form; returns the rank."""
    return _pick(p).rref(buf, rows, cols, p)
