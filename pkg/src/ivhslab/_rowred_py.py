"""Pure Python twin of the C row-reduction kernel.

Same contract as ``_rowred``: flat row-major mutable buffers of residues,
first-nonzero pivoting, RREF with unit pivots.  Used when the extension is
unavailable and as the independent reference in tests.  Unlike the C kernel
this path accepts any prime, including p = 2.
"""

from __future__ import annotations


def rank(buf, rows: int, cols: int, p: int) -> int:
    return _eliminate(buf, rows, cols, p, full=False)


def rref(buf, rows: int, cols: int, p: int) -> int:
    return _eliminate(buf, rows, cols, p, full=True)


def _eliminate(buf, rows, cols, p, full):
    if rows * cols != len(buf):
        raise ValueError("buffer does not match rows*cols")
    pivcols = []
    cur = 0
    for col in range(cols):
        if cur == rows:
            break
        piv = -1
        for r in range(cur, rows):
            if buf[r * cols + col]:
                piv = r
                break
        if piv < 0:
            continue
        if piv != cur:
            for j in range(cols):
                buf[cur * cols + j], buf[piv * cols + j] = (
                    buf[piv * cols + j],
                    buf[cur * cols + j],
                )
        inv = pow(buf[cur * cols + col], p - 2, p)
        base = cur * cols
        for r in range(cur + 1, rows):
            off = r * cols
            f = buf[off + col]
            if not f:
                continue
            f = f * inv % p
            buf[off + col] = 0
            for j in range(col + 1, cols):
                v = buf[base + j]
                if v:
                    buf[off + j] = (buf[off + j] - f * v) % p
        pivcols.append(col)
        cur += 1
    if full:
        for i in range(cur - 1, -1, -1):
            col = pivcols[i]
            base = i * cols
            inv = pow(buf[base + col], p - 2, p)
            for j in range(col, cols):
                if buf[base + j]:
                    buf[base + j] = buf[base + j] * inv % p
            for r in range(i):
                off = r * cols
                f = buf[off + col]
                if not f:
                    continue
                buf[off + col] = 0
                for j in range(col + 1, cols):
                    v = buf[base + j]
                    if v:
                        buf[off + j] = (buf[off + j] - f * v) % p
    return cur
