"""Exact dense linear algebra over FieldCtx fields.

Prime-field matrices run through the row-reduction backend (C kernel when
built); extension fields use a generic elimination with the same pivoting
rule.  RREF output is canonical, so the two paths are interchangeable.
Matrices and subspaces are immutable; every operation returns fresh values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from . import _backend
from .errors import AmbientMismatch, FieldMismatch
from .field import FieldCtx


@dataclass(frozen=True)
class Matrix:
    ctx: FieldCtx
    nrows: int
    ncols: int
    data: tuple  # flat, row-major, canonical elements

    @classmethod
    def make(cls, ctx: FieldCtx, rows, ncols: int | None = None) -> "Matrix":
        rows = [list(r) for r in rows]
        if ncols is None:
            if not rows:
                raise ValueError("ncols required for empty matrices")
            ncols = len(rows[0])
        flat = []
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged rows")
            flat.extend(ctx.element(v) for v in r)
        return cls(ctx, len(rows), ncols, tuple(flat))

    def row(self, i: int) -> tuple:
        return self.data[i * self.ncols : (i + 1) * self.ncols]

    def rows(self):
        return [list(self.row(i)) for i in range(self.nrows)]


class CombineResult(NamedTuple):
    sum_dim: int
    intersection_dim: int


def _prime_buffer(m: Matrix):
    return _backend.make_buffer(m.data)


def rank(m: Matrix) -> int:
    """Rank by exact Gaussian elimination, first-nonzero pivoting."""
    if m.nrows == 0 or m.ncols == 0:
        return 0
    if m.ctx.k == 1:
        return _backend.rank(_prime_buffer(m), m.nrows, m.ncols, m.ctx.p)
    rows = m.rows()
    return _generic_eliminate(rows, m.ncols, m.ctx, full=False)[0]


def rref(m: Matrix) -> tuple[Matrix, tuple[int, ...]]:
    """Reduced row echelon form and its pivot columns (zero rows dropped)."""
    if m.nrows == 0 or m.ncols == 0:
        return Matrix(m.ctx, 0, m.ncols, ()), ()
    if m.ctx.k == 1:
        buf = _prime_buffer(m)
        rk = _backend.rref(buf, m.nrows, m.ncols, m.ctx.p)
        data = tuple(buf[: rk * m.ncols])
        out = Matrix(m.ctx, rk, m.ncols, data)
        return out, _scan_pivots(out)
    rows = m.rows()
    rk, pivots = _generic_eliminate(rows, m.ncols, m.ctx, full=True)
    flat = tuple(v for r in rows[:rk] for v in r)
    return Matrix(m.ctx, rk, m.ncols, flat), tuple(pivots)


def _scan_pivots(m: Matrix) -> tuple[int, ...]:
    ctx = m.ctx
    pivots = []
    j = 0
    for i in range(m.nrows):
        row = m.row(i)
        while j < m.ncols and ctx.is_zero(row[j]):
            j += 1
        pivots.append(j)
        j += 1
    return tuple(pivots)


def _generic_eliminate(rows: list[list], ncols: int, ctx: FieldCtx, full: bool):
    nrows = len(rows)
    pivots = []
    cur = 0
    for col in range(ncols):
        if cur == nrows:
            break
        piv = -1
        for r in range(cur, nrows):
            if not ctx.is_zero(rows[r][col]):
                piv = r
                break
        if piv < 0:
            continue
        rows[cur], rows[piv] = rows[piv], rows[cur]
        inv = ctx.inv(rows[cur][col])
        prow = rows[cur]
        for r in range(cur + 1, nrows):
            row = rows[r]
            f = row[col]
            if ctx.is_zero(f):
                continue
            f = ctx.mul(f, inv)
            row[col] = ctx.zero()
            for j in range(col + 1, ncols):
                v = prow[j]
                if not ctx.is_zero(v):
                    row[j] = ctx.sub(row[j], ctx.mul(f, v))
        pivots.append(col)
        cur += 1
    if full:
        for i in range(cur - 1, -1, -1):
            col = pivots[i]
            prow = rows[i]
            inv = ctx.inv(prow[col])
            for j in range(col, ncols):
                if not ctx.is_zero(prow[j]):
                    prow[j] = ctx.mul(prow[j], inv)
            for r in range(i):
                row = rows[r]
                f = row[col]
                if ctx.is_zero(f):
                    continue
                row[col] = ctx.zero()
                for j in range(col + 1, ncols):
                    v = prow[j]
                    if not ctx.is_zero(v):
                        row[j] = ctx.sub(row[j], ctx.mul(f, v))
    return cur, pivots


@dataclass(frozen=True)
class Subspace:
    """A subspace of ctx^ambient held as a canonical RREF basis."""

    ctx: FieldCtx
    ambient: int
    basis: tuple  # tuple of row tuples, RREF, no zero rows
    pivots: tuple

    @classmethod
    def from_rows(cls, ctx: FieldCtx, ambient: int, rows) -> "Subspace":
        m = Matrix.make(ctx, rows, ambient)
        red, pivots = rref(m)
        rows_out = tuple(red.row(i) for i in range(red.nrows))
        return cls(ctx, ambient, rows_out, pivots)

    @classmethod
    def zero(cls, ctx: FieldCtx, ambient: int) -> "Subspace":
        return cls(ctx, ambient, (), ())

    @property
    def dim(self) -> int:
        return len(self.basis)

    def reduce(self, vec, ctx: FieldCtx | None = None) -> list:
        """Residual of vec after elimination against the basis.

        ``ctx`` may be an extension of this subspace's prime field; basis
        entries are then embedded on the fly.
        """
        ctx = ctx or self.ctx
        mixed = ctx != self.ctx
        if mixed and (self.ctx.k != 1 or ctx.p != self.ctx.p):
            raise FieldMismatch("reduce: incompatible contexts")
        vec = list(vec)
        if len(vec) != self.ambient:
            raise AmbientMismatch("vector length differs from ambient")
        for row, piv in zip(self.basis, self.pivots):
            c = vec[piv]
            if ctx.is_zero(c):
                continue
            if mixed:
                for j in range(piv, self.ambient):
                    v = row[j]
                    if v:
                        vec[j] = ctx.sub(vec[j], ctx.scale(v, c))
            else:
                for j in range(piv, self.ambient):
                    v = row[j]
                    if not ctx.is_zero(v):
                        vec[j] = ctx.sub(vec[j], ctx.mul(c, v))
        return vec

    def contains(self, vec, ctx: FieldCtx | None = None) -> bool:
        ctx = ctx or self.ctx
        return all(ctx.is_zero(v) for v in self.reduce(vec, ctx))


def kernel(m: Matrix) -> Subspace:
    """Right kernel {v : M v = 0} as a canonical subspace."""
    if m.ncols == 0:
        return Subspace.zero(m.ctx, 0)
    if m.nrows == 0:
        eye = [[m.ctx.one() if i == j else m.ctx.zero() for j in range(m.ncols)]
               for i in range(m.ncols)]
        return Subspace(m.ctx, m.ncols, tuple(tuple(r) for r in eye),
                        tuple(range(m.ncols)))
    red, pivots = rref(m)
    ctx = m.ctx
    pivset = set(pivots)
    vecs = []
    for free in range(m.ncols):
        if free in pivset:
            continue
        vec = [ctx.zero()] * m.ncols
        vec[free] = ctx.one()
        for i, pc in enumerate(pivots):
            vec[pc] = ctx.neg(red.data[i * m.ncols + free])
        vecs.append(vec)
    return Subspace.from_rows(ctx, m.ncols, vecs)


def combine_and_rank(a: Subspace, b: Subspace) -> CombineResult:
    """dim(A + B) and dim(A ∩ B) from the rank of the stacked bases."""
    if a.ctx != b.ctx:
        raise FieldMismatch("subspaces over different contexts")
    if a.ambient != b.ambient:
        raise AmbientMismatch("subspaces in different ambient spaces")
    stacked = Matrix.make(a.ctx, list(a.basis) + list(b.basis), a.ambient)
    s = rank(stacked)
    return CombineResult(s, a.dim + b.dim - s)


def rank_rows(ctx: FieldCtx, rows, ncols: int) -> int:
    rows = [list(r) for r in rows]
    if not rows:
        return 0
    if ctx.k == 1:
        buf = _backend.make_buffer([v for r in rows for v in r])
        return _backend.rank(buf, len(rows), ncols, ctx.p)
    return _generic_eliminate(rows, ncols, ctx, full=False)[0]


def residual_rank(sub: Subspace, rows, ctx: FieldCtx) -> int:
    """Rank of rows modulo a subspace (rows may live over an extension)."""
    if ctx == sub.ctx and ctx.k == 1:
        stacked = [list(r) for r in sub.basis] + [list(r) for r in rows]
        return rank_rows(ctx, stacked, sub.ambient) - sub.dim
    residuals = [sub.reduce(r, ctx) for r in rows]
    return rank_rows(ctx, residuals, sub.ambient)


def random_invertible(ctx: FieldCtx, n: int, rng) -> tuple:
    """Uniformly random invertible n x n matrix, as a tuple of row tuples."""
    while True:
        rows = [[ctx.random_element(rng) for _ in range(n)] for _ in range(n)]
        if rank_rows(ctx, [list(r) for r in rows], n) == n:
            return tuple(tuple(r) for r in rows)


def prime_rref_subspace(ctx: FieldCtx, buf, nrows: int, ncols: int) -> Subspace:
    """Row space of a prime-field buffer as a canonical subspace.

    The buffer is reduced in place by the backend; its leading rank rows
    become the basis.
    """
    if ctx.k != 1:
        raise FieldMismatch("buffer subspaces are prime-field only")
    rk = _backend.rref(buf, nrows, ncols, ctx.p)
    basis = []
    pivots = []
    for i in range(rk):
        row = tuple(buf[i * ncols:(i + 1) * ncols])
        basis.append(row)
        pivots.append(next(j for j, v in enumerate(row) if v))
    return Subspace(ctx, ncols, tuple(basis), tuple(pivots))
