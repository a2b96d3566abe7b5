"""Projective point configurations and their linear systems of forms.

A point is stored with its first nonzero coordinate scaled to one, so
equality of points is equality of tuples.  Vanishing conditions (plain or
to second order) become rows of an exact matrix over the point's field,
and complete linear systems are kernels of those matrices.

``intersection_points`` computes the full transverse intersection of two
plane curves over a prime field by projecting to one coordinate: a random
change of coordinates, a resultant computed by evaluation and Lagrange
interpolation, and root extraction over a single explicit extension field
that splits the resultant.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from math import lcm

from .errors import (CommonComponent, FieldMismatch, NonTransverse,
                     SplittingTooLarge, ZeroPoint)
from .field import (FieldCtx, UniPoly, find_roots, irreducible_factors,
                    make_extension, make_prime_field, resultant)
from .forms import Form, compose_linear, dim_forms, evaluate, monomials
from .linalg import Matrix, Subspace, kernel, random_invertible

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Point:
    ctx: FieldCtx
    coords: tuple  # length 3, canonical, first nonzero coordinate = 1

    @classmethod
    def make(cls, ctx: FieldCtx, coords) -> "Point":
        if len(coords) != 3:
            raise ValueError("projective plane points need 3 coordinates")
        vec = [ctx.element(c) for c in coords]
        lead = next((i for i, v in enumerate(vec) if not ctx.is_zero(v)), None)
        if lead is None:
            raise ZeroPoint("all coordinates vanish")
        inv = ctx.inv(vec[lead])
        vec = [ctx.mul(inv, v) for v in vec]
        return cls(ctx, tuple(vec))

    def embed_into(self, ctx: FieldCtx) -> "Point":
        if ctx == self.ctx:
            return self
        if self.ctx.k != 1 or ctx.p != self.ctx.p:
            raise FieldMismatch("can only embed prime-field points")
        return Point(ctx, tuple(ctx.embed(c) for c in self.coords))

    def to_jsonable(self) -> list:
        return [self.ctx.elem_to_jsonable(c) for c in self.coords]

    @classmethod
    def from_jsonable(cls, ctx: FieldCtx, data) -> "Point":
        return cls.make(ctx, [ctx.elem_from_jsonable(c) for c in data])


@dataclass(frozen=True)
class PointConfig:
    ctx: FieldCtx
    points: tuple

    @classmethod
    def make(cls, ctx: FieldCtx, points) -> "PointConfig":
        pts = tuple(points)
        for pt in pts:
            if pt.ctx != ctx:
                raise FieldMismatch("point over a different context")
        if len(set(pts)) != len(pts):
            raise ValueError("duplicate points in configuration")
        return cls(ctx, pts)

    @classmethod
    def empty(cls, ctx: FieldCtx) -> "PointConfig":
        return cls(ctx, ())

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def embed_into(self, ctx: FieldCtx) -> "PointConfig":
        return PointConfig(ctx, tuple(pt.embed_into(ctx) for pt in self.points))

    def union(self, other: "PointConfig") -> "PointConfig":
        return PointConfig.make(self.ctx, self.points + other.points)


def _point_rows(pt: Point, m: int, order: int) -> list:
    ctx = pt.ctx
    pows = []
    for c in pt.coords:
        tab = [ctx.one()]
        for _ in range(m):
            tab.append(ctx.mul(tab[-1], c))
        pows.append(tab)
    mons = monomials(m)
    rows = [[ctx.mul(ctx.mul(pows[0][a], pows[1][b]), pows[2][c])
             for a, b, c in mons]]
    if order == 2:
        for var in range(3):
            row = []
            for exps in mons:
                e = exps[var]
                if e == 0:
                    row.append(ctx.zero())
                    continue
                shifted = list(exps)
                shifted[var] -= 1
                v = ctx.mul(ctx.mul(pows[0][shifted[0]], pows[1][shifted[1]]),
                            pows[2][shifted[2]])
                row.append(ctx.scale(e, v))
            rows.append(row)
    return rows


def vanishing_matrix(cfg: PointConfig, m: int, order: int = 1) -> Matrix:
    """Condition matrix on degree-m forms: value rows, plus gradient rows
    when order is 2."""
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    rows = []
    for pt in cfg:
        rows.extend(_point_rows(pt, m, order))
    return Matrix.make(cfg.ctx, rows, dim_forms(m))


@dataclass(frozen=True)
class LinSys:
    """Forms of a fixed degree subject to the vanishing conditions."""

    config: PointConfig
    degree: int
    order: int
    space: Subspace

    @property
    def dim(self) -> int:
        return self.space.dim

    def forms(self) -> tuple:
        return tuple(Form(self.space.ctx, self.degree, row)
                     for row in self.space.basis)


def linsys(cfg: PointConfig, m: int, order: int = 1) -> LinSys:
    ker = kernel(vanishing_matrix(cfg, m, order))
    return LinSys(cfg, m, order, ker)


def rational_linsys(cfg: PointConfig, m: int, order: int = 1) -> LinSys:
    """Forms with prime-field coefficients satisfying the conditions.

    Each extension-entry condition row is split into k prime-field rows
    (its power-basis coordinates), so the kernel stays on the fast
    prime-field path.  When the configuration is stable under the
    Frobenius of its field of definition, restricting to prime-field
    coefficients loses nothing: the conjugation-permuted conditions span
    the same row space, whose kernel then has a full basis of fixed
    vectors.  For an unstable configuration this computes the smaller
    space of prime-coefficient forms through all listed points.
    """
    if cfg.ctx.k == 1:
        return linsys(cfg, m, order)
    vm = vanishing_matrix(cfg, m, order)
    rows = []
    for r in range(vm.nrows):
        row = vm.row(r)
        for i in range(cfg.ctx.k):
            rows.append([v[i] for v in row])
    pctx = make_prime_field(cfg.ctx.p)
    ker = kernel(Matrix.make(pctx, rows, dim_forms(m)))
    return LinSys(cfg, m, order, ker)


# -- transverse intersections ---------------------------------------------


def _apply_mat(ctx: FieldCtx, m, vec):
    return tuple(
        ctx.add(ctx.add(ctx.mul(m[i][0], vec[0]), ctx.mul(m[i][1], vec[1])),
                ctx.mul(m[i][2], vec[2]))
        for i in range(3))


def _line_at_infinity_poly(f: Form) -> UniPoly:
    # f restricted to z = 0, dehomogenized at y = 1
    ctx = f.ctx
    d = f.degree
    coeffs = [ctx.zero()] * (d + 1)
    for a in range(d + 1):
        coeffs[a] = f.coeff((a, d - a, 0))
    return UniPoly.make(ctx, coeffs)


def _shares_infinity(g1: Form, g2: Form) -> bool:
    u1 = _line_at_infinity_poly(g1)
    u2 = _line_at_infinity_poly(g2)
    if u1.is_zero() or u2.is_zero():
        return True
    if u1.gcd(u2).degree >= 1:
        return True
    ctx = g1.ctx
    c1 = g1.coeff((g1.degree, 0, 0))
    c2 = g2.coeff((g2.degree, 0, 0))
    return ctx.is_zero(c1) and ctx.is_zero(c2)


def _y_coefficient_polys(g: Form) -> list:
    """g(x, y, 1) collected as coefficient polynomials of the powers of y."""
    ctx = g.ctx
    d = g.degree
    out = [[ctx.zero()] * (d + 1) for _ in range(d + 1)]
    for (a, b, c), v in zip(monomials(d), g.coeffs):
        out[b][a] = ctx.add(out[b][a], v)
    return [UniPoly.make(ctx, row) for row in out]


def _resultant_in_y(g1: Form, g2: Form) -> UniPoly:
    """Res_y(g1(x, y, 1), g2(x, y, 1)) by evaluation and interpolation.

    Requires the top y-coefficients of both forms to be nonzero constants,
    which the caller arranges by keeping (0:1:0) off both curves.
    """
    ctx = g1.ctx
    d1, d2 = g1.degree, g2.degree
    big = d1 * d2
    c1 = _y_coefficient_polys(g1)
    c2 = _y_coefficient_polys(g2)
    xs = list(range(big + 1))
    vals = []
    for x0 in xs:
        u1 = UniPoly.make(ctx, [cp.evaluate(x0) for cp in c1])
        u2 = UniPoly.make(ctx, [cp.evaluate(x0) for cp in c2])
        vals.append(resultant(u1, u2))
    return _lagrange(ctx, xs, vals)


def _lagrange(ctx: FieldCtx, xs, vals) -> UniPoly:
    full = UniPoly.make(ctx, [ctx.one()])
    for x0 in xs:
        full = full * UniPoly.make(ctx, [ctx.neg(ctx.element(x0)), ctx.one()])
    acc = UniPoly.make(ctx, [])
    for x0, v in zip(xs, vals):
        if ctx.is_zero(v):
            continue
        lin = UniPoly.make(ctx, [ctx.neg(ctx.element(x0)), ctx.one()])
        basis = full // lin
        denom = basis.evaluate(x0)
        acc = acc + basis * UniPoly.make(ctx, [ctx.mul(v, ctx.inv(denom))])
    return acc


def intersection_points(f1: Form, f2: Form, seed: int = 0,
                        max_retries: int = 24,
                        degree_cap: int = 64) -> PointConfig:
    """All intersection points of two curves meeting transversally.

    Returns exactly deg(f1)*deg(f2) distinct points over one explicit
    extension of the base prime field (the splitting field of the
    projected resultant).  Raises CommonComponent when the curves share a
    factor, NonTransverse when repeated retries cannot produce a
    squarefree resultant, and SplittingTooLarge when the splitting field
    degree exceeds the cap; in that case the caller should resample its
    input pencil, since the orbit structure does not depend on the
    coordinate change.
    """
    if f1.ctx != f2.ctx:
        raise FieldMismatch("curves over different contexts")
    ctx = f1.ctx
    if ctx.k != 1:
        raise FieldMismatch("intersection points need prime-field curves")
    if f1.is_zero() or f2.is_zero():
        raise ValueError("zero form has no well-defined curve")
    d1, d2 = f1.degree, f2.degree
    if d1 < 1 or d2 < 1:
        raise ValueError("constant forms cut out no curve")
    big = d1 * d2
    if ctx.p <= big:
        raise ValueError("prime too small to interpolate the resultant")
    rng = random.Random(seed)
    for attempt in range(max_retries):
        mat = random_invertible(ctx, 3, rng)
        g1 = compose_linear(f1, mat)
        g2 = compose_linear(f2, mat)
        if ctx.is_zero(g1.coeff((0, d1, 0))) or ctx.is_zero(g2.coeff((0, d2, 0))):
            continue
        res = _resultant_in_y(g1, g2)
        if res.is_zero():
            # with (0:1:0) off both curves any common factor has positive
            # y-degree, so a vanishing resultant is conclusive
            raise CommonComponent("curves share a component")
        if _shares_infinity(g1, g2):
            continue
        if res.degree != big:
            continue
        if res.gcd(res.derivative()).degree != 0:
            # tangency, or two points projecting to the same x
            continue
        factors = irreducible_factors(res, seed=rng.randrange(1 << 30))
        degs = [f.degree for f in factors]
        e_max = max(degs)
        kdeg = lcm(*degs)
        if kdeg > degree_cap:
            raise SplittingTooLarge(
                f"splitting field degree {kdeg} exceeds cap {degree_cap}")
        if kdeg == 1:
            ext = ctx
        elif kdeg == e_max:
            # a largest factor is itself a modulus for the splitting field
            modulus = max(factors, key=lambda f: (f.degree, f.coeffs))
            ext = FieldCtx(ctx.p, e_max, tuple(modulus.monic().coeffs))
        else:
            ext = make_extension(ctx, kdeg, seed=rng.randrange(1 << 30))
        roots = find_roots(res, ext, seed=rng.randrange(1 << 30))
        c1 = [cp.lift(ext) for cp in _y_coefficient_polys(g1)]
        c2 = [cp.lift(ext) for cp in _y_coefficient_polys(g2)]
        pts = []
        ok = True
        for xi, mult in roots:
            if mult != 1:
                ok = False
                break
            u1 = UniPoly.make(ext, [cp.evaluate(xi) for cp in c1])
            u2 = UniPoly.make(ext, [cp.evaluate(xi) for cp in c2])
            h = u1.gcd(u2)
            if h.degree != 1:
                ok = False
                break
            y = ext.neg(h.coeffs[0])
            orig = _apply_mat(ext, [[ext.embed(v) for v in row] for row in mat],
                              (xi, y, ext.one()))
            pts.append(Point.make(ext, orig))
        if not ok:
            continue
        if len(roots) != big or len(set(pts)) != big:
            continue
        for pt in pts:
            if not ext.is_zero(evaluate(f1, pt.coords, ctx=ext)) or \
               not ext.is_zero(evaluate(f2, pt.coords, ctx=ext)):
                raise ArithmeticError("intersection point fails to verify")
        log.debug("intersection split over degree %d after %d attempt(s)",
                  ext.k, attempt + 1)
        return PointConfig.make(ext, pts)
    raise NonTransverse(
        f"no squarefree projection after {max_retries} coordinate changes")
