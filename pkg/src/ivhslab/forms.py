"""Homogeneous ternary forms with dense coefficient vectors.

Monomials of degree m are ordered graded-lex with X > Y > Z, i.e. by
descending X-exponent, then descending Y-exponent.  The coefficient vector
of a form lists all binom(m+2, 2) monomials in that order, so linear
algebra on spaces of forms is plain row manipulation.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

from .errors import DegreeMismatch, FieldMismatch
from .field import FieldCtx

VARS = ("X", "Y", "Z")


def dim_forms(m: int) -> int:
    """Dimension of the space of ternary forms of degree m."""
    if m < 0:
        return 0
    return (m + 1) * (m + 2) // 2


@functools.lru_cache(maxsize=None)
def monomials(m: int) -> tuple[tuple[int, int, int], ...]:
    out = []
    for a in range(m, -1, -1):
        for b in range(m - a, -1, -1):
            out.append((a, b, m - a - b))
    return tuple(out)


def monomial_index(m: int, exps) -> int:
    a, b, c = exps
    if a < 0 or b < 0 or c < 0 or a + b + c != m:
        raise ValueError(f"not a degree-{m} exponent triple: {exps}")
    # rows for X-exponents m..a+1, then offset within the block
    return (m - a) * (m - a + 1) // 2 + (m - a - b)


@dataclass(frozen=True)
class Form:
    ctx: FieldCtx
    degree: int
    coeffs: tuple  # dense, canonical, length dim_forms(degree)

    def __post_init__(self):
        if len(self.coeffs) != dim_forms(self.degree):
            raise ValueError("coefficient vector has wrong length")

    @classmethod
    def make(cls, ctx: FieldCtx, degree: int, entries) -> "Form":
        """Build from a dense sequence or a {(a,b,c): coeff} mapping."""
        n = dim_forms(degree)
        if isinstance(entries, dict):
            vec = [ctx.zero()] * n
            for exps, c in entries.items():
                vec[monomial_index(degree, exps)] = ctx.element(c)
        else:
            vec = [ctx.element(c) for c in entries]
            if len(vec) != n:
                raise ValueError("dense coefficient sequence has wrong length")
        return cls(ctx, degree, tuple(vec))

    @classmethod
    def zero(cls, ctx: FieldCtx, degree: int) -> "Form":
        return cls(ctx, degree, (ctx.zero(),) * dim_forms(degree))

    @classmethod
    def monomial(cls, ctx: FieldCtx, exps, coeff=1) -> "Form":
        d = sum(exps)
        return cls.make(ctx, d, {tuple(exps): coeff})

    def is_zero(self) -> bool:
        return all(self.ctx.is_zero(c) for c in self.coeffs)

    def coeff(self, exps):
        return self.coeffs[monomial_index(self.degree, exps)]

    def _check(self, other: "Form"):
        if self.ctx != other.ctx:
            raise FieldMismatch("forms over different contexts")

    def __add__(self, other: "Form") -> "Form":
        self._check(other)
        if self.degree != other.degree:
            raise DegreeMismatch("cannot add forms of different degrees")
        ctx = self.ctx
        return Form(ctx, self.degree,
                    tuple(ctx.add(a, b) for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "Form") -> "Form":
        self._check(other)
        if self.degree != other.degree:
            raise DegreeMismatch("cannot subtract forms of different degrees")
        ctx = self.ctx
        return Form(ctx, self.degree,
                    tuple(ctx.sub(a, b) for a, b in zip(self.coeffs, other.coeffs)))

    def scale(self, c) -> "Form":
        ctx = self.ctx
        c = ctx.element(c)
        return Form(ctx, self.degree, tuple(ctx.mul(c, v) for v in self.coeffs))

    def lift(self, ctx: FieldCtx) -> "Form":
        """Embed a prime-field form into an extension of the same field."""
        if ctx == self.ctx:
            return self
        if self.ctx.k != 1 or ctx.p != self.ctx.p:
            raise FieldMismatch("lift requires an extension of the base field")
        return Form(ctx, self.degree, tuple(ctx.embed(c) for c in self.coeffs))

    def to_records(self) -> list:
        out = []
        for exps, c in zip(monomials(self.degree), self.coeffs):
            if not self.ctx.is_zero(c):
                out.append([exps[0], exps[1], exps[2], self.ctx.elem_to_jsonable(c)])
        return out

    @classmethod
    def from_records(cls, ctx: FieldCtx, degree: int, records) -> "Form":
        vec = [ctx.zero()] * dim_forms(degree)
        for e1, e2, e3, c in records:
            vec[monomial_index(degree, (e1, e2, e3))] = ctx.elem_from_jsonable(c)
        return cls(ctx, degree, tuple(vec))

    def __str__(self) -> str:
        terms = []
        for exps, c in zip(monomials(self.degree), self.coeffs):
            if self.ctx.is_zero(c):
                continue
            mono = "*".join(f"{v}^{e}" if e > 1 else v
                            for v, e in zip(VARS, exps) if e > 0) or "1"
            terms.append(f"{c}*{mono}" if self.ctx.k == 1 else f"({c})*{mono}")
        return " + ".join(terms) if terms else "0"


def multiply(f: Form, g: Form) -> Form:
    f._check(g)
    ctx = f.ctx
    d = f.degree + g.degree
    vec = [ctx.zero()] * dim_forms(d)
    gm = monomials(g.degree)
    for ef, cf in zip(monomials(f.degree), f.coeffs):
        if ctx.is_zero(cf):
            continue
        for eg, cg in zip(gm, g.coeffs):
            if ctx.is_zero(cg):
                continue
            idx = monomial_index(d, (ef[0] + eg[0], ef[1] + eg[1], ef[2] + eg[2]))
            vec[idx] = ctx.add(vec[idx], ctx.mul(cf, cg))
    return Form(ctx, d, tuple(vec))


def partial(f: Form, var: int) -> Form:
    """Formal partial derivative with respect to X, Y or Z (var = 0, 1, 2)."""
    if var not in (0, 1, 2):
        raise ValueError("var must be 0, 1 or 2")
    ctx = f.ctx
    if f.degree == 0:
        return Form.zero(ctx, 0)
    d = f.degree - 1
    vec = [ctx.zero()] * dim_forms(d)
    for exps, c in zip(monomials(f.degree), f.coeffs):
        e = exps[var]
        if e == 0 or ctx.is_zero(c):
            continue
        shifted = list(exps)
        shifted[var] -= 1
        vec[monomial_index(d, shifted)] = ctx.scale(e, c)
    return Form(ctx, d, tuple(vec))


def gradient(f: Form) -> tuple[Form, Form, Form]:
    return (partial(f, 0), partial(f, 1), partial(f, 2))


def evaluate(f: Form, coords, ctx: FieldCtx | None = None):
    """Value at a point; coords may live in an extension of f's field."""
    ctx = ctx or f.ctx
    mixed = ctx != f.ctx
    if mixed and (f.ctx.k != 1 or ctx.p != f.ctx.p):
        raise FieldMismatch("evaluate: incompatible contexts")
    x, y, z = (ctx.element(c) if isinstance(c, (int, tuple, list)) else c
               for c in coords)
    d = f.degree
    xp = _pow_table(ctx, x, d)
    yp = _pow_table(ctx, y, d)
    zp = _pow_table(ctx, z, d)
    acc = ctx.zero()
    for exps, c in zip(monomials(d), f.coeffs):
        if f.ctx.is_zero(c):
            continue
        mono = ctx.mul(ctx.mul(xp[exps[0]], yp[exps[1]]), zp[exps[2]])
        acc = ctx.add(acc, ctx.scale(c, mono) if mixed else ctx.mul(c, mono))
    return acc


def _pow_table(ctx: FieldCtx, v, n: int) -> list:
    out = [ctx.one()]
    for _ in range(n):
        out.append(ctx.mul(out[-1], v))
    return out


def compose_linear(f: Form, mat) -> Form:
    """Substitute (X, Y, Z) -> M·(X, Y, Z) for a 3x3 matrix over f's field.

    The result is f after the linear change of coordinates given row-wise
    by ``mat``.
    """
    ctx = f.ctx
    d = f.degree
    lins = []
    for i in range(3):
        row = mat[i]
        if len(row) != 3:
            raise ValueError("mat must be 3x3")
        lins.append(Form.make(ctx, 1, {(1, 0, 0): row[0],
                                       (0, 1, 0): row[1],
                                       (0, 0, 1): row[2]}))
    # powers of each substituted variable, computed once
    pows = []
    for lin in lins:
        cur = [Form.make(ctx, 0, [1])]
        for _ in range(d):
            cur.append(multiply(cur[-1], lin))
        pows.append(cur)
    out = Form.zero(ctx, d)
    for exps, c in zip(monomials(d), f.coeffs):
        if ctx.is_zero(c):
            continue
        term = multiply(multiply(pows[0][exps[0]], pows[1][exps[1]]),
                        pows[2][exps[2]])
        out = out + term.scale(c)
    return out


def scatter_multiples(f: Form, shift: int, buf, cols: int, row_start: int) -> int:
    """Write the coefficient rows of (each degree-shift monomial) * f into a
    flat row-major prime-field buffer; returns the number of rows written.

    cols must equal dim_forms(f.degree + shift).
    """
    d = f.degree
    recs = [(e, c) for e, c in zip(monomials(d), f.coeffs) if c]
    target = d + shift
    for r, mono in enumerate(monomials(shift)):
        base = (row_start + r) * cols
        for (a, b, c), v in recs:
            col = monomial_index(target, (a + mono[0], b + mono[1], c + mono[2]))
            buf[base + col] = v
    return dim_forms(shift)


def random_form(ctx: FieldCtx, degree: int, rng) -> Form:
    """Uniformly random nonzero form of the given degree."""
    n = dim_forms(degree)
    while True:
        vec = [ctx.random_element(rng) for _ in range(n)]
        f = Form(ctx, degree, tuple(vec))
        if not f.is_zero():
            return f
