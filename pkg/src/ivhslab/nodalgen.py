"""Random plane curves with a chosen number of nodes, plus certificates.

Two samplers cover the full node range.  When the double-point conditions
leave a system of dimension at least two, a candidate of degree d through
n prescribed random points is drawn from the kernel of the order-2
vanishing matrix.  Near the top of the node range that system is empty or
pinned to a single degenerate member, so instead the curve is produced
parametrically: three random functions with bounded pole order on a
hyperelliptic curve of the target geometric genus map it to the plane,
the image equation is the unique degree-d form vanishing on the image,
and the nodes are recovered from the common zeros of the partials (they
may live in an extension field, recorded with the curve).

Either way a curve is accepted only when an exact certificate holds:
every node point is an honest node, the singular scheme cut out by the
partials has length exactly n (so nothing degenerates elsewhere, even
over the algebraic closure), the node set imposes independent conditions
in the two degrees the downstream rank computations rely on, and the
partials admit no syzygy in degree d-2, which in particular rules out
reducible curves.
"""

from __future__ import annotations

import logging
import random
from dataclasses import asdict, dataclass
from math import comb, lcm

from . import _backend
from .errors import (FieldMismatch, GenerationExhausted, NotSingular,
                     NotStabilized, TooManyNodes)
from .field import (FieldCtx, UniPoly, find_roots, irreducible_factors,
                    make_prime_field)
from .forms import (Form, compose_linear, dim_forms, evaluate, gradient,
                    monomials, partial, scatter_multiples)
from .linalg import Matrix, kernel, random_invertible, rank_rows
from .pointsys import (Point, PointConfig, _apply_mat, _resultant_in_y,
                       _y_coefficient_polys, linsys, rational_linsys)

log = logging.getLogger(__name__)


def _second_partials(f: Form):
    gx, gy, gz = gradient(f)
    return ((partial(gx, 0), partial(gx, 1), partial(gx, 2)),
            (partial(gy, 0), partial(gy, 1), partial(gy, 2)),
            (partial(gz, 0), partial(gz, 1), partial(gz, 2)))


def is_node(f: Form, pt: Point) -> bool:
    """True when pt is a singular point of {f = 0} with an order-2 tangent
    cone of two distinct branches, i.e. the 3x3 second-derivative matrix
    has rank exactly 2 there.  Raises NotSingular when the gradient does
    not vanish at pt."""
    ctx = pt.ctx
    for v in range(3):
        if not ctx.is_zero(evaluate(partial(f, v), pt.coords, ctx=ctx)):
            raise NotSingular(f"gradient does not vanish at {pt.coords}")
    hess = [[evaluate(h, pt.coords, ctx=ctx) for h in row]
            for row in _second_partials(f)]
    return rank_rows(ctx, hess, 3) == 2


def _jacobian_rank(f: Form, m: int) -> int:
    """Rank of the degree-m slice of the ideal spanned by the partials."""
    d = f.degree
    shift = m - (d - 1)
    if shift < 0:
        return 0
    cols = dim_forms(m)
    nrows = 3 * dim_forms(shift)
    buf = _backend.zero_buffer(nrows * cols)
    row = 0
    for v in range(3):
        row += scatter_multiples(partial(f, v), shift, buf, cols, row)
    return _backend.rank(buf, nrows, cols, f.ctx.p)


def jacobian_scheme_length(f: Form) -> int:
    """Length of the scheme cut out by the three partial derivatives.

    Probes the Hilbert function in two consecutive large degrees; raises
    NotStabilized when they disagree (the probe degrees sit beyond the
    regularity of any configuration this pipeline accepts, so disagreement
    means a positive-dimensional singular locus or a defective curve).
    """
    if f.ctx.k != 1:
        raise FieldMismatch("scheme length requires a prime-field curve")
    if f.is_zero():
        raise ValueError("zero form")
    d = f.degree
    m = 3 * d
    vals = [dim_forms(mm) - _jacobian_rank(f, mm) for mm in (m, m + 1)]
    if vals[0] != vals[1]:
        raise NotStabilized(
            f"singular-scheme Hilbert probe {vals[0]} vs {vals[1]}")
    return vals[0]


def syzygy_defect(f: Form) -> int:
    """Dimension of the degree-(d-2) syzygies among the partials of f.

    Zero certifies that the Koszul-trivial range is clean; any reducible
    curve G*H carries the cross product of the factor gradients as a
    syzygy in exactly this degree, so a zero defect also certifies
    irreducibility.
    """
    if f.ctx.k != 1:
        raise FieldMismatch("syzygy probe requires a prime-field curve")
    d = f.degree
    shift = d - 2
    target = 2 * d - 3
    cols = dim_forms(target)
    block = dim_forms(shift)
    buf = _backend.zero_buffer(3 * block * cols)
    row = 0
    for v in range(3):
        row += scatter_multiples(partial(f, v), shift, buf, cols, row)
    return 3 * block - _backend.rank(buf, 3 * block, cols, f.ctx.p)


@dataclass(frozen=True)
class Certificate:
    nodes_are_nodes: bool
    scheme_length: int  # -1 when the Hilbert probe failed to stabilize
    scheme_length_ok: bool
    adjoint_dim: int
    adjoint_dim_ok: bool
    syzygy_defect: int
    syzygy_free: bool
    conditions_dim: int
    conditions_ok: bool

    def ok(self) -> bool:
        return (self.nodes_are_nodes and self.scheme_length_ok
                and self.adjoint_dim_ok and self.syzygy_free
                and self.conditions_ok)

    def to_jsonable(self) -> dict:
        return asdict(self)

    @classmethod
    def from_jsonable(cls, data: dict) -> "Certificate":
        return cls(**data)


def certify_form(f: Form, nodes: PointConfig) -> Certificate:
    """Run the full certificate for a candidate curve and node set.

    The curve must have prime-field coefficients; the nodes may live in an
    extension of that field (a Frobenius-stable set, as produced by the
    parametric sampler), in which case the two dimension checks descend to
    the prime field.
    """
    ctx = f.ctx
    if ctx.k != 1:
        raise FieldMismatch("curves are certified over prime fields")
    if nodes.ctx.p != ctx.p:
        raise FieldMismatch("curve and nodes over different characteristics")
    d = f.degree
    n = len(nodes)
    if ctx.p <= 2 * d - 3:
        raise ValueError(f"prime {ctx.p} too small for degree {d}")
    g = comb(d - 1, 2) - n

    nodes_ok = True
    try:
        for pt in nodes:
            if not is_node(f, pt):
                nodes_ok = False
                break
    except NotSingular:
        nodes_ok = False

    try:
        length = jacobian_scheme_length(f)
        length_ok = length == n
    except NotStabilized:
        length, length_ok = -1, False

    adj = rational_linsys(nodes, d - 3).dim
    cond = rational_linsys(nodes, 2 * d - 3).dim
    defect = syzygy_defect(f)
    return Certificate(
        nodes_are_nodes=nodes_ok,
        scheme_length=length,
        scheme_length_ok=length_ok,
        adjoint_dim=adj,
        adjoint_dim_ok=adj == g,
        syzygy_defect=defect,
        syzygy_free=defect == 0,
        conditions_dim=cond,
        conditions_ok=cond == (d - 1) * (2 * d - 1) - n,
    )


@dataclass(frozen=True)
class NodalCurve:
    form: Form
    nodes: PointConfig
    seed: int
    retries: int
    certificate: Certificate

    @property
    def ctx(self) -> FieldCtx:
        return self.form.ctx

    @property
    def degree(self) -> int:
        return self.form.degree

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def genus(self) -> int:
        # geometric genus of the normalization
        return comb(self.degree - 1, 2) - self.node_count

    def to_jsonable(self) -> dict:
        out = {"prime": self.ctx.p}
        if self.nodes.ctx.k > 1:
            out["extension_modulus"] = [int(c) for c in self.nodes.ctx.modulus]
        out.update({
            "degree": self.degree,
            "n": self.node_count,
            "seed": self.seed,
            "retries": self.retries,
            "coefficients": self.form.to_records(),
            "nodes": [pt.to_jsonable() for pt in self.nodes],
            "certificate": self.certificate.to_jsonable(),
        })
        return out

    @classmethod
    def from_jsonable(cls, data: dict) -> "NodalCurve":
        ctx = make_prime_field(data["prime"])
        form = Form.from_records(ctx, data["degree"], data["coefficients"])
        mod = data.get("extension_modulus")
        nctx = ctx if mod is None else FieldCtx(ctx.p, len(mod) - 1,
                                                tuple(mod))
        nodes = PointConfig.make(
            nctx, [Point.from_jsonable(nctx, c) for c in data["nodes"]])
        curve = cls(form, nodes, data["seed"], data["retries"],
                    Certificate.from_jsonable(data["certificate"]))
        if len(curve.nodes) != data["n"]:
            raise ValueError("node list does not match the recorded count")
        return curve


def max_nodes(degree: int) -> int:
    """Largest node count the maximality theorem covers for this degree."""
    return comb(degree - 1, 2) - 1


def _random_point(ctx: FieldCtx, rng: random.Random) -> Point:
    while True:
        coords = [ctx.random_element(rng) for _ in range(3)]
        if any(not ctx.is_zero(c) for c in coords):
            return Point.make(ctx, coords)


def _random_nodes(ctx: FieldCtx, n: int, rng: random.Random) -> PointConfig:
    seen = []
    while len(seen) < n:
        pt = _random_point(ctx, rng)
        if pt not in seen:
            seen.append(pt)
    return PointConfig.make(ctx, seen)


def _random_member(space, ctx: FieldCtx, rng: random.Random) -> Form | None:
    rows = space.space.basis
    if not rows:
        return None
    p = ctx.p
    while True:
        coeffs = [rng.randrange(p) for _ in rows]
        if not any(coeffs):
            continue
        vec = [0] * space.space.ambient
        for c, row in zip(coeffs, rows):
            if c:
                for j, v in enumerate(row):
                    if v:
                        vec[j] = (vec[j] + c * v) % p
        form = Form(ctx, space.degree, tuple(vec))
        if not form.is_zero():
            return form


# -- parametric sampler for the top of the node range ----------------------

_SPLITTING_CAP = 32  # largest node-splitting extension degree accepted


def _random_squarefree(ctx: FieldCtx, deg: int, rng: random.Random) -> UniPoly:
    while True:
        f = UniPoly.make(
            ctx, [ctx.random_element(rng) for _ in range(deg)] + [ctx.one()])
        if f.gcd(f.derivative()).degree == 0:
            return f


def _hyperelliptic_sections(ctx: FieldCtx, degree: int, genus: int,
                            rng: random.Random) -> list:
    """Three random functions on y^2 = f(x) with pole order at most
    `degree` at the place over x = infinity, as coefficient pairs (c, e)
    representing c(x) + e(x) y."""
    out = []
    for _ in range(3):
        c = [ctx.random_element(rng) for _ in range(degree // 2 + 1)]
        e = [ctx.random_element(rng)
             for _ in range((degree - 2 * genus - 1) // 2 + 1)]
        out.append((UniPoly.make(ctx, c), UniPoly.make(ctx, e)))
    return out


def _image_form(ctx: FieldCtx, degree: int, genus: int, fpoly: UniPoly,
                phis: list) -> Form | None:
    """The degree-`degree` form vanishing on the image of the map to the
    plane given by the three sections, or None unless the space of such
    forms is exactly one-dimensional (which forces the map to be
    birational onto a curve of full degree)."""
    def mul(a, b):
        c1, e1 = a
        c2, e2 = b
        return (c1 * c2 + e1 * e2 * fpoly, c1 * e2 + c2 * e1)

    table = {(0, 0, 0): (UniPoly.make(ctx, [1]), UniPoly.make(ctx, []))}
    top = []
    for md in range(1, degree + 1):
        for exps in monomials(md):
            a, b, c = exps
            if a > 0:
                prev, phi = (a - 1, b, c), phis[0]
            elif b > 0:
                prev, phi = (a, b - 1, c), phis[1]
            else:
                prev, phi = (a, b, c - 1), phis[2]
            table[exps] = mul(table[prev], phi)
            if md == degree:
                top.append(table[exps])
    # coordinates of each monomial section: c up to the maximal pole order,
    # then e (the representation c(x) + e(x) y is unique)
    lc = degree * degree // 2 + 1
    le = (degree * degree - 2 * genus - 1) // 2 + 1
    rows = []
    for i in range(lc + le):
        row = []
        for cp, ep in top:
            coeffs, j = (cp.coeffs, i) if i < lc else (ep.coeffs, i - lc)
            row.append(coeffs[j] if j < len(coeffs) else 0)
        rows.append(row)
    ker = kernel(Matrix.make(ctx, rows, dim_forms(degree)))
    if ker.dim != 1:
        return None
    return Form(ctx, degree, tuple(ker.basis[0]))


def _split_singular_points(f: Form, n: int,
                           rng: random.Random) -> PointConfig | None:
    """The singular points of {f = 0} as an explicit configuration.

    Projects the common zeros of the partials to one coordinate through a
    random change of coordinates, splits the resulting squarefree
    polynomial over one explicit extension, and reads each point back off
    the partials.  Coordinate-level accidents retry with fresh
    coordinates; returns None when the points are not exactly n distinct
    ones rational over a single extension of degree at most
    _SPLITTING_CAP, which no change of coordinates can repair.
    """
    ctx = f.ctx
    d = f.degree
    for _ in range(10):
        mat = random_invertible(ctx, 3, rng)
        g = compose_linear(f, mat)
        gx, gy, gz = gradient(g)
        tops = [gr.coeff((0, d - 1, 0)) for gr in (gx, gy, gz)]
        if any(ctx.is_zero(v) for v in tops):
            # the resultants in y need constant leading coefficients; this
            # also keeps (0:1:0) off the singular locus
            continue
        restr = [UniPoly.make(ctx, [gr.coeff((d - 1 - j, j, 0))
                                    for j in range(d)])
                 for gr in (gx, gy, gz)]
        if restr[0].gcd(restr[1]).gcd(restr[2]).degree >= 1:
            continue  # singular point on the line at infinity
        r1 = _resultant_in_y(gx, gy)
        r2 = _resultant_in_y(gx, gz)
        if r1.is_zero() or r2.is_zero():
            continue
        h = r1.gcd(r2)
        if h.degree < 1 or h.gcd(h.derivative()).degree != 0:
            continue  # projection does not separate the points
        factors = irreducible_factors(h, seed=rng.randrange(1 << 30))
        degs = [q.degree for q in factors]
        kdeg = lcm(*degs)
        if kdeg != max(degs) or kdeg > _SPLITTING_CAP:
            return None  # the splitting pattern is intrinsic to the curve
        if kdeg == 1:
            ext = ctx
        else:
            modulus = max(factors, key=lambda q: (q.degree, q.coeffs))
            ext = FieldCtx(ctx.p, kdeg, tuple(modulus.monic().coeffs))
        ypolys = [[cp.lift(ext) for cp in _y_coefficient_polys(gr)]
                  for gr in (gx, gy, gz)]
        gpolys = [cp.lift(ext) for cp in _y_coefficient_polys(g)]
        emat = [[ext.embed(v) for v in row] for row in mat]
        pts = []
        clean = True
        for xi, _mult in find_roots(h, ext, seed=rng.randrange(1 << 30)):
            slices = [UniPoly.make(ext, [cp.evaluate(xi) for cp in polys])
                      for polys in ypolys]
            common = slices[0].gcd(slices[1]).gcd(slices[2])
            if common.degree != 1:
                clean = False  # two singular points share this x
                break
            y = ext.neg(common.coeffs[0])
            value = UniPoly.make(ext, [cp.evaluate(xi) for cp in gpolys])
            if not ext.is_zero(value.evaluate(y)):
                clean = False
                break
            pts.append(Point.make(ext,
                                  _apply_mat(ext, emat, (xi, y, ext.one()))))
        if not clean:
            continue
        if len(pts) != n:
            return None  # wrong singular-point count is intrinsic
        return PointConfig.make(ext, pts)
    return None


def _generate_parametric(ctx: FieldCtx, degree: int, n: int, seed: int,
                         rng: random.Random, max_retries: int) -> NodalCurve:
    genus = comb(degree - 1, 2) - n
    if degree < 2 * genus + 1:
        raise GenerationExhausted(
            f"(d={degree}, n={n}) is outside both samplers: the "
            f"prescribed-node system is overdetermined and the "
            f"hyperelliptic model needs degree >= {2 * genus + 1}")
    if ctx.p <= (degree - 1) ** 2:
        raise ValueError(
            f"prime {ctx.p} too small for the parametric sampler at "
            f"degree {degree}")
    for attempt in range(max_retries):
        fpoly = _random_squarefree(ctx, 2 * genus + 1, rng)
        phis = _hyperelliptic_sections(ctx, degree, genus, rng)
        form = _image_form(ctx, degree, genus, fpoly, phis)
        if form is None:
            log.debug("image system not one-dimensional, resampling")
            continue
        nodes = _split_singular_points(form, n, rng)
        if nodes is None:
            continue
        cert = certify_form(form, nodes)
        if cert.ok():
            return NodalCurve(form, nodes, seed, attempt, cert)
        log.debug("certificate failed on attempt %d: %s", attempt, cert)
    raise GenerationExhausted(
        f"no certified (d={degree}, n={n}) curve in {max_retries} attempts")


def generate(ctx: FieldCtx, degree: int, n: int, seed: int,
             max_retries: int = 40) -> NodalCurve:
    """A certified irreducible curve of the given degree with n nodes.

    Deterministic given (ctx, degree, n, seed).  Candidates are resampled
    until the certificate holds; raises GenerationExhausted when the retry
    budget runs out and TooManyNodes when n is outside the range the rank
    statement covers.  Once 3n reaches dim-1 conditions the prescribed-node
    system is empty or degenerate, so those cells route to the parametric
    sampler and may return nodes over an extension field.
    """
    if ctx.k != 1:
        raise FieldMismatch("curves are generated over prime fields")
    if degree < 3:
        raise ValueError("degree must be at least 3")
    if ctx.p <= 2 * degree - 3:
        raise ValueError(f"prime {ctx.p} too small for degree {degree}")
    if n < 0 or n > max_nodes(degree):
        raise TooManyNodes(
            f"n={n} outside 0..{max_nodes(degree)} for degree {degree}")
    rng = random.Random(seed)
    if 3 * n >= dim_forms(degree) - 1:
        return _generate_parametric(ctx, degree, n, seed, rng, max_retries)
    expected = dim_forms(degree) - 3 * n
    for attempt in range(max_retries):
        nodes = _random_nodes(ctx, n, rng)
        system = linsys(nodes, degree, order=2)
        if system.dim != expected:
            log.debug("nodes in special position (dim %d != %d), retrying",
                      system.dim, expected)
            continue
        form = _random_member(system, ctx, rng)
        if form is None:
            continue
        cert = certify_form(form, nodes)
        if cert.ok():
            return NodalCurve(form, nodes, seed, attempt, cert)
        log.debug("certificate failed on attempt %d: %s", attempt, cert)
    raise GenerationExhausted(
        f"no certified (d={degree}, n={n}) curve in {max_retries} attempts")
