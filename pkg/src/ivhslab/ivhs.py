"""Variation ranks for certified nodal plane curves.

For a degree-d curve with node set of size n and genus g = C(d-1,2) - n,
the object computed here is the rank of a multiplication map: fix a
degree-d multiplier form vanishing on every node, multiply it against a
basis of the degree-(d-3) forms through the nodes, and count how many of
the products stay independent modulo the degree-(2d-3) slice of the ideal
spanned by the curve's partial derivatives.  The curve has maximal
variation exactly when that count reaches g.

Two routes produce a maximal multiplier: random sampling (genericity), and
an explicit residuation construction that splits the extra intersection
points of two generic partial-derivative combinations into a pinned set
(where the multiplier is forced to vanish) and a free set (where it must
not), exchanging points one at a time until the pinned set together with
the nodes imposes a full set of conditions in degree d-2.
"""

from __future__ import annotations

import functools
import logging
import random
from dataclasses import dataclass
from math import comb

from . import _backend
from .errors import (CommonComponent, DegreeMismatch, EmptySystem,
                     ExchangeStalled, FieldMismatch, GenerationExhausted,
                     LedgerViolation, NonTransverse, NotAdjoint, NotSmooth,
                     SplittingTooLarge)
from .field import FieldCtx
from .forms import (Form, dim_forms, evaluate, gradient, monomials,
                    multiply, partial, scatter_multiples)
from .linalg import (Subspace, prime_rref_subspace, random_invertible,
                     rank_rows, residual_rank)
from .nodalgen import NodalCurve, jacobian_scheme_length
from .pointsys import (PointConfig, intersection_points, linsys,
                       rational_linsys)

log = logging.getLogger(__name__)


def dimension_identity(degree: int) -> tuple[int, int]:
    """Both sides of the counting identity behind the rank target:
    C(d-1,2) + 3*C(d,2) = C(2d-1,2)."""
    lhs = comb(degree - 1, 2) + 3 * comb(degree, 2)
    rhs = comb(2 * degree - 1, 2)
    return lhs, rhs


def _jacobian_slice(form: Form, target: int) -> Subspace:
    """RREF basis of the degree-target multiples of the partials."""
    d = form.degree
    shift = target - (d - 1)
    cols = dim_forms(target)
    nrows = 3 * dim_forms(shift)
    buf = _backend.zero_buffer(nrows * cols)
    row = 0
    for v in range(3):
        row += scatter_multiples(partial(form, v), shift, buf, cols, row)
    return prime_rref_subspace(form.ctx, buf, nrows, cols)


@dataclass(frozen=True)
class _CurveSystems:
    adjoint_forms: tuple  # basis of degree-(d-3) forms through the nodes
    jac: Subspace         # degree-(2d-3) slice of the partials ideal


@functools.lru_cache(maxsize=32)
def _systems(curve: NodalCurve) -> _CurveSystems:
    # rational_linsys keeps every basis form over the prime field even when
    # the nodes live in an extension, so the rank work below stays on the
    # fast prime-field path
    d = curve.degree
    adj = rational_linsys(curve.nodes, d - 3).forms()
    jac = _jacobian_slice(curve.form, 2 * d - 3)
    return _CurveSystems(adj, jac)


@dataclass(frozen=True)
class CohomologyLedger:
    degree: int
    node_count: int
    genus: int
    adjoint_dim: int       # forms of degree d-3 through the nodes
    big_adjoint_dim: int   # forms of degree 2d-3 through the nodes
    jacobian_dim: int      # degree-(2d-3) slice of the partials ideal
    syzygy_defect: int
    quotient_dim: int      # big_adjoint_dim - jacobian_dim

    def to_jsonable(self) -> dict:
        return {
            "d": self.degree, "n": self.node_count, "g": self.genus,
            "adjoint_dim": self.adjoint_dim,
            "big_adjoint_dim": self.big_adjoint_dim,
            "jacobian_dim": self.jacobian_dim,
            "syzygy_defect": self.syzygy_defect,
            "quotient_dim": self.quotient_dim,
        }


def ledger(curve: NodalCurve) -> CohomologyLedger:
    """Exact dimension bookkeeping for a certified curve.

    Raises LedgerViolation (zero tolerance) unless every identity holds:
    no syzygies in the shifted degree, both adjoint dimensions as counted
    by the node conditions, the jacobian slice inside the big adjoint
    space, and quotient dimension equal to the genus.
    """
    d, n, g = curve.degree, curve.node_count, curve.genus
    sys = _systems(curve)
    a1 = len(sys.adjoint_forms)
    big = rational_linsys(curve.nodes, 2 * d - 3).space
    a2 = big.dim
    b = sys.jac.dim
    s = 3 * dim_forms(d - 2) - b
    led = CohomologyLedger(
        degree=d, node_count=n, genus=g,
        adjoint_dim=a1, big_adjoint_dim=a2, jacobian_dim=b,
        syzygy_defect=s, quotient_dim=a2 - b)
    failures = []
    if s != 0:
        failures.append(f"syzygy defect {s} != 0")
    if a1 != g:
        failures.append(f"adjoint dim {a1} != genus {g}")
    if a2 != (d - 1) * (2 * d - 1) - n:
        failures.append(
            f"big adjoint dim {a2} != {(d - 1) * (2 * d - 1) - n}")
    if a1 + b != a2:
        failures.append(f"additivity {a1} + {b} != {a2}")
    if a2 - b != g:
        failures.append(f"quotient dim {a2 - b} != genus {g}")
    if residual_rank(big, [list(r) for r in sys.jac.basis], curve.ctx) != 0:
        failures.append("jacobian slice not inside the big adjoint space")
    if failures:
        raise LedgerViolation("; ".join(failures))
    return led


@dataclass(frozen=True)
class VariationReport:
    degree: int
    node_count: int
    genus: int
    rank: int
    defect: int
    maximal: bool
    multiplier_kind: str  # "random" or "constructed"


def _check_multiplier(curve: NodalCurve, mult: Form) -> FieldCtx:
    mctx = mult.ctx
    if mctx != curve.ctx and (mctx.p != curve.ctx.p or curve.ctx.k != 1):
        raise FieldMismatch("multiplier context incompatible with the curve")
    if mult.degree != curve.degree:
        raise DegreeMismatch(
            f"multiplier degree {mult.degree} != curve degree {curve.degree}")
    if mult.is_zero():
        raise NotAdjoint("zero multiplier")
    for node in curve.nodes:
        if mctx.k == 1 and node.ctx.k > 1:
            ectx, pt = node.ctx, node
        else:
            ectx, pt = mctx, node.embed_into(mctx)
        if not ectx.is_zero(evaluate(mult, pt.coords, ctx=ectx)):
            raise NotAdjoint(f"multiplier does not vanish at node {node.coords}")
    return mctx


def variation_rank(curve: NodalCurve, mult: Form,
                   kind: str = "random") -> VariationReport:
    """Rank of multiplication by mult from the adjoint forms into the
    quotient modulo the jacobian slice.  The multiplier may live over an
    extension field of the curve's prime field."""
    mctx = _check_multiplier(curve, mult)
    sys = _systems(curve)
    g = curve.genus
    rows = [list(multiply(mult, af.lift(mctx)).coeffs)
            for af in sys.adjoint_forms]
    r = residual_rank(sys.jac, rows, mctx)
    if r < g:
        # multiplication by a nonzero form is injective on polynomials, so
        # the product rows alone must still have full rank g; anything less
        # means a defect upstream, not genuine variation drop
        if rank_rows(mctx, [list(row) for row in rows], sys.jac.ambient) != g:
            raise ArithmeticError("product rows unexpectedly dependent")
    return VariationReport(
        degree=curve.degree, node_count=curve.node_count, genus=g,
        rank=r, defect=g - r, maximal=r == g, multiplier_kind=kind)


def random_multiplier(curve: NodalCurve, rng: random.Random) -> Form:
    """A random degree-d form vanishing on all nodes (order 1)."""
    system = rational_linsys(curve.nodes, curve.degree, order=1)
    basis = system.space.basis
    if not basis:
        raise EmptySystem("no degree-d forms through the nodes")
    ctx = curve.ctx
    p = ctx.p
    while True:
        coeffs = [rng.randrange(p) for _ in basis]
        if not any(coeffs):
            continue
        vec = [0] * system.space.ambient
        for c, row in zip(coeffs, basis):
            if c:
                for j, v in enumerate(row):
                    if v:
                        vec[j] = (vec[j] + c * v) % p
        form = Form(ctx, curve.degree, tuple(vec))
        if not form.is_zero():
            return form


def generic_maximality(curve: NodalCurve, trials: int,
                       seed: int) -> tuple[VariationReport, ...]:
    """Variation reports for a batch of independently sampled multipliers."""
    rng = random.Random(seed)
    out = []
    for _ in range(trials):
        mult = random_multiplier(curve, rng)
        out.append(variation_rank(curve, mult, kind="random"))
    return tuple(out)


# -- residuation construction ----------------------------------------------


@dataclass(frozen=True)
class CBDecomposition:
    """Split of the residual intersection of two generic partial combos.

    residual_points are the intersection points away from the nodes; the
    pinned subset (indices into residual_points) together with the nodes
    imposes independent conditions in degree d-2 (deficiency zero), while
    the free remainder imposes independent conditions in degree d-3.
    """

    curve: NodalCurve
    basis_matrix: tuple   # 3x3 over the curve field; rows combine the partials
    pencil: tuple         # the three combined forms
    residual_points: PointConfig
    pinned_indices: tuple
    swap_trace: tuple     # (removed index, added index, deficiency) per swap
    attempts: int

    @property
    def ctx(self) -> FieldCtx:
        return self.residual_points.ctx

    @property
    def pinned_points(self) -> PointConfig:
        pts = [self.residual_points.points[i] for i in self.pinned_indices]
        return PointConfig.make(self.ctx, pts)

    @property
    def free_points(self) -> PointConfig:
        pinned = set(self.pinned_indices)
        pts = [pt for i, pt in enumerate(self.residual_points.points)
               if i not in pinned]
        return PointConfig.make(self.ctx, pts)

    def to_jsonable(self) -> dict:
        ext = self.ctx
        return {
            "extension_degree": ext.k,
            "extension_modulus": list(ext.modulus) if ext.modulus else None,
            "basis_matrix": [list(r) for r in self.basis_matrix],
            "residual_points": [pt.to_jsonable() for pt in self.residual_points],
            "pinned_indices": list(self.pinned_indices),
            "swap_trace": [list(t) for t in self.swap_trace],
            "attempts": self.attempts,
        }


def _pencil_from_matrix(curve: NodalCurve, mat) -> tuple:
    gx, gy, gz = gradient(curve.form)
    out = []
    for row in mat:
        f = gx.scale(row[0]) + gy.scale(row[1]) + gz.scale(row[2])
        out.append(f)
    return tuple(out)


def _deficiency(cfg: PointConfig, degree: int):
    sys = linsys(cfg, degree)
    return sys.dim, sys


def _exchange(sigma_pts: list, delta_pts: list, zeta: int, degree: int,
              ctx: FieldCtx, rng: random.Random):
    """Exchange loop: returns (pinned index set, trace) with deficiency 0.

    Starts from a random size-zeta subset; while the combined system of
    pinned points and nodes in the given degree is nonempty, finds a
    pinned point whose removal keeps the deficiency (so it is implied by
    the others) and a replacement outside the base locus, which lowers
    the deficiency by exactly one.
    """
    chosen = set(rng.sample(range(len(sigma_pts)), zeta))

    def system(idxs):
        pts = [sigma_pts[i] for i in sorted(idxs)] + delta_pts
        return linsys(PointConfig.make(ctx, pts), degree)

    current = system(chosen)
    h = current.dim
    budget = h
    trace = []
    while h > 0:
        if len(trace) >= budget:
            raise ExchangeStalled(
                f"no convergence within {budget} swaps")
        swap = None
        for t in sorted(chosen):
            without = system(chosen - {t})
            if without.dim != h:
                continue  # t is essential, removing it must not change h
            basis = without.forms()
            for z in range(len(sigma_pts)):
                if z in chosen and z != t:
                    continue
                coords = sigma_pts[z].coords
                if any(not ctx.is_zero(evaluate(bf, coords, ctx=ctx))
                       for bf in basis):
                    swap = (t, z)
                    break
            if swap:
                break
        if swap is None:
            raise ExchangeStalled("no removable point admits a replacement")
        t, z = swap
        chosen.discard(t)
        chosen.add(z)
        after = system(chosen)
        if after.dim != h - 1:
            raise ExchangeStalled(
                f"swap changed deficiency {h} -> {after.dim}")
        h = after.dim
        trace.append((t, z, h))
    return chosen, tuple(trace)


def cb_decompose(curve: NodalCurve, seed: int, max_retries: int = 12,
                 degree_cap: int = 24) -> CBDecomposition:
    """Residuation split for the multiplier construction.

    Intersects two random combinations of the partials, removes the nodes,
    and exchanges points until the pinned part saturates degree d-2; the
    free part must then be independent in degree d-3, and the third
    combination must vanish simply at the nodes and avoid the pinned
    points (all retried against fresh combinations when violated).

    degree_cap bounds the splitting field of the intersection: larger
    orbits are rejected cheaply (before any extension-field linear
    algebra) and a fresh pencil is drawn, which keeps the expected cost
    low at a small retry premium.
    """
    if curve.nodes.ctx.k != 1:
        raise FieldMismatch(
            "the constructive decomposition needs prime-field nodes")
    d = curve.degree
    n = curve.node_count
    ctx = curve.ctx
    zeta = comb(d, 2) - n
    expected_sigma = (d - 1) ** 2 - n
    rng = random.Random(seed)
    last: Exception | None = None
    for attempt in range(max_retries):
        mat = random_invertible(ctx, 3, rng)
        pencil = _pencil_from_matrix(curve, mat)
        try:
            cross = intersection_points(pencil[0], pencil[1],
                                        seed=rng.randrange(1 << 30),
                                        degree_cap=degree_cap)
        except (SplittingTooLarge, NonTransverse, CommonComponent) as exc:
            last = exc
            log.debug("attempt %d: %s", attempt, exc)
            continue
        ext = cross.ctx
        node_pts = [pt.embed_into(ext) for pt in curve.nodes]
        point_set = set(cross.points)
        if any(pt not in point_set for pt in node_pts):
            last = ArithmeticError("a node is missing from the intersection")
            continue
        sigma_pts = [pt for pt in cross.points if pt not in set(node_pts)]
        if len(sigma_pts) != expected_sigma:
            last = ArithmeticError("unexpected residual point count")
            continue
        try:
            pinned, trace = _exchange(sigma_pts, node_pts, zeta, d - 2,
                                      ext, rng)
        except ExchangeStalled as exc:
            last = exc
            log.debug("attempt %d: %s", attempt, exc)
            continue
        free = [pt for i, pt in enumerate(sigma_pts) if i not in pinned]
        free_dim = linsys(PointConfig.make(ext, free), d - 3).dim
        if free_dim != 0:
            last = ArithmeticError(
                f"free part not independent in degree {d - 3}")
            continue
        third = pencil[2]
        grads = gradient(third)
        simple = all(
            any(not ctx.is_zero(evaluate(gv, nd.coords)) for gv in grads)
            for nd in curve.nodes)
        onpinned = any(
            ext.is_zero(evaluate(third, sigma_pts[i].coords, ctx=ext))
            for i in pinned)
        if not simple or onpinned:
            last = ArithmeticError("third pencil member fails genericity")
            continue
        return CBDecomposition(
            curve=curve, basis_matrix=mat, pencil=pencil,
            residual_points=PointConfig.make(ext, sigma_pts),
            pinned_indices=tuple(sorted(pinned)),
            swap_trace=trace, attempts=attempt + 1)
    if isinstance(last, ExchangeStalled):
        raise last
    raise GenerationExhausted(
        f"no usable decomposition in {max_retries} attempts") from last


def multiplier_from_decomposition(dec: CBDecomposition, seed: int,
                                  max_tries: int = 128) -> Form:
    """Degree-d multiplier vanishing on nodes and pinned points, nonzero
    at every free point.  Deterministic given (decomposition, seed)."""
    curve = dec.curve
    d = curve.degree
    ext = dec.ctx
    node_pts = [pt.embed_into(ext) for pt in curve.nodes]
    pinned_cfg = PointConfig.make(
        ext, list(dec.pinned_points.points) + node_pts)
    # the decomposition's own certificates, re-checked before use
    assert linsys(pinned_cfg, d - 2).dim == 0
    assert linsys(dec.free_points, d - 3).dim == 0
    system = linsys(pinned_cfg, d, order=1)
    if system.dim != 2 * d + 1:
        raise EmptySystem(
            f"multiplier system has dimension {system.dim}, not {2 * d + 1}")
    basis = system.space.basis
    free = dec.free_points.points
    rng = random.Random(seed)
    for _ in range(max_tries):
        coeffs = [ext.random_element(rng) for _ in basis]
        vec = [ext.zero()] * system.space.ambient
        for c, row in zip(coeffs, basis):
            if ext.is_zero(c):
                continue
            for j, v in enumerate(row):
                if not ext.is_zero(v):
                    vec[j] = ext.add(vec[j], ext.mul(c, v))
        mult = Form(ext, d, tuple(vec))
        if mult.is_zero():
            continue
        if all(not ext.is_zero(evaluate(mult, pt.coords, ctx=ext))
               for pt in free):
            return mult
    raise GenerationExhausted(
        f"no multiplier avoided the free points in {max_tries} draws")


# -- smooth-curve cross-checks ----------------------------------------------


def _require_smooth(form: Form):
    if form.ctx.k != 1:
        raise FieldMismatch("smooth-curve checks run over prime fields")
    if form.ctx.p <= 3 * form.degree:
        raise ValueError("prime too small for the smoothness probe")
    if jacobian_scheme_length(form) != 0:
        raise NotSmooth("curve has a singular point")


def smooth_multiplication_rank(form: Form, mult: Form) -> int:
    """Rank of multiplication by a degree-d form from degree d-3 into the
    degree-(2d-3) quotient modulo the partials, for a smooth curve.

    This is the smooth-case specialization of variation_rank (no nodes, so
    the adjoint space is all of degree d-3); the two must agree on smooth
    inputs.
    """
    _require_smooth(form)
    d = form.degree
    if mult.degree != d:
        raise DegreeMismatch("multiplier must have the curve's degree")
    mctx = mult.ctx
    if mctx != form.ctx and (mctx.p != form.ctx.p or form.ctx.k != 1):
        raise FieldMismatch("multiplier context incompatible with the curve")
    jac = _jacobian_slice(form, 2 * d - 3)
    g = comb(d - 1, 2)
    if jac.ambient - jac.dim != g:
        raise ArithmeticError("quotient dimension off for a smooth curve")
    rows = [list(multiply(mult, Form.monomial(mctx, e)).coeffs)
            for e in monomials(d - 3)]
    return residual_rank(jac, rows, mctx)


def noether_check(form: Form) -> bool:
    """Surjectivity of multiplication of canonical forms in degree 2(d-3):
    do the pairwise products of degree-(d-3) monomials, together with the
    multiples of the curve itself, span everything?"""
    _require_smooth(form)
    d = form.degree
    if d < 4:
        raise ValueError("needs degree at least 4")
    basis = [Form.monomial(form.ctx, e) for e in monomials(d - 3)]
    rows = []
    for i, bi in enumerate(basis):
        for bj in basis[i:]:
            rows.append(list(multiply(bi, bj).coeffs))
    if d >= 6:
        for e in monomials(d - 6):
            rows.append(list(multiply(form, Form.monomial(form.ctx, e)).coeffs))
    return rank_rows(form.ctx, rows, dim_forms(2 * d - 6)) == dim_forms(2 * d - 6)


@dataclass(frozen=True)
class FermatProbe:
    degree: int
    witness: Form
    witness_rank: int
    monomials_tried: int
    random_trials: int
    random_min: int | None


def fermat_min_witness(degree: int, ctx: FieldCtx, random_trials: int = 0,
                       seed: int = 0) -> FermatProbe:
    """Minimal multiplication rank over the Fermat curve of given degree.

    Sweeps all degree-d monomials that are nonzero modulo the partials
    ideal, keeping the first minimizer; optionally also samples random
    multipliers (again nonzero mod the ideal) and records their minimum.
    """
    if ctx.k != 1:
        raise FieldMismatch("fermat probe runs over prime fields")
    if ctx.p % degree == 0:
        raise ValueError("characteristic divides the exponent")
    fermat = Form.make(ctx, degree, {(degree, 0, 0): 1, (0, degree, 0): 1,
                                     (0, 0, degree): 1})
    _require_smooth(fermat)
    d = degree
    jac_d = _jacobian_slice(fermat, d)
    jac = _jacobian_slice(fermat, 2 * d - 3)
    g = comb(d - 1, 2)
    if jac.ambient - jac.dim != g:
        raise ArithmeticError("quotient dimension off for the fermat curve")

    def mu_rank(v: Form) -> int:
        rows = [list(multiply(v, Form.monomial(ctx, e)).coeffs)
                for e in monomials(d - 3)]
        return residual_rank(jac, rows, ctx)

    best = None
    best_rank = None
    tried = 0
    for e in monomials(d):
        v = Form.monomial(ctx, e)
        if jac_d.contains(v.coeffs):
            continue  # zero in the quotient: the trivial direction
        tried += 1
        r = mu_rank(v)
        if best_rank is None or r < best_rank:
            best, best_rank = v, r
    rng = random.Random(seed)
    rand_min = None
    done = 0
    while done < random_trials:
        vec = [rng.randrange(ctx.p) for _ in range(dim_forms(d))]
        v = Form(ctx, d, tuple(vec))
        if v.is_zero() or jac_d.contains(v.coeffs):
            continue
        done += 1
        r = mu_rank(v)
        rand_min = r if rand_min is None else min(rand_min, r)
    return FermatProbe(degree=degree, witness=best, witness_rank=best_rank,
                       monomials_tried=tried, random_trials=done,
                       random_min=rand_min)
