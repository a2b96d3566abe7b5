"""Tests for the variation-rank engine: dimension ledgers, random and
constructed multipliers, the point-exchange loop, and the smooth-curve
cross-checks (multiplication rank, canonical surjectivity, fermat probe).
"""

import random
from math import comb

import pytest

import oracles
from ivhslab import ivhs
from ivhslab.errors import (DegreeMismatch, EmptySystem, ExchangeStalled,
                            FieldMismatch, NotAdjoint, NotSmooth)
from ivhslab.field import make_extension, make_prime_field
from ivhslab.forms import Form, dim_forms, evaluate, monomials, multiply
from ivhslab.ivhs import (cb_decompose, dimension_identity,
                          fermat_min_witness, generic_maximality, ledger,
                          multiplier_from_decomposition, noether_check,
                          random_multiplier, smooth_multiplication_rank,
                          variation_rank)
from ivhslab.nodalgen import generate
from ivhslab.pointsys import Point, PointConfig, linsys

CTX = make_prime_field(10007)


# -- counting identity -------------------------------------------------------


def test_dimension_identity_holds_for_small_degrees():
    for d in range(4, 13):
        lhs, rhs = dimension_identity(d)
        assert lhs == rhs
        assert lhs == comb(d - 1, 2) + 3 * comb(d, 2)
        assert rhs == comb(2 * d - 1, 2)


# -- ledger -------------------------------------------------------------------


def test_ledger_smooth_quartic():
    curve = generate(CTX, 4, 0, seed=1)
    led = ledger(curve)
    assert (led.degree, led.node_count, led.genus) == (4, 0, 3)
    assert (led.adjoint_dim, led.big_adjoint_dim, led.jacobian_dim,
            led.syzygy_defect, led.quotient_dim) == (3, 21, 18, 0, 3)
    # cross-checks: the big space is all of degree 5, and the quotient
    # matches the complete-intersection count for a smooth curve
    assert led.big_adjoint_dim == len(oracles.graded_monomials(5)) == 21
    assert led.quotient_dim == oracles.smooth_jacobian_dim(4, 5) == 3


def test_ledger_three_node_quintic():
    curve = generate(CTX, 5, 3, seed=0)
    led = ledger(curve)
    assert (led.genus, led.adjoint_dim, led.big_adjoint_dim,
            led.jacobian_dim, led.syzygy_defect, led.quotient_dim) == (
        3, 3, 33, 30, 0, 3)
    # the three nodes impose independent conditions in degree 7
    pts = [tuple(int(c) for c in nd.coords) for nd in curve.nodes]
    assert oracles.conditions_rank(pts, 7, CTX.p) == 3
    assert led.big_adjoint_dim == dim_forms(7) - 3
    # with zero syzygy defect the slice count is forced
    assert led.jacobian_dim == 3 * dim_forms(3)


def test_ledger_two_node_quartic():
    curve = generate(CTX, 4, 2, seed=3)
    led = ledger(curve)
    assert (led.genus, led.adjoint_dim, led.big_adjoint_dim,
            led.jacobian_dim, led.syzygy_defect, led.quotient_dim) == (
        1, 1, 19, 18, 0, 1)


def test_ledger_extension_node_curve():
    # nine nodes on a sextic come from the conjugate-point sampler; the
    # ledger must still come out over the prime field
    curve = generate(CTX, 6, 9, seed=1)
    assert curve.nodes.ctx.k > 1
    led = ledger(curve)
    assert (led.genus, led.adjoint_dim, led.big_adjoint_dim,
            led.jacobian_dim, led.syzygy_defect, led.quotient_dim) == (
        1, 1, 46, 45, 0, 1)


# -- variation rank -----------------------------------------------------------


def test_variation_rank_smooth_quartic_is_maximal():
    curve = generate(CTX, 4, 0, seed=2)
    mult = random_multiplier(curve, random.Random(5))
    rep = variation_rank(curve, mult)
    assert (rep.degree, rep.node_count, rep.genus) == (4, 0, 3)
    assert (rep.rank, rep.defect, rep.maximal) == (3, 0, True)
    assert rep.multiplier_kind == "random"


def test_variation_rank_three_node_quintic_is_maximal():
    curve = generate(CTX, 5, 3, seed=0)
    rep = variation_rank(curve, random_multiplier(curve, random.Random(1)))
    assert (rep.rank, rep.genus, rep.maximal) == (3, 3, True)


def test_variation_rank_is_scale_invariant():
    curve = generate(CTX, 4, 1, seed=4)
    mult = random_multiplier(curve, random.Random(2))
    base = variation_rank(curve, mult).rank
    assert variation_rank(curve, mult.scale(1234)).rank == base


def test_variation_rank_rejects_wrong_degree():
    curve = generate(CTX, 4, 1, seed=4)
    cubic = Form.make(CTX, 3, {(3, 0, 0): 1})
    with pytest.raises(DegreeMismatch):
        variation_rank(curve, cubic)


def test_variation_rank_rejects_zero_multiplier():
    curve = generate(CTX, 4, 1, seed=4)
    with pytest.raises(NotAdjoint, match="zero"):
        variation_rank(curve, Form.make(CTX, 4, {}))


def test_variation_rank_rejects_non_vanishing_multiplier():
    curve = generate(CTX, 4, 2, seed=3)
    node = curve.nodes.points[0]
    i = next(j for j in range(3) if not CTX.is_zero(node.coords[j]))
    exps = [0, 0, 0]
    exps[i] = 4
    bad = Form.make(CTX, 4, {tuple(exps): 1})
    with pytest.raises(NotAdjoint, match="vanish"):
        variation_rank(curve, bad)


def test_variation_rank_rejects_other_characteristic():
    curve = generate(CTX, 4, 1, seed=4)
    other = make_prime_field(101)
    with pytest.raises(FieldMismatch):
        variation_rank(curve, Form.make(other, 4, {(4, 0, 0): 1}))


def test_generic_maximality_batches():
    curve = generate(CTX, 4, 1, seed=6)
    reps = generic_maximality(curve, trials=10, seed=3)
    assert len(reps) == 10
    assert all(r.maximal and r.rank == 2 for r in reps)
    assert all(r.multiplier_kind == "random" for r in reps)
    assert generic_maximality(curve, trials=0, seed=3) == ()


def test_generic_maximality_extension_node_curve():
    curve = generate(CTX, 6, 9, seed=1)
    reps = generic_maximality(curve, trials=10, seed=3)
    assert [r.rank for r in reps] == [1] * 10
    assert all(r.maximal for r in reps)


# -- exchange loop ------------------------------------------------------------


class RiggedRng:
    """random.Random stand-in whose initial sample is chosen by hand."""

    def __init__(self, sample):
        self._sample = sample

    def sample(self, population, k):
        assert k == len(self._sample)
        return list(self._sample)


CTX101 = make_prime_field(101)


def _collinear_config():
    pts = [Point.make(CTX101, (t, 0, 1)) for t in range(5)]
    pts += [Point.make(CTX101, (0, 1, 1)), Point.make(CTX101, (1, 2, 1)),
            Point.make(CTX101, (3, 1, 1)), Point.make(CTX101, (7, 5, 1))]
    return pts


def test_exchange_repairs_a_collinear_triple_in_one_swap():
    pts = [Point.make(CTX101, (0, 0, 1)), Point.make(CTX101, (1, 0, 1)),
           Point.make(CTX101, (2, 0, 1)), Point.make(CTX101, (0, 1, 1)),
           Point.make(CTX101, (5, 3, 1))]
    chosen, trace = ivhs._exchange(pts, [], zeta=3, degree=1, ctx=CTX101,
                                   rng=RiggedRng([0, 1, 2]))
    assert trace == ((0, 3, 0),)
    assert sorted(chosen) == [1, 2, 3]
    cfg = PointConfig.make(CTX101, [pts[i] for i in sorted(chosen)])
    assert linsys(cfg, 1).dim == 0


def test_exchange_repairs_five_collinear_points_in_two_swaps():
    pts = _collinear_config()
    chosen, trace = ivhs._exchange(pts, [], zeta=6, degree=2, ctx=CTX101,
                                   rng=RiggedRng([0, 1, 2, 3, 4, 5]))
    assert trace == ((0, 6, 1), (1, 7, 0))
    cfg = PointConfig.make(CTX101, [pts[i] for i in sorted(chosen)])
    assert linsys(cfg, 2).dim == 0


def test_exchange_stalls_when_no_replacement_exists():
    # five points can never impose independent conic conditions here once
    # three collinear ones are locked in, and single swaps cannot cross
    # that barrier
    pts = _collinear_config()
    with pytest.raises(ExchangeStalled, match="replacement"):
        ivhs._exchange(pts, [], zeta=5, degree=2, ctx=CTX101,
                       rng=RiggedRng([0, 1, 2, 3, 4]))


# -- residuation construction -------------------------------------------------


def _decomposition_invariants(curve, dec):
    d = curve.degree
    ext = dec.ctx
    node_pts = [pt.embed_into(ext) for pt in curve.nodes]
    # pinned + nodes saturate degree d-2
    pinned_cfg = PointConfig.make(
        ext, list(dec.pinned_points.points) + node_pts)
    assert linsys(pinned_cfg, d - 2).dim == 0
    # free part saturates degree d-3
    assert linsys(dec.free_points, d - 3).dim == 0
    # each pencil member is a combination of the partials, so it vanishes
    # at every node
    for f in dec.pencil:
        for nd in node_pts:
            assert ext.is_zero(evaluate(f.lift(ext), nd.coords, ctx=ext))
    # swap trace deficiencies strictly decrease and end at zero
    defs = [t[2] for t in dec.swap_trace]
    assert defs == sorted(defs, reverse=True)
    if defs:
        assert defs[-1] == 0


def test_cb_decompose_two_node_quartic():
    curve = generate(CTX, 4, 2, seed=3)
    dec = cb_decompose(curve, seed=7)
    assert len(dec.residual_points.points) == 7
    assert len(dec.pinned_indices) == 4
    assert len(dec.free_points.points) == 3
    _decomposition_invariants(curve, dec)
    again = cb_decompose(curve, seed=7)
    assert again.basis_matrix == dec.basis_matrix
    assert again.pinned_indices == dec.pinned_indices
    assert again.to_jsonable() == dec.to_jsonable()


def test_cb_decompose_three_node_quintic():
    curve = generate(CTX, 5, 3, seed=0)
    dec = cb_decompose(curve, seed=0)
    assert len(dec.residual_points.points) == 13
    assert len(dec.pinned_indices) == 7
    assert len(dec.free_points.points) == 6
    _decomposition_invariants(curve, dec)


def test_cb_decompose_rejects_extension_nodes():
    curve = generate(CTX, 6, 9, seed=1)
    with pytest.raises(FieldMismatch, match="prime-field nodes"):
        cb_decompose(curve, seed=0)


def test_constructed_multiplier_two_node_quartic():
    curve = generate(CTX, 4, 2, seed=3)
    dec = cb_decompose(curve, seed=7)
    ext = dec.ctx
    # the pinned system the multiplier is drawn from has dimension 2d+1
    node_pts = [pt.embed_into(ext) for pt in curve.nodes]
    pinned_cfg = PointConfig.make(
        ext, list(dec.pinned_points.points) + node_pts)
    assert linsys(pinned_cfg, 4).dim == 2 * 4 + 1
    mult = multiplier_from_decomposition(dec, seed=0)
    assert mult.degree == 4
    for pt in list(dec.pinned_points.points) + node_pts:
        assert ext.is_zero(evaluate(mult, pt.coords, ctx=ext))
    for pt in dec.free_points.points:
        assert not ext.is_zero(evaluate(mult, pt.coords, ctx=ext))
    rep = variation_rank(curve, mult, kind="constructed")
    assert (rep.rank, rep.genus, rep.maximal) == (1, 1, True)
    assert rep.multiplier_kind == "constructed"
    assert multiplier_from_decomposition(dec, seed=0).coeffs == mult.coeffs


def test_constructed_multiplier_three_node_quintic():
    curve = generate(CTX, 5, 3, seed=0)
    dec = cb_decompose(curve, seed=0)
    mult = multiplier_from_decomposition(dec, seed=0)
    rep = variation_rank(curve, mult, kind="constructed")
    assert (rep.rank, rep.genus, rep.maximal) == (3, 3, True)


# -- smooth-curve cross-checks ------------------------------------------------


def test_smooth_multiplication_rank_matches_variation_rank():
    curve = generate(CTX, 4, 0, seed=9)
    mult = random_multiplier(curve, random.Random(1))
    r = smooth_multiplication_rank(curve.form, mult)
    assert r == variation_rank(curve, mult).rank == 3


def test_smooth_multiplication_rank_rejects_nodal_curve():
    curve = generate(CTX, 4, 1, seed=4)
    mult = Form.make(CTX, 4, {(4, 0, 0): 1})
    with pytest.raises(NotSmooth):
        smooth_multiplication_rank(curve.form, mult)


@pytest.mark.parametrize("degree", [4, 5, 6])
def test_noether_check_on_random_smooth_curves(degree):
    curve = generate(CTX, degree, 0, seed=11)
    assert noether_check(curve.form) is True


def test_fermat_probe_quartic():
    probe = fermat_min_witness(4, CTX)
    assert probe.witness.coeffs == Form.make(CTX, 4, {(2, 2, 0): 1}).coeffs
    assert probe.witness_rank == 1 == oracles.fermat_mult_rank(4, (2, 2, 0))
    assert probe.monomials_tried == 6
    assert probe.random_trials == 0 and probe.random_min is None


@pytest.mark.parametrize("degree,tried", [(4, 6), (5, 12), (6, 19), (7, 27)])
def test_fermat_probe_witness_attains_the_monomial_minimum(degree, tried):
    probe = fermat_min_witness(degree, CTX)
    d = degree
    assert probe.witness.coeffs == Form.make(
        CTX, d, {(d - 2, 2, 0): 1}).coeffs
    assert probe.witness_rank == d - 3
    assert probe.witness_rank == oracles.fermat_mult_rank(d, (d - 2, 2, 0))
    # oracle sweep of every monomial outside the partials ideal confirms
    # the witness attains the global monomial minimum
    nonideal = [v for v in oracles.graded_monomials(d)
                if not any(v[i] >= d - 1 for i in range(3))]
    assert len(nonideal) == tried == probe.monomials_tried
    assert min(oracles.fermat_mult_rank(d, v) for v in nonideal) == d - 3


def test_fermat_probe_random_sampling_respects_the_bound():
    probe = fermat_min_witness(5, CTX, random_trials=20, seed=1)
    assert probe.random_trials == 20
    # sampled evidence only: every draw stays at or above the witness level
    assert probe.random_min is not None
    assert 2 <= probe.random_min <= comb(4, 2)


def test_fermat_probe_rejects_bad_characteristic():
    with pytest.raises(ValueError, match="divides"):
        fermat_min_witness(5, make_prime_field(5))
    ext = make_extension(make_prime_field(7), 2, seed=0)
    with pytest.raises(FieldMismatch):
        fermat_min_witness(4, ext)
