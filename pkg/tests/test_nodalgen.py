import json
import random

import pytest

from ivhslab.errors import (FieldMismatch, GenerationExhausted, NotSingular,
                            TooManyNodes)
from ivhslab.field import make_prime_field
from ivhslab.forms import Form, dim_forms, multiply, random_form
from ivhslab.nodalgen import (Certificate, NodalCurve, certify_form, generate,
                              is_node, jacobian_scheme_length, max_nodes,
                              syzygy_defect)
from ivhslab.pointsys import Point, linsys

import oracles

P = 10007
CTX = make_prime_field(P)
P62 = 4611686018427388039
CTX62 = make_prime_field(P62)

NODAL_CUBIC = Form.make(CTX, 3, {(0, 2, 1): 1, (3, 0, 0): P - 1,
                                 (2, 0, 1): P - 1})  # y^2 z - x^2 (x + z)
CUSP_CUBIC = Form.make(CTX, 3, {(0, 2, 1): 1, (3, 0, 0): P - 1})
FERMAT4 = Form.make(CTX, 4, {(4, 0, 0): 1, (0, 4, 0): 1, (0, 0, 4): 1})


def test_max_nodes():
    assert max_nodes(4) == 2
    assert max_nodes(5) == 5
    assert max_nodes(6) == 9
    assert max_nodes(7) == 14


def test_is_node_examples():
    origin = Point.make(CTX, (0, 0, 1))
    assert is_node(NODAL_CUBIC, origin) is True
    assert is_node(CUSP_CUBIC, origin) is False
    xyz2 = Form.make(CTX, 4, {(1, 1, 2): 1})
    assert is_node(xyz2, origin) is True
    with pytest.raises(NotSingular):
        is_node(Form.monomial(CTX, (1, 0, 0)), Point.make(CTX, (0, 1, 0)))


def test_scheme_length_examples():
    assert jacobian_scheme_length(FERMAT4) == 0  # smooth
    assert jacobian_scheme_length(NODAL_CUBIC) == 1  # the node at (0:0:1)


def test_syzygy_defect_smooth_and_reducible():
    assert syzygy_defect(FERMAT4) == 0
    rng = random.Random(0)
    product = multiply(random_form(CTX, 2, rng), random_form(CTX, 2, rng))
    # the cross of the factor gradients is a syzygy in degree d-2 = 2
    assert syzygy_defect(product) > 0


def test_generate_d5_n3_system_dims():
    curve = generate(CTX62, 5, 3, seed=0)
    assert curve.node_count == 3 and curve.genus == 3
    system = linsys(curve.nodes, 5, order=2)
    assert system.dim == 21 - 9 == 12
    coords = [tuple(int(v) for v in pt.coords) for pt in curve.nodes]
    assert oracles.conditions_rank(coords, 5, P62, order=2) == 9
    assert jacobian_scheme_length(curve.form) == 3


def test_generate_smooth_quartic():
    curve = generate(CTX62, 4, 0, seed=1)
    assert curve.node_count == 0
    assert curve.genus == 3
    assert curve.certificate.ok()
    assert jacobian_scheme_length(curve.form) == 0


def test_generate_bounds_and_small_prime():
    with pytest.raises(TooManyNodes):
        generate(CTX, 4, 7, seed=0)
    with pytest.raises(TooManyNodes):
        generate(CTX, 4, 3, seed=0)  # 3 > C(3,2) - 1 = 2
    with pytest.raises(ValueError):
        generate(make_prime_field(7), 5, 1, seed=0)
    with pytest.raises(FieldMismatch):
        from ivhslab.field import make_extension
        generate(make_extension(CTX, 2, seed=0), 4, 1, seed=0)


def test_generate_deterministic():
    a = generate(CTX62, 4, 2, seed=9)
    b = generate(CTX62, 4, 2, seed=9)
    assert a.form == b.form and a.nodes == b.nodes
    c = generate(CTX62, 4, 2, seed=10)
    assert (c.form, c.nodes) != (a.form, a.nodes)


def test_certificate_counts_prescribed():
    d, n = 5, 4
    curve = generate(CTX62, d, n, seed=2)
    cert = curve.certificate
    assert cert.ok()
    assert cert.scheme_length == n
    assert cert.adjoint_dim == curve.genus
    assert cert.conditions_dim == (d - 1) * (2 * d - 1) - n
    assert cert.syzygy_defect == 0


@pytest.mark.parametrize("d,n", [(6, 9), (7, 12), (7, 13), (7, 14)])
def test_parametric_cells_certify(d, n):
    curve = generate(CTX, d, n, seed=4)
    assert curve.certificate.ok()
    assert curve.node_count == n
    assert curve.nodes.ctx.k > 1  # nodes genuinely need an extension here
    assert curve.form.ctx == CTX  # but the equation is rational
    assert jacobian_scheme_length(curve.form) == n
    for node in curve.nodes:
        assert is_node(curve.form, node)


def test_parametric_routing_boundary():
    below = generate(CTX62, 6, 8, seed=0)  # 24 < 27 = dim - 1: prescribed
    assert below.nodes.ctx.k == 1
    above = generate(CTX, 6, 9, seed=0)    # 27 = dim - 1: parametric
    assert 3 * 9 >= dim_forms(6) - 1
    assert above.certificate.ok()


def test_parametric_deterministic():
    a = generate(CTX, 7, 13, seed=6)
    b = generate(CTX, 7, 13, seed=6)
    assert a.form == b.form and a.nodes == b.nodes


def test_parametric_out_of_reach_cell():
    # d=8, n=15 needs genus 6, and a degree-8 map of a genus-6
    # hyperelliptic model would need degree >= 13
    with pytest.raises(GenerationExhausted, match="outside both samplers"):
        generate(CTX62, 8, 15, seed=0)


def test_parametric_prime_too_small():
    with pytest.raises(ValueError, match="parametric"):
        generate(make_prime_field(17), 6, 9, seed=0)


def test_serialization_roundtrip_prime_nodes():
    curve = generate(CTX62, 4, 2, seed=3)
    blob = json.dumps(curve.to_jsonable(), sort_keys=True)
    back = NodalCurve.from_jsonable(json.loads(blob))
    assert back.form == curve.form
    assert back.nodes == curve.nodes
    assert back.certificate == curve.certificate
    assert "extension_modulus" not in json.loads(blob)


def test_serialization_roundtrip_extension_nodes():
    curve = generate(CTX, 6, 9, seed=1)
    data = curve.to_jsonable()
    assert "extension_modulus" in data
    back = NodalCurve.from_jsonable(json.loads(json.dumps(data)))
    assert back.form == curve.form
    assert back.nodes == curve.nodes
    assert json.dumps(back.to_jsonable(), sort_keys=True) == \
           json.dumps(data, sort_keys=True)


def test_from_jsonable_count_mismatch():
    curve = generate(CTX62, 4, 2, seed=3)
    data = curve.to_jsonable()
    data["n"] = 1
    with pytest.raises(ValueError):
        NodalCurve.from_jsonable(data)


def test_certificate_jsonable_roundtrip():
    curve = generate(CTX62, 4, 1, seed=0)
    cert = curve.certificate
    assert Certificate.from_jsonable(cert.to_jsonable()) == cert


def test_certify_form_rejects_mismatched_fields():
    curve = generate(CTX62, 4, 1, seed=0)
    other = Form(CTX, 4, tuple(int(v) % P for v in curve.form.coeffs))
    with pytest.raises(FieldMismatch):
        certify_form(other, curve.nodes)  # different characteristic
