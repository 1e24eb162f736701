import pytest
from conftest import ring_elems, ring_of
from hypothesis import given

from danielewski.errors import CapTooSmall, NotVolumePreserving
from danielewski.poisson import (
    decompose,
    field_to_ham,
    ham_to_field,
    poisson,
    verify_volume_bracket_table,
)
from danielewski.vfield import bracket, divergence, make_named

R = ring_of("z^3 - z")
x, y, z = R.x, R.y, R.z()
V, W, H = (make_named(R, n) for n in "VWH")


def test_base_brackets():
    assert poisson(x, z) == -x
    assert poisson(z, y) == -y
    assert poisson(x, y) == -R.dp()
    assert poisson(x, x).is_zero()


def test_hamiltonian_fields():
    assert ham_to_field(y) == V
    assert ham_to_field(-x) == W
    assert ham_to_field(-z) == H
    assert ham_to_field(R.const(17)).is_zero()


def test_translation_table():
    assert bracket(-W, -H) == W
    assert bracket(-H, V) == -V
    assert bracket(-W, V) == R.p_derivative(2) * H


@given(ring_elems(R, 3, 3), ring_elems(R, 3, 3), ring_elems(R, 2, 2))
def test_antisymmetry_jacobi_leibniz(f, g, h):
    assert poisson(f, g) == -poisson(g, f)
    jac = poisson(f, poisson(g, h)) + poisson(g, poisson(h, f)) + poisson(h, poisson(f, g))
    assert jac.is_zero()
    assert poisson(f, g * h) == poisson(f, g) * h + g * poisson(f, h)


@given(ring_elems(R, 2, 3), ring_elems(R, 2, 3))
def test_lie_algebra_morphism(f, g):
    assert bracket(ham_to_field(f), ham_to_field(g)) == ham_to_field(poisson(f, g))


@given(ring_elems(R, 4, 4))
def test_ham_round_trip(h):
    fld = ham_to_field(h)
    assert divergence(fld).is_zero()
    assert field_to_ham(fld) == h - R.const(h.constant_term())


def test_field_to_ham_examples():
    assert field_to_ham(V) == y
    assert field_to_ham(H) == -z
    assert field_to_ham(y ** 2 * V) == (y ** 3) / 3
    with pytest.raises(NotVolumePreserving):
        field_to_ham(z * V)
    with pytest.raises(CapTooSmall):
        field_to_ham(y ** 4 * V, degree_cap=2)


def test_decompose():
    d = decompose(R.parse("x^2*z"))
    assert (d.xpart, d.ypart, d.zpart) == (R.parse("x^2*z"), R.zero, R.zero)
    d = decompose(R.parse("x + y + 1"))
    assert (d.xpart, d.ypart, d.zpart) == (x, y, R.one)
    d = decompose(x * y)
    assert (d.xpart, d.ypart, d.zpart) == (R.zero, R.zero, R.p_elem())


@given(ring_elems(R, 3, 4))
def test_decompose_reconstructs(h):
    assert decompose(h).total() == h


def test_volume_bracket_table():
    assert poisson(x ** 2, z ** 2) == (x ** 2 * z).scale(-4)
    assert poisson(y ** 3, z ** 2) == (y ** 3 * z).scale(6)
    r = ring_of("z^2 - 1")
    report = verify_volume_bracket_table(r, 4, 4)
    assert report.all_passed
    q = ring_of("z^2", params=("t", "s"))
    assert poisson(q.x * q.z(), q.y * q.z()) == q.parse("-4*z^3")


def test_requires_surface():
    r2 = ring_of("z1^2 + z2^2")
    with pytest.raises(ValueError):
        poisson(r2.x, r2.y)
