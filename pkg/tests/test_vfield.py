import pytest
import sympy as sp
from conftest import SMOOTH_P, ring_elems, ring_of
from hypothesis import given
from hypothesis import strategies as st
from oracle import derive, normal_form, to_sympy

from danielewski.errors import KernelViolation, NotTangent
from danielewski.vfield import (
    VectorField,
    adj_power,
    bracket,
    coordinate_field,
    divergence,
    is_lnd,
    make_named,
    overshear,
    parse_field,
    shear,
    tangency_check,
    verify_identities,
)

R = ring_of("z^3 - z")
V, W, H = (make_named(R, n) for n in "VWH")


@st.composite
def tangent_fields(draw, ring=R, max_deg=2):
    v, w, h = (make_named(ring, n) for n in "VWH")
    a, b, c = (draw(ring_elems(ring, max_deg, 3)) for _ in range(3))
    return a * v + b * w + c * h


def test_named_fields():
    r = ring_of("z^2")
    v = make_named(r, "V")
    assert (v.a, v.b, v.c[0]) == (r.parse("2*z"), r.zero, r.y)
    h = make_named(r, "H")
    assert (h.a, h.b, h.c[0]) == (-r.x, r.y, r.zero)
    r2 = ring_of("z1^2 + z2^3")
    w2 = make_named(r2, "W", 2)
    assert w2.b == r2.parse("3*z2^2") and w2.c == (r2.zero, r2.x)
    with pytest.raises(ValueError):
        make_named(r2, "V", 3)


def test_tangency_check():
    assert tangency_check(V) and tangency_check(H)
    d_dx = coordinate_field(R, a=R.one)
    assert not tangency_check(d_dx)
    assert d_dx.tangency_residual() == R.y
    with pytest.raises(NotTangent):
        bracket(d_dx, V)


def test_commutators():
    assert bracket(V, H) == -V
    assert bracket(W, H) == W
    assert bracket(V, W) == R.p_derivative(2) * H
    assert bracket(V, V).is_zero()


def _ambient_bracket(f1, f2):
    ring = f1.ring
    c1 = [to_sympy(u) for u in f1.components()]
    c2 = [to_sympy(u) for u in f2.components()]
    return [derive(c1, b, ring) - derive(c2, a, ring) for a, b in zip(c1, c2)]


@given(tangent_fields(), tangent_fields())
def test_bracket_matches_ambient_oracle(f1, f2):
    out = bracket(f1, f2)
    for ours, theirs in zip(out.components(), _ambient_bracket(f1, f2)):
        assert sp.expand(to_sympy(ours) - normal_form(theirs, R)) == 0


@given(tangent_fields(), tangent_fields(), tangent_fields(max_deg=1))
def test_antisymmetry_and_jacobi(f, g, h):
    assert bracket(f, g) == -bracket(g, f)
    jac = bracket(f, bracket(g, h)) + bracket(g, bracket(h, f)) + bracket(h, bracket(f, g))
    assert jac.is_zero()


@given(tangent_fields(), tangent_fields())
def test_bracket_stays_tangent(f, g):
    assert bracket(f, g).tangent


def test_shear_and_overshear():
    y, z = R.y, R.z()
    assert shear(V, y ** 3) == y ** 3 * V
    assert overshear(V, z * y) == z * y * V
    with pytest.raises(KernelViolation) as exc:
        shear(V, R.x)
    assert exc.value.residual == R.dp()


def test_adj_power():
    r = ring_of("z^3")
    v, w, h = (make_named(r, n) for n in "VWH")
    assert adj_power(v, w, 0) == w
    assert adj_power(v, w, 1) == r.p_derivative(2) * h
    # lemma formula at n = 2: -p'' V + y p''' H
    assert adj_power(v, w, 2) == (r.z() * v).scale(-6) + (r.y * h).scale(6)


@given(tangent_fields(max_deg=1), st.integers(0, 3))
def test_adj_power_recursion(f, n):
    assert adj_power(V, f, n + 1) == bracket(V, adj_power(V, f, n))


def test_divergence_values():
    y, z = R.y, R.z()
    assert divergence(V).is_zero() and divergence(W).is_zero() and divergence(H).is_zero()
    assert divergence(z * V) == y
    assert divergence(z * y ** 2 * V) == y ** 3


@given(ring_elems(R, 2, 3), tangent_fields())
def test_divergence_leibniz(f, theta):
    assert divergence(f * theta) == f * divergence(theta) + theta.apply(f)


@given(st.lists(st.integers(-3, 3), min_size=1, max_size=4))
def test_shears_preserve_volume(coeffs):
    f = sum((R.y ** e).scale(c) for e, c in enumerate(coeffs))
    assert divergence(f * V).is_zero()
    g = sum((R.x ** e).scale(c) for e, c in enumerate(coeffs))
    assert divergence(g * W).is_zero()


def test_is_lnd():
    r = ring_of("z^2")
    v = make_named(r, "V")
    res = is_lnd(v, 10)
    assert res.nilpotent and res.order == 3 and str(res) == "Nilpotent(3)"
    assert str(is_lnd(make_named(r, "H"), 10)) == "ExceedsCap"
    assert is_lnd(VectorField.zero(r), 5).order == 1


@pytest.mark.parametrize("n", [0, 1, 2, 3])
def test_replica_is_lnd(n):
    assert is_lnd(R.y ** n * V, 40).nilpotent
    assert is_lnd(R.x ** n * W, 40).nilpotent


@pytest.mark.parametrize("p", SMOOTH_P)
def test_verify_identities_pass(p):
    report = verify_identities(ring_of(p), 5)
    assert report.all_passed, [c.to_json() for c in report.failures()]


def test_verify_flags_printed_discrepancies():
    report = verify_identities(R, 5)
    failing = {c.label for c in report.printed_checks if not c.passed}
    assert any("adj_{yV}^n(W) = -n" in f for f in failing)
    assert any("y^(n+1) W" in f for f in failing)
    assert report.discrepancies


def test_equation_two_for_z_squared():
    r = ring_of("z^2")
    v, w, h = (make_named(r, n) for n in "VWH")
    assert (-(r.x * v) + r.y * w - r.parse("2*z") * h).is_zero()


def test_several_variable_table():
    r = ring_of("z1^2 + z2^2")
    report = verify_identities(r, 3)
    assert report.all_passed
    assert any(c.label.startswith("[V_k, W_l]") for c in report.checks)


def test_parse_field_and_json():
    f = parse_field(R, "y^2*V - 3*z*H")
    assert f == R.y ** 2 * V - (R.z() * H).scale(3)
    assert VectorField.from_json(R, f.to_json()) == f
    with pytest.raises(ValueError):
        parse_field(R, "x + y")
