import random

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from conftest import algebra
from kpalg.errors import VerificationError
from kpalg.fixtures import ellipsoid_name
from kpalg.kp import (KPCtx, coeffs_from_values, d_apply, d_matrix, g_form, kp_verify,
                      project, trace)
from kpalg.poisson import BracketTable
from kpalg.ring import make_ctx

import oracles


def two_generator_family(p="1 + y^2", lam="x"):
    """{x,y} = p, g = (1/lam) Id, eta = lam^2/p^2."""
    ring = make_ctx(("x", "y"), [], [lam, p])
    table = BracketTable.from_upper(ring, {(0, 1): p})
    inv = ring.parse(f"1/({lam})")
    g = [[inv, ring.zero], [ring.zero, inv]]
    eta = ring.parse(f"({lam})^2/({p})^2")
    return KPCtx(table, g, eta)


@pytest.fixture(scope="module")
def family():
    return two_generator_family()


@pytest.fixture(scope="module")
def ellipsoid():
    return algebra(ellipsoid_name(1, 2, 3)).kp


def test_kp_verify_examples(family, ellipsoid):
    assert kp_verify(family)
    assert kp_verify(ellipsoid)


def test_kp_verify_fails_with_doubled_eta(sphere):
    bad = KPCtx(sphere.table, sphere.g, sphere.eta * 2, verify=False)
    res = kp_verify(bad)
    assert not res
    assert not res.residual.is_zero()
    with pytest.raises(VerificationError):
        KPCtx(sphere.table, sphere.g, sphere.eta * 2)


def test_d_matrix_ellipsoid(ellipsoid):
    a, b, c = 1, 2, 3
    ring = ellipsoid.ring
    eta = ellipsoid.eta
    expect = [[f"{b*b}*y^2 + {c*c}*z^2", f"-{a*b}*x*y", f"-{a*c}*x*z"],
              [f"-{a*b}*x*y", f"{a*a}*x^2 + {c*c}*z^2", f"-{b*c}*y*z"],
              [f"-{a*c}*x*z", f"-{b*c}*y*z", f"{a*a}*x^2 + {b*b}*y^2"]]
    D = d_matrix(ellipsoid)
    for i in range(3):
        for j in range(3):
            assert D[i][j] == eta * ring.parse(expect[i][j])


def test_d_matrix_family(family, plane_flat):
    lam = family.elem("x")
    D = d_matrix(family)
    assert D[0][0] == lam and D[1][1] == lam
    assert D[0][1].is_zero() and D[1][0].is_zero()
    one, zero = plane_flat.ring.one, plane_flat.ring.zero
    assert d_matrix(plane_flat) == ((one, zero), (zero, one))


def test_d_apply_examples(family, sphere):
    assert d_apply(0, "x", family) == family.elem("x")
    assert d_apply(0, "z", sphere) == sphere.elem("-x*z")
    for i in range(3):
        for j in range(3):
            assert d_apply(i, sphere.ring.gen(j), sphere) == sphere.D[i][j]


@pytest.mark.parametrize("f", ["z", "x*y", "x^2*z - y", "y^3"])
def test_d_apply_matches_sphere_oracle(sphere, f):
    for i in range(3):
        ours = oracles.to_sympy(d_apply(i, f, sphere))
        num, den = sp.fraction(sp.together(ours))
        rel = [oracles.X**2 + oracles.Y**2 + oracles.Z**2 - 1]
        assert sp.expand(oracles.reduce_mod(num, rel) / oracles.reduce_mod(den, rel)
                         - oracles.sphere_d_apply(i, f)) == 0


def test_d_apply_agrees_with_vector_field(ellipsoid):
    f = ellipsoid.elem("x^2*y - z^3 + x")
    for i in range(3):
        assert d_apply(i, f, ellipsoid) == ellipsoid.d(i, f)


def test_pairing_identity(ellipsoid):
    # {a, b} = D^i(a) P_i(b) with P_i = g_ij P^j
    ring, t = ellipsoid.ring, ellipsoid.table
    a, b = ring.parse("x*y + z"), ring.parse("y^2 - x*z")
    rhs = ring.zero
    for i in range(3):
        low = ring.zero
        for j in range(3):
            low = low + ellipsoid.g[i][j] * t.bracket(ring.gen(j), b)
        rhs = rhs + d_apply(i, a, ellipsoid) * low
    assert t.bracket(a, b) == rhs


def test_project_examples(ellipsoid, plane_flat):
    ring = ellipsoid.ring
    normal = [ring.parse("x"), ring.parse("2*y"), ring.parse("3*z")]
    assert all(v.is_zero() for v in project(normal, ellipsoid))
    X = [plane_flat.elem("x^2"), plane_flat.elem("y - 1")]
    assert project(X, plane_flat) == X


def test_d_matrix_is_projection(ellipsoid):
    D = ellipsoid.Dmix  # D^i_j
    for i in range(3):
        for j in range(3):
            assert sum((D[i][k] * D[k][j] for k in range(3)), ellipsoid.ring.zero) == D[i][j]


polys3 = st.lists(st.sampled_from(["0", "1", "x", "y*z", "x^2 - z", "x*y*z + 2"]),
                  min_size=3, max_size=3)


@settings(max_examples=20, deadline=None)
@given(polys3, polys3)
def test_project_idempotent_and_self_adjoint(ellipsoid, a, b):
    X = [ellipsoid.elem(v) for v in a]
    Y = [ellipsoid.elem(v) for v in b]
    PX = project(X, ellipsoid)
    assert project(PX, ellipsoid) == PX
    g = ellipsoid.g
    PY = project(Y, ellipsoid)
    zero = ellipsoid.ring.zero
    lhs = sum((PX[i] * g[i][j] * Y[j] for i in range(3) for j in range(3)), zero)
    rhs = sum((X[i] * g[i][j] * PY[j] for i in range(3) for j in range(3)), zero)
    assert lhs == rhs


def test_g_form_family(family):
    Dx, Dy = family.generators()
    assert g_form(Dx, Dx) == family.elem("x")
    assert g_form(Dx, Dy).is_zero()
    assert g_form(Dx, family.deriv([0, 0])).is_zero()


def test_g_form_on_generators(ellipsoid):
    gens = ellipsoid.generators()
    for i in range(3):
        for j in range(3):
            assert g_form(gens[i], gens[j]) == ellipsoid.D[i][j]


def test_coeffs_from_values(ellipsoid):
    gens = ellipsoid.generators()
    for Di in gens:
        assert coeffs_from_values(Di.values(), ellipsoid).equals(Di)
    assert coeffs_from_values([ellipsoid.ring.zero] * 3, ellipsoid).is_zero()


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(["1", "x", "y*z - 1", "x^2"]), st.sampled_from(["x", "y^2", "x*z", "y + z"]))
def test_coeffs_from_hamiltonian_values(sphere, a, b):
    ring, t = sphere.ring, sphere.table
    a, b = ring.parse(a), ring.parse(b)
    values = [a * t.bracket(b, ring.gen(j)) for j in range(3)]
    alpha = coeffs_from_values(values, sphere)
    for j in range(3):
        assert alpha(ring.gen(j)) == values[j]
    f = ring.parse("x*y - z^2")
    assert alpha(f) == a * t.bracket(b, f)


def test_trace(ellipsoid, plane_flat):
    ring = ellipsoid.ring
    ident = [[ring.one if i == j else ring.zero for j in range(3)] for i in range(3)]
    assert trace(ident, ellipsoid) == ring.const(2)
    assert trace([[ring.zero] * 3 for _ in range(3)], ellipsoid).is_zero()
    r2 = plane_flat.ring
    assert trace([[r2.one, r2.zero], [r2.zero, r2.one]], plane_flat) == r2.const(2)


def test_trace_is_representation_independent(ellipsoid):
    # adding a kernel combination (coefficients along the gradient) to a row changes nothing
    rng = random.Random(3)
    ring = ellipsoid.ring
    pool = ["0", "1", "x", "y - z", "x*y"]
    L = [[ring.parse(rng.choice(pool)) for _ in range(3)] for _ in range(3)]
    normal = [ring.parse("x"), ring.parse("2*y"), ring.parse("3*z")]
    L2 = [list(r) for r in L]
    f = ring.parse("z + 1")
    for k in range(3):
        L2[1][k] = L2[1][k] + f * normal[k]
    assert trace(L, ellipsoid) == trace(L2, ellipsoid)
