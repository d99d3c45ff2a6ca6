import pytest

from genformal.errors import HNotClosed, NotIsotropic, ParseError
from genformal.gcs import eigenbundle, from_complex, standard_complex
from genformal.polyforms import (
    TwistData,
    closedness_condition,
    courant,
    d,
    d_H,
    from_dict,
    integrable,
    iota,
    iota_lambda,
    koszul_delta,
    lie,
    lie_bracket,
    normal_form_deformation,
    parse_form,
    polyform,
    section,
    vector_field,
)
from genformal.scalars import I, GaussianRational, Poly
from genformal.spinor import Chart, FormVector, GeneralizedVector, clifford_act, pairing
from genformal.gcs import standard_symplectic
from helpers import rand_poly, rand_poly_form, rng_for

R2, R4 = Chart.real(2), Chart.real(4)
C1, C2 = Chart.complex_(1), Chart.complex_(2)
C4 = Chart.complex_(4)


def P(s):
    return Poly.var(s)


def rand_field(rng, ch, deg=2):
    return vector_field(ch, [rand_poly(rng, ch.coords, deg, 2, complex_=False) for _ in range(ch.m)])


def closed_H(rng, ch):
    beta = rand_poly_form(rng, ch, n_terms=4, max_deg=2, degrees={2}, complex_=False)
    const = from_dict(ch, {(0, 1, 2): GaussianRational(3)})
    return d(beta) + const


def test_d_example():
    a = from_dict(C2, {(1,): P("z0")})
    assert d(a) == from_dict(C2, {(0, 1): 1})


def test_d_squared_zero():
    rng = rng_for(30)
    for _ in range(20):
        a = rand_poly_form(rng, R4, max_deg=3)
        assert d(d(a)).is_zero()


def test_cartan_formula_matches_coordinate_lie():
    rng = rng_for(31)
    for _ in range(20):
        X = rand_field(rng, R4)
        a = rand_poly_form(rng, R4)
        assert lie(X, a) == d(iota(X, a)) + iota(X, d(a))


def test_d_H_basics():
    rng = rng_for(32)
    tw0 = TwistData.zero(R4)
    a = rand_poly_form(rng, R4)
    assert d_H(a, tw0) == d(a)
    tw = TwistData(R4, closed_H(rng, R4))
    one = FormVector.one(R4)
    assert d_H(one, tw) == tw.H.scale(-1)


def test_d_H_squared_zero():
    rng = rng_for(33)
    for _ in range(10):
        tw = TwistData(R4, closed_H(rng, R4))
        a = rand_poly_form(rng, R4)
        assert d_H(d_H(a, tw), tw).is_zero()


def test_twist_must_be_closed():
    with pytest.raises(HNotClosed):
        TwistData(R4, from_dict(R4, {(0, 1, 2): P("x3")}))


def test_courant_coordinate_fields():
    a = section(R2, X=[1, 0])
    b = section(R2, X=[0, 1])
    assert courant(a, b).is_zero()


def test_courant_pure_vectors_with_H():
    rng = rng_for(34)
    tw = TwistData(R4, closed_H(rng, R4))
    for _ in range(5):
        X, Y = rand_field(rng, R4), rand_field(rng, R4)
        out = courant(section(R4, X=X), section(R4, X=Y), tw)
        form = iota(Y, iota(X, tw.H))
        expected_vec = lie_bracket(X, Y, R4)
        assert [Poly.coerce(x) for x in out.X] == expected_vec
        xi = [Poly() for _ in range(4)]
        for mask, v in form.c.items():
            xi[mask.bit_length() - 1] = v
        assert [Poly.coerce(x) for x in out.xi] == xi


def test_courant_antisymmetric():
    rng = rng_for(35)
    tw = TwistData(R4, closed_H(rng, R4))
    for _ in range(20):
        a = section(R4, X=rand_field(rng, R4, 1), xi=rand_field(rng, R4, 1))
        b = section(R4, X=rand_field(rng, R4, 1), xi=rand_field(rng, R4, 1))
        assert (courant(a, b, tw) + courant(b, a, tw)).is_zero()


def test_dorfman_is_derived_bracket():
    # Courant + d<a, b> acts on spinors as [[d_H, a·], b·]
    rng = rng_for(36)
    tw = TwistData(R4, closed_H(rng, R4))
    for _ in range(5):
        a = section(R4, X=rand_field(rng, R4, 1), xi=rand_field(rng, R4, 1))
        b = section(R4, X=rand_field(rng, R4, 1), xi=rand_field(rng, R4, 1))
        alpha = rand_poly_form(rng, R4, max_deg=1)
        c = courant(a, b, tw)
        pab = d(FormVector.one(R4, Poly.coerce(pairing(a, b))))
        dorf = GeneralizedVector(R4, list(c.X) + [Poly.coerce(x) + pab.c.get(1 << k, Poly()) for k, x in enumerate(c.xi)])
        A = lambda f: clifford_act(a, f)
        B = lambda f: clifford_act(b, f)
        D = lambda f: d_H(polyform(f), tw)
        lhs = D(A(B(alpha))) + A(D(B(alpha))) - B(D(A(alpha))) - B(A(D(alpha)))
        assert _clean_zero(lhs - clifford_act(dorf, alpha))


def _clean_zero(f):
    return all(Poly.coerce(v).is_zero() for v in f.c.values())


def test_integrable_complex_frame():
    L = eigenbundle(from_complex(C2, standard_complex(C2)))
    assert integrable(L).integrable


def _eps_frame(F):
    J = from_complex(C4, standard_complex(C4))
    eps = normal_form_deformation(C4, [2, 3], {(2, 3): F}, GaussianRational("1/100"))
    return eps.frame(eigenbundle(J))


def test_integrable_deformed_frame():
    res = integrable(_eps_frame(P("z0") * P("z1")))
    assert res.integrable and res.witness is None


def test_integrable_negative_control():
    res = integrable(_eps_frame(P("zb1")))
    assert not res.integrable
    assert res.witness is not None and not res.value.is_zero()


def test_integrable_rejects_non_isotropic():
    v = section(R2, X=[1, 0], xi=[1, 0])
    with pytest.raises(NotIsotropic):
        integrable([v, section(R2, X=[0, 1])])


def test_integrable_thread_pool(monkeypatch):
    monkeypatch.setenv("GENFORMAL_THREADS", "3")
    assert not integrable(_eps_frame(P("zb1"))).integrable
    assert integrable(_eps_frame(P("z0") * P("z1"))).integrable


def test_closedness_condition():
    assert closedness_condition(C4, [2, 3], {(2, 3): P("z0") * P("z1")})
    C5 = Chart.complex_(5)
    assert closedness_condition(C5, [2, 3], {(2, 3): P("z0") * P("z1") * P("z4")})
    assert not closedness_condition(C4, [2, 3], {(2, 3): P("zb0")})
    assert not closedness_condition(C4, [2, 3], {(2, 3): P("z2")})


def test_koszul_delta_basics():
    W = standard_symplectic(R2)
    assert koszul_delta(FormVector.one(R2, GaussianRational(5)), W).is_zero()
    assert koszul_delta(from_dict(R2, {(0, 1): 1}), W).is_zero()


def test_koszul_delta_squared():
    rng = rng_for(37)
    for ch in (R2, R4):
        W = standard_symplectic(ch)
        for _ in range(10):
            a = rand_poly_form(rng, ch, max_deg=3)
            assert koszul_delta(koszul_delta(a, W), W).is_zero()


def test_iota_lambda_lowers_degree_by_two():
    W = standard_symplectic(R4)
    top = from_dict(R4, {(0, 1, 2, 3): 1})
    out = iota_lambda(top, W)
    assert set(bin(k).count("1") for k in out.c) == {2}


def test_parse_form_round_trip():
    rng = rng_for(38)
    for ch in (R4, C2):
        for _ in range(15):
            a = rand_poly_form(rng, ch)
            assert parse_form(ch, str(a)) == polyform(a)


def test_parse_form_examples():
    a = parse_form(C2, "z0*dz1 & dzb0 - 2*i*dz0")
    expected = from_dict(C2, {(1, 2): P("z0"), (0,): -2 * I})
    assert a == expected
    assert parse_form(C2, "0").is_zero()


def test_parse_form_errors():
    with pytest.raises(ParseError):
        parse_form(C2, "z0*dq1")
    with pytest.raises(ParseError):
        parse_form(R2, "dx0 ∧ ")
