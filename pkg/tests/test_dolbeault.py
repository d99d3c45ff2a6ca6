import pytest

from genformal.dolbeault import (
    CORNERS,
    GradedSection,
    classical_dbar,
    classical_del,
    gk_four_split,
    pq_section,
    split_dH,
    verify_btransform_ops,
    verify_symp_transform,
)
from genformal.errors import BNotClosed, ResidualOutsideAdjacentDegrees
from genformal.gcs import from_complex, from_symplectic, gk_check, standard_complex, standard_symplectic
from genformal.polyforms import TwistData, d, from_dict, parse_form, polyform
from genformal.scalars import GaussianRational, Poly
from genformal.spinor import Chart, FormVector
from helpers import rand_poly_form, rng_for

R2, R4 = Chart.real(2), Chart.real(4)
C2, C3 = Chart.complex_(2), Chart.complex_(3)


def zero_coeffs(f):
    return all(Poly.coerce(v).is_zero() for v in f.c.values())


def test_complex_split_is_classical_dolbeault():
    J = from_complex(C2, standard_complex(C2))
    rng = rng_for(40)
    for _ in range(10):
        a = rand_poly_form(rng, C2, max_deg=3)
        for k, piece in J.grading().decompose(polyform(a)).items():
            dl, db = split_dH(GradedSection(piece, k, J))
            assert db.k == k + 1 and dl.k == k - 1
            assert zero_coeffs(db.alpha - classical_dbar(piece))
            assert zero_coeffs(dl.alpha - classical_del(piece))


def test_closed_section_gives_zero():
    J = from_complex(C2, standard_complex(C2))
    s = GradedSection(from_dict(C2, {(2,): 1}), 1, J)
    dl, db = split_dH(s)
    assert dl.is_zero() and db.is_zero()


def test_graded_section_rejects_mixed_form():
    J = from_complex(C2, standard_complex(C2))
    mixed = from_dict(C2, {(0,): 1, (2,): 1})
    with pytest.raises(ResidualOutsideAdjacentDegrees):
        GradedSection(mixed, 1, J)


def test_non_adjacent_residual_under_twist():
    # a (3,0)+(0,3) twist moves U^k by ±3
    J = from_complex(C3, standard_complex(C3))
    H = from_dict(C3, {(0, 1, 2): 1, (3, 4, 5): 1})
    tw = TwistData(C3, H)
    s = GradedSection(FormVector.one(C3, Poly.const(1)), 0, J)
    with pytest.raises(ResidualOutsideAdjacentDegrees) as exc:
        split_dH(s, tw)
    assert set(exc.value.residual) == {-3, 3}


def test_symp_transform_constant():
    rep = verify_symp_transform(FormVector.one(R2, Poly.const(1)), standard_symplectic(R2))
    assert rep.passed


@pytest.mark.parametrize("ch", [R2, R4])
def test_symp_transform_random(ch):
    rng = rng_for(41)
    W = standard_symplectic(ch)
    for _ in range(10):
        rep = verify_symp_transform(rand_poly_form(rng, ch, max_deg=2, complex_=False), W)
        assert rep.passed, rep.failures()


def test_symp_transform_top_degree():
    top = from_dict(R4, {(0, 1, 2, 3): Poly.var("x0") * Poly.var("x2") ** 2})
    assert verify_symp_transform(top, standard_symplectic(R4)).passed


def test_btransform_ops_zero_B():
    J = from_complex(C2, standard_complex(C2))
    rng = rng_for(42)
    samples = [rand_poly_form(rng, C2) for _ in range(3)]
    assert verify_btransform_ops(J, FormVector(C2), samples).passed


def test_btransform_ops_constant_B_complex():
    J = from_complex(R4, standard_complex(R4))
    B = from_dict(R4, {(0, 2): 1, (1, 3): GaussianRational("1/2"), (0, 1): 3})
    rng = rng_for(43)
    samples = [rand_poly_form(rng, R4, complex_=False) for _ in range(10)]
    assert verify_btransform_ops(J, B, samples).passed


def test_btransform_ops_polynomial_B_symplectic():
    J = from_symplectic(R4, standard_symplectic(R4))
    B = d(parse_form(R4, "x0*x1*dx2 + x3^2*dx0"))
    rng = rng_for(44)
    samples = [rand_poly_form(rng, R4, complex_=False) for _ in range(5)]
    assert verify_btransform_ops(J, B, samples).passed


def test_btransform_ops_rejects_open_B():
    J = from_symplectic(R4, standard_symplectic(R4))
    with pytest.raises(BNotClosed):
        verify_btransform_ops(J, parse_form(R4, "x0*dx1&dx2"), [])


def flat_pair():
    return gk_check(from_symplectic(C2, standard_symplectic(C2)), from_complex(C2, standard_complex(C2)))


def test_four_split_flat_kahler():
    pair = flat_pair()
    rng = rng_for(45)
    seen = 0
    for _ in range(6):
        a = rand_poly_form(rng, C2, max_deg=2)
        for p in range(-2, 3):
            for q in range(-2, 3):
                s = pq_section(pair, a, p, q)
                if s.is_zero():
                    continue
                split = gk_four_split(pair, s, p, q)
                assert set(split.components) == set(CORNERS)
                assert zero_coeffs(split.total() - d(s))
                seen += 1
    assert seen > 0


def test_four_split_constant_section():
    pair = flat_pair()
    a = from_dict(C2, {(0, 2): 1, (1,): 2})
    for p in range(-2, 3):
        for q in range(-2, 3):
            s = pq_section(pair, a, p, q)
            split = gk_four_split(pair, s, p, q)
            assert all(v.is_zero() for v in split.components.values())


def test_four_split_dbar_is_sum_of_plus_corners():
    pair = flat_pair()
    J1 = pair.J1
    rng = rng_for(46)
    for _ in range(4):
        a = rand_poly_form(rng, C2, max_deg=2)
        for p in range(-2, 3):
            for q in range(-2, 3):
                s = pq_section(pair, a, p, q)
                if s.is_zero():
                    continue
                split = gk_four_split(pair, s, p, q)
                _, db = split_dH(GradedSection(s, p, J1, check=False))
                assert zero_coeffs(db.alpha - split.corner(1, 1) - split.corner(1, -1))
