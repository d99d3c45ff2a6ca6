import random

import pytest

from genformal.dolbeault import GradedSection, symplectic_transport
from genformal.equivariant import (
    ActionData,
    CartanElement,
    MomentData,
    a_section,
    b_conjugation,
    cartan_d_prime,
    check_moment,
    circle_field,
    D_G,
    is_invariant_deformation,
    linear_field,
    random_invariant_element,
    script_A,
    verify_A_square,
    verify_dH_A_anticommute,
    verify_DG_square,
    verify_lemma_anticommute,
    verify_leibniz,
    verify_symplectic_cartan,
)
from genformal.errors import BNotClosedOrNotInvariant, NotInvariant
from genformal.gcs import from_symplectic, standard_symplectic
from genformal.polyforms import TwistData, d, iota, parse_form, polyform
from genformal.scalars import I, GaussianRational, Poly
from genformal.scenes import build_blowup, build_cpn
from genformal.spinor import Chart, FormVector
from genformal.polyforms import normal_form_deformation

C2 = Chart.complex_(2)
HALF = GaussianRational("1/2")


def phi(ch):
    return sum((Poly.var(f"z{k}") * Poly.var(f"zb{k}") for k in range(ch.n)), Poly()).scale(HALF)


@pytest.fixture(scope="module")
def c2():
    act = ActionData.diagonal(C2, [[HALF, HALF]])
    mom = MomentData([phi(C2)])
    J = from_symplectic(C2, standard_symplectic(C2))
    return act, mom, J


@pytest.fixture(scope="module")
def cp3():
    return build_cpn(3)


def samples_for(act, seed, count=10, max_poly_degree=4):
    rng = random.Random(seed)
    return [random_invariant_element(act, rng, degree=k % 3, max_poly_degree=max_poly_degree, n_terms=3) for k in range(count)]


def test_circle_field_matches_stated_generator():
    X = circle_field(C2, [HALF, HALF])
    expected = [Poly.var("z0") * (I / 2), Poly.var("z1") * (I / 2), Poly.var("zb0") * (-I / 2), Poly.var("zb1") * (-I / 2)]
    assert X == expected


def test_non_commuting_generators_rejected():
    R2 = Chart.real(2)
    rot = linear_field(R2, [[0, -1], [1, 0]])
    shear = linear_field(R2, [[0, 1], [0, 0]])
    with pytest.raises(NotInvariant):
        ActionData(R2, [rot, shear])


def test_non_invariant_H_rejected():
    H = d(parse_form(C2, "z0*z1*dz0&dzb1"))
    assert not H.is_zero()
    with pytest.raises(NotInvariant):
        ActionData.diagonal(C2, [[1, 0]], TwistData(C2, H))


def test_moment_passes(c2):
    act, mom, J = c2
    assert check_moment(J, act, mom).passed


def test_moment_perturbed_fails(c2):
    act, _, J = c2
    rep = check_moment(J, act, MomentData([phi(C2) + Poly.var("z0")]))
    assert not rep.passed
    assert rep.membership and rep.membership[0][0] == 0


def test_moment_blowup_torus():
    scene = build_blowup(3)
    assert check_moment(scene.J_omega(), scene.action, scene.moment).passed


def test_script_A_collapses_to_d_prime(c2):
    act, _, _ = c2
    zero = MomentData([Poly()])
    for a in samples_for(act, 1, 3):
        assert script_A(a, act, zero) == cartan_d_prime(a, act)


def test_script_A_on_constant(c2):
    act, mom, _ = c2
    one = CartanElement.form(FormVector.one(C2, Poly.const(1)), 1)
    out = script_A(one, act, mom)
    df = d(FormVector.one(C2, mom.f[0])).scale(I)
    assert out == CartanElement(C2, 1, {(1,): df})


def test_script_A_requires_invariance(c2):
    act, mom, _ = c2
    bad = CartanElement.form(parse_form(C2, "z0*dz1"), 1)
    with pytest.raises(NotInvariant):
        script_A(bad, act, mom)


def test_cartan_element_arithmetic():
    a = CartanElement(C2, 1, {(0,): parse_form(C2, "dz0"), (1,): parse_form(C2, "z0*zb0")})
    b = CartanElement(C2, 1, {(1,): parse_form(C2, "z0*zb0")})
    assert (a - b) == CartanElement(C2, 1, {(0,): parse_form(C2, "dz0")})
    assert (a - a).is_zero()
    assert a.degree() == 1
    assert a.scale(2) == a + a
    # degree truncation
    c = CartanElement(C2, 1, {(9,): parse_form(C2, "dz0")}, max_degree=4)
    assert c.is_zero()


def test_symplectic_A_transport(c2):
    act, mom, J = c2
    W = standard_symplectic(C2)
    rep = verify_symplectic_cartan(samples_for(act, 2, 5), W, act, mom)
    assert rep.passed, rep.witnesses[:1]


def test_identities_on_cp3(cp3):
    act, mom = cp3.action, cp3.moment
    s = samples_for(act, 3)
    assert verify_dH_A_anticommute(s, act, mom).passed
    assert verify_DG_square(s, act, mom).passed
    assert verify_A_square(s, act, mom).passed
    rep = verify_lemma_anticommute(s, cp3.J_omega(), act, mom)
    assert rep.passed, rep.witnesses[:1]


def _twisted_c2():
    beta = parse_form(C2, "z0*zb1*dz1&dzb0 + z1*zb1*dz0&dzb0")
    H = d(beta)
    act = ActionData.diagonal(C2, [[HALF, HALF]], TwistData(C2, H))
    eta = iota(act.generators[0], beta).scale(-1)
    return act, eta


def test_twisted_dH_A_anticommute():
    act, eta = _twisted_c2()
    assert not act.tw.is_zero()
    s = samples_for(act, 4, 5)
    assert verify_dH_A_anticommute(s, act, MomentData([phi(C2)], [eta])).passed
    assert verify_DG_square(s, act, MomentData([phi(C2)], [eta])).passed


def test_twisted_negative_control():
    # dropping η breaks ι_ξ H = dη and the anticommutation with it
    act, _ = _twisted_c2()
    s = samples_for(act, 5, 5)
    rep = verify_dH_A_anticommute(s, act, MomentData([phi(C2)]))
    assert not rep.passed and rep.witnesses


def test_leibniz_lowest_spinor(c2):
    # e^{iω} spans U^{-n}, so ∂ of it vanishes and 𝒜(ξ)·e^{iω} must too
    act, mom, J = c2
    W = standard_symplectic(C2)
    lowest = symplectic_transport(FormVector.one(C2, Poly.const(1)), W)
    assert verify_leibniz(lowest, -2, J, act, mom, 0).passed


def test_leibniz_constant_moment():
    # trivial action, constant f: both sides are 3·∂α
    act = ActionData.diagonal(C2, [[0, 0]])
    J = from_symplectic(C2, standard_symplectic(C2))
    mom = MomentData([Poly.const(3)])
    alpha = GradedSection.project(parse_form(C2, "z0*zb0*dz1 + dzb1"), 1, J).alpha
    assert verify_leibniz(alpha, 1, J, act, mom, 0).passed


def test_leibniz_random_cp3(cp3):
    J = cp3.J_omega()
    rng = random.Random(6)
    for a in samples_for(cp3.action, 6, 4, 2):
        for alpha in a.terms.values():
            k = rng.randint(-2, 2)
            piece = GradedSection.project(alpha, k, J).alpha
            assert verify_leibniz(piece, k, J, cp3.action, cp3.moment, 0).passed


def test_b_conjugation_zero_B(c2):
    act, mom, J = c2
    rep = b_conjugation(J, FormVector(C2), act, mom, samples_for(act, 7, 3))
    assert rep.passed


def test_b_conjugation_cp3(cp3):
    act, mom = cp3.action, cp3.moment
    # a constant invariant B and a polynomial closed invariant B
    for text in ("i*dz0&dzb0 + dz1&dzb2 + dz2&dzb1", None):
        if text is None:
            B = d(parse_form(cp3.chart, "z1*zb1*z0*dzb0 + z1*zb1*zb0*dz0"))
        else:
            B = parse_form(cp3.chart, text)
        rep = b_conjugation(cp3.J_omega(), B, act, mom, samples_for(act, 8, 4))
        assert rep.passed, rep.witnesses[:1]


def test_b_conjugation_spot_sign(c2):
    # D_G^B = D_G - (ι_ξ B)∧ with η' = η + ι_ξ B; the "+" variant is wrong
    act, mom, J = c2
    B = parse_form(C2, "i*dz0&dzb0")
    from genformal.equivariant import b_moment

    momB = b_moment(act, mom, B)
    a = samples_for(act, 9, 1)[0]
    iB = iota(act.generators[0], polyform(B))
    wedge_term = a.times_x(0, lambda c: iB.wedge(c))
    diff = D_G(a, act, momB) - D_G(a, act, mom)
    assert diff == -wedge_term
    assert not wedge_term.is_zero()


def test_b_conjugation_rejects_non_invariant(c2):
    act, mom, J = c2
    with pytest.raises(BNotClosedOrNotInvariant):
        b_conjugation(J, parse_form(C2, "dz0&dz1"), act, mom, [])


def test_deformation_invariance():
    ch = Chart.complex_(4)
    eps = normal_form_deformation(ch, [2, 3], {(2, 3): Poly.var("z0") * Poly.var("z1")})
    for w, expected in (([1, 1, 1, 1], True), ([1, 5, 2, 4], True), ([1, 5, 2, 3], False)):
        assert is_invariant_deformation(circle_field(ch, w), eps, ch) is expected


def test_a_section_shape(c2):
    act, mom, _ = c2
    s = a_section(act, mom, 0)
    assert [Poly.coerce(x) for x in s.X] == [-x for x in act.generators[0]]
