import dataclasses
import json
from pathlib import Path

import pytest

from genformal import linalg
from genformal.equivariant import ActionData, MomentData, check_moment, is_invariant_deformation
from genformal.errors import (
    HypothesisNotVerified,
    InputError,
    NotFree,
    NotOnLevelSet,
    ParseError,
    WeightConditionViolated,
)
from genformal.scalars import ONE, ZERO, GaussianRational
from genformal.scenes import (
    aux_action,
    betti_blowup,
    betti_cpn,
    build_blowup,
    build_cpn,
    closedness,
    fixed_points,
    generator_vectors,
    gk_at,
    hodge_report,
    integrable_L_epsilon,
    load_scene,
    pi_L_epsilon,
    quotient_type,
    scene_from_json,
    scene_hash,
    scene_text,
    scene_to_json,
    tM_cap_piL,
    upstairs_type,
    validate_blowup_weights,
)

SCENES = Path(__file__).resolve().parent.parent / "scenes"
Q = GaussianRational


@pytest.fixture(scope="module")
def cp3():
    return build_cpn(3, "1/100")


@pytest.fixture(scope="module")
def blowup():
    return build_blowup(3)


def on_locus(pt):
    return pt["z0"] * pt["z1"] == ZERO


def test_cpn_scene_invariants(cp3):
    assert check_moment(cp3.J_omega(), cp3.action, cp3.moment).passed
    assert integrable_L_epsilon(cp3).integrable
    assert closedness(cp3)
    assert len(cp3.points) >= 6


def test_cpn_types(cp3):
    n_on = n_off = 0
    for pt in cp3.points:
        if on_locus(pt):
            assert quotient_type(cp3, pt) == (0, 3)
            assert upstairs_type(cp3, pt) == 4
            n_on += 1
        else:
            assert quotient_type(cp3, pt) == (0, 1)
            assert upstairs_type(cp3, pt) == 2
            n_off += 1
    assert n_on >= 3 and n_off >= 3


def test_generator_not_in_pi_L(cp3):
    for pt in cp3.points:
        assert tM_cap_piL(cp3, pt) == 0
        X = generator_vectors(cp3, pt)[0]
        assert not linalg.contains(pi_L_epsilon(cp3, pt), [X])


def test_type_constant_on_orbits(cp3):
    g = Q("3/5", "4/5")  # a rational point of the unit circle
    for pt in cp3.points:
        moved = {k: v * g for k, v in pt.items()}
        assert quotient_type(cp3, moved) == quotient_type(cp3, pt)


def test_type_parity(cp3):
    # upstairs type is n+1 or n-1 (n = 3), so it is always even here
    assert {upstairs_type(cp3, pt) % 2 for pt in cp3.points} == {0}


def test_gk_at_sample_points(cp3):
    for pt in cp3.points:
        pair = gk_at(cp3, pt)
        assert all(m.re > 0 and not m.im for m in pair.minors)


def test_zero_deformation_gives_complex_quotient(cp3):
    flat = dataclasses.replace(cp3, epsilon=[], _cache={})
    for pt in flat.points:
        assert quotient_type(flat, pt) == (0, 3)
    rep = hodge_report(flat)
    assert rep.trivial and "trivial" in rep.trivial_note


def test_off_level_set(cp3):
    with pytest.raises(NotOnLevelSet):
        quotient_type(cp3, {"z0": 1, "z1": 0, "z2": 0, "z3": 0})


def test_not_free(cp3):
    half = Q("1/2")
    act = ActionData.diagonal(cp3.chart, [[half] * 4, [half] * 4])
    phi = cp3.moment.f[0]
    twice = dataclasses.replace(cp3, action=act, moment=MomentData([phi, phi]), level=[ONE, ONE], _cache={})
    with pytest.raises(NotFree):
        quotient_type(twice, cp3.points[0])


def test_cpn_parameter_validation():
    with pytest.raises(InputError):
        build_cpn(2)
    with pytest.raises(InputError):
        build_cpn(3, "-1/2")


def test_blowup_weight_conditions():
    with pytest.raises(WeightConditionViolated) as exc:
        validate_blowup_weights(3, [1, 2, 3, 4, 9, -2])
    assert exc.value.condition == "count"
    with pytest.raises(WeightConditionViolated) as exc:
        validate_blowup_weights(3, [1, 2, 3, 4, 9])
    assert exc.value.condition == "b"
    with pytest.raises(WeightConditionViolated) as exc:
        validate_blowup_weights(3, [1, 1, 3, 3, 2])
    assert exc.value.condition == "a"
    with pytest.raises(WeightConditionViolated) as exc:
        validate_blowup_weights(3, [1, 5, 3, 0, -3])
    assert exc.value.condition == "c"
    assert validate_blowup_weights(3, [-3, -2, -1, -3, 1])


def test_blowup_scene(blowup):
    assert check_moment(blowup.J_omega(), blowup.action, blowup.moment).passed
    assert integrable_L_epsilon(blowup).integrable
    assert closedness(blowup)
    eps = blowup.deformation
    for X in blowup.action.generators + aux_action(blowup).generators:
        assert is_invariant_deformation(X, eps, blowup.chart)


def test_blowup_types(blowup):
    for pt in blowup.points:
        F = pt["z0"] * pt["z1"] * pt["z4"]
        assert quotient_type(blowup, pt) == (0, 1 if F else 3)


def test_betti_tables():
    assert betti_cpn(3) == [1, 0, 1, 0, 1, 0, 1]
    assert betti_blowup(3) == [1, 0, 2, 0, 2, 0, 1]
    assert betti_blowup(4) == [1, 0, 2, 0, 2, 0, 2, 0, 1]


def test_fixed_points_cpn(cp3):
    fps = fixed_points(cp3)
    assert sorted(fp.support for fp in fps) == [(0,), (1,), (2,), (3,)]
    for fp in fps:
        assert fp.isolated
        f = cp3.moment.f[0].eval(fp.point)
        assert f == ONE


def test_hodge_cpn(cp3):
    rep = hodge_report(cp3)
    for (p, q), v in rep.table.items():
        expected = 1 if q == 0 and p in (-3, -1, 1, 3) else 0
        assert v == expected
    assert rep.total == 4 == sum(betti_cpn(3))
    assert all(rep.notes[key] for key in rep.table)
    assert not rep.trivial


def test_hodge_blowup(blowup):
    rep = hodge_report(blowup)
    assert rep.row(0) == [1, 0, 2, 0, 2, 0, 1]
    assert rep.total == 6
    for (p, q), v in rep.table.items():
        if v:
            assert abs(p + q) <= 3 and (p + q - 3) % 2 == 0


def test_hodge_rejects_non_isolated(cp3):
    same = dataclasses.replace(cp3, aux_weights=[ONE] * 4, _cache={})
    with pytest.raises(HypothesisNotVerified):
        hodge_report(same)


def test_scene_json_round_trip(cp3, blowup):
    for scene in (cp3, blowup):
        data = scene_to_json(scene)
        again = scene_to_json(scene_from_json(json.loads(json.dumps(data))))
        assert again == data
        assert scene_hash(again) == scene_hash(data)


@pytest.mark.parametrize("name,builder", [("cp3", lambda: build_cpn(3)), ("blowup", lambda: build_blowup(3))])
def test_shipped_scenes_match_builders(name, builder):
    _, data = load_scene(SCENES / f"{name}.json")
    assert data == scene_to_json(builder())
    assert (SCENES / f"{name}.json").read_text(encoding="utf-8") == scene_text(data)


def test_load_scene_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "version": 1,\n  "chart": {"complex": 2\n}', encoding="utf-8")
    with pytest.raises(ParseError) as exc:
        load_scene(bad)
    assert "line" in str(exc.value)
    data = scene_to_json(build_cpn(3))
    data["version"] = 2
    with pytest.raises(InputError):
        scene_from_json(data)
    data["version"] = 1
    data["epsilon"][0]["first"] = "d/dq7"
    with pytest.raises(ParseError):
        scene_from_json(data)


def test_missing_file():
    with pytest.raises(InputError):
        load_scene("/nonexistent/scene.json")
