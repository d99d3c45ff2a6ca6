"""Verification suites run by the command line front end.

Each suite returns a list of :class:`Check` records.  Checks are plain data so
that a report can be printed, serialized and read back unchanged.
"""

from __future__ import annotations

import random
from dataclasses import asdict, dataclass

from . import doublecomplex as dc
from .dolbeault import GradedSection
from .equivariant import (
    b_conjugation,
    check_moment,
    is_invariant_deformation,
    random_invariant_element,
    verify_A_square,
    verify_dH_A_anticommute,
    verify_DG_square,
    verify_lemma_anticommute,
    verify_leibniz,
    verify_symplectic_cartan,
)
from .errors import GenformalError, NotFree, NotGeneralizedComplex, NotOnLevelSet
from .gcs import gk_check
from .polyforms import d, parse_form
from .scenes import (
    aux_action,
    closedness,
    gk_at,
    integrable_L_epsilon,
    quotient_type,
    tM_cap_piL,
    upstairs_type,
)

SUITES = ("core", "equivariant", "doublecomplex")
DEFAULT_SEED = 20240611


@dataclass(frozen=True)
class Check:
    name: str
    anchor: str
    status: str  # "pass" or "fail"
    witness: str = None

    @property
    def passed(self):
        return self.status == "pass"

    def to_json(self):
        out = asdict(self)
        if out["witness"] is None:
            del out["witness"]
        return out

    @classmethod
    def from_json(cls, data):
        return cls(data["name"], data["anchor"], data["status"], data.get("witness"))


def _check(name, anchor, ok, witness=None):
    return Check(name, anchor, "pass" if ok else "fail", None if ok else (str(witness) if witness is not None else None))


def _short(x, limit=240):
    s = str(x)
    return s if len(s) <= limit else s[: limit - 3] + "..."


def _identity(name, anchor, rep):
    w = None
    if not rep.passed:
        nm, idx, res = rep.witnesses[0]
        w = f"{nm} on sample {idx}: residual {_short(res)}"
    return _check(name, anchor, rep.passed, w)


def _pt_label(pt):
    return "(" + ", ".join(str(v) for v in pt.values()) + ")"


# --- core -------------------------------------------------------------------------------

def core_suite(scene):
    checks = []
    act, mom = scene.action, scene.moment
    try:
        act.verify()
        checks.append(_check("action.verify", "torus action: commuting generators preserving H", True))
    except GenformalError as exc:
        checks.append(_check("action.verify", "torus action: commuting generators preserving H", False, exc))

    rep = check_moment(scene.J_omega(), act, mom)
    checks.append(
        _check(
            "moment.membership",
            "moment map: -ξ + i df - η is a section of L",
            not rep.membership,
            rep.membership and "generator {}, frame vector {}: pairing {}".format(*rep.membership[0][:2], _short(rep.membership[0][2])),
        )
    )
    checks.append(
        _check(
            "moment.invariance",
            "moment map: components are invariant functions",
            not rep.invariance,
            rep.invariance and "generator {} on f_{}: {}".format(*rep.invariance[0][:2], _short(rep.invariance[0][2])),
        )
    )
    checks.append(
        _check(
            "moment.closedness",
            "moment map: ι_ξ H = dη",
            not rep.closedness,
            rep.closedness and "generator {}: residual {}".format(rep.closedness[0][0], _short(rep.closedness[0][1])),
        )
    )

    res = integrable_L_epsilon(scene)
    checks.append(
        _check(
            "courant.integrable",
            "Courant involutivity of the deformed eigenbundle",
            res.integrable,
            res.witness and f"Nijenhuis triple {res.witness}: {_short(res.value)}",
        )
    )
    cl = closedness(scene)
    if cl is not None:
        checks.append(_check("courant.closedness", "holomorphic closedness test for the normal-form family", cl, "test failed"))

    eps = scene.deformation
    for j, X in enumerate(act.generators):
        ok = is_invariant_deformation(X, eps, scene.chart)
        checks.append(_check(f"epsilon.invariant.torus{j}", "ε is preserved by the torus", ok, f"L_ξ{j} ε ≠ 0"))
    if scene.aux_weights is not None:
        ok = is_invariant_deformation(aux_action(scene).generators[0], eps, scene.chart)
        checks.append(_check("epsilon.invariant.aux", "ε is preserved by the auxiliary circle", ok, "L_ξ ε ≠ 0"))

    checks.append(_flat_kahler(scene))
    n = scene.n
    for k, pt in enumerate(scene.points):
        label = _pt_label(pt)
        try:
            up = upstairs_type(scene, pt)
            t = quotient_type(scene, pt)[1]
            meet = tM_cap_piL(scene, pt)
            ok = 0 <= t <= n and (t - n) % 2 == 0
            checks.append(
                Check(
                    f"type.point{k:02d}",
                    "quotient type = type - dim T + 2 dim(t_M ∩ π(L_ε))",
                    "pass" if ok else "fail",
                    f"at {label}: upstairs {up}, quotient {t}, dim(t_M ∩ π(L_ε)) = {meet}",
                )
            )
        except (NotOnLevelSet, NotFree, NotGeneralizedComplex) as exc:
            checks.append(_check(f"type.point{k:02d}", "quotient type formula", False, f"at {label}: {exc}"))
        try:
            gk_at(scene, pt)
            checks.append(_check(f"gk.point{k:02d}", "generalized Kähler: commuting pair, positive metric", True))
        except GenformalError as exc:
            checks.append(_check(f"gk.point{k:02d}", "generalized Kähler: commuting pair, positive metric", False, f"at {label}: {exc}"))
    return checks


def _flat_kahler(scene):
    try:
        gk_check(scene.J_omega(), scene.J_I())
        return _check("gk.flat", "flat Kähler pair (J_ω, J_I)", True)
    except GenformalError as exc:
        return _check("gk.flat", "flat Kähler pair (J_ω, J_I)", False, exc)


# --- equivariant -----------------------------------------------------------------------

def default_B(scene):
    """A closed invariant real 2-form: d(|z1|² d|z0|²) on complex charts."""
    if scene.B is not None:
        return scene.B
    ch = scene.chart
    if ch.complex and ch.n >= 2:
        return d(parse_form(ch, "z1*zb1*z0*dzb0 + z1*zb1*zb0*dz0"))
    return None


def equivariant_samples(scene, seed, count=10, max_degree=4):
    rng = random.Random(seed)
    out = []
    for k in range(count):
        out.append(
            random_invariant_element(scene.action, rng, degree=k % 3, max_poly_degree=max_degree, n_terms=3)
        )
    return out


def equivariant_suite(scene, seed=DEFAULT_SEED, max_degree=4, count=10):
    act, mom = scene.action, scene.moment
    Jw = scene.J_omega()
    samples = equivariant_samples(scene, seed, count, max_degree)
    checks = [
        _identity("equivariant.dH_A", "d_H 𝒜 = -𝒜 d_H", verify_dH_A_anticommute(samples, act, mom)),
        _identity("equivariant.DG_square", "D_G² = 0", verify_DG_square(samples, act, mom)),
        _identity("equivariant.A_square", "𝒜² = 0", verify_A_square(samples, act, mom)),
    ]
    rep = verify_lemma_anticommute(samples, Jw, act, mom)
    for key, anchor in (
        ("dbar_A", "∂̄𝒜 = -𝒜∂̄"),
        ("del_A", "∂𝒜 = -𝒜∂"),
        ("dbarG_del", "∂̄_G ∂ + ∂ ∂̄_G = 0"),
    ):
        wit = [w for w in rep.witnesses if w[0] == key]
        checks.append(
            _check(f"equivariant.{key}", anchor, not wit, wit and f"sample {wit[0][1]}: residual {_short(wit[0][2])}")
        )
    rep = verify_symplectic_cartan(samples, scene.omega, act, mom)
    for key, anchor in (
        ("A_T", "symplectic transport: 𝒜T = Td'"),
        ("dbarG_T", "symplectic transport: ∂̄_G T = T d_G"),
        ("del_T", "symplectic transport: -2i ∂T = Tδ"),
    ):
        wit = [w for w in rep.witnesses if w[0] == key]
        checks.append(
            _check(f"equivariant.{key}", anchor, not wit, wit and f"sample {wit[0][1]}: residual {_short(wit[0][2])}")
        )

    # Leibniz rule on graded pieces of the sample forms
    rng = random.Random(seed + 1)
    n = scene.chart.m // 2
    leib_fail = None
    for t, s in enumerate(samples):
        for alpha in s.terms.values():
            if alpha.is_zero():
                continue
            k = rng.randint(-n, n)
            piece = GradedSection.project(alpha, k, Jw).alpha
            if piece.is_zero():
                continue
            for j in range(act.r):
                rep = verify_leibniz(piece, k, Jw, act, mom, j)
                if not rep.passed and leib_fail is None:
                    leib_fail = f"sample {t}, U^{k}, generator {j}: residual {_short(rep.witnesses[0][2])}"
            break
    checks.append(_check("equivariant.leibniz", "∂(fα) = -(i/2)𝒜(ξ)·α + f∂α", leib_fail is None, leib_fail))

    B = default_B(scene)
    if B is not None:
        try:
            rep = b_conjugation(Jw, B, act, mom, samples)
            for key, anchor in (
                ("D_G_eB", "B-invariance: D_G e^B = e^B D_G^B"),
                ("dbarG_eB", "B-invariance: ∂̄_G e^B = e^B ∂̄_G^B"),
                ("spot", "B-invariance: D_G^B = D_G - (ι_ξ B)∧"),
            ):
                wit = [w for w in rep.witnesses if w[0] == key]
                checks.append(
                    _check(f"equivariant.B.{key}", anchor, not wit, wit and f"sample {wit[0][1]}: residual {_short(wit[0][2])}")
                )
        except GenformalError as exc:
            checks.append(_check("equivariant.B", "B-invariance of the equivariant operators", False, exc))
    return checks


# --- double complexes ------------------------------------------------------------------------

def doublecomplex_suite(seed=DEFAULT_SEED, n_random=60, n_models=20):
    rng = dc.seeded_rng(seed)
    checks = []
    bad = None
    for t in range(n_random):
        K = dc.random_double_complex(rng, size=3, pieces=rng.randint(2, 5))
        tot = dc.total_cohomology(K)
        einf = {}
        for (p, q), dim in dc.e_infinity(K).items():
            einf[p + q] = einf.get(p + q, 0) + dim
        einf = {k: v for k, v in einf.items() if v}
        tot = {k: v for k, v in tot.items() if v}
        if tot != einf and bad is None:
            bad = f"complex {t}: total {tot}, E_inf {einf}"
    checks.append(_check("doublecomplex.convergence", "E_∞ sums to total cohomology", bad is None, bad))

    bad = None
    for t in range(n_models):
        rep = dc.check_Ddelta(dc.hodge_pair_model(rng))
        if (rep.failed_hypotheses or rep.lemma_violation) and bad is None:
            bad = f"model {t}: hypotheses {rep.failed_hypotheses}, violation {rep.lemma_violation}"
    checks.append(_check("doublecomplex.Ddelta", "ker D ∩ im δ = im Dδ on Hodge-pair models", bad is None, bad))

    K = dc.e1_nondegenerate_model()
    page = dc.degeneration_page(K)
    checks.append(_check("doublecomplex.e1_model", "detects a model with E_1 ≠ E_2", page >= 2, f"degenerates at E_{page}"))
    K = dc.d2_model()
    page = dc.degeneration_page(K)
    checks.append(_check("doublecomplex.d2_model", "detects a nonzero d_2 (E_2 ≠ E_3)", page >= 3, f"degenerates at E_{page}"))
    rep = dc.check_Ddelta(dc.hypothesis_a_violation_model())
    checks.append(
        _check("doublecomplex.hypothesis_control", "a model violating hypothesis (a) is flagged", bool(rep.failed_hypotheses), "not flagged")
    )
    rep = dc.quasi_iso_check(dc.quasi_iso_counterexample())
    checks.append(
        _check("doublecomplex.quasi_iso_control", "a non-degenerate model breaks the quasi-isomorphism", not rep.both_iso, "both maps iso")
    )
    return checks


def run_suite(scene, suite, seed=DEFAULT_SEED, max_degree=4):
    names = SUITES if suite == "all" else (suite,)
    checks = []
    for name in names:
        if name == "core":
            checks += core_suite(scene)
        elif name == "equivariant":
            checks += equivariant_suite(scene, seed, max_degree)
        elif name == "doublecomplex":
            checks += doublecomplex_suite(seed)
        else:
            raise ValueError(f"unknown suite {name!r}")
    return sorted(checks, key=lambda c: c.name)
