"""End-to-end scenes: CP^n and its one-point blow-up as Kähler quotients of C^N
carrying an ε-deformed generalized Kähler structure.

Coordinates are z0..z{N-1}, counted from zero.  On the blow-up (N = n+2)
the deformation lives on the pair (z{n-1}, z{n}) and its coefficient is
z0*z1*z{n+1}.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg
from .equivariant import ActionData, MomentData, is_invariant_deformation
from .errors import (
    HypothesisNotVerified,
    InputError,
    NotFree,
    NotGeneralizedComplex,
    NotOnLevelSet,
    ParseError,
    WeightConditionViolated,
)
from .gcs import (
    Deformation,
    a_epsilon,
    deform,
    eigenbundle,
    from_complex,
    from_symplectic,
    gk_check,
    standard_complex,
    standard_symplectic,
)
from .polyforms import (
    TwistData,
    closedness_condition,
    integrable,
    normal_form_deformation,
    parse_form,
)
from .scalars import I, ONE, ZERO, GaussianRational, Poly, format_scalar, parse_poly, parse_scalar
from .spinor import Chart, GeneralizedVector

Q = GaussianRational.coerce
SCENE_VERSION = 1


# --- Betti numbers ----------------------------------------------------------------
# CP^n has one cell in each even real dimension 0, 2, ..., 2n.  Blowing up a
# point replaces it by a CP^{n-1} (the exceptional divisor), which adds one
# cell in each even dimension 2..2n-2.

def betti_cpn(n):
    return [1 if k % 2 == 0 else 0 for k in range(2 * n + 1)]


def betti_blowup(n):
    out = betti_cpn(n)
    for k in range(2, 2 * n - 1, 2):
        out[k] += 1
    return out


# --- scene container ------------------------------------------------------------------

@dataclass
class Scene:
    name: str
    chart: Chart
    n: int  # complex dimension of the quotient
    omega: list
    complex_structure: list
    epsilon: list  # [(coeff Poly, first GeneralizedVector, second GeneralizedVector)]
    scale: GaussianRational
    tw: TwistData
    action: ActionData
    moment: MomentData
    level: list
    points: list
    aux_weights: list = None
    betti: list = None
    family: tuple = None  # (index set, {(i, j): Poly}) when ε is in normal form
    B: object = None
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def deformation(self):
        if "eps" not in self._cache:
            self._cache["eps"] = Deformation([(Poly.coerce(c) * self.scale, a, b) for c, a, b in self.epsilon])
        return self._cache["eps"]

    def J_omega(self):
        if "Jw" not in self._cache:
            self._cache["Jw"] = from_symplectic(self.chart, self.omega)
        return self._cache["Jw"]

    def J_I(self):
        if "JI" not in self._cache:
            self._cache["JI"] = from_complex(self.chart, self.complex_structure)
        return self._cache["JI"]

    def L_epsilon(self):
        """Polynomial frame {Y + ι_Y ε} of the deformed eigenbundle."""
        if "L" not in self._cache:
            self._cache["L"] = self.deformation.frame(eigenbundle(self.J_I()))
        return self._cache["L"]

    def point_dict(self, point):
        return {k: Q(v) for k, v in point.items()}


def _epsilon_terms(chart, index_set, F):
    eps = normal_form_deformation(chart, index_set, F)
    return list(eps.terms)


def _points_from_lists(rows):
    return [{f"z{k}": Q(v) for k, v in enumerate(r)} for r in rows]


def _r(x):
    return Q(Fraction(x))


# --- CP^n -------------------------------------------------------------------------------

def cpn_aux_weights(n):
    """(1, 5, 2, 4, 8, 10, ...): weight 2i on z_i for i ≥ 4."""
    base = [1, 5, 2, 4]
    return [Q(w) for w in base[: n + 1]] + [Q(2 * i) for i in range(4, n + 1)]


def cpn_sample_points(n):
    """Rational points with Σ|z|² = 2 (level Φ = 1), on and off {z0 z1 = 0}."""
    N = n + 1
    pad = lambda xs: list(xs) + [0] * (N - len(xs))
    on = [pad([1, 0, 1]), pad([0, 1, 0, 1])] + [
        [I + 1 if k == j else ZERO for k in range(N)] for j in range(N)
    ]
    off = [
        pad([1, 1]),
        pad([1, I]),
        pad([_r("3/5") + I * _r("4/5"), 1]),
        pad([1, _r("3/5"), _r("4/5")]),
        pad([_r("3/5"), _r("4/5"), 1]),
        pad([_r("4/5") * I, _r("3/5"), 0, 1]),
    ]
    return _points_from_lists(on + off)


def build_cpn(n=3, c="1/100", aux_weights=None):
    """C^{n+1} with the diagonal circle (weights 1/2), Φ = Σ|z|²/2 at level 1,
    and ε = c·z0 z1 (∂_{z2}∧∂_{z3} + s·dz̄2∧dz̄3)."""
    if n < 3:
        raise InputError("CP^n scenes need n >= 3")
    c = Q(c)
    if c.im or c.re <= 0:
        raise InputError("the deformation scale must be a positive rational")
    N = n + 1
    ch = Chart.complex_(N)
    half = Q("1/2")
    weights = [[half] * N]
    action = ActionData.diagonal(ch, weights)
    phi = sum((Poly.var(f"z{k}") * Poly.var(f"zb{k}") for k in range(N)), Poly()).scale(half)
    family = ([2, 3], {(2, 3): Poly.var("z0") * Poly.var("z1")})
    return Scene(
        name=f"cp{n}",
        chart=ch,
        n=n,
        omega=standard_symplectic(ch),
        complex_structure=standard_complex(ch),
        epsilon=_epsilon_terms(ch, *family),
        scale=c,
        tw=TwistData.zero(ch),
        action=action,
        moment=MomentData([phi]),
        level=[ONE],
        points=cpn_sample_points(n),
        aux_weights=list(aux_weights) if aux_weights is not None else cpn_aux_weights(n),
        betti=betti_cpn(n),
        family=family,
        B=None,
    )


# --- the blow-up ----------------------------------------------------------------------

def validate_blowup_weights(n, lam):
    """Conditions on λ_1..λ_{n+2} (given 0-based as lam[0..n+1]).

    a) λ_1..λ_n pairwise distinct; b) λ_1 + λ_2 + λ_{n+2} = λ_n + λ_{n+1};
    c) λ_i ≠ λ_{n+1} - λ_{n+2} for i ≤ n.
    """
    lam = [Q(x) for x in lam]
    if len(lam) != n + 2:
        raise WeightConditionViolated(f"expected {n + 2} weights, got {len(lam)}", condition="count")
    if len(set(lam[:n])) != n:
        raise WeightConditionViolated("weights on z_1..z_n must be distinct", condition="a")
    if lam[0] + lam[1] + lam[n + 1] != lam[n - 1] + lam[n]:
        raise WeightConditionViolated("λ_1 + λ_2 + λ_{n+2} must equal λ_n + λ_{n+1}", condition="b")
    for i in range(n):
        if lam[i] == lam[n] - lam[n + 1]:
            raise WeightConditionViolated(f"λ_{i + 1} equals λ_{{n+1}} - λ_{{n+2}}", condition="c")
    return lam


def blowup_torus_weights(n):
    """(α, β) acts by αβ on z_1..z_n, α on z_{n+1}, β^{-1} on z_{n+2}."""
    first = [ONE] * n + [ONE, ZERO]
    second = [ONE] * n + [ZERO, -ONE]
    return [first, second]


def default_blowup_weights(n, bound=3):
    """First weight vector in lexicographic order over [-bound, bound] that
    satisfies a/b/c and isolates every fixed point of the quotient."""
    rng = range(-bound, bound + 1)
    torus = blowup_torus_weights(n)
    level = [Q(2), Q(1)]
    for lam in itertools.product(rng, repeat=n + 2):
        try:
            lam = validate_blowup_weights(n, lam)
        except WeightConditionViolated:
            continue
        if all(fp.isolated for fp in _fixed_points(n + 2, torus, level, lam)):
            return lam
    raise HypothesisNotVerified("no admissible weight vector in the search range")


def blowup_sample_points(n):
    N = n + 2
    pts = []
    base = [ZERO] * N
    # generic point with F = z0 z1 z_{n+1} ≠ 0: |z0|²=|z1|²=1, |z_{n+1}|²=1
    p = list(base)
    p[0], p[1], p[n + 1] = ONE, ONE, ONE
    pts.append(p)
    p = list(base)
    p[0], p[1], p[n + 1] = _r("3/5") + I * _r("4/5"), I, ONE
    pts.append(p)
    # F = 0: |z_i|² = 1 with |z_n|² = 1, or |z_i|² = 2 with |z_{n+1}|² = 1
    p = list(base)
    p[2], p[n] = ONE, ONE
    pts.append(p)
    p = list(base)
    p[0], p[n + 1] = ONE + I, ONE
    pts.append(p)
    return _points_from_lists(pts)


def build_blowup(n=3, weights=None, c="1/100"):
    if n < 3:
        raise InputError("blow-up scenes need n >= 3")
    c = Q(c)
    if c.im or c.re <= 0:
        raise InputError("the deformation scale must be a positive rational")
    lam = validate_blowup_weights(n, weights) if weights is not None else default_blowup_weights(n)
    N = n + 2
    ch = Chart.complex_(N)
    torus = blowup_torus_weights(n)
    action = ActionData.diagonal(ch, torus)
    z = [Poly.var(f"z{k}") for k in range(N)]
    zb = [Poly.var(f"zb{k}") for k in range(N)]
    base = sum((z[k] * zb[k] for k in range(n)), Poly())
    f = [base + z[n] * zb[n], base - z[n + 1] * zb[n + 1]]
    family = ([n - 1, n], {(n - 1, n): z[0] * z[1] * z[n + 1]})
    return Scene(
        name=f"blowup{n}",
        chart=ch,
        n=n,
        omega=standard_symplectic(ch),
        complex_structure=standard_complex(ch),
        epsilon=_epsilon_terms(ch, *family),
        scale=c,
        tw=TwistData.zero(ch),
        action=action,
        moment=MomentData(f),
        level=[Q(2), Q(1)],
        points=blowup_sample_points(n),
        aux_weights=lam,
        betti=betti_blowup(n),
        family=family,
        B=None,
    )


# --- quotient types -----------------------------------------------------------------

def check_level(scene, point):
    pt = scene.point_dict(point)
    vals = [fj.eval(pt) for fj in scene.moment.f]
    if vals != [Q(a) for a in scene.level]:
        shown = ", ".join(format_scalar(v) for v in vals)
        level = ", ".join(format_scalar(Q(a)) for a in scene.level)
        raise NotOnLevelSet(f"moment map is ({shown}), level is ({level})")
    return pt


def generator_vectors(scene, point):
    pt = scene.point_dict(point)
    return [[Poly.coerce(x).eval(pt) for x in g] for g in scene.action.generators]


def check_free(scene, point):
    vecs = generator_vectors(scene, point)
    if linalg.span_rank(vecs) != len(vecs):
        raise NotFree("fundamental vector fields are dependent at this point")
    return vecs


def certify_deformation(scene, point):
    """A_ε must be invertible at the point for L_ε to define a structure."""
    A, _ = a_epsilon(scene.J_I(), scene.deformation, scene.point_dict(point))
    if not linalg.det(A):
        raise NotGeneralizedComplex("A_epsilon is singular at this point")
    return A


def upstairs_type(scene, point):
    certify_deformation(scene, point)
    pt = scene.point_dict(point)
    frame = [v.evaluate(pt) for v in scene.L_epsilon()]
    m = scene.chart.m
    return m - linalg.span_rank([[Poly.coerce(x).constant_value() if isinstance(x, Poly) else x for x in v.comps[:m]] for v in frame])


def pi_L_epsilon(scene, point):
    pt = scene.point_dict(point)
    m = scene.chart.m
    rows = []
    for v in scene.L_epsilon():
        w = v.evaluate(pt)
        rows.append([x.constant_value() if isinstance(x, Poly) else x for x in w.comps[:m]])
    return linalg.row_basis(rows)


def tM_cap_piL(scene, point):
    vecs = check_free(scene, point)
    return len(linalg.intersection(vecs, pi_L_epsilon(scene, point)))


def quotient_type(scene, point):
    """(type of the reduced symplectic structure, type of the reduced J_ε)."""
    check_level(scene, point)
    check_free(scene, point)
    t = upstairs_type(scene, point)
    r = len(scene.action.generators)
    return 0, t - r + 2 * tM_cap_piL(scene, point)


# --- fixed points of the auxiliary circle ----------------------------------------------

@dataclass
class FixedPoint:
    support: tuple
    moduli: list  # |z_k|² for k in support
    point: dict  # a rational representative, or None
    effective_weights: list
    isolated: bool


def _two_squares(r, max_den=12, max_num=30):
    """Rational (a, b) with a² + b² = r, searched over small fractions."""
    r = Fraction(r.re.numerator, r.re.denominator) if isinstance(r, GaussianRational) else Fraction(r)
    for den in range(1, max_den + 1):
        for a_num in range(0, max_num + 1):
            a = Fraction(a_num, den)
            rest = r - a * a
            if rest < 0:
                break
            b = _rational_sqrt(rest)
            if b is not None:
                return a, b
    return None


def _rational_sqrt(q):
    from math import isqrt

    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def _fixed_points(N, torus_weights, level, aux):
    """Torus-fixed orbits of the auxiliary circle, one per coordinate support."""
    r = len(torus_weights)
    W = [[Q(x) for x in row] for row in torus_weights]
    aux = [Q(x) for x in aux]
    out = []
    for S in itertools.combinations(range(N), r):
        WS = [[W[j][k] for k in S] for j in range(r)]
        if not linalg.det(WS):
            continue
        s = linalg.solve(WS, [Q(a) for a in level])
        if s is None or any(x.im or x.re <= 0 for x in s):
            continue
        # aux weights on S absorbed by the torus: Σ_j c_j W[j][k] = λ_k (k ∈ S)
        c = linalg.solve(linalg.transpose(WS), [aux[k] for k in S])
        eff = []
        for k in range(N):
            if k in S:
                continue
            eff.append(aux[k] - sum((c[j] * W[j][k] for j in range(r)), ZERO))
        point = {}
        ok = True
        for k in range(N):
            point[f"z{k}"] = ZERO
        for k, mod in zip(S, s):
            ab = _two_squares(mod)
            if ab is None:
                ok = False
                break
            point[f"z{k}"] = Q(ab[0]) + I * Q(ab[1])
        out.append(FixedPoint(S, s, point if ok else None, eff, all(e for e in eff)))
    return out


def fixed_points(scene):
    if scene.aux_weights is None:
        raise HypothesisNotVerified("the scene has no auxiliary circle weights")
    torus = scene.action.weights
    if torus is None:
        raise HypothesisNotVerified("fixed points need a diagonal torus action")
    return _fixed_points(scene.chart.n, torus, scene.level, scene.aux_weights)


def aux_action(scene):
    return ActionData.diagonal(scene.chart, [scene.aux_weights])


# --- Hodge report ----------------------------------------------------------------------

@dataclass
class HodgeReport:
    n: int
    table: dict  # (p, q) -> int
    notes: dict  # (p, q) -> str
    fixed_points: list
    trivial: bool
    trivial_note: str = ""

    @property
    def total(self):
        return sum(self.table.values())

    def row(self, q):
        return [self.table.get((p, q), 0) for p in range(-self.n, self.n + 1)]

    def to_json(self):
        return {
            "n": self.n,
            "table": {f"{p},{q}": v for (p, q), v in sorted(self.table.items())},
            "notes": {f"{p},{q}": v for (p, q), v in sorted(self.notes.items())},
            "total": self.total,
            "fixed_points": [list(fp.support) for fp in self.fixed_points],
            "trivial": self.trivial,
            "trivial_note": self.trivial_note,
        }

    def render(self):
        n = self.n
        width = 4
        lines = [f"generalized Hodge numbers h^(p,q), p = {-n}..{n} left to right"]
        for q in range(n, -n - 1, -1):
            cells = "".join(f"{self.table.get((p, q), 0):>{width}}" for p in range(-n, n + 1))
            lines.append(f"q={q:>3} |{cells}")
        lines.append(f"total = {self.total}")
        lines.append("notes:")
        seen = {}
        for key in sorted(self.notes):
            seen.setdefault(self.notes[key], []).append(key)
        for k, (note, keys) in enumerate(seen.items(), 1):
            where = ", ".join(f"({p},{q})" for p, q in keys[:4]) + (" ..." if len(keys) > 4 else "")
            lines.append(f"  [{k}] {where}: {note}")
        if self.trivial:
            lines.append(f"note: {self.trivial_note}")
        return "\n".join(lines)


def hodge_report(scene):
    """Assemble h^{p,q} from fixed-point data, the type formula and Betti constants."""
    n = scene.n
    if scene.betti is None or len(scene.betti) != 2 * n + 1:
        raise HypothesisNotVerified("the scene carries no Betti numbers for its quotient")
    aux = aux_action(scene)
    if not is_invariant_deformation(aux.generators[0], scene.deformation, scene.chart):
        raise HypothesisNotVerified("the auxiliary circle does not preserve ε")
    fps = fixed_points(scene)
    if not fps:
        raise HypothesisNotVerified("the auxiliary circle has no fixed points on the quotient")
    for fp in fps:
        if not fp.isolated:
            raise HypothesisNotVerified(f"fixed point with support {fp.support} is not isolated")
        if fp.point is None:
            raise HypothesisNotVerified(f"no rational representative for the fixed point {fp.support}")
        t = quotient_type(scene, fp.point)[1]
        if t != n:
            raise HypothesisNotVerified(
                f"the structure at the fixed point {fp.support} has type {t}, not complex type {n}"
            )
    table, notes = {}, {}
    vanish = (
        f"zero: all {len(fps)} fixed points of the auxiliary circle are isolated and of complex type, "
        "so the cohomology of the second structure is concentrated in degree 0"
    )
    for p in range(-n, n + 1):
        for q in range(-n, n + 1):
            if q != 0:
                table[(p, q)] = 0
                notes[(p, q)] = vanish
            else:
                table[(p, q)] = scene.betti[n + p]
                notes[(p, q)] = (
                    f"b_{n + p} of the quotient: the symplectic grading shifts degree k to n-k "
                    "(Betti numbers from the cell decomposition)"
                )
    types = []
    for pt in scene.points:
        try:
            types.append(quotient_type(scene, pt)[1])
        except (NotOnLevelSet, NotFree):
            continue
    trivial = bool(types) and all(t == n for t in types)
    note = ""
    if trivial:
        note = (
            f"the reduced structure has type {n} at every sample point, so it is a B-transform "
            "of a Kähler structure (a trivial deformation)"
        )
    total = sum(scene.betti)
    if sum(table.values()) != total:
        raise HypothesisNotVerified("Hodge numbers do not add up to the Betti sum")
    return HodgeReport(n, table, notes, fps, trivial, note)


# --- GK checks at the sample points -------------------------------------------------------

def gk_at(scene, point):
    pt = scene.point_dict(point)
    Je = deform(scene.J_I(), scene.deformation, pt)
    return gk_check(scene.J_omega(), Je)


def integrable_L_epsilon(scene):
    return integrable(scene.L_epsilon(), scene.tw)


def closedness(scene):
    if scene.family is None:
        return None
    idx, F = scene.family
    return closedness_condition(scene.chart, idx, F)


# --- serialization -----------------------------------------------------------------------

def _token(chart, v):
    m = chart.m
    nz = [(k, x) for k, x in enumerate(v.comps) if x]
    if len(nz) != 1 or nz[0][1] != ONE:
        raise InputError("epsilon terms must use unit frame vectors")
    k = nz[0][0]
    return chart.vector_token(k) if k < m else chart.form_token(k - m)


def _parse_token(chart, tok, where):
    tok = tok.strip()
    if tok.startswith("d/d"):
        name = tok[3:]
        if name not in chart.index:
            raise ParseError(f"{where}: unknown vector token {tok!r}")
        return GeneralizedVector.vector(chart, chart.index[name])
    if tok.startswith("d") and tok[1:] in chart.index:
        return GeneralizedVector.covector(chart, chart.index[tok[1:]])
    raise ParseError(f"{where}: unknown frame token {tok!r}")


def _mat_out(M):
    return [[format_scalar(Q(x) if not isinstance(x, Poly) else x.constant_value()) for x in row] for row in M]


def _mat_in(rows, where):
    try:
        return [[parse_scalar(str(x)) for x in row] for row in rows]
    except ParseError as exc:
        raise ParseError(f"{where}: {exc}") from None


def scene_to_json(scene):
    ch = scene.chart
    data = {
        "version": SCENE_VERSION,
        "name": scene.name,
        "chart": {"complex": ch.n} if ch.complex else {"real": ch.m},
        "quotient_dim": scene.n,
        "omega": _mat_out(scene.omega),
        "complex": _mat_out(scene.complex_structure),
        "epsilon": [
            {"coeff": str(Poly.coerce(c)), "first": _token(ch, a), "second": _token(ch, b)} for c, a, b in scene.epsilon
        ],
        "scale": format_scalar(scene.scale),
        "H": str(scene.tw.H) if not scene.tw.is_zero() else "0",
        "action": {"weights": [[format_scalar(w) for w in row] for row in scene.action.weights]},
        "moment": {
            "f": [str(f) for f in scene.moment.f],
            "eta": [str(e) if e is not None else "0" for e in (scene.moment.eta or [None] * len(scene.moment.f))],
        },
        "level": [format_scalar(Q(a)) for a in scene.level],
        "points": [{k: format_scalar(v) for k, v in sorted(p.items(), key=lambda kv: ch.index[kv[0]])} for p in scene.points],
    }
    if scene.aux_weights is not None:
        data["aux_weights"] = [format_scalar(Q(w)) for w in scene.aux_weights]
    if scene.betti is not None:
        data["betti"] = list(scene.betti)
    if scene.family is not None:
        idx, F = scene.family
        data["epsilon_family"] = {"indices": list(idx), "F": {f"{i},{j}": str(f) for (i, j), f in F.items()}}
    if scene.B is not None:
        data["B"] = str(scene.B)
    return data


def canonical_dumps(data):
    return json.dumps(data, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def scene_hash(data):
    return hashlib.sha256(canonical_dumps(data).encode("utf-8")).hexdigest()


def _need(data, key):
    if key not in data:
        raise InputError(f"scene is missing the field {key!r}")
    return data[key]


def scene_from_json(data):
    if not isinstance(data, dict):
        raise InputError("a scene must be a JSON object")
    if data.get("version") != SCENE_VERSION:
        raise InputError(f"unsupported scene version {data.get('version')!r}; expected {SCENE_VERSION}")
    chart_spec = _need(data, "chart")
    if "complex" in chart_spec:
        ch = Chart.complex_(int(chart_spec["complex"]))
    elif "real" in chart_spec:
        ch = Chart.real(int(chart_spec["real"]))
    else:
        raise InputError("chart must give 'complex' or 'real'")
    eps = []
    for k, term in enumerate(data.get("epsilon", [])):
        where = f"epsilon[{k}]"
        coeff = parse_poly(str(_need(term, "coeff")))
        eps.append((coeff, _parse_token(ch, _need(term, "first"), where), _parse_token(ch, _need(term, "second"), where)))
    tw = TwistData(ch, parse_form(ch, data.get("H", "0")))
    weights = _need(_need(data, "action"), "weights")
    weights = [[parse_scalar(str(w)) for w in row] for row in weights]
    action = ActionData.diagonal(ch, weights, tw)
    mom = _need(data, "moment")
    f = [parse_poly(str(x)) for x in _need(mom, "f")]
    eta_raw = mom.get("eta")
    eta = [parse_form(ch, str(e)) for e in eta_raw] if eta_raw else None
    if len(f) != len(weights) or (eta is not None and len(eta) != len(f)):
        raise InputError("moment data must have one entry per generator")
    points = []
    for k, p in enumerate(data.get("points", [])):
        pt = {}
        for name, val in p.items():
            if name not in ch.index:
                raise InputError(f"points[{k}]: unknown coordinate {name!r}")
            pt[name] = parse_scalar(str(val))
        points.append(pt)
    family = None
    if "epsilon_family" in data:
        fam = data["epsilon_family"]
        F = {}
        for key, val in _need(fam, "F").items():
            i, j = (int(t) for t in key.split(","))
            F[(i, j)] = parse_poly(str(val))
        family = (list(_need(fam, "indices")), F)
    B = parse_form(ch, data["B"]) if data.get("B") not in (None, "0", "") else None
    return Scene(
        name=str(data.get("name", "scene")),
        chart=ch,
        n=int(data.get("quotient_dim", ch.n - len(weights))),
        omega=_mat_in(_need(data, "omega"), "omega"),
        complex_structure=_mat_in(_need(data, "complex"), "complex"),
        epsilon=eps,
        scale=parse_scalar(str(data.get("scale", "1"))),
        tw=tw,
        action=action,
        moment=MomentData(f, eta),
        level=[parse_scalar(str(a)) for a in _need(data, "level")],
        points=points,
        aux_weights=[parse_scalar(str(w)) for w in data["aux_weights"]] if "aux_weights" in data else None,
        betti=[int(b) for b in data["betti"]] if "betti" in data else None,
        family=family,
        B=B,
    )


def load_scene(path):
    """Read a scene file; JSON errors become ParseError with line and column."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", text, exc.pos) from None
    return scene_from_json(data), data


def scene_text(data):
    """Indented JSON with every list of scalars kept on one line."""

    def enc(x, depth):
        pad = "  " * depth
        if isinstance(x, dict):
            if not x:
                return "{}"
            inner = ",\n".join(f'{pad}  {json.dumps(k, ensure_ascii=False)}: {enc(v, depth + 1)}' for k, v in x.items())
            return "{\n" + inner + "\n" + pad + "}"
        if isinstance(x, list) and any(isinstance(v, (dict, list)) for v in x):
            inner = ",\n".join(f"{pad}  {enc(v, depth + 1)}" for v in x)
            return "[\n" + inner + "\n" + pad + "]"
        return json.dumps(x, ensure_ascii=False)

    return enc(data, 0) + "\n"


def save_scene(scene, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(scene_text(scene_to_json(scene)))
