"""Hamiltonian torus actions on generalized complex charts and the Cartan model.

A :class:`CartanElement` is a polynomial in formal variables x_1..x_r
(one per generator) with polynomial-form coefficients.  The operator 𝒜
multiplies by x_j and acts by Clifford multiplication with

    𝒜(ξ_j) = -ξ_j + i(df_j + iη_j) = -ξ_j + i·df_j - η_j,

so D_G = d_H + 𝒜 and ∂̄_G = ∂̄ + 𝒜.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import BNotClosedOrNotInvariant, NotInvariant
from .gcs import GCS, b_transform, eigenbundle
from .polyforms import (
    TwistData,
    _clean,
    apply_field,
    d,
    d_H,
    exp_wedge,
    iota,
    koszul_delta,
    lie,
    lie_bracket,
    polyform,
    two_form_matrix,
)
from .scalars import I, ZERO, GaussianRational, Poly
from .spinor import FormVector, GeneralizedVector, clifford_act, mask_indices, pairing
from .dolbeault import GradedSection, split_dH, symplectic_transport

Q = GaussianRational.coerce
DEFAULT_MAX_DEGREE = 4


def _p(x):
    return Poly.coerce(x)


def circle_field(chart, weights):
    """ξ = Σ_j i·w_j (z_j ∂_{z_j} - z̄_j ∂_{z̄_j}) on a complex chart."""
    n = chart.n
    comps = [Poly()] * chart.m
    for j, w in enumerate(weights):
        w = Q(w)
        if not w:
            continue
        comps[j] = Poly.var(f"z{j}").scale(I * w)
        comps[n + j] = Poly.var(f"zb{j}").scale(-I * w)
    return comps


def linear_field(chart, A):
    """X^k = Σ_l A[k][l] x_l on a real chart."""
    xs = [Poly.var(c) for c in chart.coords]
    out = []
    for row in A:
        s = Poly()
        for a, x in zip(row, xs):
            a = Q(a)
            if a:
                s = s + x.scale(a)
        out.append(s)
    return out


class ActionData:
    """Commuting generators of a torus action, plus the twisting form.

    ``weights`` (optional) records the diagonal weights used to build the
    generators with :func:`circle_field`; it enables
    :meth:`invariant_part`.
    """

    def __init__(self, chart, generators, tw=None, weights=None, check=True):
        self.chart = chart
        self.generators = [[_p(c) for c in g] for g in generators]
        self.tw = tw if tw is not None else TwistData.zero(chart)
        self.weights = [list(map(Q, w)) for w in weights] if weights is not None else None
        if check:
            self.verify()

    @classmethod
    def diagonal(cls, chart, weights, tw=None):
        return cls(chart, [circle_field(chart, w) for w in weights], tw, weights)

    @property
    def r(self):
        return len(self.generators)

    def verify(self):
        for a in range(self.r):
            for b in range(a + 1, self.r):
                br = lie_bracket(self.generators[a], self.generators[b], self.chart)
                if any(not c.is_zero() for c in br):
                    raise NotInvariant(f"generators {a} and {b} do not commute")
        for j, X in enumerate(self.generators):
            if not lie(X, self.tw.H).is_zero():
                raise NotInvariant(f"H is not invariant under generator {j}")

    def is_invariant_form(self, alpha):
        return all(lie(X, alpha).is_zero() for X in self.generators)

    def is_invariant_function(self, f):
        return all(apply_field(X, f, self.chart).is_zero() for X in self.generators)

    def _weight(self, j, mono, mask):
        n = self.chart.n
        w = self.weights[j]
        s = ZERO
        for var, e in mono:
            k = int(var[2:]) if var.startswith("zb") else int(var[1:])
            s = s + (w[k] * e if not var.startswith("zb") else -w[k] * e)
        for i in mask_indices(mask):
            s = s + (w[i] if i < n else -w[i - n])
        return s

    def invariant_part(self, alpha):
        """Drop every monomial term of nonzero weight (diagonal actions only)."""
        if self.weights is None:
            raise NotInvariant("invariant_part needs diagonal weights")
        out = {}
        for mask, f in alpha.c.items():
            keep = {}
            for mono, c in _p(f).terms.items():
                if all(not self._weight(j, mono, mask) for j in range(self.r)):
                    keep[mono] = c
            if keep:
                out[mask] = Poly(keep)
        return FormVector(alpha.chart, out)


@dataclass
class MomentData:
    f: list  # Poly per generator
    eta: list = None  # 1-forms per generator (None means zero)

    def __post_init__(self):
        self.f = [_p(x) for x in self.f]

    def eta_form(self, chart, j):
        if not self.eta or self.eta[j] is None:
            return FormVector(chart)
        return polyform(self.eta[j])


def a_section(act, mom, j):
    """𝒜(ξ_j) = -ξ_j + i·df_j - η_j as a Courant section."""
    ch = act.chart
    df = d(FormVector.one(ch, mom.f[j]))
    eta = mom.eta_form(ch, j)
    form = _clean(ch, (df.scale(I) - eta).c)
    xi = [Poly()] * ch.m
    for mask, v in form.c.items():
        xi[mask.bit_length() - 1] = _p(v)
    return GeneralizedVector(ch, [-x for x in act.generators[j]] + xi)


@dataclass
class MomentReport:
    passed: bool
    membership: list = field(default_factory=list)  # (generator, frame index, nonzero pairing)
    invariance: list = field(default_factory=list)  # (generator acting, component) with nonzero ξ(f)
    closedness: list = field(default_factory=list)  # (generator, residual form)


def _frame(J, point=None):
    if isinstance(J, GCS):
        return eigenbundle(J, point)
    return list(J)


def check_moment(J, act, mom):
    """Verify the three conditions of a twisted generalized moment map.

    ``J`` is a GCS with constant entries or an explicit (possibly
    polynomial) frame of its +i eigenbundle.
    """
    frame = _frame(J)
    ch = act.chart
    rep = MomentReport(True)
    for j in range(act.r):
        v = a_section(act, mom, j)
        for k, s in enumerate(frame):
            val = _p(pairing(v, s))
            if not val.is_zero():
                rep.membership.append((j, k, val))
    for a in range(act.r):
        for b in range(len(mom.f)):
            val = apply_field(act.generators[a], mom.f[b], ch)
            if not val.is_zero():
                rep.invariance.append((a, b, val))
    for j in range(act.r):
        lhs = iota(act.generators[j], act.tw.H)
        res = _clean(ch, (lhs - d(mom.eta_form(ch, j))).c)
        if not res.is_zero():
            rep.closedness.append((j, res))
    rep.passed = not (rep.membership or rep.invariance or rep.closedness)
    return rep


# --- Cartan elements -----------------------------------------------------------

class CartanElement:
    """Σ x^e ⊗ α_e with exponent tuples e of length r."""

    def __init__(self, chart, r, terms=None, max_degree=DEFAULT_MAX_DEGREE):
        self.chart = chart
        self.r = r
        self.max_degree = max_degree
        self.terms = {}
        for e, a in (terms or {}).items():
            e = tuple(e)
            if len(e) != r:
                raise ValueError("exponent length must equal the number of generators")
            if sum(e) > max_degree:
                continue
            a = polyform(a)
            if not a.is_zero():
                self.terms[e] = a

    @classmethod
    def form(cls, alpha, r, **kw):
        return cls(alpha.chart, r, {(0,) * r: alpha}, **kw)

    def _new(self, terms):
        return CartanElement(self.chart, self.r, terms, self.max_degree)

    def __add__(self, other):
        out = dict(self.terms)
        for e, a in other.terms.items():
            out[e] = out[e] + a if e in out else a
        return self._new(out)

    def __neg__(self):
        return self._new({e: -a for e, a in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return self._new({e: a.scale(c) for e, a in self.terms.items()})

    def is_zero(self):
        return all(a.is_zero() for a in self.terms.values())

    def map(self, op):
        """Apply a linear form operator to every coefficient."""
        return self._new({e: op(a) for e, a in self.terms.items()})

    def times_x(self, j, alpha_by_e):
        """Σ x^{e+1_j} ⊗ alpha_by_e(e, α_e)."""
        out = {}
        for e, a in self.terms.items():
            ne = list(e)
            ne[j] += 1
            out[tuple(ne)] = alpha_by_e(a)
        return self._new(out)

    def degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def __eq__(self, other):
        return isinstance(other, CartanElement) and (self - other).is_zero()

    def __repr__(self):
        parts = []
        for e, a in sorted(self.terms.items()):
            mono = "*".join(f"x{j}^{k}" if k > 1 else f"x{j}" for j, k in enumerate(e) if k) or "1"
            parts.append(f"{mono}⊗({a})")
        return "CartanElement(" + (" + ".join(parts) or "0") + ")"


def _require_invariant(alpha, act):
    for e, a in alpha.terms.items():
        if not act.is_invariant_form(a):
            raise NotInvariant(f"coefficient of x^{e} is not invariant")


def script_A(alpha, act, mom, check=True):
    """(𝒜α)(ξ) = 𝒜(ξ)·α(ξ); raises the polynomial degree by one."""
    if check:
        _require_invariant(alpha, act)
    out = alpha._new({})
    for j in range(act.r):
        s = a_section(act, mom, j)
        out = out + alpha.times_x(j, lambda a, s=s: clifford_act(s, a))
    return out


def cartan_d_prime(alpha, act, check=True):
    """The Cartan horizontal differential d'α(ξ) = -ι_ξ α(ξ)."""
    zero = MomentData([Poly()] * act.r)
    return script_A(alpha, act, zero, check)


def dH_cartan(alpha, tw=None):
    return alpha.map(lambda a: d_H(a, tw))


def D_G(alpha, act, mom, check=True):
    return dH_cartan(alpha, act.tw) + script_A(alpha, act, mom, check)


def d_G(alpha, act, check=True):
    """Untwisted Cartan differential d + d'."""
    return alpha.map(d) + cartan_d_prime(alpha, act, check)


def _split_form(a, J, tw, which):
    acc = FormVector(a.chart)
    for k, piece in J.grading().decompose(a).items():
        dl, db = split_dH(GradedSection(piece, k, J, check=False), tw)
        acc = acc + (db.alpha if which == "bar" else dl.alpha)
    return acc


def delbar_cartan(alpha, J, tw=None):
    return alpha.map(lambda a: _split_form(a, J, tw, "bar"))


def del_cartan(alpha, J, tw=None):
    return alpha.map(lambda a: _split_form(a, J, tw, "del"))


def delbar_G(alpha, J, act, mom, check=True):
    return delbar_cartan(alpha, J, act.tw) + script_A(alpha, act, mom, check)


# --- identity checks ------------------------------------------------------------

@dataclass
class IdentityReport:
    passed: bool
    witnesses: list = field(default_factory=list)  # (check name, sample index, residual)

    def record(self, name, idx, residual):
        if not residual.is_zero():
            self.witnesses.append((name, idx, residual))
            self.passed = False


def verify_dH_A_anticommute(samples, act, mom):
    """(d_H𝒜 + 𝒜d_H)α = 0 for each sample."""
    rep = IdentityReport(True)
    for t, a in enumerate(samples):
        lhs = dH_cartan(script_A(a, act, mom), act.tw) + script_A(dH_cartan(a, act.tw), act, mom, check=False)
        rep.record("dH_A", t, lhs)
    return rep


def verify_DG_square(samples, act, mom):
    rep = IdentityReport(True)
    for t, a in enumerate(samples):
        rep.record("D_G^2", t, D_G(D_G(a, act, mom), act, mom, check=False))
    return rep


def verify_A_square(samples, act, mom):
    rep = IdentityReport(True)
    for t, a in enumerate(samples):
        rep.record("A^2", t, script_A(script_A(a, act, mom), act, mom, check=False))
    return rep


def verify_lemma_anticommute(samples, J, act, mom):
    """∂̄𝒜 = -𝒜∂̄ and ∂𝒜 = -𝒜∂ on samples, plus ∂̄_G∂ + ∂∂̄_G = 0."""
    rep = IdentityReport(True)
    tw = act.tw
    for t, a in enumerate(samples):
        Aa = script_A(a, act, mom)
        rep.record("dbar_A", t, delbar_cartan(Aa, J, tw) + script_A(delbar_cartan(a, J, tw), act, mom, check=False))
        rep.record("del_A", t, del_cartan(Aa, J, tw) + script_A(del_cartan(a, J, tw), act, mom, check=False))
        rep.record(
            "dbarG_del",
            t,
            delbar_G(del_cartan(a, J, tw), J, act, mom, check=False) + del_cartan(delbar_G(a, J, act, mom), J, tw),
        )
    return rep


def verify_symplectic_cartan(samples, omega, act, mom):
    """Transport identities for the symplectic structure, T = e^{iω}e^{ι_Λ/2i}.

    Checks 𝒜T = Td', ∂̄_G T = T d_G and -2i∂T = Tδ on Cartan elements.
    """
    from .gcs import from_symplectic

    J = from_symplectic(act.chart, omega)
    T = lambda c: c.map(lambda a: symplectic_transport(a, omega))
    rep = IdentityReport(True)
    for t, a in enumerate(samples):
        Ta = T(a)
        rep.record("A_T", t, script_A(Ta, act, mom) - T(cartan_d_prime(a, act)))
        rep.record("dbarG_T", t, delbar_G(Ta, J, act, mom) - T(d_G(a, act)))
        rep.record("del_T", t, del_cartan(Ta, J).scale(-2 * I) - T(a.map(lambda b: koszul_delta(b, omega))))
    return rep


def verify_leibniz(alpha, k, J, act, mom, j):
    """∂(f_j α) = -(i/2)𝒜(ξ_j)·α + f_j ∂α for α ∈ U^k."""
    ch = alpha.chart
    alpha = polyform(alpha)
    f = mom.f[j]
    tw = act.tw
    fa = alpha.scale(f)
    lhs = split_dH(GradedSection(fa, k, J, check=False), tw)[0].alpha
    dl = split_dH(GradedSection(alpha, k, J, check=False), tw)[0].alpha
    rhs = clifford_act(a_section(act, mom, j), alpha).scale(-I / 2) + dl.scale(f)
    rep = IdentityReport(True)
    rep.record("leibniz", j, _clean(ch, (lhs - rhs).c))
    return rep


def b_moment(act, mom, B):
    """Moment data for the B-transformed structure: η' = η + ι_ξ B."""
    ch = act.chart
    B = polyform(B)
    eta = [_clean(ch, (mom.eta_form(ch, j) + iota(act.generators[j], B)).c) for j in range(act.r)]
    return MomentData(list(mom.f), eta)


def b_conjugation(J, B, act, mom, samples):
    """D_G e^B = e^B D_G^B and ∂̄_G e^B = e^B ∂̄_G^B on samples.

    Also checks the spot formula D_G^B α = D_G α - (ι_ξ B)∧α, whose sign is
    forced by the other two identities together with η' = η + ι_ξ B.
    """
    B = polyform(B)
    if not d(B).is_zero() or not act.is_invariant_form(B):
        raise BNotClosedOrNotInvariant("B must be closed and invariant")
    momB = b_moment(act, mom, B)
    JB = b_transform(J, two_form_matrix(B))
    eB = lambda c: c.map(lambda a: exp_wedge(B, a))
    rep = IdentityReport(True)
    for t, a in enumerate(samples):
        rep.record("D_G_eB", t, D_G(eB(a), act, mom) - eB(D_G(a, act, momB)))
        rep.record("dbarG_eB", t, delbar_G(eB(a), J, act, mom) - eB(delbar_G(a, JB, act, momB)))
        spot = a._new({})
        for j in range(act.r):
            iB = iota(act.generators[j], B)
            spot = spot + a.times_x(j, lambda c, iB=iB: iB.wedge(c))
        rep.record("spot", t, D_G(a, act, momB) - D_G(a, act, mom) + spot)
    return rep


def random_invariant_element(act, rng, degree=1, max_poly_degree=2, n_terms=4, form_degrees=None):
    """A random invariant Cartan element (diagonal actions), built from monomials."""
    ch = act.chart
    r = act.r
    terms = {}
    exps = _exponents(r, degree)
    for e in exps:
        acc = FormVector(ch)
        tries = 0
        while len(acc.c) < n_terms and tries < 40 * n_terms:
            tries += 1
            mask = rng.randrange(1 << ch.m)
            if form_degrees is not None and bin(mask).count("1") not in form_degrees:
                continue
            mono = Poly.const(rng.randint(1, 5) * (1 if rng.random() < 0.5 else -1))
            for _ in range(rng.randint(0, max_poly_degree)):
                mono = mono * Poly.var(rng.choice(ch.coords))
            acc = _clean(ch, (acc + act.invariant_part(FormVector(ch, {mask: mono}))).c)
        terms[e] = acc
    return CartanElement(ch, r, terms)


def _exponents(r, degree):
    if r == 0:
        return [()]
    if r == 1:
        return [(degree,)]
    out = []
    for k in range(degree + 1):
        for rest in _exponents(r - 1, degree - k):
            out.append((k,) + rest)
    return out


def deformation_tensor(eps, chart):
    """ε as an antisymmetric 2m x 2m Poly matrix T with ε = ½ Σ T[p][q] e_p ∧ e_q.

    Frame order: coordinate vector fields, then coordinate 1-forms.
    """
    size = 2 * chart.m
    T = [[Poly() for _ in range(size)] for _ in range(size)]
    for coeff, a, b in eps.terms:
        coeff = _p(coeff)
        for p_, x in enumerate(a.comps):
            if not x:
                continue
            for q, y in enumerate(b.comps):
                if not y:
                    continue
                v = coeff * _p(x) * _p(y)
                T[p_][q] = T[p_][q] + v
                T[q][p_] = T[q][p_] - v
    return T


def lie_deformation(X, eps, chart):
    """Components of L_X ε for a polynomial vector field X (constant-frame ε)."""
    m = chart.m
    size = 2 * m
    T = deformation_tensor(eps, chart)
    # L_X ∂_p = -Σ_k ∂_p(X^k) ∂_k ;  L_X dx_k = Σ_p ∂_p(X^k) dx_p
    M = [[Poly() for _ in range(size)] for _ in range(size)]
    for p_ in range(m):
        for k in range(m):
            der = _p(X[k]).diff(chart.coords[p_])
            if der.is_zero():
                continue
            M[k][p_] = M[k][p_] - der
            M[m + p_][m + k] = M[m + p_][m + k] + der
    out = [[apply_field(X, T[a][b], chart) for b in range(size)] for a in range(size)]
    for a in range(size):
        for b in range(size):
            s = Poly()
            for c in range(size):
                if not M[a][c].is_zero() and not T[c][b].is_zero():
                    s = s + M[a][c] * T[c][b]
                if not T[a][c].is_zero() and not M[b][c].is_zero():
                    s = s + T[a][c] * M[b][c]
            out[a][b] = out[a][b] + s
    return out


def is_invariant_deformation(X, eps, chart):
    return all(x.is_zero() for row in lie_deformation(X, eps, chart) for x in row)
