"""Exterior calculus with polynomial coefficients on an affine chart.

A polynomial form is a :class:`FormVector` whose coefficients are
:class:`Poly`.  A vector field is a list of ``m`` polynomials (components
along the chart's coordinate fields).  On a complex chart ``z_k`` and
``zb_k`` are independent coordinates, so every derivative is a Wirtinger
derivative.
"""

from __future__ import annotations

import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations

from . import linalg
from .errors import ChartMismatch, HNotClosed, MalformedFamily, NotIsotropic, ParseError, SingularOmega
from .scalars import ONE, ZERO, GaussianRational, Poly, parse_poly
from .spinor import (
    FormVector,
    GeneralizedVector,
    contract_basis,
    mask_indices,
    pairing,
    wedge_basis,
)

Q = GaussianRational.coerce


def _p(x):
    return Poly.coerce(x)


def polyform(alpha):
    """Copy of ``alpha`` with every coefficient promoted to :class:`Poly`."""
    return FormVector(alpha.chart, {k: _p(v) for k, v in alpha.c.items() if v})


def from_dict(chart, terms):
    """Build a form from ``{tuple of coordinate indices: coefficient}``.

    Index tuples need not be sorted; the sign of the sorting permutation
    is applied.
    """
    out = FormVector(chart)
    for idx, coeff in terms.items():
        f = FormVector.one(chart, _p(coeff))
        for i in reversed(idx):
            f = FormVector.covector(chart, [ONE if j == i else ZERO for j in range(chart.m)]).wedge(f)
        out = out + f
    return out


def _add_into(out, k, v):
    t = out.get(k)
    out[k] = v if t is None else t + v


def _clean(chart, out):
    return FormVector(chart, {k: v for k, v in out.items() if not _p(v).is_zero()})


def d(alpha):
    """Exterior derivative: d(f e^A) = Σ_k ∂_k f · e^k ∧ e^A."""
    ch = alpha.chart
    out = {}
    for mask, f in alpha.c.items():
        f = _p(f)
        if f.is_constant():
            continue
        for k, name in enumerate(ch.coords):
            df = f.diff(name)
            if df.is_zero():
                continue
            s, nm = wedge_basis(ch, k, mask)
            if s:
                _add_into(out, nm, df if s > 0 else -df)
    return _clean(ch, out)


def wedge(alpha, beta):
    return alpha.wedge(beta)


def vector_field(chart, comps):
    comps = [_p(c) for c in comps]
    if len(comps) != chart.m:
        raise ChartMismatch(f"vector field needs {chart.m} components")
    return comps


def apply_field(X, f, chart):
    """X(f) = Σ X^k ∂_k f."""
    out = Poly()
    for xk, name in zip(X, chart.coords):
        if xk:
            out = out + _p(xk) * _p(f).diff(name)
    return out


def iota(X, alpha):
    """Interior product ι_X α."""
    ch = alpha.chart
    if len(X) != ch.m:
        raise ChartMismatch("vector field and form live on different charts")
    out = {}
    for mask, f in alpha.c.items():
        for i in mask_indices(mask):
            x = X[i]
            if not x:
                continue
            s, nm = contract_basis(i, mask)
            v = _p(f) * _p(x)
            _add_into(out, nm, v if s > 0 else -v)
    return _clean(ch, out)


def lie(X, alpha):
    """Lie derivative, computed directly from the coordinate formula.

    L_X(f e^{i1}∧...∧e^{ip}) = X(f) e^{i1..ip} + f Σ_r e^{i1}∧..∧d(X^{ir})∧..∧e^{ip}.
    """
    ch = alpha.chart
    if len(X) != ch.m:
        raise ChartMismatch("vector field and form live on different charts")
    dX = [d(FormVector.one(ch, _p(x))) if x else FormVector(ch) for x in X]
    out = FormVector(ch)
    for mask, f in alpha.c.items():
        f = _p(f)
        xf = apply_field(X, f, ch)
        if not xf.is_zero():
            out = out + FormVector.basis(ch, mask, xf)
        idx = mask_indices(mask)
        for r, i in enumerate(idx):
            if dX[i].is_zero():
                continue
            left = FormVector.one(ch, f)
            for j in idx[:r]:
                left = left.wedge(FormVector.basis(ch, 1 << j))
            term = left.wedge(dX[i])
            for j in idx[r + 1:]:
                term = term.wedge(FormVector.basis(ch, 1 << j))
            out = out + term
    return _clean(ch, out.c)


def lie_bracket(X, Y, chart):
    """[X, Y]^k = X(Y^k) - Y(X^k)."""
    return [apply_field(X, y, chart) - apply_field(Y, x, chart) for x, y in zip(X, Y)]


# --- twisting ------------------------------------------------------------------

class TwistData:
    """A closed polynomial 3-form H (or zero)."""

    def __init__(self, chart, H=None, check=True):
        self.chart = chart
        self.H = polyform(H) if H is not None else FormVector(chart)
        if check:
            if any(bin(k).count("1") != 3 for k in self.H.c):
                raise HNotClosed("H must be a 3-form")
            if not d(self.H).is_zero():
                raise HNotClosed("dH != 0")

    @classmethod
    def zero(cls, chart):
        return cls(chart)

    def is_zero(self):
        return self.H.is_zero()


def d_H(alpha, tw=None):
    """d_H = d - H∧."""
    out = d(alpha)
    if tw is not None and not tw.is_zero():
        tw.chart.check(alpha.chart)
        out = out - tw.H.wedge(alpha)
    return _clean(alpha.chart, out.c)


# --- Courant bracket -----------------------------------------------------------

def _one_form(chart, comps):
    return FormVector.from_terms(chart, [(1 << i, _p(c)) for i, c in enumerate(comps) if c])


def _comps(alpha):
    ch = alpha.chart
    out = [Poly()] * ch.m
    for mask, v in alpha.c.items():
        if bin(mask).count("1") != 1:
            raise ValueError("expected a 1-form")
        out[mask.bit_length() - 1] = _p(v)
    return out


def section(chart, X=None, xi=None):
    """A Courant section X + ξ with polynomial components."""
    X = [_p(x) for x in (X or [ZERO] * chart.m)]
    xi = [_p(x) for x in (xi or [ZERO] * chart.m)]
    return GeneralizedVector(chart, X + xi)


def courant(a, b, tw=None):
    """Skew H-twisted Courant bracket.

    [X+ξ, Y+η]_H = [X,Y] + L_X η - L_Y ξ - ½ d(ι_X η - ι_Y ξ) + ι_Y ι_X H.
    """
    a.chart.check(b.chart)
    ch = a.chart
    X, Y = [_p(x) for x in a.X], [_p(x) for x in b.X]
    xi, eta = _one_form(ch, a.xi), _one_form(ch, b.xi)
    vec = lie_bracket(X, Y, ch)
    form = lie(X, eta) - lie(Y, xi)
    f = FormVector.one(ch, _p(sum((x * e for x, e in zip(X, _comps(eta)) if x and e), Poly())))
    g = FormVector.one(ch, _p(sum((y * e for y, e in zip(Y, _comps(xi)) if y and e), Poly())))
    form = form - d(f - g).scale(Q("1/2"))
    if tw is not None and not tw.is_zero():
        form = form + iota(Y, iota(X, tw.H))
    form = _clean(ch, form.c)
    return GeneralizedVector(ch, vec + _comps(form))


@dataclass
class IntegrabilityResult:
    integrable: bool
    witness: tuple = None  # (i, j, k)
    value: Poly = None

    def __bool__(self):
        return self.integrable


def _threads():
    try:
        return max(1, int(os.environ.get("GENFORMAL_THREADS", "1")))
    except ValueError:
        return 1


def integrable(frame, tw=None):
    """Courant closure of span(frame), tested by <[s_i, s_j], s_k> = 0.

    Valid for maximal isotropic frames, where L equals its own orthogonal
    complement.  Returns an :class:`IntegrabilityResult`; on failure the
    witness is the first (i, j, k) in lexicographic order with a nonzero
    polynomial value.
    """
    for a, b in combinations(range(len(frame)), 2):
        if not _p(pairing(frame[a], frame[b])).is_zero():
            raise NotIsotropic(f"<s_{a}, s_{b}> != 0")
    for a in range(len(frame)):
        if not _p(pairing(frame[a], frame[a])).is_zero():
            raise NotIsotropic(f"<s_{a}, s_{a}> != 0")

    pairs = list(combinations(range(len(frame)), 2))

    def check(pair):
        i, j = pair
        br = courant(frame[i], frame[j], tw)
        for k in range(len(frame)):
            v = _p(pairing(br, frame[k]))
            if not v.is_zero():
                return (i, j, k), v
        return None

    workers = _threads()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(check, pairs))
    else:
        results = [check(p) for p in pairs]
    for r in results:
        if r is not None:
            return IntegrabilityResult(False, r[0], r[1])
    return IntegrabilityResult(True)


# --- the ε families ------------------------------------------------------------

# With J_I = diag(-I, Iᵀ) and ω = i Σ dz̄∧dz, the bivector part and the
# form part of ε must enter with opposite signs for J_ε to commute with J_ω.
EPSILON_FORM_SIGN = -1


def _check_family(chart, index_set, F):
    if not chart.complex:
        raise MalformedFamily("the normal form needs a complex chart")
    n = chart.n
    index_set = sorted(set(index_set))
    for k in index_set:
        if not 0 <= k < n:
            raise MalformedFamily(f"index {k} outside 0..{n - 1}")
    fam = {}
    for key, f in F.items():
        i, j = key
        if i == j or i not in index_set or j not in index_set:
            raise MalformedFamily(f"pair {key} is not a pair of distinct indices in I")
        fam[(i, j)] = _p(f)
    return index_set, fam


def closedness_condition(chart, index_set, F):
    """The holomorphicity criterion for the normal-form family.

    ``F`` maps index pairs (i, j) ⊂ I to polynomials.  True iff each F_ij is
    holomorphic and independent of z_k for every k ∈ I.
    """
    index_set, fam = _check_family(chart, index_set, F)
    for f in fam.values():
        if not f.is_holomorphic():
            return False
        for k in index_set:
            if not f.diff(f"z{k}").is_zero():
                return False
    return True


def normal_form_deformation(chart, index_set, F, scale=1):
    """ε = c Σ F_ij (∂_{z_i}∧∂_{z_j} + s·dz̄_i∧dz̄_j), s = EPSILON_FORM_SIGN.

    Returned as a :class:`genformal.gcs.Deformation` for the complex-induced
    structure, whose conjugate eigenbundle contains ∂_{z_i} and dz̄_i.
    """
    from .gcs import Deformation

    index_set, fam = _check_family(chart, index_set, F)
    n = chart.n
    c = Q(scale)
    terms = []
    for (i, j), f in fam.items():
        f = f.scale(c)
        terms.append((f, GeneralizedVector.vector(chart, i), GeneralizedVector.vector(chart, j)))
        g = f if EPSILON_FORM_SIGN > 0 else -f
        terms.append((g, GeneralizedVector.covector(chart, n + i), GeneralizedVector.covector(chart, n + j)))
    return Deformation(terms)


# --- symplectic Koszul differential --------------------------------------------------

def poisson_matrix(omega):
    """Λ = w⁻¹ where w = -W is the map X -> ι_X ω (W the component matrix)."""
    W = linalg.as_matrix(omega)
    try:
        return linalg.inverse(linalg.neg(W))
    except ZeroDivisionError:
        raise SingularOmega("omega is degenerate") from None


def iota_lambda(alpha, omega, poisson=None):
    """ι_Λ α = Σ_{i<j} Λ_ij ι_{e_i} ι_{e_j} α."""
    L = poisson if poisson is not None else poisson_matrix(omega)
    ch = alpha.chart
    m = ch.m
    out = {}
    for mask, f in alpha.c.items():
        for i in range(m):
            for j in range(i + 1, m):
                lam = L[i][j]
                if not lam:
                    continue
                s1, m1 = contract_basis(j, mask)
                if not s1:
                    continue
                s2, m2 = contract_basis(i, m1)
                if not s2:
                    continue
                v = f * lam
                _add_into(out, m2, v if s1 * s2 > 0 else -v)
    return _clean(ch, out)


def koszul_delta(alpha, omega):
    """δ = [ι_Λ, d] = ι_Λ d - d ι_Λ.

    This order is the one for which -2i∂ on the symplectic grading is
    conjugate to δ under α -> e^{iω} e^{ι_Λ/2i} α.
    """
    L = poisson_matrix(omega)
    return _clean(alpha.chart, (iota_lambda(d(alpha), omega, L) - d(iota_lambda(alpha, omega, L))).c)


# --- 2-forms as component matrices ---------------------------------------------------

def two_form_matrix(B):
    """Component matrix W[i][j] = B(e_i, e_j) of a 2-form."""
    m = B.chart.m
    W = [[Poly() for _ in range(m)] for _ in range(m)]
    for mask, f in B.c.items():
        idx = mask_indices(mask)
        if len(idx) != 2:
            raise ValueError("expected a 2-form")
        i, j = idx
        W[i][j] = _p(f)
        W[j][i] = -_p(f)
    return W


def matrix_two_form(chart, W):
    """Inverse of :func:`two_form_matrix` (uses the entries above the diagonal)."""
    m = chart.m
    return FormVector.from_terms(
        chart, [((1 << i) | (1 << j), _p(W[i][j])) for i in range(m) for j in range(i + 1, m) if W[i][j]]
    )


def exp_wedge(B, alpha):
    """e^B ∧ α for an even form B with nilpotent wedge powers."""
    out = alpha
    term = alpha
    k = 1
    while True:
        term = B.wedge(term).scale(Q(1) / k)
        term = _clean(alpha.chart, term.c)
        if term.is_zero():
            return out
        out = out + term
        k += 1


# --- text form ----------------------------------------------------------------

_FORM_TOKEN = re.compile(r"d(zb\d+|z\d+|x\d+)")


def _split_terms(text):
    """Split at top-level + and - signs, keeping each sign with its term."""
    terms, depth, start = [], 0, 0
    prev = ""
    for k, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ParseError("unbalanced parenthesis", text, k)
        elif ch in "+-" and depth == 0 and prev and prev not in "*^(":
            terms.append((start, text[start:k]))
            start = k
        if not ch.isspace():
            prev = ch
    if depth:
        raise ParseError("unbalanced parenthesis", text, len(text))
    terms.append((start, text[start:]))
    return [(pos, t) for pos, t in terms if t.strip()]


def parse_form(chart, text):
    """Parse text such as ``(z0*z1)*dz2∧dz3 - 2*dzb0∧dzb1``.

    Wedge is ``∧`` (``&`` is accepted as an ASCII alternative); the output
    of ``str(form)`` parses back to the same form.
    """
    if not isinstance(text, str):
        raise ParseError("a form must be given as a string")
    if not text.strip() or text.strip() == "0":
        return FormVector(chart)
    out = FormVector(chart)
    for pos, term in _split_terms(text):
        depth = 0
        split_at = None
        for k, ch in enumerate(term):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif depth == 0 and _FORM_TOKEN.match(term, k) and (k == 0 or not term[k - 1].isalnum()):
                split_at = k
                break
        if split_at is None:
            coeff_text, form_text = term, ""
        else:
            coeff_text, form_text = term[:split_at], term[split_at:]
        coeff_text = coeff_text.strip()
        if coeff_text.endswith("*"):
            coeff_text = coeff_text[:-1].strip()
        if coeff_text in ("", "+"):
            coeff = Poly.const(1)
        elif coeff_text == "-":
            coeff = Poly.const(-1)
        else:
            try:
                coeff = parse_poly(coeff_text)
            except ParseError as exc:
                raise ParseError(f"bad coefficient {coeff_text!r}", text, pos) from exc
        f = FormVector.one(chart, coeff)
        if form_text:
            pieces = [t.strip() for t in re.split(r"∧|&", form_text)]
            idx = []
            for tok in pieces:
                m = _FORM_TOKEN.fullmatch(tok)
                if not m or m.group(1) not in chart.index:
                    raise ParseError(f"unknown form token {tok!r}", text, pos + split_at)
                idx.append(chart.index[m.group(1)])
            f = from_dict(chart, {tuple(idx): coeff})
        out = out + f
    return _clean(chart, out.c)
