"""The ∂/∂̄ splitting of d_H for a generalized complex structure.

On a section of U^k, integrability means d_H lands in U^{k-1} + U^{k+1};
``∂`` and ``∂̄`` are the two projections.  Projections are the Lagrange
polynomials in ρ(J), so J may have polynomial entries.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import BNotClosed, ResidualOutsideAdjacentDegrees, ResidualOutsideCorners
from .gcs import b_transform
from .polyforms import (
    _clean,
    d,
    d_H,
    exp_wedge,
    iota_lambda,
    matrix_two_form,
    poisson_matrix,
    polyform,
    two_form_matrix,
)
from .scalars import I, GaussianRational, Poly
from .spinor import FormVector, wedge_basis

Q = GaussianRational.coerce


class GradedSection:
    """A polynomial form α lying in U^k of J."""

    def __init__(self, alpha, k, J, check=True):
        self.alpha = polyform(alpha)
        self.k = k
        self.J = J
        if check:
            off = {j: c for j, c in J.grading().decompose(self.alpha).items() if j != k}
            if off:
                raise ResidualOutsideAdjacentDegrees(
                    f"section has components in degrees {sorted(off)}, expected only {k}",
                    residual=off,
                )

    @classmethod
    def project(cls, alpha, k, J):
        """The U^k component of an arbitrary form."""
        return cls(J.grading().project(polyform(alpha), k), k, J, check=False)

    def is_zero(self):
        return self.alpha.is_zero()


def split_dH(s, tw=None):
    """(∂s, ∂̄s) with ∂s ∈ U^{k-1} and ∂̄s ∈ U^{k+1}.

    Raises ResidualOutsideAdjacentDegrees when d_H s has any other
    component, which happens exactly when J fails to be integrable along s.
    """
    parts = s.J.grading().decompose(d_H(s.alpha, tw))
    off = {j: c for j, c in parts.items() if j not in (s.k - 1, s.k + 1)}
    if off:
        raise ResidualOutsideAdjacentDegrees(
            f"d_H of a U^{s.k} section has components in degrees {sorted(off)}", residual=off
        )
    zero = FormVector(s.alpha.chart)
    return (
        GradedSection(parts.get(s.k - 1, zero), s.k - 1, s.J, check=False),
        GradedSection(parts.get(s.k + 1, zero), s.k + 1, s.J, check=False),
    )


def delta(s, tw=None):
    return split_dH(s, tw)[0]


def delta_bar(s, tw=None):
    return split_dH(s, tw)[1]


def classical_dbar(alpha):
    """Σ_k ∂f/∂z̄_k dz̄_k ∧ (·) on a complex chart."""
    return _partial(alpha, anti=True)


def classical_del(alpha):
    return _partial(alpha, anti=False)


def _partial(alpha, anti):
    ch = alpha.chart
    n = ch.n
    out = {}
    for mask, f in alpha.c.items():
        f = Poly.coerce(f)
        for j in range(n):
            k = n + j if anti else j
            g = f.diff(ch.coords[k])
            if g.is_zero():
                continue
            s, nm = wedge_basis(ch, k, mask)
            if s:
                t = out.get(nm)
                v = g if s > 0 else -g
                out[nm] = v if t is None else t + v
    return _clean(ch, out)


# --- symplectic transport --------------------------------------------------------

def _exp_op(op, alpha):
    out = alpha
    term = alpha
    k = 1
    while True:
        term = op(term).scale(Q(1) / k)
        if term.is_zero():
            return out
        out = out + term
        k += 1


def symplectic_transport(alpha, omega):
    """e^{iω} e^{ι_Λ/2i} α, the map taking Λ^{n+k} onto U^k of J_ω."""
    ch = alpha.chart
    L = poisson_matrix(omega)
    c = (2 * I).inverse()
    inner = _exp_op(lambda b: iota_lambda(b, omega, L).scale(c), polyform(alpha))
    om = matrix_two_form(ch, omega).scale(I)
    return exp_wedge(om, inner)


@dataclass
class TransformReport:
    passed: bool
    checks: dict = field(default_factory=dict)  # name -> residual FormVector

    def failures(self):
        return [k for k, v in self.checks.items() if not v.is_zero()]


def verify_symp_transform(alpha, omega):
    """Check ∂̄(Tα) = T(dα) and -2i∂(Tα) = T(δα) for T = e^{iω}e^{ι_Λ/2i}.

    Each homogeneous degree p of α is treated as a U^{p-n} section.
    """
    from .gcs import from_symplectic
    from .polyforms import koszul_delta

    ch = alpha.chart
    J = from_symplectic(ch, omega)
    n = ch.n
    alpha = polyform(alpha)
    checks = {}
    for p in alpha.degrees():
        a = alpha.degree_part(p)
        s = GradedSection(symplectic_transport(a, omega), p - n, J, check=False)
        try:
            dl, db = split_dH(s)
        except ResidualOutsideAdjacentDegrees as exc:
            checks[f"adjacent[{p}]"] = sum(exc.residual.values(), FormVector(ch))
            continue
        checks[f"dbar[{p}]"] = _clean(ch, (db.alpha - symplectic_transport(d(a), omega)).c)
        checks[f"del[{p}]"] = _clean(
            ch, (dl.alpha.scale(-2 * I) - symplectic_transport(koszul_delta(a, omega), omega)).c
        )
    return TransformReport(all(v.is_zero() for v in checks.values()), checks)


# --- B-transforms ------------------------------------------------------------

def verify_btransform_ops(J, B, samples, tw=None):
    """Check ∂̄_B = e^{-B}∂̄e^{B} and ∂_B = e^{-B}∂e^{B} on U^k_B parts of samples.

    ``B`` is a closed 2-form (FormVector, possibly polynomial).  Each sample
    form is decomposed under J_B = e^B J e^{-B}; every nonzero graded piece
    is checked.
    """
    B = polyform(B)
    if not d(B).is_zero():
        raise BNotClosed("dB != 0")
    ch = J.chart
    JB = b_transform(J, two_form_matrix(B))
    minus = B.scale(-1)
    checks = {}
    for t, sample in enumerate(samples):
        for k, piece in JB.grading().decompose(polyform(sample)).items():
            dl_b, db_b = split_dH(GradedSection(piece, k, JB, check=False), tw)
            lifted = GradedSection(exp_wedge(B, piece), k, J, check=False)
            dl, db = split_dH(lifted, tw)
            checks[f"dbar[{t},{k}]"] = _clean(ch, (db_b.alpha - exp_wedge(minus, db.alpha)).c)
            checks[f"del[{t},{k}]"] = _clean(ch, (dl_b.alpha - exp_wedge(minus, dl.alpha)).c)
    return TransformReport(all(v.is_zero() for v in checks.values()), checks)


# --- generalized Kähler four-way splitting ------------------------------------------

CORNERS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


@dataclass
class FourSplit:
    p: int
    q: int
    components: dict  # (dp, dq) -> FormVector, keys from CORNERS

    def corner(self, dp, dq):
        return self.components[(dp, dq)]

    def total(self):
        out = None
        for v in self.components.values():
            out = v if out is None else out + v
        return out


def gk_four_split(pair, s, p, q):
    """Split d(s) for s ∈ U^{p,q} of a flat GK pair into its four corners.

    The corner (dp, dq) holds the U^{p+dp, q+dq} component.
    """
    ch = pair.J1.chart
    g1, g2 = pair.J1.grading(), pair.J2.grading()
    s = polyform(s)
    ds = d(s)
    comps = {c: FormVector(ch) for c in CORNERS}
    residual = {}
    for a, piece in g1.decompose(ds).items():
        for b, sub in g2.decompose(piece).items():
            key = (a - p, b - q)
            if key in comps:
                comps[key] = sub
            else:
                residual[(a, b)] = sub
    if residual:
        raise ResidualOutsideCorners(
            f"d of a U^({p},{q}) section has components at {sorted(residual)}", residual=residual
        )
    return FourSplit(p, q, comps)


def pq_section(pair, alpha, p, q):
    """The U^{p,q} component of a polynomial form."""
    a = pair.J1.grading().project(polyform(alpha), p)
    return pair.J2.grading().project(a, q)
