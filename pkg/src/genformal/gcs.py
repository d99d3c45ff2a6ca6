"""Generalized complex structures on V (or pointwise on a chart).

Matrices act on V + V* in the frame (e_1..e_m, e^1..e^m).  Two-forms and
bivectors are passed as *component* matrices ``W[i][j] = B(e_i, e_j)``; the
map X -> ι_X B then has matrix ``-W``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import linalg
from .errors import (
    NotCommuting,
    NotComplexStructure,
    NotGeneralizedComplex,
    NotGeneralizedComplexSubspace,
    NotInvariant,
    NotPositiveDefinite,
    PolynomialEntries,
    SingularOmega,
)
from .scalars import I, ONE, ZERO, GaussianRational, Poly
from .spinor import (
    Chart,
    FormVector,
    GeneralizedVector,
    Grading,
    SpinOperator,
    matrix_apply,
    pairing,
    pairing_matrix,
)

Q = GaussianRational.coerce


def _is_zero(x):
    return x.is_zero() if isinstance(x, Poly) else not x


def _mat_is_zero(a):
    return all(_is_zero(x) for row in a for x in row)


def _evaluate_matrix(A, point):
    return [[x.eval(point) if isinstance(x, Poly) else x for x in row] for row in A]


def _constant(A):
    return all(not isinstance(x, Poly) or x.is_constant() for row in A for x in row)


def _as_scalars(A):
    return [[x.constant_value() if isinstance(x, Poly) else x for x in row] for row in A]


def form_map(W):
    """Matrix of X -> ι_X B for the component matrix W of a 2-form."""
    return linalg.neg(W)


def block_diag(a, b):
    m = len(a)
    z = linalg.zeros(m)
    return linalg.block([[a, z], [z, b]])


class GCS:
    """A pairing-orthogonal J on V + V* with J^2 = -1 (entries scalar or Poly)."""

    def __init__(self, chart, J, check=True):
        self.chart = chart
        self.J = linalg.as_matrix(J)
        if check:
            self.verify()
        self._grading = None

    def verify(self):
        n = 2 * self.chart.m
        sq = linalg.matmul(self.J, self.J)
        plus = linalg.add(sq, linalg.identity(n))
        if not _mat_is_zero(plus):
            raise NotGeneralizedComplex("J^2 != -1")
        G = pairing_matrix(self.chart.m)
        lhs = linalg.matmul(linalg.transpose(self.J), linalg.matmul(G, self.J))
        if not _mat_is_zero(linalg.sub(lhs, G)):
            raise NotGeneralizedComplex("J is not orthogonal for the pairing")

    @property
    def constant(self):
        return _constant(self.J)

    def at(self, point):
        if self.constant:
            return GCS(self.chart, _as_scalars(self.J), check=False)
        return GCS(self.chart, _evaluate_matrix(self.J, point), check=False)

    def rho(self):
        return SpinOperator(self.chart, self.J)

    def grading(self):
        if self._grading is None:
            self._grading = Grading(self.chart, self.J)
        return self._grading

    def apply(self, v):
        return matrix_apply(self.J, v)

    def __eq__(self, other):
        return isinstance(other, GCS) and self.chart == other.chart and _mat_is_zero(linalg.sub(self.J, other.J))

    def __repr__(self):
        return f"GCS({self.chart!r})"


def _check_square_minus_one(I_mat):
    m = len(I_mat)
    if not _mat_is_zero(linalg.add(linalg.matmul(I_mat, I_mat), linalg.identity(m))):
        raise NotComplexStructure("I^2 != -1")


def from_complex(chart, I_mat):
    """diag(-I, Iᵀ): +i eigenspace T^{0,1} + Λ^{1,0}."""
    I_mat = linalg.as_matrix(I_mat)
    _check_square_minus_one(I_mat)
    return GCS(chart, block_diag(linalg.neg(I_mat), linalg.transpose(I_mat)))


def from_symplectic(chart, omega):
    """[[0, -ω⁻¹], [ω, 0]] with ω the map X -> ι_X ω (omega given as components)."""
    W = linalg.as_matrix(omega)
    m = chart.m
    if not _mat_is_zero(linalg.add(W, linalg.transpose(W))):
        raise SingularOmega("omega is not skew")
    w = form_map(W)
    try:
        winv = linalg.inverse(w)
    except ZeroDivisionError:
        raise SingularOmega("omega is degenerate") from None
    z = linalg.zeros(m)
    return GCS(chart, linalg.block([[z, linalg.neg(winv)], [w, z]]))


def b_matrix(chart, B, sign=1):
    """e^{sign·B} = [[1, 0], [sign·B, 1]] on V + V*."""
    m = chart.m
    Bm = form_map(linalg.as_matrix(B))
    if sign < 0:
        Bm = linalg.neg(Bm)
    return linalg.block([[linalg.identity(m), linalg.zeros(m)], [Bm, linalg.identity(m)]])


def b_transform(J, B):
    """e^B J e^{-B}."""
    ch = J.chart
    return GCS(ch, linalg.matmul(b_matrix(ch, B, 1), linalg.matmul(J.J, b_matrix(ch, B, -1))))


def standard_complex(chart):
    m = chart.m
    I_mat = linalg.zeros(m)
    if chart.complex:
        n = chart.n
        for j in range(n):
            I_mat[j][j] = I
            I_mat[n + j][n + j] = -I
    else:
        for j in range(0, m, 2):
            I_mat[j + 1][j] = ONE
            I_mat[j][j + 1] = -ONE
    return I_mat


def standard_symplectic(chart):
    """Component matrix of the symplectic form compatible with standard_complex.

    Real chart: Σ dy_j∧dx_j.  Complex chart: i Σ dz̄_j∧dz_j (= 2 Σ dy_j∧dx_j).
    With these, (J_ω, J_I) is generalized Kähler and the diagonal circle
    generated by ξ = Σ i·w_j (z_j ∂_{z_j} - z̄_j ∂_{z̄_j}) has moment map
    Σ w_j |z_j|^2.
    """
    m = chart.m
    W = linalg.zeros(m)
    if chart.complex:
        n = chart.n
        for j in range(n):
            W[n + j][j] = I
            W[j][n + j] = -I
    else:
        for j in range(0, m, 2):
            W[j + 1][j] = ONE
            W[j][j + 1] = -ONE
    return W


def eigenbundle(J, point=None):
    """Basis of ker(J - i) as GeneralizedVectors."""
    if not J.constant:
        if point is None:
            raise PolynomialEntries("an evaluation point is required")
        J = J.at(point)
    M = _as_scalars(J.J)
    n = len(M)
    for i in range(n):
        M[i][i] = M[i][i] - I
    return [GeneralizedVector(J.chart, v) for v in linalg.nullspace(M)]


def projection_rank(frame, chart):
    m = chart.m
    return linalg.span_rank([v.comps[:m] for v in frame])


def type_of(J, point=None):
    """Codimension of π(L) in V_C."""
    L = eigenbundle(J, point)
    return J.chart.m - projection_rank(L, J.chart)


def type_of_frame(frame, chart, point=None):
    vecs = [v.evaluate(point) if point is not None else v for v in frame]
    return chart.m - projection_rank(vecs, chart)


def gcs_from_frame(chart, frame):
    """The unique J with +i eigenspace span(frame); fails if L ∩ L̄ != 0."""
    cols = [v.comps for v in frame] + [v.conjugate().comps for v in frame]
    M = linalg.transpose(cols)
    if linalg.rank(M) != 2 * chart.m:
        raise NotGeneralizedComplex("L ∩ conj(L) != 0")
    n = chart.m
    D = linalg.zeros(2 * n)
    for i in range(n):
        D[i][i] = I
        D[n + i][n + i] = -I
    J = linalg.matmul(M, linalg.matmul(D, linalg.inverse(M)))
    return GCS(chart, J)


def is_isotropic(frame):
    return all(_is_zero(pairing(a, b)) for a in frame for b in frame)


# --- deformations ------------------------------------------------------------

@dataclass
class Deformation:
    """ε = Σ coeff · (first ∧ second) with first, second sections of L̄."""

    terms: list = field(default_factory=list)  # (Poly coeff, GeneralizedVector, GeneralizedVector)

    def scaled(self, c):
        c = Q(c)
        return Deformation([(Poly.coerce(k) * c, a, b) for k, a, b in self.terms])

    def contract(self, Y):
        """ι_Y ε, using the dual pairing 2<·,·> to view ε as a 2-form on L."""
        out = GeneralizedVector.zero(Y.chart)
        for k, a, b in self.terms:
            ya = pairing(Y, a) * 2
            yb = pairing(Y, b) * 2
            if not _is_zero(ya):
                out = out + b.scale(Poly.coerce(ya) * k)
            if not _is_zero(yb):
                out = out - a.scale(Poly.coerce(yb) * k)
        return out

    def frame(self, L):
        """Frame of L_ε = {Y + ι_Y ε}."""
        return [Y + self.contract(Y) for Y in L]

    def evaluate(self, point):
        return Deformation([(Poly.const(Poly.coerce(k).eval(point)), a, b) for k, a, b in self.terms])

    def is_zero(self):
        return all(Poly.coerce(k).is_zero() for k, _, _ in self.terms)


def _coords_in(basis_vecs, v):
    """Coordinates of v in the given basis (columns), exact."""
    M = linalg.transpose([b.comps for b in basis_vecs])
    x = linalg.solve(M, v.comps)
    if x is None:
        raise NotGeneralizedComplex("vector outside the expected subspace")
    return x


def a_epsilon(J, eps, point=None):
    """The matrix [[1, ε̄], [ε, 1]] on L + L̄ at a point."""
    L = eigenbundle(J)
    Lbar = [v.conjugate() for v in L]
    basis = L + Lbar
    e = eps.evaluate(point) if point is not None else eps
    m = len(L)
    cols = []
    for Y in L:
        cols.append(_coords_in(basis, Y + e.contract(Y)))
    for Z in Lbar:
        w = (Z.conjugate() + e.contract(Z.conjugate())).conjugate()
        cols.append(_coords_in(basis, w))
    A = linalg.transpose(cols)
    for row in A:
        for k, v in enumerate(row):
            if isinstance(v, Poly):
                if not v.is_constant():
                    raise PolynomialEntries("deformation has non-constant coefficients; give a point")
                row[k] = v.constant_value()
    return A, m


def deform(J, eps, point=None):
    """The GCS with +i eigenspace L_ε, at ``point`` when ε is non-constant."""
    if eps.is_zero():
        return GCS(J.chart, J.J) if point is None else J.at(point)
    A, _ = a_epsilon(J, eps, point)
    if not linalg.det(A):
        raise NotGeneralizedComplex("A_epsilon is singular at this point")
    e = eps.evaluate(point) if point is not None else eps
    frame = [
        GeneralizedVector(J.chart, [x.constant_value() if isinstance(x, Poly) else x for x in v.comps])
        for v in e.frame(eigenbundle(J))
    ]
    return gcs_from_frame(J.chart, frame)


# --- generalized Kähler pairs --------------------------------------------------

@dataclass
class GKPair:
    J1: GCS
    J2: GCS
    G: list
    minors: list


def hermitian_gram(chart, G):
    """H[a][b] = <G e_a, conj(e_b)> in the chart frame."""
    m2 = 2 * chart.m
    basis = [GeneralizedVector(chart, [ONE if i == a else ZERO for i in range(m2)]) for a in range(m2)]
    images = [matrix_apply(G, b) for b in basis]
    return [[pairing(images[a], basis[b].conjugate()) for b in range(m2)] for a in range(m2)]


def gk_check(J1, J2, point=None):
    J1.chart.check(J2.chart)
    A = J1.at(point) if point is not None or not J1.constant else J1
    B = J2.at(point) if point is not None or not J2.constant else J2
    a, b = _as_scalars(A.J), _as_scalars(B.J)
    if not _mat_is_zero(linalg.sub(linalg.matmul(a, b), linalg.matmul(b, a))):
        raise NotCommuting("J1 J2 != J2 J1")
    G = linalg.neg(linalg.matmul(a, b))
    H = hermitian_gram(J1.chart, G)
    minors = linalg.sylvester_minors(H)
    for k, d in enumerate(minors, 1):
        if d.im or d.re <= 0:
            raise NotPositiveDefinite(f"leading minor {k} is {d}", index=k, minor=d)
    return GKPair(A, B, G, minors)


def pq_decomposition(pair):
    """{(p, q): basis of U^{p,q}} for the joint grading of (ρ(J1), ρ(J2))."""
    ch = pair.J1.chart
    g1, g2 = pair.J1.grading(), pair.J2.grading()
    spans = {}
    for mask in range(1 << ch.m):
        e = FormVector.basis(ch, mask)
        for p, comp in g1.decompose(e).items():
            for q, piece in g2.decompose(comp).items():
                spans.setdefault((p, q), []).append(piece)
    out = {}
    for key, vecs in spans.items():
        rows = linalg.row_basis([_dense(v) for v in vecs])
        if rows:
            out[key] = [_sparse(ch, r) for r in rows]
    return out


def _dense(f):
    v = [ZERO] * (1 << f.chart.m)
    for k, x in f.c.items():
        v[k] = x
    return v


def _sparse(chart, row):
    return FormVector.from_terms(chart, [(k, x) for k, x in enumerate(row) if x])


# --- submanifolds ------------------------------------------------------------

def restrict_dirac(J, W):
    """L_W for a subspace W (columns of the m x w matrix given as a list of basis vectors).

    Returns (J_W, frame) in the coordinates of W's basis, or raises
    NotGeneralizedComplexSubspace when L_W ∩ conj(L_W) != 0.
    """
    ch = J.chart
    m = ch.m
    W = [list(map(Q, w)) for w in W]
    w = len(W)
    L = eigenbundle(J)
    # combinations of L with vector part in span(W): solve Σ a_i X_i = Σ b_j W_j
    cols = [v.comps[:m] for v in L] + [[-x for x in wv] for wv in W]
    ker = linalg.nullspace(linalg.transpose(cols))
    sub = Chart(2 * ((w + 1) // 2), False) if w % 2 == 0 else None
    if sub is None:
        raise NotGeneralizedComplexSubspace("odd-dimensional subspace cannot carry a generalized complex structure")
    frame = []
    for coeffs in ker:
        a, b = coeffs[: len(L)], coeffs[len(L):]
        xi = [ZERO] * m
        for c, v in zip(a, L):
            if c:
                xi = [s + c * t for s, t in zip(xi, v.comps[m:])]
        restricted = [sum((xi[k] * W[j][k] for k in range(m)), ZERO) for j in range(w)]
        frame.append(list(b) + restricted)
    frame = linalg.row_basis(frame)
    vecs = [GeneralizedVector(sub, r) for r in frame]
    if len(vecs) != w:
        raise NotGeneralizedComplexSubspace("L_W is not maximal")
    try:
        JW = gcs_from_frame(sub, vecs)
    except NotGeneralizedComplex:
        raise NotGeneralizedComplexSubspace("L_W ∩ conj(L_W) != 0") from None
    return JW, vecs


@dataclass
class SplitCertificate:
    fixed: list
    normal: list
    annihilator: list
    fixed_dual: list
    induced: GCS


def weight_split(J, generators):
    """Fixed subspace of finitely many commuting linear maps g of V (m x m, rational).

    Each g acts on V + V* as diag(g, g^{-T}); all must commute with J.
    """
    ch = J.chart
    m = ch.m
    gens = [linalg.as_matrix(g) for g in generators]
    for g in gens:
        lift = block_diag(g, linalg.transpose(linalg.inverse(g)))
        if not _mat_is_zero(linalg.sub(linalg.matmul(lift, J.J), linalg.matmul(J.J, lift))):
            raise NotInvariant("generator does not commute with J")
    eye = linalg.identity(m)
    rows = [r for g in gens for r in linalg.sub(g, eye)]
    fixed = linalg.nullspace(rows, ncols=m) if rows else linalg.identity(m)
    normal = linalg.row_basis([c for g in gens for c in linalg.column_space(linalg.sub(g, eye))])
    if linalg.span_rank(fixed + normal) != m or len(fixed) + len(normal) != m:
        raise NotInvariant("V is not the direct sum of the fixed and moving parts")
    ann = linalg.nullspace(normal, ncols=m) if normal else linalg.identity(m)
    dual_rows = [r for g in gens for r in linalg.sub(linalg.transpose(linalg.inverse(g)), eye)]
    fixed_dual = linalg.nullspace(dual_rows, ncols=m) if dual_rows else linalg.identity(m)
    # V1 + Ann(N) must be J-invariant
    span = [list(v) + [ZERO] * m for v in fixed] + [[ZERO] * m + list(a) for a in ann]
    images = [linalg.matvec(J.J, v) for v in span]
    if not linalg.contains(span, images):
        raise NotInvariant("V1 + Ann(N) is not J-invariant")
    induced, _ = restrict_dirac(J, fixed)
    return SplitCertificate(fixed, normal, ann, fixed_dual, induced)
