"""The exterior algebra of V* as a Clifford module over V + V*.

Basis monomials of Λ(V*) are bitmasks over the chart's coframe; a mask
``0b101`` is ``e^0 ∧ e^2`` with indices in ascending order.  All signs are
computed by counting transpositions against that order.

Clifford convention: ``(X + ξ)·α = ι_X α + ξ ∧ α``.  With the half-normalized
pairing ``<X+ξ, Y+η> = (η(X) + ξ(Y))/2`` this gives ``v·v·α = 2<v,v> α``.
"""

from __future__ import annotations

from functools import lru_cache

from . import linalg
from .errors import ChartMismatch, NotSkew, PolynomialEntries
from .scalars import ONE, ZERO, GaussianRational, Poly

HALF = GaussianRational("1/2")


class Chart:
    """Affine coordinates on V.

    A real chart has coordinates ``x0..x{m-1}``; a complex chart with
    ``N`` complex coordinates uses the frame ``z0..z{N-1}, zb0..zb{N-1}``
    (so ``m = 2N``) and conjugation swaps ``z_k`` and ``zb_k``.
    """

    def __init__(self, m, complex_coords=False):
        if m % 2:
            raise ValueError("chart dimension must be even")
        self.m = m
        self.complex = bool(complex_coords)
        if self.complex:
            n = m // 2
            self.coords = [f"z{k}" for k in range(n)] + [f"zb{k}" for k in range(n)]
            self.conj_perm = [(i + n) % m for i in range(m)]
        else:
            self.coords = [f"x{k}" for k in range(m)]
            self.conj_perm = list(range(m))
        self.index = {c: i for i, c in enumerate(self.coords)}

    @classmethod
    def real(cls, m):
        return cls(m, False)

    @classmethod
    def complex_(cls, n):
        return cls(2 * n, True)

    @property
    def n(self):
        return self.m // 2

    def __eq__(self, other):
        return isinstance(other, Chart) and (self.m, self.complex) == (other.m, other.complex)

    def __hash__(self):
        return hash((self.m, self.complex))

    def __repr__(self):
        return f"Chart(m={self.m}, complex={self.complex})"

    def form_token(self, i):
        return "d" + self.coords[i]

    def vector_token(self, i):
        return "d/d" + self.coords[i]

    def dim_spinors(self):
        return 1 << self.m

    def check(self, other):
        if self != other:
            raise ChartMismatch(f"{self!r} vs {other!r}")


def _popcount(x):
    return bin(x).count("1")


@lru_cache(maxsize=None)
def _below(i):
    return (1 << i) - 1


def wedge_sign(a, b):
    """Sign of e^A ∧ e^B relative to the ascending monomial e^{A∪B}."""
    if a & b:
        return 0
    s = 0
    bb = b
    while bb:
        low = bb & -bb
        j = low.bit_length() - 1
        s += _popcount(a >> (j + 1))
        bb ^= low
    return -1 if s & 1 else 1


def mask_indices(mask):
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _mul(c, x):
    # coefficient times coefficient, preferring Poly on the left
    if isinstance(x, Poly) and not isinstance(c, Poly):
        return x * c
    return c * x


class FormVector:
    """Sparse element of Λ(V*)_C: ``{mask: coefficient}`` with no zeros."""

    __slots__ = ("chart", "c")

    def __init__(self, chart, coeffs=None):
        self.chart = chart
        self.c = {} if coeffs is None else coeffs

    @classmethod
    def from_terms(cls, chart, items):
        out = {}
        for mask, coeff in items:
            if not coeff:
                continue
            s = out.get(mask)
            out[mask] = coeff if s is None else s + coeff
        return cls(chart, {k: v for k, v in out.items() if v})

    @classmethod
    def one(cls, chart, coeff=ONE):
        return cls(chart, {0: coeff} if coeff else {})

    @classmethod
    def basis(cls, chart, mask, coeff=ONE):
        return cls(chart, {mask: coeff})

    @classmethod
    def covector(cls, chart, comps):
        return cls.from_terms(chart, [(1 << i, x) for i, x in enumerate(comps)])

    def copy(self):
        return FormVector(self.chart, dict(self.c))

    def is_zero(self):
        return not self.c

    __bool__ = lambda self: bool(self.c)

    def __eq__(self, other):
        if not isinstance(other, FormVector):
            return NotImplemented
        return self.chart == other.chart and self.c == other.c

    def __add__(self, other):
        self.chart.check(other.chart)
        out = dict(self.c)
        for k, v in other.c.items():
            s = out.get(k)
            if s is None:
                out[k] = v
            else:
                s = s + v
                if s:
                    out[k] = s
                else:
                    del out[k]
        return FormVector(self.chart, out)

    def __neg__(self):
        return FormVector(self.chart, {k: -v for k, v in self.c.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s):
        if not s:
            return FormVector(self.chart)
        out = {}
        for k, v in self.c.items():
            x = _mul(v, s)
            if x:
                out[k] = x
        return FormVector(self.chart, out)

    def __mul__(self, s):
        return self.scale(s)

    __rmul__ = __mul__

    def degree_part(self, p):
        return FormVector(self.chart, {k: v for k, v in self.c.items() if _popcount(k) == p})

    def degrees(self):
        return sorted({_popcount(k) for k in self.c})

    def top_coefficient(self):
        return self.c.get((1 << self.chart.m) - 1, ZERO)

    def wedge(self, other):
        self.chart.check(other.chart)
        out = {}
        for a, x in self.c.items():
            for b, y in other.c.items():
                s = wedge_sign(a, b)
                if not s:
                    continue
                v = _mul(x, y)
                if s < 0:
                    v = -v
                k = a | b
                t = out.get(k)
                out[k] = v if t is None else t + v
        return FormVector(self.chart, {k: v for k, v in out.items() if v})

    def map_coeffs(self, f):
        out = {}
        for k, v in self.c.items():
            x = f(v)
            if x:
                out[k] = x
        return FormVector(self.chart, out)

    def conjugate(self):
        perm = self.chart.conj_perm
        out = {}
        for mask, v in self.c.items():
            idx = [perm[i] for i in mask_indices(mask)]
            sign = _perm_sign(idx)
            nm = 0
            for i in idx:
                nm |= 1 << i
            x = v.conjugate()
            out[nm] = -x if sign < 0 else x
        return FormVector(self.chart, out)

    def evaluate(self, point):
        return FormVector.from_terms(self.chart, [(k, _eval(v, point)) for k, v in self.c.items()])

    def is_constant(self):
        return all(not isinstance(v, Poly) or v.is_constant() for v in self.c.values())

    def __repr__(self):
        return f"FormVector({self})"

    def __str__(self):
        if not self.c:
            return "0"
        parts = []
        for mask in sorted(self.c, key=lambda k: (_popcount(k), mask_indices(k))):
            toks = "∧".join(self.chart.form_token(i) for i in mask_indices(mask)) or "1"
            parts.append(f"({self.c[mask]})*{toks}")
        return " + ".join(parts)


def _eval(v, point):
    return v.eval(point) if isinstance(v, Poly) else v


def _perm_sign(seq):
    s = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                s = -s
    return s


def wedge_basis(chart, i, mask):
    """(sign, new mask) for e^i ∧ e^mask; sign 0 if it vanishes."""
    if mask >> i & 1:
        return 0, mask
    return (-1 if _popcount(mask & _below(i)) & 1 else 1), mask | (1 << i)


def contract_basis(i, mask):
    """(sign, new mask) for ι_{e_i} e^mask."""
    if not mask >> i & 1:
        return 0, mask
    return (-1 if _popcount(mask & _below(i)) & 1 else 1), mask ^ (1 << i)


class GeneralizedVector:
    """X + ξ with ``comps[:m]`` the vector part and ``comps[m:]`` the covector."""

    __slots__ = ("chart", "comps")

    def __init__(self, chart, comps):
        if len(comps) != 2 * chart.m:
            raise ValueError("generalized vector needs 2m components")
        self.chart = chart
        self.comps = list(comps)

    @classmethod
    def zero(cls, chart):
        return cls(chart, [ZERO] * (2 * chart.m))

    @classmethod
    def vector(cls, chart, i, coeff=ONE):
        comps = [ZERO] * (2 * chart.m)
        comps[i] = coeff
        return cls(chart, comps)

    @classmethod
    def covector(cls, chart, i, coeff=ONE):
        comps = [ZERO] * (2 * chart.m)
        comps[chart.m + i] = coeff
        return cls(chart, comps)

    @property
    def X(self):
        return self.comps[: self.chart.m]

    @property
    def xi(self):
        return self.comps[self.chart.m:]

    def __add__(self, other):
        self.chart.check(other.chart)
        return GeneralizedVector(self.chart, [a + b for a, b in zip(self.comps, other.comps)])

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return GeneralizedVector(self.chart, [-a for a in self.comps])

    def scale(self, s):
        return GeneralizedVector(self.chart, [_mul(a, s) if a else a for a in self.comps])

    __mul__ = scale
    __rmul__ = scale

    def __eq__(self, other):
        if not isinstance(other, GeneralizedVector):
            return NotImplemented
        return self.chart == other.chart and all(
            (a - b).is_zero() if isinstance(a - b, Poly) else not (a - b)
            for a, b in zip(self.comps, other.comps)
        )

    def conjugate(self):
        m = self.chart.m
        perm = self.chart.conj_perm
        out = [ZERO] * (2 * m)
        for i in range(m):
            out[perm[i]] = self.comps[i].conjugate()
            out[m + perm[i]] = self.comps[m + i].conjugate()
        return GeneralizedVector(self.chart, out)

    def evaluate(self, point):
        return GeneralizedVector(self.chart, [_eval(a, point) for a in self.comps])

    def is_zero(self):
        return all(not a for a in self.comps)

    def __repr__(self):
        toks = []
        m = self.chart.m
        for i, a in enumerate(self.comps):
            if a:
                tok = self.chart.vector_token(i) if i < m else self.chart.form_token(i - m)
                toks.append(f"({a})*{tok}")
        return "GeneralizedVector(" + (" + ".join(toks) or "0") + ")"


def pairing(v, w):
    """<X+ξ, Y+η> = (η(X) + ξ(Y)) / 2."""
    v.chart.check(w.chart)
    m = v.chart.m
    s = ZERO
    for i in range(m):
        a, b = v.comps[i], w.comps[m + i]
        if a and b:
            s = s + _mul(a, b)
        a, b = w.comps[i], v.comps[m + i]
        if a and b:
            s = s + _mul(a, b)
    return _mul(s, HALF) if s else s


def clifford_act(v, alpha):
    """(X + ξ)·α = ι_X α + ξ ∧ α."""
    v.chart.check(alpha.chart)
    m = v.chart.m
    out = {}

    def acc(k, x):
        t = out.get(k)
        out[k] = x if t is None else t + x

    for mask, a in alpha.c.items():
        for i in range(m):
            x = v.comps[i]
            if x:
                s, nm = contract_basis(i, mask)
                if s:
                    val = _mul(a, x)
                    acc(nm, val if s > 0 else -val)
            y = v.comps[m + i]
            if y:
                s, nm = wedge_basis(v.chart, i, mask)
                if s:
                    val = _mul(a, y)
                    acc(nm, val if s > 0 else -val)
    return FormVector(alpha.chart, {k: x for k, x in out.items() if x})


# --- operators on V + V* -----------------------------------------------------

def blocks(A, m):
    """Split a 2m x 2m matrix into (P, Q, R, S): X' = PX + Qξ, ξ' = RX + Sξ."""
    P = [row[:m] for row in A[:m]]
    Q = [row[m:] for row in A[:m]]
    R = [row[:m] for row in A[m:]]
    S = [row[m:] for row in A[m:]]
    return P, Q, R, S


def _zero(x):
    return x.is_zero() if isinstance(x, Poly) else not x


def is_skew(A, m):
    P, Q, R, S = blocks(A, m)
    for i in range(m):
        for j in range(m):
            if not _zero(S[i][j] + P[j][i]) or not _zero(Q[i][j] + Q[j][i]) or not _zero(R[i][j] + R[j][i]):
                return False
    return True


def pairing_matrix(m):
    """Gram matrix of the pairing in the basis (e_1..e_m, e^1..e^m)."""
    out = linalg.zeros(2 * m)
    for i in range(m):
        out[i][m + i] = HALF
        out[m + i][i] = HALF
    return out


def matrix_apply(A, v):
    return GeneralizedVector(v.chart, [sum_terms(_mul(a, x) for a, x in zip(row, v.comps) if a and x) for row in A])


def sum_terms(it):
    s = ZERO
    for x in it:
        s = x + s if isinstance(x, Poly) and not isinstance(s, Poly) else s + x
    return s


class SpinOperator:
    """The spinor action ρ(A) of a pairing-skew A on Λ(V*).

    For A with blocks (P, Q, R, S), S = -Pᵀ:
        ρ(A) = Σ S_ij e^i∧ι_{e_j} + Σ_{i<j} R_ij e^i∧e^j∧ + Σ_{i<j} Q_ij ι_{e_i}ι_{e_j} + tr(P)/2.
    This satisfies [ρ(A), v·] = (Av)· and ρ([A,B]) = [ρ(A), ρ(B)];
    on a complex structure it gives dz ↦ i dz, dz̄ ↦ -i dz̄.
    """

    def __init__(self, chart, A, check=True):
        m = chart.m
        if check and not is_skew(A, m):
            raise NotSkew("operator is not skew-adjoint for the pairing")
        self.chart = chart
        self.A = A
        P, Q, R, S = blocks(A, m)
        self.S = [(i, j, S[i][j]) for i in range(m) for j in range(m) if not _zero(S[i][j])]
        self.R = [(i, j, R[i][j]) for i in range(m) for j in range(i + 1, m) if not _zero(R[i][j])]
        self.Q = [(i, j, Q[i][j]) for i in range(m) for j in range(i + 1, m) if not _zero(Q[i][j])]
        tr = sum_terms(P[i][i] for i in range(m))
        self.shift = _mul(tr, HALF) if not _zero(tr) else None
        self.constant = all(
            not isinstance(x, Poly) or x.is_constant() for row in A for x in row
        )
        self._cache = {}

    def basis_image(self, mask):
        """ρ(A) e^mask as a list of (mask, coefficient)."""
        hit = self._cache.get(mask)
        if hit is not None:
            return hit
        out = []
        for i, j, s in self.S:
            sg, nm = contract_basis(j, mask)
            if sg:
                sg2, nm2 = wedge_basis(self.chart, i, nm)
                if sg2:
                    out.append((nm2, s if sg * sg2 > 0 else -s))
        for i, j, r in self.R:
            sg, nm = wedge_basis(self.chart, j, mask)
            if sg:
                sg2, nm2 = wedge_basis(self.chart, i, nm)
                if sg2:
                    out.append((nm2, r if sg * sg2 > 0 else -r))
        for i, j, q in self.Q:
            sg, nm = contract_basis(j, mask)
            if sg:
                sg2, nm2 = contract_basis(i, nm)
                if sg2:
                    out.append((nm2, q if sg * sg2 > 0 else -q))
        if self.shift is not None:
            out.append((mask, self.shift))
        merged = {}
        for k, v in out:
            t = merged.get(k)
            merged[k] = v if t is None else t + v
        hit = [(k, v) for k, v in merged.items() if not _zero(v)]
        self._cache[mask] = hit
        return hit

    def __call__(self, alpha):
        self.chart.check(alpha.chart)
        out = {}
        for mask, a in alpha.c.items():
            for nm, v in self.basis_image(mask):
                x = _mul(a, v)
                t = out.get(nm)
                out[nm] = x if t is None else t + x
        return FormVector(alpha.chart, {k: v for k, v in out.items() if not _zero(v)})

    def matrix(self):
        """Dense 2^m x 2^m matrix (constant entries only)."""
        if not self.constant:
            raise PolynomialEntries("dense matrix needs constant entries")
        N = 1 << self.chart.m
        M = linalg.zeros(N)
        for mask in range(N):
            for nm, v in self.basis_image(mask):
                M[nm][mask] = v.constant_value() if isinstance(v, Poly) else v
        return M


def spin_rep(chart, A):
    return SpinOperator(chart, A)


def operator_matrix(op, chart):
    N = 1 << chart.m
    M = linalg.zeros(N)
    for mask in range(N):
        img = op(FormVector.basis(chart, mask))
        for k, v in img.c.items():
            M[k][mask] = v
    return M


def vector_to_form(chart, vec):
    return FormVector.from_terms(chart, [(k, x) for k, x in enumerate(vec) if x])


def form_to_vector(alpha):
    N = 1 << alpha.chart.m
    v = [ZERO] * N
    for k, x in alpha.c.items():
        v[k] = x
    return v


def eigenspace(op, chart, lam):
    """Exact basis of ker(op - λ) on Λ(V*), echelonized."""
    if isinstance(op, SpinOperator):
        if not op.constant:
            raise PolynomialEntries("use lagrange_projector for polynomial entries")
        M = op.matrix()
    else:
        M = operator_matrix(op, chart)
    lam = GaussianRational.coerce(lam)
    for i in range(len(M)):
        M[i][i] = M[i][i] - lam
    return [vector_to_form(chart, v) for v in linalg.nullspace(M)]


def grading_eigenvalue(k):
    """U^k is the -k·i eigenspace."""
    return GaussianRational(0, -k)


def lagrange_coefficients(n, k):
    """Coefficients c_t of P_k = Σ_t c_t ρ^t as a polynomial in ρ, spectrum -j·i, |j| <= n."""
    poly = [ONE]
    lk = grading_eigenvalue(k)
    for j in range(-n, n + 1):
        if j == k:
            continue
        lj = grading_eigenvalue(j)
        inv = (lk - lj).inverse()
        # multiply by (x - lj) * inv
        new = [ZERO] * (len(poly) + 1)
        for t, c in enumerate(poly):
            new[t + 1] = new[t + 1] + c * inv
            new[t] = new[t] - c * lj * inv
        poly = new
    return poly


class Grading:
    """The U^k decomposition induced by a generalized complex structure.

    Projections use the Lagrange interpolation polynomials of ρ(J) on the
    spectrum {-n i, ..., n i}; all divisions are by constants, so this works
    for polynomial entries as well.  For constant J the projection of each
    basis monomial is cached.
    """

    def __init__(self, chart, J, n=None):
        self.chart = chart
        self.rho = SpinOperator(chart, J)
        self.n = chart.n if n is None else n
        self.coeffs = {k: lagrange_coefficients(self.n, k) for k in range(-self.n, self.n + 1)}
        self._basis = {}

    def degrees(self):
        return range(-self.n, self.n + 1)

    def _krylov(self, alpha):
        powers = [alpha]
        for _ in range(2 * self.n):
            powers.append(self.rho(powers[-1]))
        return powers

    def _combine(self, powers, k):
        out = FormVector(self.chart)
        for c, v in zip(self.coeffs[k], powers):
            if c:
                out = out + v.scale(c)
        return out

    def _basis_decomposition(self, mask):
        hit = self._basis.get(mask)
        if hit is None:
            powers = self._krylov(FormVector.basis(self.chart, mask))
            hit = {}
            for k in self.degrees():
                comp = self._combine(powers, k)
                if comp:
                    hit[k] = comp
            self._basis[mask] = hit
        return hit

    def decompose(self, alpha):
        """{k: component in U^k}, zero components omitted."""
        if not self.rho.constant:
            powers = self._krylov(alpha)
            out = {}
            for k in self.degrees():
                comp = self._combine(powers, k)
                if comp:
                    out[k] = comp
            return out
        acc = {}
        for mask, a in alpha.c.items():
            for k, comp in self._basis_decomposition(mask).items():
                bucket = acc.setdefault(k, {})
                for nm, v in comp.c.items():
                    x = _mul(a, v)
                    t = bucket.get(nm)
                    bucket[nm] = x if t is None else t + x
        out = {}
        for k, bucket in acc.items():
            f = FormVector(self.chart, {m: v for m, v in bucket.items() if not _zero(v)})
            if f:
                out[k] = f
        return out

    def project(self, alpha, k):
        return self.decompose(alpha).get(k, FormVector(self.chart))

    def projector(self, k):
        return lambda alpha: self.project(alpha, k)


def lagrange_projector(chart, J, k):
    return Grading(chart, J).projector(k)


def reverse_sign(mask):
    p = _popcount(mask)
    return -1 if (p * (p - 1) // 2) & 1 else 1


def mukai_pairing(alpha, beta):
    """Top-degree coefficient of σ(α) ∧ β, σ reversing each monomial."""
    alpha.chart.check(beta.chart)
    top = (1 << alpha.chart.m) - 1
    s = ZERO
    for a, x in alpha.c.items():
        b = top ^ a
        y = beta.c.get(b)
        if y is None:
            continue
        sg = reverse_sign(a) * wedge_sign(a, b)
        v = _mul(x, y)
        s = s + (v if sg > 0 else -v)
    return s
