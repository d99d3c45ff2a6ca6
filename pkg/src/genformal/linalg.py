"""Exact dense linear algebra over Q(i).

Matrices are lists of rows; vectors are lists.  Entries are
:class:`GaussianRational` (or anything supporting the field operations).
``matmul``/``add``/``transpose`` also work with :class:`Poly` entries.
Elimination is plain Gauss-Jordan over the field: every pivot division is
exact, so no fraction growth control beyond automatic reduction is needed.
"""

from __future__ import annotations

from .scalars import ONE, ZERO, GaussianRational, Poly

Q = GaussianRational.coerce


def as_matrix(rows):
    return [[x if isinstance(x, (GaussianRational, Poly)) else Q(x) for x in row] for row in rows]


def _scalar(x):
    if isinstance(x, Poly):
        if not x.is_constant():
            raise TypeError("elimination needs constant entries")
        return x.constant_value()
    return x if isinstance(x, GaussianRational) else Q(x)


def zeros(n, m=None):
    m = n if m is None else m
    return [[ZERO] * m for _ in range(n)]


def identity(n, one=ONE, zero=ZERO):
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def shape(a):
    return len(a), (len(a[0]) if a else 0)


def transpose(a):
    return [list(col) for col in zip(*a)]


def matmul(a, b):
    bt = transpose(b)
    out = []
    for row in a:
        nz = [(k, x) for k, x in enumerate(row) if x]
        new = []
        for col in bt:
            s = ZERO
            for k, x in nz:
                y = col[k]
                if y:
                    s = s + x * y
            new.append(s)
        out.append(new)
    return out


def matvec(a, v):
    out = []
    for row in a:
        s = ZERO
        for x, y in zip(row, v):
            if x and y:
                s = s + x * y
        out.append(s)
    return out


def add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def scale(a, c):
    return [[x * c for x in row] for row in a]


def neg(a):
    return [[-x for x in row] for row in a]


def is_zero_matrix(a):
    return all(not x for row in a for x in row)


def equal(a, b):
    return all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb)) and shape(a) == shape(b)


def conj(a):
    return [[x.conjugate() for x in row] for row in a]


def block(rows_of_blocks):
    out = []
    for brow in rows_of_blocks:
        for i in range(len(brow[0])):
            out.append([x for blk in brow for x in blk[i]])
    return out


def rref(a):
    """Reduced row echelon form. Returns (matrix, pivot column list)."""
    m = [[_scalar(x) for x in row] for row in a]
    nrows, ncols = shape(m)
    pivots = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        p = next((i for i in range(r, nrows) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = m[r][c].inverse()
        m[r] = [x * inv if x else x for x in m[r]]
        prow = m[r]
        nzc = [j for j in range(c, ncols) if prow[j]]
        for i in range(nrows):
            if i != r:
                f = m[i][c]
                if f:
                    row = m[i]
                    for j in nzc:
                        row[j] = row[j] - f * prow[j]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a):
    if not a or not a[0]:
        return 0
    return len(rref(a)[1])


def row_basis(vectors):
    """Echelonized basis (list of vectors) for the span of ``vectors``."""
    if not vectors:
        return []
    m, piv = rref(vectors)
    return m[: len(piv)]


def nullspace(a, ncols=None):
    """Basis of {x : a x = 0}, echelonized."""
    if not a:
        n = ncols or 0
        return [[ONE if i == j else ZERO for i in range(n)] for j in range(n)]
    m, piv = rref(a)
    n = len(a[0])
    free = [j for j in range(n) if j not in piv]
    basis = []
    for f in free:
        v = [ZERO] * n
        v[f] = ONE
        for r, pc in enumerate(piv):
            v[pc] = -m[r][f]
        basis.append(v)
    return row_basis(basis)


def column_space(a):
    return row_basis(transpose(a)) if a else []


def inverse(a):
    n = len(a)
    aug = [list(row) + [ONE if i == j else ZERO for j in range(n)] for i, row in enumerate(a)]
    m, piv = rref(aug)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in m]


def det(a):
    m = [list(row) for row in a]
    n = len(m)
    d = ONE
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c]), None)
        if p is None:
            return ZERO
        if p != c:
            m[c], m[p] = m[p], m[c]
            d = -d
        d = d * m[c][c]
        inv = m[c][c].inverse()
        for i in range(c + 1, n):
            f = m[i][c] * inv
            if f:
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return d


def solve(a, b):
    """One solution x of a x = b (b a vector), or None."""
    n = len(a[0])
    aug = [list(row) + [bi] for row, bi in zip(a, b)]
    m, piv = rref(aug)
    if n in piv:
        return None
    x = [ZERO] * n
    for r, pc in enumerate(piv):
        x[pc] = m[r][n]
    return x


def span_rank(vectors):
    return rank(vectors) if vectors else 0


def same_span(u, v):
    """Subspace equality by the double rank test rank[U;V] = rank U = rank V."""
    ru, rv = span_rank(u), span_rank(v)
    return ru == rv == span_rank(list(u) + list(v))


def contains(u, vectors):
    """True iff every vector lies in span(u)."""
    return span_rank(list(u)) == span_rank(list(u) + list(vectors))


def intersection(u, v):
    """Basis of span(u) ∩ span(v)."""
    if not u or not v:
        return []
    # solve sum a_i u_i = sum b_j v_j
    cols = [list(x) for x in u] + [[-y for y in x] for x in v]
    ker = nullspace(transpose(cols))
    out = []
    for coeffs in ker:
        vec = [ZERO] * len(u[0])
        for c, x in zip(coeffs[: len(u)], u):
            if c:
                vec = [a + c * b for a, b in zip(vec, x)]
        out.append(vec)
    return row_basis(out)


def sylvester_minors(g):
    """Leading principal minors of a square matrix."""
    return [det([row[:k] for row in g[:k]]) for k in range(1, len(g) + 1)]
