"""Finite bounded double complexes over Q(i).

``K^{i,j}`` has an explicit dimension.  Differentials are stored per block
as matrices acting on column vectors:

* ``d``      K^{i,j} -> K^{i,j+1}  (vertical)
* ``dprime`` K^{i,j} -> K^{i+1,j}  (horizontal)
* ``delta``  K^{i,j} -> K^{i,j-1}  (optional extra vertical differential)

Everything is assembled into dense matrices on the direct sum, whose
basis vectors carry their bidegree.  The spectral sequence is that of
the filtration F^p = ⊕_{i≥p} K^{i,*} (so E_1 is d-cohomology).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

from . import linalg
from .errors import InputError, InvariantViolation, NotChainMap
from .scalars import ONE, ZERO, GaussianRational

Q = GaussianRational.coerce

DEGREES = {"d": (0, 1), "dprime": (1, 0), "delta": (0, -1)}


class FiniteDoubleComplex:
    def __init__(self, dims, d=None, dprime=None, delta=None, check=True):
        self.dims = {tuple(k): int(v) for k, v in dims.items() if int(v) > 0}
        self.blocks = {"d": {}, "dprime": {}, "delta": {}}
        self.has_delta = delta is not None
        for name, maps in (("d", d), ("dprime", dprime), ("delta", delta)):
            for key, mat in (maps or {}).items():
                key = tuple(key)
                di, dj = DEGREES[name]
                tgt = (key[0] + di, key[1] + dj)
                rows, cols = self.dims.get(tgt, 0), self.dims.get(key, 0)
                mat = linalg.as_matrix(mat) if mat else []
                if rows == 0 or cols == 0:
                    if any(x for row in mat for x in row):
                        raise InputError(f"{name} at {key} maps into or out of a zero space")
                    continue
                if linalg.shape(mat) != (rows, cols):
                    raise InputError(f"{name} at {key} must be {rows}x{cols}")
                self.blocks[name][key] = mat
        self._index()
        self.D_v = self._assemble("d")
        self.D_h = self._assemble("dprime")
        self.D_delta = self._assemble("delta")
        self.D = linalg.add(self.D_v, self.D_h)
        if check:
            self.verify()

    # -- layout -------------------------------------------------------------
    def _index(self):
        self.keys = sorted(self.dims)
        self.offset = {}
        self.label = []
        pos = 0
        for k in self.keys:
            self.offset[k] = pos
            self.label.extend([k] * self.dims[k])
            pos += self.dims[k]
        self.N = pos

    def _assemble(self, name):
        M = linalg.zeros(self.N)
        for key, mat in self.blocks[name].items():
            di, dj = DEGREES[name]
            tgt = (key[0] + di, key[1] + dj)
            r0, c0 = self.offset[tgt], self.offset[key]
            for a, row in enumerate(mat):
                for b, x in enumerate(row):
                    if x:
                        M[r0 + a][c0 + b] = x
        return M

    def total_degrees(self):
        return sorted({i + j for i, j in self.keys})

    def indices(self, pred):
        return [t for t, (i, j) in enumerate(self.label) if pred(i, j)]

    # -- invariants ---------------------------------------------------------------
    def verify(self):
        mm, add = linalg.matmul, linalg.add
        checks = [
            ("d^2", mm(self.D_v, self.D_v)),
            ("d'^2", mm(self.D_h, self.D_h)),
            ("dd'+d'd", add(mm(self.D_v, self.D_h), mm(self.D_h, self.D_v))),
        ]
        if self.has_delta:
            checks += [
                ("delta^2", mm(self.D_delta, self.D_delta)),
                ("d delta + delta d", add(mm(self.D_v, self.D_delta), mm(self.D_delta, self.D_v))),
                ("d' delta + delta d'", add(mm(self.D_h, self.D_delta), mm(self.D_delta, self.D_h))),
            ]
        for name, M in checks:
            if not linalg.is_zero_matrix(M):
                raise InvariantViolation(f"{name} != 0")

    # -- serialization ------------------------------------------------------------
    def to_json(self):
        def mats(name):
            return {f"{k[0]},{k[1]}": [[str(x) for x in row] for row in m] for k, m in self.blocks[name].items()}

        out = {"dims": {f"{i},{j}": n for (i, j), n in self.dims.items()}, "d": mats("d"), "dprime": mats("dprime")}
        if self.has_delta:
            out["delta"] = mats("delta")
        return out

    @classmethod
    def from_json(cls, data):
        from .scalars import parse_scalar

        def key(s):
            i, j = s.split(",")
            return int(i), int(j)

        def mats(name):
            if name not in data:
                return None
            return {key(k): [[parse_scalar(str(x)) for x in row] for row in m] for k, m in data[name].items()}

        return cls({key(k): v for k, v in data["dims"].items()}, mats("d"), mats("dprime"), mats("delta"))

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True)


# --- subspace helpers (vectors are dense lists of length N) --------------------------

def _embed(N, idx, vec):
    out = [ZERO] * N
    for c, x in zip(idx, vec):
        out[c] = x
    return out


def _image(M, vectors):
    return [linalg.matvec(M, v) for v in vectors]


def _kernel_within(M, basis, N):
    """Basis of {x ∈ span(basis) : M x = 0}."""
    if not basis:
        return []
    imgs = _image(M, basis)
    coeffs = linalg.nullspace(linalg.transpose(imgs), ncols=len(basis))
    return [_combine(basis, c, N) for c in coeffs]


def _combine(basis, coeffs, N):
    out = [ZERO] * N
    for c, v in zip(coeffs, basis):
        if c:
            out = [a + c * b for a, b in zip(out, v)]
    return out


def _unit_vectors(K, pred):
    return [_embed(K.N, [t], [ONE]) for t in K.indices(pred)]


def _dim(vectors):
    return linalg.span_rank([v for v in vectors if any(v)])


def _restrict_rows(vectors, keep):
    return [[x if t in keep else ZERO for t, x in enumerate(v)] for v in vectors]


# --- total cohomology -----------------------------------------------------------------

def total_cohomology(K, D=None):
    """{n: dim H^n(K, D)} for D = d + d' (or a supplied total operator)."""
    D = K.D if D is None else D
    out = {}
    for n in K.total_degrees():
        here = _unit_vectors(K, lambda i, j: i + j == n)
        below = _unit_vectors(K, lambda i, j: i + j == n - 1)
        z = len(_kernel_within(D, here, K.N))
        b = _dim(_image(D, below))
        out[n] = z - b
    return out


def euler_characteristic(K):
    return sum((-1) ** ((i + j) % 2) * n for (i, j), n in K.dims.items())


# --- spectral sequence ---------------------------------------------------------------

def _filtration(K, p, n):
    return _unit_vectors(K, lambda i, j: i >= p and i + j == n)


def _Z(K, r, p, n):
    """{x ∈ F^p K^n : Dx ∈ F^{p+r}}."""
    if r <= 0:
        return _filtration(K, p, n)
    basis = _filtration(K, p, n)
    keep_out = set(K.indices(lambda i, j: i < p + r and i + j == n + 1))
    if not keep_out:
        return basis
    M = [row if t in keep_out else [ZERO] * K.N for t, row in enumerate(K.D)]
    return _kernel_within(M, basis, K.N)


def page_dimension(K, r, p, q):
    """dim E_r^{p,q} = dim Z_r^p / (Z_{r-1}^{p+1} + D Z_{r-1}^{p-r+1}) in degree p+q."""
    n = p + q
    Z = _Z(K, r, p, n)
    if not Z:
        return 0
    denom = _Z(K, r - 1, p + 1, n) + _image(K.D, _Z(K, r - 1, p - r + 1, n - 1))
    return _dim(Z) - _dim(denom)


def _max_r(K):
    if not K.keys:
        return 1
    i_vals = [i for i, _ in K.keys]
    return max(i_vals) - min(i_vals) + 2


def spectral_pages(K, max_r=None):
    """{r: {(p, q): dim E_r^{p,q}}} for 0 ≤ r ≤ max_r (nonzero entries only)."""
    max_r = _max_r(K) if max_r is None else max_r
    positions = _positions(K)
    pages = {}
    for r in range(max_r + 1):
        page = {}
        for p, q in positions:
            v = page_dimension(K, r, p, q)
            if v:
                page[(p, q)] = v
        pages[r] = page
    return pages


def _positions(K):
    if not K.keys:
        return []
    i_vals = [i for i, _ in K.keys]
    n_vals = K.total_degrees()
    return [(p, n - p) for n in n_vals for p in range(min(i_vals), max(i_vals) + 1)]


def e_infinity(K):
    return spectral_pages(K, _max_r(K))[_max_r(K)]


def degeneration_page(K):
    """Smallest r with E_r = E_∞."""
    pages = spectral_pages(K)
    last = pages[max(pages)]
    for r in sorted(pages):
        if r >= 1 and pages[r] == last:
            return r
    return max(pages)


# --- the Dδ-lemma ----------------------------------------------------------------------

@dataclass
class DdeltaReport:
    hypothesis_a: bool
    hypothesis_b: bool
    conclusion: bool
    lhs_dim: int  # dim(im D ∩ ker δ)
    rhs_dim: int  # dim(im Dδ)

    @property
    def lemma_violation(self):
        return self.hypothesis_a and self.hypothesis_b and not self.conclusion

    @property
    def failed_hypotheses(self):
        out = []
        if not self.hypothesis_a:
            out.append("a")
        if not self.hypothesis_b:
            out.append("b")
        return out


def _im(M):
    return linalg.column_space(M)


def _ker(M, N):
    return linalg.nullspace(M, ncols=N) if M else []


def _same(u, v):
    return linalg.same_span([x for x in u if any(x)], [x for x in v if any(x)])


def check_Ddelta(K):
    """Check hypotheses (a), (b) and the conclusion im D ∩ ker δ = im Dδ."""
    if not K.has_delta:
        raise InvariantViolation("the complex has no delta")
    N = K.N
    d, delta, D = K.D_v, K.D_delta, K.D
    im_d, ker_d = _im(d), _ker(d, N)
    im_delta, ker_delta = _im(delta), _ker(delta, N)
    im_ddelta = _im(linalg.matmul(d, delta))
    a1 = linalg.intersection(im_d, ker_delta)
    a2 = linalg.intersection(ker_d, im_delta)
    hyp_a = _same(a1, im_ddelta) and _same(a2, im_ddelta)
    hyp_b = degeneration_page(K) <= 1
    lhs = linalg.intersection(_im(D), ker_delta)
    rhs = _im(linalg.matmul(D, delta))
    return DdeltaReport(hyp_a, hyp_b, _same(lhs, rhs), _dim(lhs), _dim(rhs))


# --- quasi-isomorphisms ------------------------------------------------------------------

@dataclass
class QuasiIsoReport:
    inclusion_iso: bool
    projection_iso: bool
    h_total: dict = field(default_factory=dict)
    h_kernel: dict = field(default_factory=dict)
    h_quotient: dict = field(default_factory=dict)
    inclusion_rank: dict = field(default_factory=dict)
    projection_rank: dict = field(default_factory=dict)

    @property
    def both_iso(self):
        return self.inclusion_iso and self.projection_iso


def quasi_iso_check(K):
    """Compare (K, ∂̄) ← (ker ∂, ∂̄) → (H(K, ∂), ∂̄) degree by degree.

    ∂̄ is the vertical ``d`` and ∂ is ``delta``; the grading is j.
    Both maps are chain maps because d and delta anticommute; this is
    re-checked on the subspaces and NotChainMap is raised otherwise.
    """
    if not K.has_delta:
        raise InvariantViolation("the complex has no delta")
    N = K.N
    d, delta = K.D_v, K.D_delta
    ker_delta = _ker(delta, N)
    im_delta = _im(delta)
    if not linalg.contains(ker_delta, _image(d, ker_delta)):
        raise NotChainMap("d does not preserve ker delta")
    js = sorted({j for _, j in K.keys})
    rep = QuasiIsoReport(True, True)
    for j in js:
        at = set(K.indices(lambda a, b: b == j))
        below = set(K.indices(lambda a, b: b == j - 1))

        def part(vectors, keep):
            return [v for v in _restrict_rows(vectors, keep) if any(v)]

        kd_j = part(ker_delta, at)
        kd_below = part(ker_delta, below)
        V_j = _unit_vectors(K, lambda a, b: b == j)
        V_below = _unit_vectors(K, lambda a, b: b == j - 1)
        # H(K, d)
        Z_V = _kernel_within(d, V_j, N)
        B_V = _image(d, V_below)
        h_V = len(Z_V) - _dim(B_V)
        # H(ker δ, d)
        Z_K = _kernel_within(d, kd_j, N)
        B_K = _image(d, kd_below)
        h_K = len(Z_K) - _dim(B_K)
        # H(ker δ / im δ, d)
        imd_j = part(im_delta, at)
        imd_next = part(im_delta, set(K.indices(lambda a, b: b == j + 1)))
        Z_Q = _preimage_within(d, kd_j, imd_next, N)
        B_Q = B_K + imd_j
        h_Q = _dim(Z_Q) - _dim(B_Q)
        inc = _dim(B_V + Z_K) - _dim(B_V)
        proj = _dim(B_Q + Z_K) - _dim(B_Q)
        rep.h_total[j], rep.h_kernel[j], rep.h_quotient[j] = h_V, h_K, h_Q
        rep.inclusion_rank[j], rep.projection_rank[j] = inc, proj
        if not (inc == h_K == h_V):
            rep.inclusion_iso = False
        if not (proj == h_K == h_Q):
            rep.projection_iso = False
    return rep


def _preimage_within(M, basis, target, N):
    """{x ∈ span(basis) : M x ∈ span(target)}."""
    if not basis:
        return []
    imgs = _image(M, basis)
    cols = imgs + [[-y for y in t] for t in target]
    ker = linalg.nullspace(linalg.transpose(cols), ncols=len(cols)) if cols else []
    out = [_combine(basis, c[: len(basis)], N) for c in ker]
    return [v for v in out if any(v)]


# --- generators ----------------------------------------------------------------------

class _Builder:
    """Assemble a complex from basis vectors and unit arrows."""

    def __init__(self):
        self.vecs = []  # position per vector
        self.arrows = {"d": [], "dprime": [], "delta": []}  # (src, tgt, coeff)

    def vec(self, pos):
        self.vecs.append(tuple(pos))
        return len(self.vecs) - 1

    def arrow(self, name, src, tgt, coeff=1):
        di, dj = DEGREES[name]
        i, j = self.vecs[src]
        if self.vecs[tgt] != (i + di, j + dj):
            raise ValueError("arrow has the wrong bidegree")
        self.arrows[name].append((src, tgt, Q(coeff)))

    def build(self, rng=None, with_delta=False, basis_change=True):
        dims = {}
        slot = []
        for p in self.vecs:
            slot.append(dims.get(p, 0))
            dims[p] = dims.get(p, 0) + 1
        maps = {name: {} for name in DEGREES}
        for name, arrows in self.arrows.items():
            for src, tgt, c in arrows:
                sp, tp = self.vecs[src], self.vecs[tgt]
                mat = maps[name].setdefault(sp, linalg.zeros(dims[tp], dims[sp]))
                mat[slot[tgt]][slot[src]] = mat[slot[tgt]][slot[src]] + c
        if rng is not None and basis_change:
            maps = _change_basis(dims, maps, rng)
        return FiniteDoubleComplex(
            dims, maps["d"], maps["dprime"], maps["delta"] if with_delta else None
        )


def _random_invertible(n, rng):
    while True:
        M = [[Q(rng.randint(-2, 2)) for _ in range(n)] for _ in range(n)]
        if linalg.det(M):
            return M


def _change_basis(dims, maps, rng):
    P = {k: _random_invertible(n, rng) for k, n in dims.items()}
    Pinv = {k: linalg.inverse(m) for k, m in P.items()}
    out = {}
    for name, blocks in maps.items():
        di, dj = DEGREES[name]
        out[name] = {
            k: linalg.matmul(P[(k[0] + di, k[1] + dj)], linalg.matmul(m, Pinv[k])) for k, m in blocks.items()
        }
    return out


def _rand_pos(rng, size):
    return rng.randrange(size), rng.randrange(size)


def random_double_complex(rng, size=3, pieces=4, basis_change=True):
    """Direct sum of random dots, squares and staircase zigzags."""
    b = _Builder()
    for _ in range(pieces):
        kind = rng.choice(["dot", "square", "zigzag"])
        i, j = _rand_pos(rng, size)
        if kind == "dot":
            b.vec((i, j))
        elif kind == "square":
            x = b.vec((i, j))
            dx, hx = b.vec((i, j + 1)), b.vec((i + 1, j))
            y = b.vec((i + 1, j + 1))
            b.arrow("d", x, dx)
            b.arrow("dprime", x, hx)
            b.arrow("d", hx, y)
            b.arrow("dprime", dx, y, -1)
        else:
            _zigzag(b, (i, j), rng.randint(1, 4), rng.random() < 0.5)
    return b.build(rng, basis_change=basis_change)


def _zigzag(b, start, length, start_with_target):
    """Staircase s0 -> t0 <- s1 -> t1 ... with s_k ->d' t_k and s_{k+1} ->d t_k."""
    i, j = start
    prev_target = None
    if start_with_target:
        prev_target = b.vec((i, j + 1))
    for _ in range(length):
        s = b.vec((i, j))
        if prev_target is not None:
            b.arrow("d", s, prev_target)
        t = b.vec((i + 1, j))
        b.arrow("dprime", s, t)
        prev_target = t
        i, j = i + 1, j - 1


def hodge_pair_model(rng, columns=3, height=3, n_squares=2, n_singletons=2, psi_density=0.7, basis_change=True):
    """Columns that are sums of singletons and (d, δ) squares; d' = (-1)^j ψ.

    ψ maps squares of column i isomorphically onto squares of column i+1
    (never two consecutive ψ, so d'^2 = 0) and kills singletons.  Hypothesis
    (a) of the Dδ-lemma holds and the spectral sequence degenerates at E_1.
    """
    b = _Builder()
    squares = {i: [] for i in range(columns)}
    for i in range(columns):
        for _ in range(n_singletons):
            b.vec((i, rng.randrange(height)))
        for _ in range(n_squares):
            j = rng.randrange(1, height)
            v = b.vec((i, j))
            dv = b.vec((i, j + 1))
            sv = b.vec((i, j - 1))
            dsv = b.vec((i, j))
            b.arrow("d", v, dv)
            b.arrow("d", sv, dsv)
            b.arrow("delta", v, sv)
            b.arrow("delta", dv, dsv, -1)
            squares[i].append((j, (v, dv, sv, dsv)))
    used_as_target = set()
    for i in range(columns - 1):
        for j, src in squares[i]:
            if (i, j, src) in used_as_target or rng.random() > psi_density:
                continue
            for j2, tgt in squares[i + 1]:
                if j2 == j and (i + 1, j2, tgt) not in used_as_target:
                    used_as_target.add((i + 1, j2, tgt))
                    # mark the target so it does not map onwards
                    sgn = lambda jj: -1 if jj % 2 else 1
                    v, dv, sv, dsv = src
                    w, dw, sw, dsw = tgt
                    b.arrow("dprime", v, w, sgn(j))
                    b.arrow("dprime", dv, dw, sgn(j + 1))
                    b.arrow("dprime", sv, sw, sgn(j - 1))
                    b.arrow("dprime", dsv, dsw, sgn(j))
                    break
    return b.build(rng, with_delta=True, basis_change=basis_change)


def e1_nondegenerate_model():
    """x ∈ K^{0,0} with d'x = y ∈ K^{1,0}: d_1 ≠ 0, so E_1 ≠ E_2."""
    b = _Builder()
    x, y = b.vec((0, 0)), b.vec((1, 0))
    b.arrow("dprime", x, y)
    return b.build()


def d2_model():
    """A zigzag with nonzero d_2: E_1 = E_2 ≠ E_3.

    x ∈ K^{0,1}, u ∈ K^{1,0}, w = d'x = du ∈ K^{1,1}, t = d'u ∈ K^{2,0}.
    """
    b = _Builder()
    x, u = b.vec((0, 1)), b.vec((1, 0))
    w, t = b.vec((1, 1)), b.vec((2, 0))
    b.arrow("dprime", x, w)
    b.arrow("d", u, w)
    b.arrow("dprime", u, t)
    return b.build()


def hypothesis_a_violation_model():
    """v ∈ K^{0,0} with dv = w and δ = 0: w ∈ im d ∩ ker δ but im dδ = 0."""
    b = _Builder()
    v, w = b.vec((0, 0)), b.vec((0, 1))
    b.arrow("d", v, w)
    return b.build(with_delta=True)


def quasi_iso_counterexample():
    """Four vectors: x with ∂̄x = a, ∂x = b, plus a singleton s (all at i = 0)."""
    b = _Builder()
    x, a, bb = b.vec((0, 0)), b.vec((0, 1)), b.vec((0, -1))
    b.vec((0, 0))
    b.arrow("d", x, a)
    b.arrow("delta", x, bb)
    return b.build(with_delta=True)


def seeded_rng(seed):
    return random.Random(seed)
