"""Exact coefficient arithmetic over the Gaussian rationals Q(i).

Two value types live here: :class:`GaussianRational` (a pair of reduced
rationals) and :class:`Poly`, a sparse polynomial in chart coordinates.
Coordinates are named ``z<k>`` (holomorphic), ``zb<k>`` (antiholomorphic,
the formal conjugate of ``z<k>``) and ``x<k>`` (real).  ``z<k>`` and
``zb<k>`` are independent indeterminates; they are tied together only by
:meth:`Poly.conjugate` and by the consistency rule of :meth:`Poly.eval`.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache

from gmpy2 import mpq

from .errors import (
    IncompleteAssignment,
    InconsistentConjugates,
    ParseError,
    UnknownVariable,
)

_VAR_RE = re.compile(r"^(zb|z|x)(\d+)$")
_KIND_RANK = {"x": 0, "z": 1, "zb": 2}


def _to_mpq(value):
    if isinstance(value, str):
        return mpq(Fraction(value))
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, float):
        raise TypeError("floating point scalars are not allowed")
    return mpq(value)


class GaussianRational:
    """An element re + im*i of Q(i), immutable."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _to_mpq(re))
        object.__setattr__(self, "im", _to_mpq(im))

    @classmethod
    def _make(cls, re, im):
        obj = object.__new__(cls)
        object.__setattr__(obj, "re", re)
        object.__setattr__(obj, "im", im)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def coerce(cls, value):
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, complex):
            raise TypeError("floating point scalars are not allowed")
        return cls(value, 0)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def is_zero(self):
        return not self.re and not self.im

    def is_real(self):
        return not self.im

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)) or type(other).__name__ == "mpq":
            return self.re == other and not self.im
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(Fraction(int(self.re.numerator), int(self.re.denominator)))
        return hash((self.re, self.im))

    def __neg__(self):
        return GaussianRational._make(-self.re, -self.im)

    def __add__(self, other):
        if not isinstance(other, GaussianRational):
            if isinstance(other, Poly):
                return NotImplemented
            other = GaussianRational.coerce(other)
        return GaussianRational._make(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, GaussianRational):
            if isinstance(other, Poly):
                return NotImplemented
            other = GaussianRational.coerce(other)
        return GaussianRational._make(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, GaussianRational):
            if isinstance(other, Poly):
                return NotImplemented
            other = GaussianRational.coerce(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return GaussianRational._make(a * c, b)
        return GaussianRational._make(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def inverse(self):
        n = self.re * self.re + self.im * self.im
        if not n:
            raise ZeroDivisionError("inverse of zero")
        return GaussianRational._make(self.re / n, -self.im / n)

    def __truediv__(self, other):
        other = GaussianRational.coerce(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) * self.inverse()

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self):
        return GaussianRational._make(self.re, -self.im)

    def norm2(self):
        """|z|^2 as a rational."""
        return self.re * self.re + self.im * self.im

    def __repr__(self):
        return f"GaussianRational({self})"

    def __str__(self):
        return format_scalar(self)


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)


def _fmt_q(q):
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_scalar(c):
    if not c.im:
        return _fmt_q(c.re)
    if not c.re:
        if c.im == 1:
            return "i"
        if c.im == -1:
            return "-i"
        return f"{_fmt_q(c.im)}*i"
    im = f"{_fmt_q(c.im)}*i" if c.im not in (1, -1) else ("i" if c.im == 1 else "-i")
    sep = "" if im.startswith("-") else "+"
    return f"({_fmt_q(c.re)}{sep}{im})"


def parse_var(name):
    m = _VAR_RE.match(name)
    if not m:
        raise UnknownVariable(f"not a coordinate symbol: {name!r}")
    return m.group(1), int(m.group(2))


@lru_cache(maxsize=None)
def var_key(name):
    kind, idx = parse_var(name)
    return (idx, _KIND_RANK[kind])


@lru_cache(maxsize=None)
def conj_var(name):
    kind, idx = parse_var(name)
    if kind == "z":
        return f"zb{idx}"
    if kind == "zb":
        return f"z{idx}"
    return name


def _canon(pairs):
    return tuple(sorted(pairs, key=lambda p: var_key(p[0])))


@lru_cache(maxsize=1 << 18)
def mono_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return _canon(d.items())


@lru_cache(maxsize=1 << 16)
def mono_conj(a):
    return _canon((conj_var(v), e) for v, e in a)


def mono_degree(a):
    return sum(e for _, e in a)


class Poly:
    """Sparse polynomial with Gaussian-rational coefficients.

    ``terms`` maps a monomial (a canonically sorted tuple of
    ``(variable, exponent)`` pairs) to a nonzero :class:`GaussianRational`.
    Treat instances as immutable.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {} if terms is None else terms

    @classmethod
    def const(cls, c):
        c = GaussianRational.coerce(c)
        return cls({(): c}) if c else cls()

    @classmethod
    def var(cls, name):
        parse_var(name)
        return cls({((name, 1),): ONE})

    @classmethod
    def coerce(cls, value):
        if isinstance(value, Poly):
            return value
        return cls.const(value)

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self):
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def constant_value(self):
        return self.terms.get((), ZERO)

    def variables(self):
        out = set()
        for m in self.terms:
            out.update(v for v, _ in m)
        return out

    def degree(self):
        return max((mono_degree(m) for m in self.terms), default=-1)

    def is_holomorphic(self):
        return not any(v.startswith("zb") for v in self.variables())

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.terms == other.terms
        if isinstance(other, (GaussianRational, int, Fraction)):
            return self.terms == Poly.const(other).terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __neg__(self):
        return Poly({m: -c for m, c in self.terms.items()})

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            if s is None:
                out[m] = c
            else:
                s = s + c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return Poly(out)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return Poly.coerce(other) - self

    def scale(self, c):
        c = GaussianRational.coerce(c)
        if not c:
            return Poly()
        if c == ONE:
            return self
        return Poly({m: v * c for m, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(other)
        if not self.terms or not other.terms:
            return Poly()
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                c = c1 * c2
                s = out.get(m)
                out[m] = c if s is None else s + c
        return Poly({m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Poly):
            if not other.is_constant() or other.is_zero():
                raise TypeError("division only by nonzero constants")
            other = other.constant_value()
        return self.scale(GaussianRational.coerce(other).inverse())

    def __pow__(self, k):
        out = Poly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def conjugate(self):
        return Poly({mono_conj(m): c.conjugate() for m, c in self.terms.items()})

    def wirtinger(self, var, kind=None, chart_vars=None):
        """Formal partial derivative in ``var``.

        ``kind`` may be ``"holo"`` or ``"anti"``; with ``"anti"`` and a
        holomorphic symbol ``z<k>`` the derivative is taken in ``zb<k>``.
        ``chart_vars``, when given, is the set of admissible symbols.
        """
        if kind == "anti" and var.startswith("z") and not var.startswith("zb"):
            var = conj_var(var)
        elif kind == "holo" and var.startswith("zb"):
            var = conj_var(var)
        parse_var(var)
        if chart_vars is not None and var not in chart_vars:
            raise UnknownVariable(f"{var} is not a coordinate of this chart")
        return self.diff(var)

    def diff(self, var):
        out = {}
        for m, c in self.terms.items():
            for k, (v, e) in enumerate(m):
                if v == var:
                    nm = m[:k] + ((v, e - 1),) + m[k + 1:] if e > 1 else m[:k] + m[k + 1:]
                    out[nm] = c * e
                    break
        return Poly(out)

    def subs(self, assignment):
        """Substitute Poly/scalar values for some variables."""
        out = Poly()
        for m, c in self.terms.items():
            term = Poly({(): c})
            rest = []
            for v, e in m:
                if v in assignment:
                    term = term * (Poly.coerce(assignment[v]) ** e)
                else:
                    rest.append((v, e))
            out = out + term * Poly({_canon(rest): ONE})
        return out

    def eval(self, point):
        """Exact value at ``point`` (symbol -> scalar).

        Values for ``zb<k>`` may be omitted and are then taken as the
        conjugate of ``z<k>``; when both are present they must agree.
        """
        pt = {k: GaussianRational.coerce(v) for k, v in point.items()}
        for name, val in list(pt.items()):
            if name.startswith("zb"):
                z = conj_var(name)
                if z in pt and pt[z].conjugate() != val:
                    raise InconsistentConjugates(f"{name} != conj({z})")
        for name in list(pt):
            if name.startswith("z") and not name.startswith("zb"):
                pt.setdefault(conj_var(name), pt[name].conjugate())
        total = ZERO
        for m, c in self.terms.items():
            val = c
            for v, e in m:
                if v not in pt:
                    raise IncompleteAssignment(f"no value for {v}")
                val = val * pt[v] ** e
            total = total + val
        return total

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        return format_poly(self)


def _fmt_mono(m):
    return "*".join(v if e == 1 else f"{v}^{e}" for v, e in m)


def format_poly(p):
    """Canonical text; :func:`parse_poly` reads it back."""
    if not p.terms:
        return "0"
    keys = sorted(p.terms, key=lambda m: (-mono_degree(m), [(var_key(v), -e) for v, e in m]))
    parts = []
    for m in keys:
        c = p.terms[m]
        neg = False
        if not c.im and c.re < 0:
            neg, c = True, -c
        elif not c.re and c.im < 0:
            neg, c = True, -c
        cs = format_scalar(c)
        if m and c == ONE:
            body = _fmt_mono(m)
        elif m:
            body = f"{cs}*{_fmt_mono(m)}"
        else:
            body = cs
        parts.append(("-" if neg else "+", body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|(zb\d+|z\d+|x\d+)|(i)(?![A-Za-z0-9])|([-+*^()]))")


class _Parser:
    def __init__(self, text):
        self.text = text
        self.pos = 0
        self.tok = None
        self._advance()

    def _advance(self):
        n = len(self.text)
        while self.pos < n and self.text[self.pos].isspace():
            self.pos += 1
        if self.pos >= n:
            self.tok = ("end", None, self.pos)
            return
        m = _TOKEN.match(self.text, self.pos)
        if not m or m.end() == self.pos:
            raise ParseError("unexpected character", self.text, self.pos)
        start = m.start(m.lastindex)
        if m.group(1):
            self.tok = ("num", m.group(1), start)
        elif m.group(2):
            self.tok = ("var", m.group(2), start)
        elif m.group(3):
            self.tok = ("i", None, start)
        else:
            self.tok = ("op", m.group(4), start)
        self.pos = m.end()

    def _expect(self, op):
        if self.tok[0] != "op" or self.tok[1] != op:
            raise ParseError(f"expected {op!r}", self.text, self.tok[2])
        self._advance()

    def parse(self):
        p = self.expr()
        if self.tok[0] != "end":
            raise ParseError("trailing input", self.text, self.tok[2])
        return p

    def expr(self):
        sign = 1
        if self.tok[0] == "op" and self.tok[1] in "+-":
            sign = -1 if self.tok[1] == "-" else 1
            self._advance()
        p = self.term()
        if sign < 0:
            p = -p
        while self.tok[0] == "op" and self.tok[1] in "+-":
            op = self.tok[1]
            self._advance()
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self):
        p = self.power()
        while self.tok[0] == "op" and self.tok[1] == "*":
            self._advance()
            p = p * self.power()
        return p

    def power(self):
        base = self.atom()
        if self.tok[0] == "op" and self.tok[1] == "^":
            self._advance()
            if self.tok[0] != "num" or "/" in self.tok[1]:
                raise ParseError("exponent must be a non-negative integer", self.text, self.tok[2])
            k = int(self.tok[1])
            self._advance()
            base = base ** k
        return base

    def atom(self):
        kind, val, pos = self.tok
        if kind == "num":
            self._advance()
            return Poly.const(GaussianRational(val))
        if kind == "var":
            self._advance()
            return Poly.var(val)
        if kind == "i":
            self._advance()
            return Poly.const(I)
        if kind == "op" and val == "(":
            self._advance()
            p = self.expr()
            self._expect(")")
            return p
        if kind == "op" and val == "-":
            self._advance()
            return -self.power()
        raise ParseError("unexpected token", self.text, pos)


def parse_poly(text):
    """Parse the literal grammar: rationals ``a/b``, ``i``, coordinate
    symbols, ``+ - * ^`` and parentheses.  Decimal points are rejected."""
    if not isinstance(text, str):
        return Poly.coerce(GaussianRational.coerce(text))
    return _Parser(text).parse()


def parse_scalar(text):
    p = parse_poly(text)
    if not p.is_constant():
        raise ParseError(f"expected a constant, got {text!r}")
    return p.constant_value()


def conjugate(x):
    return x.conjugate()


def wirtinger(p, var, kind="holo", chart_vars=None):
    return Poly.coerce(p).wirtinger(var, kind, chart_vars)


def is_zero(x):
    return not x


def evaluate(x, point):
    if isinstance(x, Poly):
        return x.eval(point)
    return GaussianRational.coerce(x)
