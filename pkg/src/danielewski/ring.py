"""Exact arithmetic in the coordinate ring ``Q[x, y, z1..zN] / (xy - p(z))``.

Elements are kept in the normal basis ``x^i z^k``, ``y^j z^k``, ``z^k``
(never ``x`` and ``y`` together), obtained by rewriting ``xy -> p(z)``.
Optional formal parameters (``t``, ``s`` by default) are extra commuting
variables in the coefficients; they are used for symbolic flows.

Example::

    >>> R = Ring(DefiningPoly.parse("z^2 - 1"))
    >>> x, y, z = R.x, R.y, R.z()
    >>> (x + y) ** 2
    x^2 + y^2 + 2*z^2 - 2
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

from danielewski import kernels
from danielewski.errors import (
    NotDivisible,
    NotRegular,
    ParameterUnbound,
    ParseError,
    UnsupportedDivisor,
)
from danielewski.polyparse import QQ, parse_expression, symbol_names

MAX_FIELDS = 5
_FIELD_BITS = 8
_HBIAS = 1 << 14


class Smoothness(enum.Enum):
    VERIFIED_SIMPLE_ZEROS = "VerifiedSimpleZeros"
    ASSERTED_SMOOTH = "AssertedSmooth"
    UNVERIFIED = "Unverified"


class Monomial(NamedTuple):
    """Exponents of ``x^i y^j z^k t^q``; normal form has ``i == 0 or j == 0``."""

    i: int
    j: int
    k: tuple
    q: tuple = ()

    @property
    def degree(self):
        return self.i + self.j + sum(self.k)


def to_qq(c):
    if isinstance(c, float):
        raise TypeError("floating point coefficients are not exact")
    return QQ(c)


# ---------------------------------------------------------------------------
# plain polynomials in z (for the defining polynomial)


class _ZPoly:
    """Minimal polynomial algebra over exponent tuples, used while parsing ``p``."""

    __slots__ = ("terms", "n")

    def __init__(self, terms, n):
        self.terms = {e: c for e, c in terms.items() if c != 0}
        self.n = n

    @classmethod
    def const(cls, c, n):
        return cls({(0,) * n: QQ(c)}, n)

    def _coerce(self, other):
        if isinstance(other, _ZPoly):
            return other
        return _ZPoly.const(other, self.n)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return _ZPoly(out, self.n)

    __radd__ = __add__

    def __neg__(self):
        return _ZPoly({e: -c for e, c in self.terms.items()}, self.n)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return _ZPoly(out, self.n)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = _ZPoly.const(1, self.n)
        for _ in range(k):
            out = out * self
        return out


@dataclass(frozen=True, eq=False)
class DefiningPoly:
    """The polynomial ``p(z1..zN)`` with exact rational coefficients."""

    coeffs: dict
    nvars: int
    smoothness: Smoothness = Smoothness.UNVERIFIED

    def __post_init__(self):
        clean = {tuple(e): to_qq(c) for e, c in self.coeffs.items() if c != 0}
        object.__setattr__(self, "coeffs", clean)
        if self.nvars < 1:
            raise ValueError("need at least one z-variable")
        if any(len(e) != self.nvars for e in clean):
            raise ValueError("exponent tuples must have length nvars")
        if self.degree < 1:
            raise ValueError("defining polynomial must have degree >= 1")
        if self.smoothness is Smoothness.VERIFIED_SIMPLE_ZEROS:
            if self.nvars != 1 or not simple_zero_check(self):
                raise ValueError("p does not have simple zeros")

    @property
    def degree(self):
        return max((sum(e) for e in self.coeffs), default=0)

    @property
    def key(self):
        return (self.nvars, tuple(sorted(self.coeffs.items())))

    def __eq__(self, other):
        return isinstance(other, DefiningPoly) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    @classmethod
    def parse(cls, text, nvars=None, smoothness=None):
        """Parse ``p`` from text over ``z`` (one variable) or ``z1..zN``.

        For one variable the smoothness is decided exactly; for several it
        is recorded as asserted only when ``smoothness`` says so.
        """
        names = symbol_names(text)
        indexed = set()
        for name in names:
            if name == "z":
                continue
            if name.startswith("z") and name[1:].isdigit() and int(name[1:]) >= 1:
                indexed.add(int(name[1:]))
            else:
                raise ParseError(f"unknown symbol {name!r} in defining polynomial")
        if "z" in names and indexed - {1}:
            raise ParseError("mixing 'z' with indexed variables")
        n = nvars or max(indexed | {1})
        if max(indexed | {1}) > n:
            raise ParseError(f"{text!r} uses more than {n} variables")
        ns = {}
        for k in range(n):
            e = [0] * n
            e[k] = 1
            ns[f"z{k + 1}"] = _ZPoly({tuple(e): QQ(1)}, n)
        if n == 1:
            ns["z"] = ns["z1"]
        val = parse_expression(text, ns)
        if not isinstance(val, _ZPoly):
            val = _ZPoly.const(val, n)
        if not val.terms or max(sum(e) for e in val.terms) < 1:
            raise ParseError(f"{text!r} is constant; need degree >= 1")
        if smoothness is None:
            smoothness = Smoothness.UNVERIFIED
            if n == 1:
                probe = cls(val.terms, n)
                if simple_zero_check(probe):
                    smoothness = Smoothness.VERIFIED_SIMPLE_ZEROS
        return cls(val.terms, n, smoothness)

    def univariate(self):
        """Dense coefficient list (constant term first); one variable only."""
        if self.nvars != 1:
            raise ValueError("univariate view needs N = 1")
        out = [QQ(0)] * (self.degree + 1)
        for (e,), c in self.coeffs.items():
            out[e] = c
        return out

    def __str__(self):
        return _format_terms(
            sorted(self.coeffs.items(), reverse=True),
            lambda e: _zmono_str(e, self.nvars),
        )


def _zmono_str(e, n):
    parts = []
    for k, a in enumerate(e):
        if a:
            name = "z" if n == 1 else f"z{k + 1}"
            parts.append(name if a == 1 else f"{name}^{a}")
    return "*".join(parts)


def _format_terms(items, mono_str):
    if not items:
        return "0"
    out = []
    for e, c in items:
        m = mono_str(e)
        if not m:
            s = str(c)
        elif c == 1:
            s = m
        elif c == -1:
            s = "-" + m
        else:
            s = f"{c}*{m}"
        out.append(s)
    text = " + ".join(out)
    return text.replace("+ -", "- ")


# ---------------------------------------------------------------------------
# univariate helpers (dense lists, constant term first)


def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _uni_divmod(a, b):
    a = _trim(a)
    b = _trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [QQ(0)] * max(len(a) - len(b) + 1, 1)
    lead = b[-1]
    while len(a) >= len(b) and a:
        c = a[-1] / lead
        shift = len(a) - len(b)
        q[shift] = c
        for i, bc in enumerate(b):
            a[shift + i] -= c * bc
        a = _trim(a)
    return _trim(q), a


def uni_gcd(a, b):
    """Monic gcd of two dense univariate polynomials over Q."""
    a, b = _trim(a), _trim(b)
    while b:
        _, r = _uni_divmod(a, b)
        a, b = b, r
    if not a:
        return []
    lead = a[-1]
    return [c / lead for c in a]


def uni_derivative(a):
    return _trim([QQ(i) * c for i, c in enumerate(a)][1:])


def simple_zero_check(p):
    """True iff ``gcd(p, p')`` is a nonzero constant (one variable only)."""
    if p.nvars != 1:
        raise ValueError("simple_zero_check needs N = 1")
    coeffs = p.univariate()
    return len(uni_gcd(coeffs, uni_derivative(coeffs))) == 1


# ---------------------------------------------------------------------------
# the quotient ring


class Ring:
    """``Q[params][x, y, z1..zN] / (xy - p)`` with packed normal-form monomials."""

    def __init__(self, p, params=("t", "s")):
        if isinstance(p, str):
            p = DefiningPoly.parse(p)
        self.p = p
        self.N = p.nvars
        self.params = tuple(params)
        self.nf = self.N + len(self.params)
        if self.nf > MAX_FIELDS:
            raise ValueError(f"at most {MAX_FIELDS} z-variables plus parameters supported")
        self.hshift = _FIELD_BITS * self.nf
        self.hbias = _HBIAS
        guard = 0x8000 << self.hshift
        for f in range(self.nf):
            guard |= 0x80 << (_FIELD_BITS * f)
        self.guard = guard
        self.one_key = self.hbias << self.hshift
        self._ppow = [{self.one_key: QQ(1)}]
        pterms = {}
        for e, c in p.coeffs.items():
            pterms[self.pack(0, 0, e)] = c
        self._ppow.append(pterms)
        self._unpack_cache = {}

    # identity -----------------------------------------------------------
    def _ident(self):
        return (self.p.key, self.params)

    def __eq__(self, other):
        return isinstance(other, Ring) and (other is self or self._ident() == other._ident())

    def __hash__(self):
        return hash(self._ident())

    def __repr__(self):
        return f"Ring(p={self.p}, params={self.params})"

    # packing ------------------------------------------------------------
    def pack(self, i, j, k, q=()):
        if i and j:
            raise ValueError("packed monomials must be in normal form")
        k = tuple(k)
        q = tuple(q) + (0,) * (len(self.params) - len(q))
        if len(k) != self.N:
            raise ValueError(f"expected {self.N} z-exponents")
        key = (i - j + self.hbias) << self.hshift
        for f, e in enumerate(k + q):
            if e < 0 or e > 0x7F:
                raise kernels.ExponentOverflow("exponent out of packed range")
            key |= e << (_FIELD_BITS * f)
        return key

    def unpack(self, key):
        m = self._unpack_cache.get(key)
        if m is not None:
            return m
        h = (key >> self.hshift) - self.hbias
        fields = tuple((key >> (_FIELD_BITS * f)) & 0xFF for f in range(self.nf))
        m = Monomial(max(h, 0), max(-h, 0), fields[: self.N], fields[self.N:])
        self._unpack_cache[key] = m
        return m

    def hval(self, key):
        return (key >> self.hshift) - self.hbias

    def key_degree(self, key):
        m = self.unpack(key)
        return m.degree

    def ppow(self, m):
        while len(self._ppow) <= m:
            nxt = kernels.mul_terms(
                self._ppow[-1], self._ppow[1], self._ppow, self.hshift, self.hbias, self.guard, False
            )
            self._ppow.append(nxt)
        return self._ppow[m]

    # constructors -------------------------------------------------------
    def elem(self, terms):
        return RingElem(self, {k: QQ(c) for k, c in terms.items() if c != 0})

    def const(self, c):
        c = to_qq(c)
        return RingElem(self, {self.one_key: c} if c != 0 else {})

    @property
    def zero(self):
        return RingElem(self, {})

    @property
    def one(self):
        return self.const(1)

    def monomial(self, i=0, j=0, k=None, q=(), coeff=1):
        k = k if k is not None else (0,) * self.N
        m = min(i, j)
        base = {self.pack(i - m, j - m, k, q): to_qq(coeff)}
        if m:
            base = kernels.mul_terms(base, self.ppow(m), self._ppow, self.hshift,
                                     self.hbias, self.guard, False)
        return RingElem(self, base)

    @property
    def x(self):
        return self.monomial(i=1)

    @property
    def y(self):
        return self.monomial(j=1)

    def z(self, k=1):
        e = [0] * self.N
        e[k - 1] = 1
        return self.monomial(k=tuple(e))

    def param(self, name):
        idx = self.params.index(name)
        q = [0] * len(self.params)
        q[idx] = 1
        return self.monomial(q=tuple(q))

    def p_elem(self):
        return RingElem(self, dict(self._ppow[1]))

    def dp(self, k=1):
        """``dp/dz_k`` as a ring element."""
        return self.p_elem().diff_z(k)

    def p_derivative(self, n, k=1):
        """``n``-th derivative of ``p`` in ``z_k``."""
        f = self.p_elem()
        for _ in range(n):
            f = f.diff_z(k)
        return f

    def from_raw(self, raw):
        """Normal form of a formal polynomial.

        ``raw`` maps flat exponent tuples ``(i, j, k1..kN, q1..)`` to
        coefficients; mixed ``x^i y^j`` are rewritten through ``xy -> p``.
        """
        out = {}
        for exps, c in raw.items():
            if c == 0:
                continue
            i, j = exps[0], exps[1]
            k = tuple(exps[2:2 + self.N])
            q = tuple(exps[2 + self.N:])
            m = min(i, j)
            key = self.pack(i - m, j - m, k, q)
            if m:
                contrib = kernels.mul_terms({key: to_qq(c)}, self.ppow(m), self._ppow,
                                            self.hshift, self.hbias, self.guard, False)
            else:
                contrib = {key: to_qq(c)}
            for kk, cc in contrib.items():
                out[kk] = out.get(kk, 0) + cc
        return self.elem(out)

    def namespace(self):
        ns = {"x": self.x, "y": self.y}
        for k in range(1, self.N + 1):
            ns[f"z{k}"] = self.z(k)
        if self.N == 1:
            ns["z"] = self.z(1)
        for name in self.params:
            ns[name] = self.param(name)
        return ns

    def parse(self, text):
        val = parse_expression(text, self.namespace())
        if not isinstance(val, RingElem):
            val = self.const(val)
        return val

    def with_params(self, params):
        return Ring(self.p, params)

    def normal_monomials(self, max_degree, with_params=False):
        """Packed keys of all parameter-free normal-basis monomials of degree <= max_degree."""
        keys = []
        for deg in range(max_degree + 1):
            for zk in _compositions_upto(deg, self.N):
                rest = deg - sum(zk)
                if rest == 0:
                    keys.append(self.pack(0, 0, zk))
                else:
                    keys.append(self.pack(rest, 0, zk))
                    keys.append(self.pack(0, rest, zk))
        return keys


def _compositions_upto(total, n):
    """Exponent tuples of length n with sum <= total."""
    if n == 0:
        yield ()
        return
    for first in range(total + 1):
        for rest in _compositions_upto(total - first, n - 1):
            yield (first,) + rest


# ---------------------------------------------------------------------------
# elements


class RingElem:
    """Normal-form element of a :class:`Ring`. Immutable."""

    __slots__ = ("ring", "terms", "_hmax", "_hash")

    def __init__(self, ring, terms):
        self.ring = ring
        self.terms = terms
        self._hmax = None
        self._hash = None

    # coercion -----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, RingElem):
            if other.ring is not self.ring and other.ring != self.ring:
                raise ValueError("operands live in different rings")
            return other
        if isinstance(other, (int, type(QQ(0)))) or hasattr(other, "denominator"):
            return self.ring.const(other)
        return NotImplemented

    def hmax(self):
        if self._hmax is None:
            r = self.ring
            self._hmax = max((abs(r.hval(k)) for k in self.terms), default=0)
        return self._hmax

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k, 0) + c
            if v != 0:
                out[k] = v
            else:
                out.pop(k, None)
        return RingElem(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return RingElem(self.ring, {k: -c for k, c in self.terms.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def scale(self, c):
        c = to_qq(c)
        if c == 0:
            return RingElem(self.ring, {})
        return RingElem(self.ring, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, RingElem):
            if other.ring is not self.ring and other.ring != self.ring:
                raise ValueError("operands live in different rings")
            r = self.ring
            if not self.terms or not other.terms:
                return RingElem(r, {})
            r.ppow(min(self.hmax(), other.hmax()))
            a, b = self.terms, other.terms
            if len(a) < len(b):
                a, b = b, a
            return RingElem(r, kernels.mul_terms(a, b, r._ppow, r.hshift, r.hbias, r.guard, True))
        if isinstance(other, (int, type(QQ(0)))) or hasattr(other, "denominator"):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, type(QQ(0)))) or hasattr(other, "denominator"):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, type(QQ(0)))):
            return self.scale(QQ(1) / QQ(other))
        return NotImplemented

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers")
        result = self.ring.one
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # comparison ---------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, RingElem):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, type(QQ(0)))):
            return self.terms == self.ring.const(other).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    # structure ----------------------------------------------------------
    def monomials(self):
        """``(Monomial, coefficient)`` pairs in canonical (descending lex) order."""
        r = self.ring
        items = [(r.unpack(k), c) for k, c in self.terms.items()]
        items.sort(key=lambda mc: (mc[0].i, mc[0].j, mc[0].k, mc[0].q), reverse=True)
        return items

    def degree(self):
        """Max total degree in ``x, y, z`` (parameters excluded); -1 for zero."""
        r = self.ring
        return max((r.key_degree(k) for k in self.terms), default=-1)

    def has_params(self):
        return any(any(r) for r in (m.q for m, _ in self.monomials()))

    def is_pure_z(self):
        r = self.ring
        return all(r.hval(k) == 0 for k in self.terms)

    def constant_term(self):
        return self.terms.get(self.ring.one_key, QQ(0))

    def coefficient(self, i=0, j=0, k=None, q=()):
        k = k if k is not None else (0,) * self.ring.N
        return self.terms.get(self.ring.pack(i, j, k, q), QQ(0))

    # derivatives of the normal-form representative ----------------------
    def diff_x(self):
        r = self.ring
        step = 1 << r.hshift
        out = {}
        for k, c in self.terms.items():
            h = r.hval(k)
            if h > 0:
                out[k - step] = c * h
        return RingElem(r, out)

    def diff_y(self):
        r = self.ring
        step = 1 << r.hshift
        out = {}
        for k, c in self.terms.items():
            h = r.hval(k)
            if h < 0:
                out[k + step] = c * (-h)
        return RingElem(r, out)

    def diff_z(self, idx=1):
        r = self.ring
        shift = _FIELD_BITS * (idx - 1)
        step = 1 << shift
        out = {}
        for k, c in self.terms.items():
            e = (k >> shift) & 0xFF
            if e:
                out[k - step] = c * e
        return RingElem(r, out)

    def diff_param(self, name):
        r = self.ring
        shift = _FIELD_BITS * (r.N + r.params.index(name))
        step = 1 << shift
        out = {}
        for k, c in self.terms.items():
            e = (k >> shift) & 0xFF
            if e:
                out[k - step] = c * e
        return RingElem(r, out)

    # substitution and evaluation ----------------------------------------
    def subs_params(self, values):
        """Substitute exact values for parameters (by name)."""
        r = self.ring
        out = r.zero
        for m, c in self.monomials():
            factor = QQ(1)
            q_new = list(m.q)
            for idx, name in enumerate(r.params):
                if name in values and m.q[idx]:
                    factor *= to_qq(values[name]) ** m.q[idx]
                    q_new[idx] = 0
            out = out + r.monomial(m.i, m.j, m.k, tuple(q_new), c * factor)
        return out

    def compose(self, x_img, y_img, z_imgs):
        """Image under the substitution ``x, y, z_k -> images`` (ring endomorphism)."""
        r = self.ring
        cache = {}

        def power(base_name, base, e):
            key = (base_name, e)
            if key not in cache:
                cache[key] = base ** e
            return cache[key]

        out = r.zero
        for m, c in self.monomials():
            term = r.monomial(q=m.q, coeff=c)
            if m.i:
                term = term * power("x", x_img, m.i)
            if m.j:
                term = term * power("y", y_img, m.j)
            for idx, e in enumerate(m.k):
                if e:
                    term = term * power(f"z{idx}", z_imgs[idx], e)
            out = out + term
        return out

    def eval_numeric(self, pt, params=None):
        """Complex value at a point (anything with ``x``, ``y``, ``z`` or a tuple)."""
        if hasattr(pt, "x"):
            x, y, z = pt.x, pt.y, pt.z
        else:
            x, y, z = pt
        if not isinstance(z, (list, tuple)):
            z = (z,)
        r = self.ring
        if len(z) != r.N:
            raise ValueError(f"point needs {r.N} z-coordinates")
        params = params or {}
        total = 0j
        for m, c in self.monomials():
            v = complex(float(c))
            if m.i:
                v *= complex(x) ** m.i
            if m.j:
                v *= complex(y) ** m.j
            for zc, e in zip(z, m.k):
                if e:
                    v *= complex(zc) ** e
            for name, e in zip(r.params, m.q):
                if e:
                    if name not in params:
                        raise ParameterUnbound(f"parameter {name!r} has no value")
                    v *= complex(params[name]) ** e
            total += v
        return total

    # text ---------------------------------------------------------------
    def canonical(self):
        """Sorted term list ``coeff:x^i*y^j*z1^k1*...`` (bit-exact)."""
        r = self.ring
        out = []
        for m, c in self.monomials():
            parts = [f"x^{m.i}", f"y^{m.j}"] + [f"z{idx + 1}^{e}" for idx, e in enumerate(m.k)]
            parts += [f"{name}^{e}" for name, e in zip(r.params, m.q) if e]
            out.append(f"{c}:" + "*".join(parts))
        return out

    def __str__(self):
        r = self.ring

        def mono(m):
            parts = []
            if m.i:
                parts.append("x" if m.i == 1 else f"x^{m.i}")
            if m.j:
                parts.append("y" if m.j == 1 else f"y^{m.j}")
            z = _zmono_str(m.k, r.N)
            if z:
                parts.append(z)
            for name, e in zip(r.params, m.q):
                if e:
                    parts.append(name if e == 1 else f"{name}^{e}")
            return "*".join(parts)

        return _format_terms(self.monomials(), mono)

    __repr__ = __str__


def nf_reduce(ring, raw):
    """Normal form of a raw polynomial given as ``{(i, j, k.., q..): coeff}``."""
    return ring.from_raw(raw)


def parse_canonical(ring, items):
    """Inverse of :meth:`RingElem.canonical`."""
    out = {}
    for item in items:
        coeff, _, mono = item.partition(":")
        exps = {}
        for part in mono.split("*"):
            name, _, e = part.partition("^")
            exps[name] = int(e)
        k = tuple(exps.get(f"z{idx + 1}", 0) for idx in range(ring.N))
        q = tuple(exps.get(name, 0) for name in ring.params)
        out[ring.pack(exps.get("x", 0), exps.get("y", 0), k, q)] = QQ(coeff)
    return ring.elem(out)


# ---------------------------------------------------------------------------
# exact division


def _lex_divide(ring, f, g):
    """Exact division of pure-``z`` term maps (lex order on packed keys)."""
    f = dict(f)
    g = {k: c for k, c in g.items()}
    if not g:
        raise ZeroDivisionError("division by zero")
    kg = max(g)
    cg = g[kg]
    mg = ring.unpack(kg)
    gexp = mg.k + mg.q
    bias_sh = ring.hbias << ring.hshift
    quotient = {}
    while f:
        kf = max(f)
        mf = ring.unpack(kf)
        fexp = mf.k + mf.q
        if any(a < b for a, b in zip(fexp, gexp)):
            raise NotDivisible("not divisible")
        kq = kf - kg + bias_sh
        cq = f[kf] / cg
        quotient[kq] = quotient.get(kq, 0) + cq
        for kk, cc in g.items():
            key = kq + kk - bias_sh
            v = f.get(key, 0) - cq * cc
            if v != 0:
                f[key] = v
            else:
                f.pop(key, None)
    return quotient


def _slices(f):
    r = f.ring
    step = 1 << r.hshift
    out = {}
    for k, c in f.terms.items():
        h = r.hval(k)
        out.setdefault(h, {})[k - h * step] = c
    return out


def _divide_by_x_once(f, reverse=False):
    """Quotient by ``x`` (or ``y`` if ``reverse``) via the index shift on the normal basis."""
    r = f.ring
    step = 1 << r.hshift
    sign = -1 if reverse else 1
    pterms = r.ppow(1)
    out = {}
    for h, sl in _slices(f).items():
        hs = sign * h
        if hs > 0:
            for k, c in sl.items():
                out[k + (h - sign) * step] = c
        else:
            q = _lex_divide(r, sl, pterms)
            for k, c in q.items():
                out[k + (h - sign) * step] = c
    return RingElem(r, out)


def divide_exact(f, g):
    """``h`` with ``h * g == f`` for ``g`` in ``x^k``, ``y^k`` or ``Q[z]`` (times params).

    Raises :class:`NotDivisible` when no quotient exists and
    :class:`UnsupportedDivisor` for any other shape of ``g``.
    """
    if isinstance(g, (int, type(QQ(0)))):
        g = f.ring.const(g)
    r = f.ring
    if g.is_zero():
        raise ZeroDivisionError("division by zero")
    if len(g.terms) == 1:
        (kg, cg), = g.terms.items()
        m = r.unpack(kg)
        if (m.i or m.j) and not any(m.k) and not any(m.q):
            h = f.scale(QQ(1) / cg)
            for _ in range(m.i or m.j):
                h = _divide_by_x_once(h, reverse=bool(m.j))
            return h
    if g.is_pure_z():
        step = 1 << r.hshift
        out = {}
        for h, sl in _slices(f).items():
            q = _lex_divide(r, sl, g.terms)
            for k, c in q.items():
                out[k + h * step] = c
        return RingElem(r, out)
    raise UnsupportedDivisor("divisor must be x^k, y^k or a polynomial in z")


# ---------------------------------------------------------------------------
# the chart {x != 0}: Laurent polynomials in x with coefficients in Q[z]


class LaurentElem:
    """Laurent polynomial in ``x`` over ``Q[z, params]``; chart ``y = p(z)/x``."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms):
        self.ring = ring
        self.terms = terms

    @classmethod
    def from_ring(cls, f):
        r = f.ring
        out = {}
        by_j = {}
        for k, c in f.terms.items():
            h = r.hval(k)
            if h >= 0:
                out[k] = out.get(k, 0) + c
            else:
                by_j.setdefault(-h, {})[k] = c
        for j, part in by_j.items():
            prod = kernels.mul_terms(part, r.ppow(j), r._ppow, r.hshift, r.hbias, r.guard, False)
            for k, c in prod.items():
                out[k] = out.get(k, 0) + c
        return cls(r, {k: c for k, c in out.items() if c != 0})

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k, 0) + c
            if v != 0:
                out[k] = v
            else:
                out.pop(k, None)
        return LaurentElem(self.ring, out)

    def __neg__(self):
        return LaurentElem(self.ring, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        r = self.ring
        if isinstance(other, LaurentElem):
            return LaurentElem(r, kernels.mul_terms(self.terms, other.terms, r._ppow,
                                                    r.hshift, r.hbias, r.guard, False))
        c = to_qq(other)
        return LaurentElem(r, {k: v * c for k, v in self.terms.items() if v * c != 0})

    __rmul__ = __mul__

    def shift_x(self, e):
        """Multiply by ``x^e`` (``e`` may be negative)."""
        step = 1 << self.ring.hshift
        return LaurentElem(self.ring, {k + e * step: c for k, c in self.terms.items()})

    def diff_x(self):
        r = self.ring
        step = 1 << r.hshift
        out = {}
        for k, c in self.terms.items():
            e = r.hval(k)
            if e:
                out[k - step] = c * e
        return LaurentElem(r, out)

    def diff_z(self, idx=1):
        return LaurentElem(self.ring, RingElem(self.ring, self.terms).diff_z(idx).terms)

    def is_zero(self):
        return not self.terms

    def to_ring(self):
        """Back-substitute ``x^-k g(z) = y^k g(z) / p^k``; NotRegular if impossible."""
        r = self.ring
        step = 1 << r.hshift
        out = {}
        neg = {}
        for k, c in self.terms.items():
            e = r.hval(k)
            if e >= 0:
                out[k] = c
            else:
                neg.setdefault(-e, {})[k - e * step] = c
        result = RingElem(r, out)
        for kk in sorted(neg):
            g = RingElem(r, neg[kk])
            xk = r.monomial(i=kk)
            try:
                result = result + divide_exact(g, xk)
            except NotDivisible:
                raise NotRegular(f"x^-{kk} coefficient is not divisible by p^{kk}") from None
        return result


def sample_smoothness(p, samples=10_000, seed=0):
    """Smoke test for ``{p = 0} & {dp = 0}`` being empty (N > 1).

    Samples random lines in ``C^N``, finds zeros of ``p`` on them numerically and
    returns the smallest ``|dp|`` seen.  A value far from zero is evidence,
    not proof, of smoothness.
    """
    import numpy as np

    rng = np.random.default_rng(seed)
    n = p.nvars
    items = list(p.coeffs.items())
    grads = []
    for k in range(n):
        grads.append([(tuple(a - (i == k) for i, a in enumerate(e)), c * e[k])
                      for e, c in items if e[k]])

    def ev(terms, z):
        return sum(complex(float(c)) * np.prod([zi ** a for zi, a in zip(z, e)]) for e, c in terms)

    d = p.degree
    best = math.inf
    found = 0
    while found < samples:
        base = rng.normal(size=n) + 1j * rng.normal(size=n)
        direc = rng.normal(size=n) + 1j * rng.normal(size=n)
        # p(base + u*direc) as a polynomial in u via interpolation at d+1 nodes
        nodes = np.exp(2j * np.pi * np.arange(d + 1) / (d + 1))
        vals = np.array([ev(items, base + u * direc) for u in nodes])
        coeffs = np.polyfit(nodes, vals, d)
        roots = np.roots(coeffs) if np.any(np.abs(coeffs[:-1]) > 1e-12) else []
        for u in roots:
            z = base + u * direc
            g = np.array([ev(gk, z) for gk in grads])
            best = min(best, float(np.linalg.norm(g)))
            found += 1
        if len(roots) == 0:
            found += 1
    return best


__all__ = [
    "DefiningPoly",
    "LaurentElem",
    "Monomial",
    "QQ",
    "Ring",
    "RingElem",
    "Smoothness",
    "divide_exact",
    "nf_reduce",
    "parse_canonical",
    "sample_smoothness",
    "simple_zero_check",
    "uni_gcd",
]

