"""Polynomial vector fields on ``xy = p(z)`` as derivations of the coordinate ring.

A field ``a d/dx + b d/dy + sum_k c_k d/dz_k`` descends to the surface iff it
annihilates ``xy - p`` modulo the ideal, i.e. ``a*y + b*x - sum c_k dp/dz_k``
reduces to zero.  That residual is computed once on construction and kept as
the ``tangent`` certificate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from danielewski.errors import KernelViolation, NotRegular, NotTangent
from danielewski.polyparse import QQ, parse_expression
from danielewski.ring import LaurentElem, RingElem, parse_canonical


class VectorField:
    """Immutable derivation ``(a, b, c_1..c_N)`` of a :class:`~danielewski.ring.Ring`."""

    __slots__ = ("ring", "a", "b", "c", "tangent", "_hash")

    def __init__(self, a, b, c):
        if isinstance(c, RingElem):
            c = (c,)
        self.ring = a.ring
        self.a = a
        self.b = b
        self.c = tuple(c)
        if len(self.c) != self.ring.N:
            raise ValueError(f"need {self.ring.N} z-components")
        self.tangent = self.tangency_residual().is_zero()
        self._hash = None

    @classmethod
    def zero(cls, ring):
        z = ring.zero
        return cls(z, z, (z,) * ring.N)

    def tangency_residual(self):
        r = self.ring
        res = self.a * r.y + self.b * r.x
        for k, ck in enumerate(self.c, start=1):
            if ck:
                res = res - ck * r.dp(k)
        return res

    def components(self):
        return (self.a, self.b) + self.c

    def apply(self, f):
        """``a df/dx + b df/dy + sum c_k df/dz_k`` on the normal-form representative."""
        if not self.tangent:
            raise NotTangent("derivation is not tangent to the surface")
        return self._apply_raw(f)

    __call__ = apply

    def _apply_raw(self, f):
        out = self.ring.zero
        if self.a:
            fx = f.diff_x()
            if fx:
                out = out + self.a * fx
        if self.b:
            fy = f.diff_y()
            if fy:
                out = out + self.b * fy
        for k, ck in enumerate(self.c, start=1):
            if ck:
                fz = f.diff_z(k)
                if fz:
                    out = out + ck * fz
        return out

    # linear structure -------------------------------------------------
    def _map(self, fn):
        return VectorField(fn(self.a), fn(self.b), tuple(fn(ck) for ck in self.c))

    def __add__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return VectorField(self.a + other.a, self.b + other.b,
                           tuple(u + v for u, v in zip(self.c, other.c)))

    def __sub__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return VectorField(self.a - other.a, self.b - other.b,
                           tuple(u - v for u, v in zip(self.c, other.c)))

    def __neg__(self):
        return self._map(lambda u: -u)

    def __rmul__(self, f):
        if isinstance(f, RingElem) or isinstance(f, (int, type(QQ(0)))):
            return self._map(lambda u: f * u if isinstance(f, RingElem) else u.scale(f))
        return NotImplemented

    __mul__ = __rmul__

    def scale(self, c):
        return self._map(lambda u: u.scale(c))

    def __truediv__(self, c):
        if isinstance(c, (int, type(QQ(0)))):
            return self._map(lambda u: u.scale(QQ(1) / QQ(c)))
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.components() == other.components()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.components())
        return self._hash

    def is_zero(self):
        return all(u.is_zero() for u in self.components())

    def degree(self):
        """Max total coefficient degree (parameters excluded); -1 for the zero field."""
        return max(u.degree() for u in self.components())

    def to_json(self):
        out = {"a": self.a.canonical(), "b": self.b.canonical()}
        for k, ck in enumerate(self.c, start=1):
            out[f"c{k}"] = ck.canonical()
        return out

    @classmethod
    def from_json(cls, ring, data):
        comps = [parse_canonical(ring, data["a"]), parse_canonical(ring, data["b"])]
        c = tuple(parse_canonical(ring, data[f"c{k}"]) for k in range(1, ring.N + 1))
        return cls(comps[0], comps[1], c)

    def __str__(self):
        r = self.ring
        names = ["d/dx", "d/dy"] + (["d/dz"] if r.N == 1 else [f"d/dz{k}" for k in range(1, r.N + 1)])
        parts = [f"({u})*{n}" for u, n in zip(self.components(), names) if u]
        return " + ".join(parts) if parts else "0"

    __repr__ = __str__


def tangency_check(field):
    return field.tangency_residual().is_zero()


# ---------------------------------------------------------------------------
# named fields


def make_named(ring, which, k=1):
    """``V_k``, ``W_k`` or ``H``; ``V``/``W`` alone mean index 1."""
    which = which.upper()
    if which == "H":
        zero = (ring.zero,) * ring.N
        return VectorField(-ring.x, ring.y, zero)
    if not 1 <= k <= ring.N:
        raise ValueError(f"index {k} out of range 1..{ring.N}")
    c = [ring.zero] * ring.N
    if which == "V":
        c[k - 1] = ring.y
        return VectorField(ring.dp(k), ring.zero, tuple(c))
    if which == "W":
        c[k - 1] = ring.x
        return VectorField(ring.zero, ring.dp(k), tuple(c))
    raise ValueError(f"unknown field {which!r}")


def field_namespace(ring):
    ns = dict(ring.namespace())
    ns["H"] = make_named(ring, "H")
    for k in range(1, ring.N + 1):
        ns[f"V{k}"] = make_named(ring, "V", k)
        ns[f"W{k}"] = make_named(ring, "W", k)
    ns["V"] = ns["V1"]
    ns["W"] = ns["W1"]
    return ns


def parse_field(ring, text):
    """Parse an expression such as ``y^2*V - 3*z*H`` into a vector field."""
    val = parse_expression(text, field_namespace(ring))
    if not isinstance(val, VectorField):
        raise ValueError(f"{text!r} does not denote a vector field")
    return val


def coordinate_field(ring, a=None, b=None, c=None):
    """Field with given components (ring elements, default zero); may be non-tangent."""
    z = ring.zero
    cs = tuple(c) if c is not None else (z,) * ring.N
    return VectorField(a if a is not None else z, b if b is not None else z, cs)


# ---------------------------------------------------------------------------
# brackets


def bracket(f1, f2):
    """Lie bracket ``[f1, f2]``; both fields must be tangent."""
    if not (f1.tangent and f2.tangent):
        raise NotTangent("bracket needs tangent fields")
    comps = [f1._apply_raw(u2) - f2._apply_raw(u1)
             for u1, u2 in zip(f1.components(), f2.components())]
    out = VectorField(comps[0], comps[1], tuple(comps[2:]))
    if not out.tangent:  # cannot happen for tangent inputs
        raise AssertionError("bracket of tangent fields failed the tangency check")
    return out


def adj_power(f1, f2, n):
    """``[f1, [f1, ... [f1, f2]]]`` with ``n`` brackets."""
    if not (f1.tangent and f2.tangent):
        raise NotTangent("adj_power needs tangent fields")
    out = f2
    for _ in range(n):
        out = bracket(f1, out)
    return out


def shear(field, f):
    """``f * field`` after checking ``field(f) == 0``."""
    res = field.apply(f)
    if res:
        raise KernelViolation(f"not a shear: field(f) = {res}", residual=res)
    return f * field


def overshear(field, f):
    """``f * field`` after checking ``field(field(f)) == 0``."""
    res = field.apply(field.apply(f))
    if res:
        raise KernelViolation(f"not an overshear: field^2(f) = {res}", residual=res)
    return f * field


# ---------------------------------------------------------------------------
# divergence with respect to dx ^ dz / x


def divergence(field):
    """The ``delta`` with ``L_field(omega) = delta * omega`` (N = 1).

    Computed in the chart ``x != 0`` with coordinates ``(x, z)``:
    ``delta = dA/dx + dC/dz - A/x`` where ``A``, ``C`` are the chart forms
    of the ``d/dx`` and ``d/dz`` coefficients.
    """
    if field.ring.N != 1:
        raise ValueError("divergence is only defined for N = 1")
    if not field.tangent:
        raise NotTangent("divergence needs a tangent field")
    A = LaurentElem.from_ring(field.a)
    C = LaurentElem.from_ring(field.c[0])
    chart = A.diff_x() + C.diff_z(1) - A.shift_x(-1)
    try:
        return chart.to_ring()
    except NotRegular as exc:  # pragma: no cover - tangent fields are regular
        raise AssertionError(f"divergence of a tangent field is not regular: {exc}") from None


# ---------------------------------------------------------------------------
# local nilpotency


@dataclass(frozen=True)
class LNDResult:
    nilpotent: bool
    order: int | None = None

    def __str__(self):
        return f"Nilpotent({self.order})" if self.nilpotent else "ExceedsCap"


def is_lnd(field, cap):
    """Smallest ``m <= cap`` with ``field^m(g) = 0`` for every coordinate ``g``."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    if not field.tangent:
        raise NotTangent("is_lnd needs a tangent field")
    r = field.ring
    gens = [r.x, r.y] + [r.z(k) for k in range(1, r.N + 1)]
    order = 0
    for g in gens:
        cur = g
        for m in range(1, cap + 1):
            cur = field.apply(cur)
            if cur.is_zero():
                order = max(order, m)
                break
        else:
            return LNDResult(False)
    return LNDResult(True, order)


# ---------------------------------------------------------------------------
# identity verification


@dataclass
class IdentityCheck:
    label: str
    index: dict
    passed: bool
    residual: VectorField | None = None
    note: str = ""

    def to_json(self):
        out = {"label": self.label, "index": self.index, "passed": self.passed}
        if self.residual is not None:
            out["residual"] = self.residual.to_json()
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class IdentityReport:
    p: str
    n_max: int
    checks: list = field(default_factory=list)
    printed_checks: list = field(default_factory=list)
    discrepancies: list = field(default_factory=list)

    @property
    def all_passed(self):
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def to_json(self):
        return {
            "p": self.p,
            "n_max": self.n_max,
            "all_passed": self.all_passed,
            "checks": [c.to_json() for c in self.checks],
            "printed_checks": [c.to_json() for c in self.printed_checks],
            "discrepancies": self.discrepancies,
        }


def _check(report, label, lhs, rhs, **index):
    diff = lhs - rhs
    ok = diff.is_zero()
    report.checks.append(IdentityCheck(label, index, ok, None if ok else diff))
    return ok


def _check_printed(report, label, lhs, rhs, **index):
    """Check a display exactly as printed; kept apart from the computed-truth checks."""
    diff = lhs - rhs
    ok = diff.is_zero()
    report.printed_checks.append(IdentityCheck(label, index, ok, None if ok else diff))
    return ok


def _dz(ring, k):
    c = [ring.zero] * ring.N
    c[k - 1] = ring.one
    return coordinate_field(ring, c=c)


def verify_identities(ring, n_max, k_max=None):
    """Exact checks of the bracket identities for the given ``p``.

    ``n_max`` bounds the derivative order: formulas involving ``p^(j)`` are
    checked for every index combination with ``j <= n_max + 1``.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    k_max = n_max if k_max is None else k_max
    rep = IdentityReport(str(ring.p), n_max)
    r = ring
    H = make_named(r, "H")
    x, y = r.x, r.y

    # several-variable commutator table (covers N = 1 as well)
    for k in range(1, r.N + 1):
        Vk, Wk = make_named(r, "V", k), make_named(r, "W", k)
        _check(rep, "[V_k, H] = -V_k", bracket(Vk, H), -Vk, k=k)
        _check(rep, "[W_k, H] = W_k", bracket(Wk, H), Wk, k=k)
        _check(rep, "-x V_k + y W_k = dp/dz_k H", -(x * Vk) + y * Wk, r.dp(k) * H, k=k)
        _check(rep, "y in ker V_k", coordinate_field(r, a=Vk.apply(y)), VectorField.zero(r), k=k)
        _check(rep, "x in ker W_k", coordinate_field(r, a=Wk.apply(x)), VectorField.zero(r), k=k)
        for ell in range(1, r.N + 1):
            Vl, Wl = make_named(r, "V", ell), make_named(r, "W", ell)
            _check(rep, "[V_k, V_l] = 0", bracket(Vk, Vl), VectorField.zero(r), k=k, l=ell)
            _check(rep, "[W_k, W_l] = 0", bracket(Wk, Wl), VectorField.zero(r), k=k, l=ell)
            pkl = r.dp(k).diff_z(ell)
            if k == ell:
                _check(rep, "[V_k, W_k] = d2p/dz_k2 H", bracket(Vk, Wk), pkl * H, k=k)
            else:
                rhs = pkl * H + r.dp(k) * _dz(r, ell) - r.dp(ell) * _dz(r, k)
                _check(rep, "[V_k, W_l] = d2p/dzkdzl H + p_k d/dz_l - p_l d/dz_k",
                       bracket(Vk, Wl), rhs, k=k, l=ell)
                _check(rep, "z_l in ker V_k", coordinate_field(r, a=Vk.apply(r.z(ell))),
                       VectorField.zero(r), k=k, l=ell)
                _check(rep, "z_l in ker W_k", coordinate_field(r, a=Wk.apply(r.z(ell))),
                       VectorField.zero(r), k=k, l=ell)

    if r.N != 1:
        return rep

    V, W = make_named(r, "V"), make_named(r, "W")
    z = r.z()
    dp = [r.p_derivative(j) for j in range(n_max + 3)]

    _check(rep, "[V, H] = -V", bracket(V, H), -V)
    _check(rep, "[W, H] = W", bracket(W, H), W)
    _check(rep, "[V, W] = p'' H", bracket(V, W), dp[2] * H)
    _check(rep, "-x V + y W = p' H", -(x * V) + y * W, dp[1] * H)

    # adj_V^n(W)
    cur = W
    for n in range(1, n_max + 1):
        cur = bracket(V, cur)
        rhs = y ** (n - 1) * dp[n + 1] * H
        if n >= 2:
            rhs = rhs - (y ** (n - 2) * dp[n]).scale(n - 1) * V
        _check(rep, "adj_V^n(W) = -(n-1) y^(n-2) p^(n) V + y^(n-1) p^(n+1) H", cur, rhs, n=n)

    # adj_{yV}^n(W) and adj_V^m adj_{yV}^n(W).  The bracket [yV, H] = -2yV
    # makes the V-coefficient grow by 2 per step: -(2n-1) rather than the
    # printed -n, so the printed displays are kept as separate checks.
    yV = y * V
    cur = W
    bad_single, bad_mixed = [], []
    for n in range(1, n_max + 1):
        cur = bracket(yV, cur)
        hpart = y ** (2 * n - 1) * dp[n + 1] * H
        vpart = y ** (2 * n - 2) * dp[n] * V
        _check(rep, "adj_{yV}^n(W) = -(2n-1) y^(2n-2) p^(n) V + y^(2n-1) p^(n+1) H",
               cur, hpart - vpart.scale(2 * n - 1), n=n)
        if not _check_printed(rep, "adj_{yV}^n(W) = -n y^(2n-2) p^(n) V + y^(2n-1) p^(n+1) H",
                              cur, hpart - vpart.scale(n), n=n):
            bad_single.append(n)
        inner = cur
        for m in range(1, n_max - n + 1):
            inner = bracket(V, inner)
            hpart = y ** (2 * n - 1 + m) * dp[n + 1 + m] * H
            vpart = y ** (2 * n - 2 + m) * dp[n + m] * V
            _check(rep, "adj_V^m(adj_{yV}^n(W)) = -(2n-1+m) y^(2n-2+m) p^(n+m) V "
                        "+ y^(2n-1+m) p^(n+1+m) H", inner, hpart - vpart.scale(2 * n - 1 + m),
                   n=n, m=m)
            if not _check_printed(rep, "adj_V^m(adj_{yV}^n(W)) = -(n+m) y^(2n-2+m) p^(n+m) V "
                                       "+ y^(2n-1+m) p^(n+1+m) H", inner,
                                  hpart - vpart.scale(n + m), n=n, m=m):
                bad_mixed.append((n, m))
    if bad_single:
        rep.discrepancies.append(
            "adj_{yV}^n(W): printed V-coefficient -n differs from the computed -(2n-1) "
            f"for n in {bad_single}")
    if bad_mixed:
        rep.discrepancies.append(
            "adj_V^m(adj_{yV}^n(W)): printed V-coefficient -(n+m) differs from the computed "
            f"-(2n-1+m) for (n, m) in {bad_mixed}")

    # adj_V^n([y^k V, W])
    for k in range(0, k_max + 1):
        cur = bracket(y ** k * V, W)
        for n in range(0, n_max):
            if n:
                cur = bracket(V, cur)
            rhs = y ** (k + n) * dp[n + 2] * H
            if k + n:
                rhs = rhs - (y ** (k - 1 + n) * dp[n + 1]).scale(k + n) * V
            _check(rep, "adj_V^n([y^k V, W]) = y^(k+n) p^(n+2) H - (k+n) y^(k-1+n) p^(n+1) V",
                   cur, rhs, n=n, k=k)

    # stepping towards y^n V and x^n W
    zV, zW, zH = z * V, z * W, z * H
    printed_mismatch = []
    for n in range(0, n_max + 1):
        _check(rep, "[x^n W, zW] = x^(n+1) W", bracket(x ** n * W, zW), x ** (n + 1) * W, n=n)
        computed = bracket(y ** n * V, zV)
        _check(rep, "[y^n V, zV] = y^(n+1) V", computed, y ** (n + 1) * V, n=n)
        if not _check_printed(rep, "[y^n V, zV] = y^(n+1) W", computed, y ** (n + 1) * W, n=n):
            printed_mismatch.append(n)
    if printed_mismatch:
        rep.discrepancies.append(
            "stepping lemma: the printed right-hand side y^(n+1) W disagrees with the "
            f"computed bracket y^(n+1) V for n in {printed_mismatch}"
        )

    _check(rep, "-y H = [zH, V] - [H, zV]", -(y * H), bracket(zH, V) - bracket(H, zV))
    _check(rep, "x H = [H, zW] - [zH, W]", x * H, bracket(H, zW) - bracket(zH, W))
    yH, xH = y * H, x * H
    for n in range(0, n_max + 1):
        _check(rep, "[yH, z y^n V] = (n+1) z y^(n+1) V", bracket(yH, z * y ** n * V),
               (z * y ** (n + 1)).scale(n + 1) * V, n=n)
        _check(rep, "[xH, z x^n W] = -(n+1) z x^(n+1) W", bracket(xH, z * x ** n * W),
               (z * x ** (n + 1)).scale(-(n + 1)) * W, n=n)
    return rep
