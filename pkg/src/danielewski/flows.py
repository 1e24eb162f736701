"""Closed-form flows of ``V_k``, ``W_k``, ``H`` and their kernel-multiplier shears.

The flow of ``V_k`` moves ``z_k`` by ``y t`` and ``x`` by the Taylor
increment of ``p`` along ``z_k``::

    x + sum_{j >= 1} t^j y^(j-1) (d^j p / dz_k^j)(z) / j!

``W_k`` is the same with ``x`` and ``y`` swapped, and ``H`` is the torus
action ``(e^-t x, e^t y, z)``.  A shear ``f * V_k`` with ``V_k(f) = 0`` flows
along ``V_k`` at effective time ``f(point) * t``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Union

from danielewski.errors import NotLND, ResidualBlowup
from danielewski.polyparse import QQ
from danielewski.ring import RingElem
from danielewski.vfield import is_lnd, make_named

BLOWUP_FACTOR = 1e3
BLOWUP_FLOOR = 1e-9


# ---------------------------------------------------------------------------
# numeric evaluation of p


def p_value(p, zs):
    total = 0j
    for exps, c in p.coeffs.items():
        term = complex(float(c))
        for zc, e in zip(zs, exps):
            if e:
                term *= complex(zc) ** e
        total += term
    return total


def taylor_coeffs(p, zs, k):
    """``[q_1, ..., q_d]`` with ``p(z + s e_k) = p(z) + sum_j q_j s^j``."""
    idx = k - 1
    out = {}
    for exps, c in p.coeffs.items():
        e = exps[idx]
        if e == 0:
            continue
        rest = complex(float(c))
        for l, (zc, el) in enumerate(zip(zs, exps)):
            if l != idx and el:
                rest *= complex(zc) ** el
        zk = complex(zs[idx])
        for j in range(1, e + 1):
            out[j] = out.get(j, 0j) + rest * math.comb(e, j) * zk ** (e - j)
    deg = max(out, default=0)
    return [out.get(j, 0j) for j in range(1, deg + 1)]


@dataclass(frozen=True)
class SurfacePoint:
    x: complex
    y: complex
    z: tuple
    residual: float

    @classmethod
    def make(cls, p, x, y, z, tol=None):
        """Point with its residual ``|xy - p(z)|``; rejects it if above ``tol``."""
        zt = tuple(complex(v) for v in (z if isinstance(z, (list, tuple)) else (z,)))
        x, y = complex(x), complex(y)
        res = abs(x * y - p_value(p, zt))
        if tol is not None and res > tol:
            raise ValueError(f"point is off the surface (residual {res:.3e} > {tol:.1e})")
        return cls(x, y, zt, res)

    def coords(self):
        return (self.x, self.y) + self.z

    def distance(self, other):
        return max(abs(a - b) for a, b in zip(self.coords(), other.coords()))

    def to_json(self):
        return [[c.real, c.imag] for c in self.coords()]

    @classmethod
    def from_json(cls, p, data, tol=None):
        vals = [complex(v[0], v[1]) if isinstance(v, (list, tuple)) else complex(v) for v in data]
        return cls.make(p, vals[0], vals[1], tuple(vals[2:]), tol)


# ---------------------------------------------------------------------------
# multipliers


@dataclass(frozen=True)
class InterpPoly:
    """Numeric one-variable polynomial ``c * w^r * prod(w - a_i)`` kept in factored form.

    Evaluating at a root ``a_i`` gives exactly ``0.0``.
    """

    var: str
    c: complex
    r: int
    roots: tuple = ()

    def __call__(self, w):
        w = complex(w)
        val = self.c * w ** self.r
        for a in self.roots:
            val *= w - a
        return val

    def degrees(self):
        return list(range(self.r, self.r + len(self.roots) + 1))

    def expanded(self):
        """Coefficients ``[c_0, c_1, ...]`` of the expanded polynomial."""
        coeffs = [0j] * self.r + [self.c]
        for a in self.roots:
            nxt = [0j] * (len(coeffs) + 1)
            for i, v in enumerate(coeffs):
                nxt[i + 1] += v
                nxt[i] -= a * v
            coeffs = nxt
        return coeffs

    def to_json(self):
        return {
            "kind": "interp",
            "var": self.var,
            "c": [self.c.real, self.c.imag],
            "r": self.r,
            "roots": [[a.real, a.imag] for a in self.roots],
        }

    @classmethod
    def from_json(cls, data):
        return cls(
            data["var"],
            complex(*data["c"]),
            int(data["r"]),
            tuple(complex(*a) for a in data["roots"]),
        )

    def __str__(self):
        factors = [f"({self.c.real:.17g}{self.c.imag:+.17g}j)"]
        if self.r:
            factors.append(self.var if self.r == 1 else f"{self.var}^{self.r}")
        factors += [f"({self.var} - ({a.real:.17g}{a.imag:+.17g}j))" for a in self.roots]
        return "*".join(factors)


Multiplier = Union[None, RingElem, InterpPoly]


@dataclass(frozen=True)
class FlowStep:
    """Flow of ``multiplier * base`` for ``time``; ``multiplier=None`` means 1."""

    base: str
    k: int = 1
    multiplier: Multiplier = None
    time: complex = 0j

    def __post_init__(self):
        base = self.base.upper()
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "time", complex(self.time))
        if base not in ("V", "W", "H"):
            raise ValueError(f"unknown base field {self.base!r}")
        m = self.multiplier
        if m is None:
            return
        if base == "H":
            if not (isinstance(m, RingElem) and m == m.ring.one):
                raise ValueError("H only supports the multiplier 1")
            return
        if isinstance(m, InterpPoly):
            want = "y" if base == "V" else "x"
            if m.var != want:
                raise ValueError(f"numeric multiplier of {base} must be a polynomial in {want}")
            return
        fld = make_named(m.ring, base, self.k)
        if not fld.apply(m).is_zero():
            raise ValueError(f"multiplier {m} is not in the kernel of {base}{self.k}")

    def inverse(self):
        return FlowStep(self.base, self.k, self.multiplier, -self.time)

    def with_time(self, t):
        return FlowStep(self.base, self.k, self.multiplier, t)

    def to_json(self):
        m = self.multiplier
        if m is None:
            mj = "1"
        elif isinstance(m, InterpPoly):
            mj = m.to_json()
        else:
            mj = str(m)
        return {"base": self.base, "k": self.k, "multiplier": mj,
                "time": [self.time.real, self.time.imag]}

    @classmethod
    def from_json(cls, ring, data):
        mj = data.get("multiplier", "1")
        if isinstance(mj, dict):
            m = InterpPoly.from_json(mj)
        elif mj in ("1", 1):
            m = None
        else:
            m = ring.parse(mj)
        return cls(data["base"], int(data.get("k", 1)), m, complex(*data["time"]))


@dataclass
class AutomorphismProgram:
    steps: list = field(default_factory=list)

    def __len__(self):
        return len(self.steps)

    def __add__(self, other):
        return AutomorphismProgram(self.steps + other.steps)

    def inverse(self):
        return AutomorphismProgram([s.inverse() for s in reversed(self.steps)])

    def to_json(self):
        return [s.to_json() for s in self.steps]

    @classmethod
    def from_json(cls, ring, data):
        return cls([FlowStep.from_json(ring, d) for d in data])


# ---------------------------------------------------------------------------
# numeric flows


def _multiplier_value(step, pt):
    m = step.multiplier
    if m is None:
        return 1.0
    if isinstance(m, InterpPoly):
        return m(pt.y if m.var == "y" else pt.x)
    return m.eval_numeric(pt)


def apply_flow(step, pt, p):
    """Image of ``pt`` under the flow of ``step`` on the surface ``xy = p``."""
    if step.base == "H":
        t = step.time
        if t == 0:
            return pt
        out = SurfacePoint.make(p, cmath.exp(-t) * pt.x, cmath.exp(t) * pt.y, pt.z)
    else:
        tau = _multiplier_value(step, pt) * step.time
        if tau == 0:
            return pt
        if step.base == "V":
            a, b = pt.x, pt.y
        else:
            a, b = pt.y, pt.x
        qs = taylor_coeffs(p, pt.z, step.k)
        inc = 0j
        for j in range(len(qs), 0, -1):
            inc = (inc + qs[j - 1] * b ** (j - 1)) * tau
        zs = list(pt.z)
        zs[step.k - 1] = zs[step.k - 1] + b * tau
        a = a + inc
        x, y = (a, b) if step.base == "V" else (b, a)
        out = SurfacePoint.make(p, x, y, tuple(zs))
    if out.residual > BLOWUP_FACTOR * pt.residual + BLOWUP_FLOOR:
        raise ResidualBlowup(f"residual {out.residual:.3e} after {step.base} flow")
    return out


@dataclass
class ReplayLog:
    """Per-step residuals, ``residuals[i][j]`` for step ``i`` and point ``j``."""

    residuals: list

    def max_residual(self):
        return max((r for row in self.residuals for r in row), default=0.0)


def run_program(prog, pts, p):
    """Replay ``prog`` on every point; returns ``(points, ReplayLog)``."""
    cur = list(pts)
    log = []
    for i, step in enumerate(prog.steps):
        try:
            cur = [apply_flow(step, q, p) for q in cur]
        except ResidualBlowup as exc:
            raise ResidualBlowup(f"step {i}: {exc}", step=i) from None
        log.append([q.residual for q in cur])
    return cur, ReplayLog(log)


def commutator_flow_approx(first, second, t, n, pt, p):
    """``n``-fold group commutator with sub-step ``sqrt(t/n)`` approximating the flow of ``[first, second]``.

    ``first`` and ``second`` are base names (``"V"``, ``"W"``, ``"H"``) or FlowSteps
    whose time is ignored.
    """
    if n < 1:
        raise ValueError("n must be positive")
    a = first if isinstance(first, FlowStep) else FlowStep(first)
    b = second if isinstance(second, FlowStep) else FlowStep(second)
    h = cmath.sqrt(complex(t) / n)
    cycle = [a.with_time(h), b.with_time(h), a.with_time(-h), b.with_time(-h)]
    for _ in range(n):
        for step in cycle:
            pt = apply_flow(step, pt, p)
    return pt


# ---------------------------------------------------------------------------
# symbolic exponential


@dataclass(frozen=True)
class FlowImages:
    x: RingElem
    y: RingElem
    z: tuple

    def is_endomorphism(self, ring):
        """``x_img * y_img == p(z_img)`` in the ring extended by the time parameter."""
        return self.x * self.y == ring.p_elem().compose(self.x, self.y, self.z)


def exp_lnd_symbolic(theta, param="t", cap=None):
    """Coordinate images ``g -> sum_k param^k theta^k(g) / k!`` of the flow of an LND."""
    ring = theta.ring
    if param not in ring.params:
        raise ValueError(f"ring has no parameter {param!r}")
    if cap is None:
        cap = 2 * theta.degree() * (ring.p.degree + 1) + 8
    if not is_lnd(theta, cap).nilpotent:
        raise NotLND(f"{theta} is not locally nilpotent within {cap} steps")
    tpar = ring.param(param)

    def image(g):
        total = ring.zero
        term = g
        tk = ring.one
        fact = 1
        for k in range(cap + 1):
            if term.is_zero():
                return total
            total = total + (tk * term).scale(QQ(1, fact))
            term = theta.apply(term)
            tk = tk * tpar
            fact *= k + 1
        raise NotLND(f"series for {g} did not terminate within {cap} terms")

    zs = tuple(image(ring.z(k)) for k in range(1, ring.N + 1))
    return FlowImages(image(ring.x), image(ring.y), zs)

