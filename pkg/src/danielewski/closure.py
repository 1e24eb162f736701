"""Degree-filtered Lie closure with an independent linear-algebra oracle.

Vector fields of coefficient degree ``<= D`` are encoded as sparse rational
vectors over the columns ``(monomial, component)``.  Columns are ordered by
*descending* degree, so in a semi-echelon basis (leading entry = smallest
column) the fields of degree ``<= D_target`` are spanned exactly by the rows
whose pivot lies in the low-degree suffix.  That makes the slice dimension a
pivot count.

The oracle never brackets anything: the full tangent space at degree ``D``
is the nullspace of the tangency system ``a*y + b*x - sum c_k p_k = 0`` and
the volume-preserving subspace is cut out of it by the divergence.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from danielewski import linalg
from danielewski.polyparse import QQ
from danielewski.ring import RingElem
from danielewski.vfield import VectorField, bracket, divergence, make_named


class FieldCoords:
    """Fixed enumeration of the coordinates of fields with coefficient degree ``<= D``."""

    def __init__(self, ring, D):
        self.ring = ring
        self.D = D
        self.ncomp = 2 + ring.N
        monos = sorted(ring.normal_monomials(D), key=lambda k: (-ring.key_degree(k), -k))
        self.columns = [(k, comp) for k in monos for comp in range(self.ncomp)]
        self.index = {c: i for i, c in enumerate(self.columns)}
        self.degree_of = [ring.key_degree(k) for k, _ in self.columns]

    def __len__(self):
        return len(self.columns)

    def first_column_of_degree_at_most(self, D):
        """Smallest column index whose monomial degree is ``<= D``."""
        for i, deg in enumerate(self.degree_of):
            if deg <= D:
                return i
        return len(self.columns)

    def encode(self, fld):
        vec = {}
        for comp, u in enumerate(fld.components()):
            for k, c in u.terms.items():
                vec[self.index[(k, comp)]] = c
        return vec

    def decode(self, vec):
        r = self.ring
        parts = [{} for _ in range(self.ncomp)]
        for col, c in vec.items():
            k, comp = self.columns[col]
            parts[comp][k] = c
        comps = [RingElem(r, t) for t in parts]
        return VectorField(comps[0], comps[1], tuple(comps[2:]))


@dataclass
class FieldBasis:
    """Canonical (reduced echelon) basis of a space of fields of degree ``<= D``."""

    coords: FieldCoords
    rows: list

    @classmethod
    def from_vectors(cls, coords, vectors):
        return cls(coords, linalg.rref(vectors))

    @property
    def D(self):
        return self.coords.D

    @property
    def dim(self):
        return len(self.rows)

    def fields(self):
        return [self.coords.decode(r) for r in self.rows]

    def contains(self, fld):
        ech = linalg.SemiEchelon()
        for r in self.rows:
            ech.insert(r)
        return fld.degree() <= self.D and ech.contains(self.coords.encode(fld))


def tangent_space_basis(ring, D):
    """All tangent fields with coefficient degree ``<= D`` (exact nullspace)."""
    coords = FieldCoords(ring, D)
    dps = [ring.y, ring.x] + [-ring.dp(k) for k in range(1, ring.N + 1)]
    equations = {}
    for col, (k, comp) in enumerate(coords.columns):
        contrib = RingElem(ring, {k: QQ(1)}) * dps[comp]
        for out_key, c in contrib.terms.items():
            equations.setdefault(out_key, {})[col] = c
    basis = linalg.nullspace(list(equations.values()), range(len(coords)))
    return FieldBasis.from_vectors(coords, basis)


def volume_subspace(basis):
    """Divergence-free part of ``basis`` (N = 1)."""
    fields = basis.fields()
    equations = {}
    for i, f in enumerate(fields):
        for k, c in divergence(f).terms.items():
            equations.setdefault(k, {})[i] = c
    combos = linalg.nullspace(list(equations.values()), range(len(fields)))
    vectors = []
    for combo in combos:
        vec = {}
        for i, c in combo.items():
            for col, v in basis.rows[i].items():
                vec[col] = vec.get(col, 0) + c * v
        vectors.append({col: v for col, v in vec.items() if v != 0})
    return FieldBasis.from_vectors(basis.coords, vectors)


# ---------------------------------------------------------------------------
# saturation


class _Saturator:
    """Incremental bracket closure inside the fields of degree ``<= D_work``."""

    def __init__(self, ring, D_work):
        self.coords = FieldCoords(ring, D_work)
        self.D_work = D_work
        self.ech = linalg.SemiEchelon()
        self.fields = []
        self.degrees = []

    def add(self, fld):
        deg = fld.degree()
        if deg < 0 or deg > self.D_work:
            return False
        if not self.ech.insert(self.coords.encode(fld)):
            return False
        self.fields.append(fld)
        self.degrees.append(deg)
        return True

    def run(self, generators, max_rounds, done):
        """Saturate; returns ``(dim_history, stopped_early)``."""
        for g in generators:
            self.add(g)
        history = [len(self.fields)]
        if done():
            return history, True
        start = 0
        for _ in range(max_rounds):
            end = len(self.fields)
            if start == end:
                break
            pairs = [(i, j) for i in range(start, end) for j in range(i)]
            pairs.sort(key=lambda ij: (self.degrees[ij[0]] + self.degrees[ij[1]], ij))
            for i, j in pairs:
                if self.add(bracket(self.fields[i], self.fields[j])) and done():
                    history.append(len(self.fields))
                    return history, True
            start = end
            history.append(len(self.fields))
            if history[-1] == history[-2]:
                break
        return history, False

    def slice_dim(self, D):
        return self.ech.count_pivots_from(self.coords.first_column_of_degree_at_most(D))


@dataclass
class ClosureReport:
    generators: list
    D_target: int
    D_work: int
    dim_history: list
    slice_dim: int
    target_dim: int
    verdict: str
    volume: bool = False
    missing_basis: list = dc_field(default=None)

    def to_json(self):
        out = {
            "generators": self.generators,
            "D_target": self.D_target,
            "D_work": self.D_work,
            "volume": self.volume,
            "dim_history": self.dim_history,
            "slice_dim": self.slice_dim,
            "target_dim": self.target_dim,
            "verdict": self.verdict,
        }
        if self.missing_basis is not None:
            out["missing_basis"] = [f.to_json() for f in self.missing_basis]
        return out


def default_d_work(ring, D_target):
    return 2 * D_target + ring.p.degree


def lie_closure(generators, D_target, D_work=None, max_rounds=50, volume=False, labels=None):
    """Saturate the span of ``generators`` and compare its ``<= D_target`` slice with the oracle.

    Saturation stops early once the slice reaches the oracle dimension, since
    the slice can never exceed it.
    """
    ring = generators[0].ring
    if D_work is None:
        D_work = default_d_work(ring, D_target)
    if D_target > D_work:
        raise ValueError("D_target must not exceed D_work")
    oracle = tangent_space_basis(ring, D_target)
    if volume:
        oracle = volume_subspace(oracle)
    sat = _Saturator(ring, D_work)
    history, _ = sat.run(generators, max_rounds, lambda: sat.slice_dim(D_target) >= oracle.dim)
    sdim = sat.slice_dim(D_target)
    verdict = "Generated" if sdim == oracle.dim else "Inconclusive"
    missing = None
    if verdict != "Generated":
        missing = _missing_basis(sat, oracle)
    return ClosureReport(
        generators=labels if labels is not None else [str(g) for g in generators],
        D_target=D_target,
        D_work=D_work,
        dim_history=history,
        slice_dim=sdim,
        target_dim=oracle.dim,
        verdict=verdict,
        volume=volume,
        missing_basis=missing,
    )


def _missing_basis(sat, oracle):
    """Oracle fields not in the saturated span, reduced to a basis of the quotient."""
    quotient = linalg.SemiEchelon()
    out = []
    for fld in oracle.fields():
        rem = sat.ech.reduce(sat.coords.encode(fld))
        if rem and quotient.insert(rem):
            out.append(fld)
    return out


def membership(theta, generators, D_work, max_rounds=50):
    """True iff ``theta`` lies in the saturated span (``False`` = not found at this truncation)."""
    ring = theta.ring
    if theta.degree() > D_work:
        return False
    sat = _Saturator(ring, D_work)
    target = sat.coords.encode(theta)
    sat.run(generators, max_rounds, lambda: sat.ech.contains(target))
    return sat.ech.contains(target)


def saturated_span(generators, D_work, max_rounds=50):
    """Full saturated span as a :class:`FieldBasis` (no early stop)."""
    sat = _Saturator(generators[0].ring, D_work)
    sat.run(generators, max_rounds, lambda: False)
    return FieldBasis.from_vectors(sat.coords, list(sat.ech.rows.values()))


# ---------------------------------------------------------------------------
# generator presets


def _z(ring):
    return ring.z()


def preset_full6(ring):
    V, W, H = (make_named(ring, n) for n in "VWH")
    z = _z(ring)
    fields = [V, W, H, z * V, z * W, z * H]
    return fields, ["V", "W", "H", "z*V", "z*W", "z*H"]


def volume_ranges(d, variant):
    """``(n_max, m_max)`` of the volume generator list; ``variant`` is ``intro`` or ``body``."""
    if variant == "intro":
        return max(1, d - 2), max(2, d - 2)
    if variant == "body":
        return max(1, d - 3), max(2, d - 3)
    raise ValueError(f"unknown volume range variant {variant!r}")


def preset_volume(ring, variant):
    V, W, H = (make_named(ring, n) for n in "VWH")
    n_max, m_max = volume_ranges(ring.p.degree, variant)
    x, y, z = ring.x, ring.y, _z(ring)
    fields, labels = [], []
    for n in range(n_max + 1):
        fields += [y ** n * V, x ** n * W]
        labels += [f"y^{n}*V", f"x^{n}*W"]
    for m in range(m_max + 1):
        fields.append(z ** m * H)
        labels.append(f"z^{m}*H")
    return fields, labels


def preset_lnd4(ring):
    fields, labels = [], []
    for k in range(1, ring.N + 1):
        V, W = make_named(ring, "V", k), make_named(ring, "W", k)
        fields += [V, W, ring.y * V, ring.x * W]
        suffix = "" if ring.N == 1 else str(k)
        labels += [f"V{suffix}", f"W{suffix}", f"y*V{suffix}", f"x*W{suffix}"]
    return fields, labels


def preset(ring, name):
    if name == "full6":
        return preset_full6(ring)
    if name == "lnd4":
        return preset_lnd4(ring)
    if name in ("volume", "volume-intro"):
        return preset_volume(ring, "intro")
    if name == "volume-body":
        return preset_volume(ring, "body")
    raise ValueError(f"unknown generator set {name!r}")

