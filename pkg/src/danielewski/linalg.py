"""Sparse exact linear algebra over Q.

Vectors are dicts ``column -> coefficient`` with int columns; the column order
is the integer order, and the leading entry of a vector is its smallest
column.  Reduction against a basis goes through :mod:`danielewski.kernels`.
"""

from __future__ import annotations

import bisect

from danielewski import kernels
from danielewski.polyparse import QQ


def _normalize(vec):
    lead = min(vec)
    c = vec[lead]
    if c == 1:
        return lead, vec
    inv = QQ(1) / c
    return lead, {k: v * inv for k, v in vec.items()}


class SemiEchelon:
    """Basis with pairwise distinct leading columns, each leading entry 1.

    Every row has no entries left of its pivot, so reducing pivots in
    ascending order is a complete reduction.
    """

    def __init__(self):
        self.rows = {}
        self.pivots = []

    def __len__(self):
        return len(self.pivots)

    def reduce(self, vec):
        return kernels.reduce_vector(vec, self.pivots, self.rows)

    def insert(self, vec):
        """Add ``vec``; returns its reduced remainder (empty dict if dependent)."""
        rem = self.reduce(vec)
        if rem:
            piv, row = _normalize(rem)
            self.rows[piv] = row
            bisect.insort(self.pivots, piv)
            return row
        return rem

    def contains(self, vec):
        return not self.reduce(vec)

    def count_pivots_from(self, col):
        """Number of pivots at columns ``>= col``."""
        return len(self.pivots) - bisect.bisect_left(self.pivots, col)

    def rref(self):
        """Fully reduced rows, sorted by pivot (canonical for the span)."""
        rows = {p: dict(r) for p, r in self.rows.items()}
        pivs = sorted(rows)
        for i in range(len(pivs) - 1, -1, -1):
            piv = pivs[i]
            prow = rows[piv]
            for j in range(i):
                other = rows[pivs[j]]
                c = other.get(piv)
                if c is None:
                    continue
                for col, v in prow.items():
                    nv = other.get(col, 0) - c * v
                    if nv != 0:
                        other[col] = nv
                    else:
                        other.pop(col, None)
        return [rows[p] for p in pivs]


def rref(vectors):
    ech = SemiEchelon()
    for v in vectors:
        if v:
            ech.insert(v)
    return ech.rref()


def nullspace(equations, unknowns):
    """Basis of ``{u : <eq, u> = 0 for all eq}`` over the given unknown columns.

    ``equations`` are sparse rows over the unknown columns.  The basis is
    returned in canonical form: one vector per free column, with a 1 there.
    """
    rows = rref(equations)
    pivot_of = {min(r): r for r in rows}
    free = [u for u in sorted(unknowns) if u not in pivot_of]
    basis = []
    for f in free:
        vec = {f: QQ(1)}
        for piv, r in pivot_of.items():
            c = r.get(f)
            if c is not None:
                vec[piv] = -c
        basis.append(vec)
    return basis


def solve(columns, rhs):
    """Coefficients ``c`` with ``sum c_i * columns[i] == rhs``, or ``None``.

    Free variables are set to zero, so the answer is deterministic.
    """
    n = len(columns)
    # augmented rows: equation per coordinate, unknown i at column i, rhs at column n
    eqs = {}
    for i, col in enumerate(columns):
        for coord, v in col.items():
            eqs.setdefault(coord, {})[i] = v
    for coord, v in rhs.items():
        eqs.setdefault(coord, {})[n] = -v
    rows = rref(list(eqs.values()))
    sol = [QQ(0)] * n
    for r in rows:
        piv = min(r)
        if piv == n:
            return None
        sol[piv] = -r.get(n, QQ(0))
    return sol
