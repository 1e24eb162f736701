import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from danielewski import linalg
from danielewski.polyparse import QQ

matrices = st.integers(1, 5).flatmap(
    lambda rows: st.integers(1, 6).flatmap(
        lambda cols: st.lists(
            st.lists(st.integers(-3, 3), min_size=cols, max_size=cols), min_size=rows, max_size=rows
        )
    )
)


def _sparse(row):
    return {i: QQ(v) for i, v in enumerate(row) if v}


@given(matrices)
def test_rank_and_rref_match_sympy(rows):
    M = sp.Matrix(rows)
    ours = linalg.rref([_sparse(r) for r in rows])
    ref, _ = M.rref()
    expected = [
        {i: QQ(int(sp.fraction(v)[0]), int(sp.fraction(v)[1])) for i, v in enumerate(ref.row(k)) if v}
        for k in range(M.rank())
    ]
    assert ours == expected


@given(matrices)
def test_nullspace_annihilates(rows):
    ncols = len(rows[0])
    basis = linalg.nullspace([_sparse(r) for r in rows], range(ncols))
    assert len(basis) == ncols - sp.Matrix(rows).rank()
    for vec in basis:
        for r in rows:
            assert sum(QQ(r[c]) * v for c, v in vec.items()) == 0


@given(matrices, st.lists(st.integers(-3, 3), min_size=6, max_size=6))
def test_solve(rows, coeffs):
    ncols = len(rows[0])
    columns = [{i: QQ(r[j]) for i, r in enumerate(rows) if r[j]} for j in range(ncols)]
    rhs = {}
    for j, c in enumerate(coeffs[:ncols]):
        for i, v in columns[j].items():
            rhs[i] = rhs.get(i, 0) + c * v
    rhs = {k: v for k, v in rhs.items() if v}
    sol = linalg.solve(columns, rhs)
    assert sol is not None
    back = {}
    for j, c in enumerate(sol):
        for i, v in columns[j].items():
            back[i] = back.get(i, 0) + c * v
    assert {k: v for k, v in back.items() if v} == rhs


def test_solve_infeasible():
    assert linalg.solve([{0: QQ(1)}], {1: QQ(1)}) is None


def test_semi_echelon_slice_count():
    ech = linalg.SemiEchelon()
    ech.insert({0: QQ(1), 3: QQ(2)})
    ech.insert({2: QQ(1)})
    ech.insert({0: QQ(2), 3: QQ(4)})
    assert len(ech) == 2
    assert ech.count_pivots_from(1) == 1
    assert ech.contains({2: QQ(5)})
