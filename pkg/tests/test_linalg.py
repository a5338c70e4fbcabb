from fractions import Fraction

from hypothesis import given, settings, strategies as st

from hilali.linalg import RowEchelon, exact_rank, integral_row, nullspace, rref
from oracles import rank_by_minors

entries = st.one_of(st.integers(-3, 3), st.fractions(min_value=-2, max_value=2, max_denominator=4))


@st.composite
def matrices(draw, max_size=6):
    r = draw(st.integers(1, max_size))
    c = draw(st.integers(1, max_size))
    rows = draw(st.lists(st.lists(entries, min_size=c, max_size=c), min_size=r, max_size=r))
    # low-rank cases are the interesting ones: append combinations of earlier rows
    if r >= 2 and draw(st.booleans()):
        a, b = draw(st.integers(-2, 2)), draw(st.integers(-2, 2))
        rows.append([a * x + b * y for x, y in zip(rows[0], rows[1])])
    return [[Fraction(x) for x in row] for row in rows]


def as_sparse(matrix):
    return [{j: v for j, v in enumerate(row) if v} for row in matrix]


@settings(max_examples=200, deadline=None)
@given(matrices())
def test_rank_matches_minor_oracle(mat):
    assert exact_rank(as_sparse(mat)) == rank_by_minors(mat)


@settings(max_examples=200, deadline=None)
@given(matrices())
def test_dense_rref_agrees_with_sparse(mat):
    _, pivots = rref(mat, len(mat[0]))
    assert len(pivots) == exact_rank(as_sparse(mat))


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_nullspace_is_annihilated(mat):
    ncols = len(mat[0])
    basis = nullspace(mat, ncols)
    assert len(basis) == ncols - rank_by_minors(mat)
    for v in basis:
        for row in mat:
            assert sum(a * b for a, b in zip(row, v)) == 0


def test_dependent_row_rejected():
    ech = RowEchelon()
    assert ech.add({0: 1, 1: 2})
    assert ech.add({1: 1})
    assert not ech.add({0: 3, 1: 1})
    assert ech.rank == 2


def test_integral_row_is_primitive():
    assert integral_row({0: Fraction(1, 2), 3: Fraction(-3, 4)}) == {0: 2, 3: -3}


def test_big_entries_stay_exact():
    big = 10**40 + 7
    mat = [{0: big, 1: 1}, {0: big * 3, 1: 3}, {0: 1, 1: big}]
    assert exact_rank(mat) == 2
