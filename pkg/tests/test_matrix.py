import pytest
from hypothesis import given
from hypothesis import strategies as st

from strategies import contexts, invertible_matrices
from tdscale.errors import ParseError, SingularMatrixError
from tdscale.field import FieldContext
from tdscale.matrix import Matrix, format_matrix, parse_matrix

L2 = FieldContext.from_spec("laurent:2")
P3 = FieldContext.from_spec("padic:3")


def test_parse_and_format():
    M = parse_matrix(L2, "[[X^-1, 1], [0, (1)/(1 + X)]]")
    assert M[0, 0] == L2("X^-1") and M[1, 1] == L2("(1)/(1 + X)")
    assert parse_matrix(L2, format_matrix(M)) == M


@pytest.mark.parametrize("text", ["[[1,2],[3]]", "[1,2]", "[[1,2],[3,4]", "[[1,2] x [3,4]]", "[]"])
def test_parse_rejects_malformed(text):
    with pytest.raises(ParseError):
        parse_matrix(P3, text)


def test_parse_error_points_into_entry():
    with pytest.raises(ParseError) as exc:
        parse_matrix(L2, "[[X^^2]]")
    assert exc.value.position == 4


def test_singular_inverse_raises():
    for ctx in (L2, P3):
        M = parse_matrix(ctx, "[[1,2],[2,4]]")
        with pytest.raises(SingularMatrixError):
            M.inverse()


def test_transpose_trace_identity():
    M = parse_matrix(P3, "[[1,2,0],[0,1/3,5],[7,0,1]]")
    assert M.T.T == M
    assert M.trace() == P3("7/3")
    assert M @ Matrix.identity(P3, 3) == M


@given(invertible_matrices())
def test_inverse_is_two_sided(M):
    I = Matrix.identity(M.ctx, M.n)
    Minv = M.inverse()
    assert M @ Minv == I
    assert Minv @ M == I


@given(invertible_matrices(sizes=(1, 2, 3)))
def test_fast_det_agrees_with_elimination(M):
    fast = M.det()
    slow, _ = M._eliminate()
    assert fast == slow


@given(contexts, st.data())
def test_det_is_multiplicative(ctx, data):
    A = data.draw(invertible_matrices(ctx, sizes=(3,)))
    B = data.draw(invertible_matrices(ctx, sizes=(3,)))
    assert (A @ B).det() == A.det() * B.det()


@given(contexts)
def test_power_and_negative_power(ctx):
    M = Matrix.diag(ctx, [ctx.uniformizer, ctx.one])
    assert M ** 3 == Matrix.diag(ctx, [ctx.uniformizer ** 3, ctx.one])
    assert M ** -2 == Matrix.diag(ctx, [ctx.uniformizer ** -2, ctx.one])
    assert M ** 0 == Matrix.identity(ctx, 2)
