import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from qosclab.graded_linalg import (
    GradedSpace,
    ParityProfile,
    SparseOperator,
    Words,
    embed_factor,
    embed_term,
    gcomm,
    graded_kron,
    matrix_unit,
    partial_supertrace,
    qint,
    relative_residual,
    supertrace,
    wcomm,
    word_residual,
)


def kron_oracle(A, pa_cols, B, pb):
    """entry((rA,rB),(cA,cB)) = A B (-1)^{p(B) parity(cA)} by explicit loops."""
    da, db = A.shape[0], B.shape[0]
    out = np.zeros((da * db, da * db), dtype=complex)
    for ra in range(da):
        for ca in range(da):
            for rb in range(db):
                for cb in range(db):
                    s = -1 if pb * pa_cols[ca] % 2 else 1
                    out[ra * db + rb, ca * db + cb] = s * A[ra, ca] * B[rb, cb]
    return out


def test_profile_parities():
    p = ParityProfile(2, 1)
    assert [p.p(i) for i in p.indices] == [0, 0, 1]
    assert p.sign(3) == -1 and p.sign(0) == -1
    with pytest.raises(ValueError):
        ParityProfile(0, 0)


def test_cartan_matrix_gl21():
    p = ParityProfile(2, 1)
    assert p.cartan(1, 1) == 2 and p.cartan(1, 2) == -1
    assert p.cartan(2, 2) == 0  # odd simple root is isotropic


def test_graded_kron_against_loops(rng):
    V = GradedSpace((0, 1, 1))
    W = GradedSpace((0, 1))
    a, b = matrix_unit(V, 2, 1), matrix_unit(W, 1, 2)
    got = graded_kron(a, b).dense()
    assert_allclose(got, kron_oracle(a.dense(), V.parities, b.dense(), 1))


def test_koszul_product_rule():
    V = GradedSpace((0, 1))
    A, B, C, D = (matrix_unit(V, *ij) for ij in [(1, 2), (2, 1), (2, 1), (2, 2)])
    lhs = graded_kron(A, B) @ graded_kron(C, D)
    sign = (-1) ** (B.parity * C.parity)
    rhs = graded_kron(A @ C, B @ D) * sign
    assert_allclose(lhs.dense(), rhs.dense())


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=1, max_size=3),
       st.integers(1, 3), st.integers(1, 3), st.integers(1, 3), st.integers(1, 3))
def test_kron_associative(par, i, j, k, l):
    V = GradedSpace(tuple(par))
    i, j, k, l = (min(t, V.dim) for t in (i, j, k, l))
    A, B, C = matrix_unit(V, i, j), matrix_unit(V, j, k), matrix_unit(V, k, l)
    left = graded_kron(graded_kron(A, B), C)
    right = graded_kron(A, graded_kron(B, C))
    assert_allclose(left.dense(), right.dense())


def test_parity_is_validated():
    V = GradedSpace((0, 1))
    with pytest.raises(ValueError):
        SparseOperator.from_matrix(np.array([[0, 1], [0, 0]]), (V,), parity=0)


def test_supertrace_signs():
    V = GradedSpace((0, 1, 1))
    assert supertrace(SparseOperator.identity((V,))) == -1


def test_partial_supertrace_of_product():
    V, W = GradedSpace((0, 1)), GradedSpace((0, 1, 0))
    a = SparseOperator.diagonal([2.0, 5.0], (V,))
    b = matrix_unit(W, 3, 1) + matrix_unit(W, 2, 2)
    out = partial_supertrace(graded_kron(a, b.parts()[0]) + graded_kron(a, b.parts()[1]), 1)
    assert_allclose(out.dense(), (2.0 - 5.0) * b.dense())


def test_embed_factor_matches_kron():
    V = GradedSpace((0, 1))
    e = matrix_unit(V, 1, 2)
    emb = embed_factor(e, 1, (V, V))
    assert_allclose(emb.dense(), graded_kron(SparseOperator.identity((V,)), e).dense())


def test_embed_term_fills_identities():
    V = GradedSpace((0, 1))
    x, y = matrix_unit(V, 1, 2), matrix_unit(V, 2, 1)
    one = SparseOperator.identity((V,))
    t = embed_term((x, y), (0, 2), (V, V, V))
    assert_allclose(t.dense(), graded_kron(graded_kron(x, one), y).dense())


def test_gcomm_graded():
    V = GradedSpace((0, 1))
    x, y = matrix_unit(V, 1, 2), matrix_unit(V, 2, 1)
    assert_allclose(gcomm(x, y).dense(), np.eye(2))


def test_qint_values():
    q = 0.5
    assert qint(0, q) == 0
    assert qint(1, q) == pytest.approx(1)
    assert qint(2, q) == pytest.approx(q + 1 / q)


def test_relative_residual_scales():
    V = GradedSpace.even(1)
    a = SparseOperator.diagonal([1e6], (V,))
    b = SparseOperator.diagonal([1e6 + 1], (V,))
    assert relative_residual(a, b) == pytest.approx(1e-6, rel=1e-3)


def test_words_residual_ignores_cancellation():
    V = GradedSpace.even(1)
    big = SparseOperator.diagonal([1e8], (V,))
    w = Words.of(big) - Words.of(big)
    assert word_residual(w, Words.of(SparseOperator.zero((V,))), (V,)) == 0
    assert wcomm(big, big).total((V,)).is_zero()
