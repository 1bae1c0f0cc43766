import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from qosclab.fock import FockSpace, IndexSet
from qosclab.graded_linalg import ParityProfile
from qosclab.loperators import UnsupportedIndexSet, supported_index_sets
from qosclab.tq import (
    ConvergenceError,
    LatticeConfig,
    TwistParams,
    WeightVector,
    boundary_operator_fock,
    check_kr_limit,
    check_qq_relations,
    check_verma_factorization,
    commutator_residual,
    drinfeld_polynomial,
    lattice_Q,
    lattice_T_fundamental,
    normalization_Z,
    normalization_Z_trace,
    one_site_Q,
    one_site_T_verma,
    schur_function,
    verma_character_coefficients,
    verma_character_series,
    verma_supercharacter,
)


def I_(M, N, *I):
    return IndexSet(ParityProfile(M, N), frozenset(I))


def separated_twist(rng, n, step=1e-3):
    return TwistParams(tuple(step ** k * (1 + 0.2 * rng.random()) * np.exp(2j * np.pi * rng.random())
                             for k in range(n)))


# -- boundary and normalization ----------------------------------------------

def test_boundary_trivial_twist():
    s = I_(2, 1, 1)
    D = boundary_operator_fock(s, FockSpace(s, 4), TwistParams((2.0, 2.0, 2.0)))
    assert_allclose(D.diag(), 1)


def test_boundary_single_boson_geometric():
    s = I_(2, 0, 1)
    D = boundary_operator_fock(s, FockSpace(s, 3), TwistParams((1.0, 0.25)))
    assert_allclose(D.diag(), [1, 0.25, 0.25 ** 2, 0.25 ** 3])


def test_boundary_fermion():
    s = I_(1, 1, 1)
    assert_allclose(boundary_operator_fock(s, FockSpace(s, 3), TwistParams((1.0, 0.3))).diag(),
                    [1, 0.3])


def test_normalization_examples():
    tw = TwistParams((1.0, 0.125))
    assert normalization_Z(I_(2, 0, 1), tw) == pytest.approx(8 / 7)
    assert normalization_Z(I_(2, 0), tw) == 1
    assert normalization_Z(I_(2, 0, 1, 2), tw) == 1
    assert normalization_Z(I_(1, 1, 1), TwistParams((1.0, 0.3))) == pytest.approx(0.7)


def test_normalization_convergence_error():
    with pytest.raises(ConvergenceError):
        normalization_Z(I_(2, 0, 2), TwistParams((1.0, 0.125)))


def test_normalization_trace_geometric():
    s = I_(2, 0, 1)
    val, bound = normalization_Z_trace(s, FockSpace(s, 12), TwistParams((1.0, 0.125)))
    assert abs(val - 8 / 7) < 1e-10
    assert abs(val - 8 / 7) <= bound


def test_normalization_trace_fermionic_exact():
    s = I_(1, 2, 1)
    tw = TwistParams((1.0, 0.4j, -0.2))
    val, bound = normalization_Z_trace(s, FockSpace(s, 3), tw)
    assert bound == 0
    assert val == pytest.approx(normalization_Z(s, tw))


@settings(max_examples=20, deadline=None)
@given(st.floats(0.05, 0.6), st.floats(0.05, 0.6), st.floats(0, 6.28), st.integers(4, 14))
def test_normalization_trace_within_bound(r2, r3, phi, cutoff):
    s = I_(3, 0, 1)
    tw = TwistParams((1.0, r2 * np.exp(1j * phi), r3))
    val, bound = normalization_Z_trace(s, FockSpace(s, cutoff), tw)
    # the bound is tight for real ratios, so allow for rounding
    assert abs(val - normalization_Z(s, tw)) <= bound + 1e-13


# -- one-site forms and traces -----------------------------------------------

def test_one_site_Q_examples():
    tw = TwistParams((1.0,))
    assert_allclose(one_site_Q(I_(1, 0, 1), 0.3, 1.5, tw, 0.5), [[1 - 0.2]])
    Q = one_site_Q(I_(2, 1, 1), 0.3, 1.5, TwistParams((1.0, 0.2, 0.1)), 0.5)
    assert Q[1, 1] == Q[2, 2] == 1
    assert np.count_nonzero(Q - np.diag(np.diag(Q))) == 0


def test_one_site_Q_at_zero_is_identity(small_profile):
    tw = TwistParams(tuple(0.5 ** k for k in range(small_profile.n)))
    for s in supported_index_sets(small_profile):
        assert_allclose(one_site_Q(s, 0.0, 1.3, tw, 0.4), np.eye(small_profile.n))


def test_one_site_Q_single_ratio():
    q, z = 0.5, (1.0, 0.2)
    Q = one_site_Q(I_(2, 0, 1), 0.3, 1.5, TwistParams(z), q)
    z1 = z[0] * q  # row-1 dressing
    ratio = (1 - z[1] / z1) / (1 - z[1] * q ** 2 / z1)
    assert Q[0, 0] == pytest.approx(1 - 0.2 * ratio)


def test_lattice_Q_empty_is_identity():
    r = lattice_Q(I_(2, 1), 0.7, LatticeConfig((1.2, 0.8)), TwistParams((1.0, 0.1, 0.01)), 0.5)
    assert_allclose(r.dense(), np.eye(9))


def test_lattice_Q_matches_one_site(small_profile, rng):
    for s in supported_index_sets(small_profile):
        tw = separated_twist(rng, small_profile.n)
        q, x, xi = 0.55 * np.exp(0.4j), 0.8 - 0.3j, 1.4 + 0.2j
        r = lattice_Q(s, x, LatticeConfig((xi,)), tw, q)
        assert np.max(np.abs(r.dense() - one_site_Q(s, x, xi, tw, q))) < max(1e-8, r.truncation_bound)


def test_lattice_Q_rejects_unsupported():
    with pytest.raises(UnsupportedIndexSet):
        lattice_Q(I_(2, 2, 1, 2), 0.5, LatticeConfig((1.0,)), TwistParams((1, .1, .01, .001)), 0.5)


def test_lattice_Q_rejects_unit_ratio():
    with pytest.raises(ConvergenceError):
        lattice_Q(I_(2, 0, 1), 0.5, LatticeConfig((1.0,)), TwistParams((1.0, 1.0)), 0.5)


def test_lattice_Q_weight_preserving_two_sites():
    prof = ParityProfile(2, 0)
    tw = TwistParams((1.0, 1e-3))
    r = lattice_Q(IndexSet(prof, frozenset({1})), 0.6, LatticeConfig((1.1, 0.9j)), tw, 0.5)
    Q = r.dense()
    w = [sum(1 for s in state if s == 0) for state in itertools.product(range(2), repeat=2)]
    for a in range(4):
        for b in range(4):
            if w[a] != w[b]:
                assert abs(Q[a, b]) < 1e-14


def test_lattice_T_one_site_direct_sum():
    prof = ParityProfile(2, 1)
    q, x, xi = 0.5 + 0.1j, 0.8, 1.5
    z = TwistParams((1.0, 0.4, 0.2j))
    T = lattice_T_fundamental(prof, q, x, LatticeConfig((xi,)), z).dense()
    from qosclab.rmatrix import build_ps_rmatrix
    R = build_ps_rmatrix(prof, q, x, xi).matrix.dense().reshape(3, 3, 3, 3)
    sgn = [1, 1, -1]
    direct = sum(sgn[a] * z.z[a] * R[a, :, a, :] for a in range(3))
    assert_allclose(T, direct, atol=1e-14)


def test_commutativity_two_sites(rng):
    prof = ParityProfile(2, 1)
    tw = separated_twist(rng, 3)
    cfg = LatticeConfig((1.2 - 0.3j, 0.7 + 0.6j))
    q = 0.5 * np.exp(0.5j)
    Tx = lattice_T_fundamental(prof, q, 0.9, cfg, tw).dense()
    Ty = lattice_T_fundamental(prof, q, 1.7j, cfg, tw).dense()
    assert commutator_residual(Tx, Ty) < 1e-10
    Qs = [lattice_Q(s, 1.3 + 0.2j, cfg, tw, q).dense() for s in supported_index_sets(prof)]
    for A in Qs:
        assert commutator_residual(Tx, A) < 1e-8
        for B in Qs:
            assert commutator_residual(A, B) < 1e-8


# -- QQ relations ------------------------------------------------------------

@pytest.mark.parametrize("M,N,I,i,j,name", [(2, 0, (), 1, 2, "qq-1"), (1, 1, (), 1, 2, "qq-2"),
                                            (2, 1, (3,), 1, 2, "qq-1")])
def test_qq_one_site_examples(M, N, I, i, j, name):
    tw = TwistParams((1.0, 0.3 + 0.1j, -0.2)[:M + N])
    r = check_qq_relations(ParityProfile(M, N), I, i, j, 0.7 + 0.2j, tw, 0.45 * np.exp(0.2j),
                           LatticeConfig((1.3,)))
    assert r.relation == name
    assert r.residual < 1e-12


def test_qq_sensitive_to_shift():
    # swapping the spectral shifts must break the relation
    prof = ParityProfile(2, 0)
    tw, q, x, xi = TwistParams((1.0, 0.3)), 0.5, 0.7, 1.3
    s = lambda *I: IndexSet(prof, frozenset(I))  # noqa: E731
    Q = lambda I, y: one_site_Q(s(*I), y, xi, tw, q)  # noqa: E731
    z1, z2 = np.diag([1.0 * q, 1.0]), np.diag([0.3, 0.3 * q])
    wrong = (z1 - z2) @ Q((), x * q) @ Q((1, 2), x / q) - (
        z1 @ Q((1,), x * q) @ Q((2,), x / q) - z2 @ Q((1,), x / q) @ Q((2,), x * q))
    assert np.max(np.abs(wrong)) > 1e-3


def test_qq_rejects_bad_indices():
    with pytest.raises(ValueError):
        check_qq_relations(ParityProfile(2, 0), (1,), 1, 2, 0.5, TwistParams((1, .1)), 0.5,
                           LatticeConfig((1.0,)))


def test_qq_two_sites_traced(rng):
    prof = ParityProfile(2, 1)
    tw = separated_twist(rng, 3)
    r = check_qq_relations(prof, (), 1, 3, 0.8 + 0.1j, tw, 0.5 * np.exp(0.3j),
                           LatticeConfig((1.1, 0.6 - 0.5j)))
    assert r.relation == "qq-2"
    assert r.residual < 1e-7


# -- characters --------------------------------------------------------------

def test_verma_examples():
    lam = WeightVector((0.3, -1.2))
    z = TwistParams((1.1, 0.4j))
    exp = z[1] ** (lam[1] + 1) * z[2] ** lam[2] / (z[1] - z[2])
    assert verma_supercharacter(ParityProfile(2, 0), lam, z) == pytest.approx(exp)
    z1 = TwistParams((0.7,))
    assert verma_supercharacter(ParityProfile(1, 0), WeightVector((2.5,)), z1) == pytest.approx(0.7 ** 2.5)


def test_verma_gl11_two_terms():
    prof = ParityProfile(1, 1)
    z = TwistParams((1.0, 0.4))
    c = verma_character_series(prof, z, 5)
    assert np.count_nonzero(np.abs(c) > 0) == 2
    assert c[1] == pytest.approx(-0.4)
    assert verma_supercharacter(prof, WeightVector((0, 0)), z, normalized=True) == pytest.approx(0.6)


def test_verma_series_degree_zero():
    assert_allclose(verma_character_series(ParityProfile(2, 1), TwistParams((1, .5, .2)), 0), [1])


def test_verma_series_geometric():
    c = verma_character_series(ParityProfile(2, 0), TwistParams((1.0, 0.3)), 6)
    assert_allclose(c, 0.3 ** np.arange(7))


@pytest.mark.parametrize("M,N", [(2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (1, 2), (0, 3), (2, 2)])
def test_verma_closed_form_coefficients(M, N, rng):
    n = M + N
    z = TwistParams(tuple(0.6 ** k * np.exp(2j * np.pi * rng.random()) for k in range(n)))
    prof = ParityProfile(M, N)
    assert_allclose(verma_character_coefficients(prof, z, 8), verma_character_series(prof, z, 8),
                    atol=1e-10)


def test_superdenominator_collision():
    with pytest.raises(ZeroDivisionError):
        verma_supercharacter(ParityProfile(2, 0), WeightVector((0, 0)), TwistParams((0.5, 0.5)))


def test_one_site_T_verma_trivial_weight():
    z = TwistParams((0.8,))
    T = one_site_T_verma(ParityProfile(1, 0), WeightVector((0,)), 0.3, 1.5, z, 0.5)
    assert T[0, 0] == pytest.approx(1 * (1 - 0.2))


@pytest.mark.parametrize("M,N", [(1, 0), (2, 0), (1, 1), (2, 1), (1, 2), (0, 3)])
def test_verma_factorization(M, N, rng):
    prof = ParityProfile(M, N)
    for _ in range(5):
        lam = WeightVector(tuple(rng.normal(size=M + N) + 1j * rng.normal(size=M + N)))
        z = TwistParams(tuple(0.5 + rng.random() + 1j * rng.random() for _ in range(M + N)))
        assert check_verma_factorization(prof, lam, 0.6 + 0.2j, 1.4, z, 0.55 * np.exp(0.3j)) < 1e-12


@pytest.mark.parametrize("lam,expected", [((1,), 1.25), ((2,), 1.0 + 0.25 + 0.0625)])
def test_schur_examples(lam, expected):
    # (1,0) -> z1+z2, (2,0) -> z1^2+z1 z2+z2^2 at z=(1, 0.25)
    assert schur_function(list(lam) + [0], [1.0, 0.25]) == pytest.approx(expected)
    assert schur_function([], [0.3, 0.4]) == pytest.approx(1.0)


def test_schur_errors():
    with pytest.raises(ZeroDivisionError):
        schur_function([1, 0], [0.5, 0.5])
    with pytest.raises(ValueError):
        schur_function([0, 1], [0.5, 0.4])


def test_kr_limit_gl2():
    z = TwistParams((1.0, 0.35 * np.exp(0.4j)))
    r = check_kr_limit(I_(2, 0, 1), z, list(range(1, 13)))
    assert abs(r.values[-1] - 1 / (1 - z[2] / z[1])) < 1e-5
    assert r.ratio_deviation < 0.1
    assert all(b < a for a, b in zip(r.errors, r.errors[1:]))


def test_kr_limit_full_set_exact():
    r = check_kr_limit(I_(3, 0, 1, 2, 3), TwistParams((1.0, 0.5, 0.2)), [1, 2, 3])
    assert max(r.errors) < 1e-12


def test_kr_limit_errors():
    with pytest.raises(ValueError):
        check_kr_limit(I_(1, 1, 1), TwistParams((1.0, 0.5)), [1])
    with pytest.raises(ConvergenceError):
        check_kr_limit(I_(2, 0, 2), TwistParams((1.0, 0.5)), [1])


def test_drinfeld_examples():
    prof = ParityProfile(2, 0)
    assert_allclose(drinfeld_polynomial(prof, WeightVector((1, 0)), 1, 0.5), [1, -1])
    assert_allclose(drinfeld_polynomial(prof, WeightVector((0.4, 0.4)), 1, 0.5), [1])
    p = drinfeld_polynomial(ParityProfile(2, 1), WeightVector((3, 1, 2)), 2, 0.5)
    assert len(p) - 1 == 3
    with pytest.raises(ValueError):
        drinfeld_polynomial(prof, WeightVector((0.5, 0)), 1, 0.5)
