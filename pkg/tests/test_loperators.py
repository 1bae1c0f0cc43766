import numpy as np
import pytest
from numpy.testing import assert_allclose

from qosclab.fock import FockSpace, IndexSet, apply_osc_automorphism, build_generators
from qosclab.graded_linalg import ParityProfile
from qosclab.loperators import (
    UnsupportedIndexSet,
    apply_diagonal_twist,
    build_L_pair,
    check_appendix_a,
    check_contracted_relations,
    check_intertwining,
    check_rll_affine,
    check_rll_finite,
    check_structure,
    classify_index_set,
    rho_I,
    supported_index_sets,
    vacuum_highest_weight,
)
from conftest import random_point, random_q

EXACT = {"upper L zero", "lower Lbar zero", "Lbar zero on complement", "diagonal exponent sum",
         "odd nilpotency", "f-zero"}


def I_(M, N, *I):
    return IndexSet(ParityProfile(M, N), frozenset(I))


@pytest.mark.parametrize("I,case", [((), "empty"), ((1, 2, 3), "full"), ((2,), "single_i"),
                                    ((1, 3), "co_single_a")])
def test_classify(I, case):
    assert classify_index_set(I_(2, 1, *I)) == case


def test_intermediate_rejected():
    with pytest.raises(UnsupportedIndexSet, match="not provided"):
        build_L_pair(I_(2, 2, 1, 2))
    assert len(supported_index_sets(ParityProfile(2, 2))) == 2 + 4 + 4


def test_empty_set_is_identity():
    pair = build_L_pair(I_(2, 1), q=0.5)
    for i in range(1, 4):
        assert_allclose(pair.l(i, i).dense(), np.eye(1))
        assert pair.lbar(i, i).is_zero()


def test_full_set_diagonal_vacuum():
    pair = build_L_pair(I_(2, 0, 1, 2), q=0.5)
    assert_allclose(pair.l(1, 1).dense(), np.eye(1))
    assert_allclose(pair.lbar(2, 2).dense(), np.eye(1))


def test_rll_affine_random(small_profile, rng):
    for s in supported_index_sets(small_profile):
        pair = build_L_pair(s, q=random_q(rng), cutoff=6)
        assert check_rll_affine(pair, random_point(rng), random_point(rng)) < 1e-10, s.label
        assert max(check_rll_finite(pair).values()) < 1e-10


def test_rll_detects_wrong_sign(rng):
    pair = build_L_pair(I_(2, 1, 1), q=0.5 + 0.1j)
    bad = apply_diagonal_twist(pair, [1, 1, 1], [1, 1, 1])
    L = dict(bad.L)
    L[(2, 1)] = L[(2, 1)] * -1.5
    from qosclab.loperators import LOperatorPair
    broken = LOperatorPair(bad.index_set, bad.space, bad.q, bad.gens, bad.case, L, bad.Lbar,
                           bad.diag_exp, bad.diag_exp_bar)
    assert check_rll_affine(broken, 0.7, 1.9) > 1e-3


@pytest.mark.parametrize("M,N", [(2, 1), (1, 2), (3, 0), (0, 3)])
def test_entrywise_relations_and_structure(M, N):
    for s in supported_index_sets(ParityProfile(M, N)):
        pair = build_L_pair(s, q=0.55 * np.exp(0.7j))
        for k, v in {**check_appendix_a(pair), **check_structure(pair)}.items():
            assert v == 0 if k in EXACT else v < 1e-10, (s.label, k, v)


@pytest.mark.parametrize("M,N", [(2, 1), (1, 2), (1, 1), (3, 0), (0, 3)])
def test_contracted_relations(M, N):
    for s in supported_index_sets(ParityProfile(M, N)):
        pair = build_L_pair(s, q=0.45 * np.exp(0.4j))
        for k, v in check_contracted_relations(pair, 1.3 - 0.5j).items():
            assert v == 0 if k in EXACT else v < 1e-10, (s.label, k, v)


def test_ef_contracted_branch_values():
    # i in complement, i+1 in I: [e_i, f_i] = q^{h_i}/(q - q^{-1})
    pair = build_L_pair(I_(2, 0, 2), q=0.5)
    rho = rho_I(pair, 1.4)
    lhs = (rho.e[1] @ rho.f[1] - rho.f[1] @ rho.e[1]).dense()
    q = 0.5
    cols = pair.space.interior(2)  # away from the truncation edge
    assert_allclose(lhs[:, cols], (rho.qh(1).dense() / (q - 1 / q))[:, cols], atol=1e-10)


def test_quartic_contracted_serre_21():
    pair = build_L_pair(I_(2, 1, 2, 3), q=0.6 + 0.2j)
    res = check_contracted_relations(pair, 0.9)
    quartic = {k: v for k, v in res.items() if "quartic" in k}
    assert quartic and max(quartic.values()) < 1e-10


@pytest.mark.parametrize("M,N", [(2, 0), (2, 1), (1, 2), (3, 0), (1, 1)])
def test_intertwining(M, N):
    for s in supported_index_sets(ParityProfile(M, N)):
        pair = build_L_pair(s, q=0.5 * np.exp(0.3j))
        r = check_intertwining(pair, 0.8 + 0.3j, 1.6 - 0.2j)
        for k, v in r.items():
            if k != "f-intertwining trivial branches":
                assert v < 1e-10, (s.label, k, v)


def test_intertwining_trivial_branches_counted():
    r = check_intertwining(build_L_pair(I_(3, 0, 1), q=0.5), 0.8, 1.7)
    assert r["f-intertwining trivial branches"] >= 1


@pytest.mark.parametrize("I,expected", [((1,), -0.25), ((), 1.0), ((1, 2, 3), 1.0)])
def test_vacuum_weights(I, expected):
    x = 0.8
    w = vacuum_highest_weight(build_L_pair(I_(2, 1, *I), q=0.5), x)
    assert w.ratios[0] == pytest.approx(expected)
    assert max(w.residuals.values()) < 1e-12


def test_automorphism_covariance():
    s = I_(3, 0, 1)
    g = build_generators(FockSpace(s, 6), 0.5 + 0.2j)
    k1, k2 = (1, 2), (1, 3)
    t = apply_osc_automorphism(g, {k1: 1.7, k2: -0.4j}, {(k1, k2): 0.3, (k2, k1): 0.3})
    pair = build_L_pair(s, q=g.q, gens=t)
    assert check_rll_affine(pair, 0.9, 1.8) < 1e-10


def test_diagonal_twist_keeps_rll():
    pair = build_L_pair(I_(2, 1, 1), q=0.5 + 0.1j)
    tw = apply_diagonal_twist(pair, [1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    assert check_rll_affine(tw, 0.7, 1.3) < 1e-10
