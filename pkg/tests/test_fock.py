import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from qosclab.fock import (
    FockSpace,
    IndexSet,
    apply_discrete_automorphism,
    apply_osc_automorphism,
    build_generators,
    build_vacuum,
    check_osc_relations,
)
from qosclab.graded_linalg import ParityProfile, qint


def one_mode(M=2, N=0, cutoff=3, I=(1,)):
    return FockSpace(IndexSet(ParityProfile(M, N), frozenset(I)), cutoff)


def test_vacuum_single_boson():
    assert_allclose(build_vacuum(one_mode()), [1, 0, 0, 0])


def test_dimension_formula():
    s = FockSpace(IndexSet(ParityProfile(2, 2), frozenset({1})), 4)
    # modes (1,2) bosonic, (1,3) and (1,4) fermionic
    assert s.dim == 5 * 2 * 2
    assert [m.fermionic for m in s.modes] == [False, True, True]


def test_index_set_rejects_out_of_range():
    with pytest.raises(ValueError):
        IndexSet(ParityProfile(2, 0), frozenset({3}))


def test_cutoff_minimum():
    with pytest.raises(ValueError):
        one_mode(cutoff=1)


def test_annihilator_matrix_elements():
    q = 0.6
    g = build_generators(one_mode(cutoff=4), q)
    c = g.c[(1, 2)].dense()
    for n in range(1, 5):
        assert c[n - 1, n] == pytest.approx(qint(n, q))
    v = build_vacuum(g.space)
    assert np.allclose(g.n[(1, 2)].dense() @ v, 0)
    assert np.allclose(c @ v, 0)
    assert_allclose(g.cdag[(1, 2)].dense() @ v, np.eye(5)[1])


def test_fermion_nilpotent():
    g = build_generators(one_mode(1, 1), 0.4)
    c = g.c[(1, 2)].dense()
    assert np.allclose(c @ c, 0)
    assert g.c[(1, 2)].parity == 1


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([(2, 0), (1, 1), (2, 1), (1, 2), (0, 3)]),
       st.floats(0.3, 0.8), st.floats(0, 6.28))
def test_oscillator_relations(profile, r, phi):
    prof = ParityProfile(*profile)
    q = r * np.exp(1j * phi)
    g = build_generators(FockSpace(IndexSet(prof, frozenset({1})), 5), q)
    for k, v in check_osc_relations(g).items():
        assert v < 1e-12, k


def test_osc_automorphism_preserves_relations():
    g = build_generators(FockSpace(IndexSet(ParityProfile(3, 0), frozenset({1})), 5), 0.5)
    k1, k2 = (1, 2), (1, 3)
    t = apply_osc_automorphism(g, {k1: 2.0, k2: 0.5j}, {(k1, k2): 0.7, (k2, k1): 0.7})
    assert max(check_osc_relations(t).values()) < 1e-12


def test_osc_automorphism_rejects_asymmetric_eta():
    g = build_generators(FockSpace(IndexSet(ParityProfile(3, 0), frozenset({1})), 3), 0.5)
    with pytest.raises(ValueError):
        apply_osc_automorphism(g, {}, {((1, 2), (1, 3)): 1.0})


def test_discrete_automorphism_shifts_number():
    g = build_generators(one_mode(cutoff=3), 0.5)
    t = apply_discrete_automorphism(g, (1, 2))
    assert_allclose(t.n[(1, 2)].diag(), [-1, -2, -3, -4])
    f = apply_discrete_automorphism(build_generators(one_mode(1, 1), 0.5), (1, 2))
    assert_allclose(f.n[(1, 2)].diag(), [1, 0])
