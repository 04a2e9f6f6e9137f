import numpy as np
import pytest

from iwapipe import graded_structures
from iwapipe.errors import CutoffBeyondFaithful, NonHomogeneousInput
from iwapipe.graded_structures import (IdealSpec, Term, build_JN, graded_ring, hilbert_oracle, ideal_spec,
                                       polynomial_class, tau_rewrite, tau_split, tau_vector)
from iwapipe.group_models import group_model
from iwapipe.iwasawa_algebra import AboveCutoff, truncated_algebra
from iwapipe.padic_core import PrimeConfig

def test_hilbert_oracles():
    assert hilbert_oracle(1, 6) == [1, 2, 4, 6, 9, 12, 16]
    assert hilbert_oracle(1, 6, quotient_by_c=True) == [1, 2, 3, 4, 5, 6, 7]
    assert hilbert_oracle(2, 1) == [1, 4]

@pytest.mark.parametrize('case', ['GL2', 'QUAT'])
@pytest.mark.parametrize('f, cutoff', [(1, 6), (2, 4)])
def test_graded_dimensions(cfg_gl2, case, f, cutoff):
    ring = graded_ring(group_model(cfg_gl2.replace(case=case, f=f)), cutoff)
    assert ring.hilbert_dims() == hilbert_oracle(f, cutoff)
    assert ring.hilbert_dims(quotient_by_c=True) == hilbert_oracle(f, cutoff, quotient_by_c=True)

@pytest.mark.parametrize('case', ['GL2', 'QUAT'])
def test_commutators_of_generators(cfg_gl2, case):
    ring = graded_ring(group_model(cfg_gl2.replace(case=case)), 6)
    a, b, c = ring.a(0), ring.b(0), ring.c(0)
    bracket = ring.commutator_class(a, b)
    assert not bracket.is_zero()
    nonzero = np.flatnonzero(bracket.coords)
    assert [tuple(ring.basis(2)[i]) for i in nonzero] == [(0, 0, 1)]
    assert ring.commutator_class(a, a).is_zero()
    assert ring.commutator_class(c, a).is_zero()
    assert ring.commutator_class(c, b).is_zero()

@pytest.mark.parametrize('case', ['GL2', 'QUAT'])
def test_centrality(cfg_gl2, case):
    ring = graded_ring(group_model(cfg_gl2.replace(case=case)), 8)
    a, b = ring.a(0), ring.b(0)
    assert ring.commutator_class(ring.power(a, 5), b).is_zero()
    assert ring.commutator_class(ring.power(b, 5), a).is_zero()
    assert graded_structures.check_centrality(ring, ring.c(0))
    assert not graded_structures.check_centrality(ring, a)

def test_power_commutator_identity(cfg_gl2):
    ring = graded_ring(group_model(cfg_gl2), 8)
    for i in range(2):
        for l in [1, 2, 3, 5]:
            for x in ring.degree_one():
                assert graded_structures.check_power_commutator_identity(ring, i, x, l)

def test_subring_commutative(cfg_gl2):
    ring = graded_ring(group_model(cfg_gl2), 12)
    result = graded_structures.check_subring_commutative(ring, 1)
    assert result['status'] == 'pass'
    assert result['details']['pairs'] == 1

def test_subring_commutative_below_the_first_pair(cfg_gl2):
    result = graded_structures.check_subring_commutative(graded_ring(group_model(cfg_gl2), 8), 1)
    assert result['status'] == 'indeterminate'
    assert result['details'] == dict(pairs=0, beyond_cutoff=1)

def test_regular_sequence(cfg_gl2):
    assert graded_structures.check_regular_sequence(graded_ring(group_model(cfg_gl2), 6))['status'] == 'pass'

def test_degree_beyond_cutoff(cfg_gl2):
    ring = graded_ring(group_model(cfg_gl2), 4)
    with pytest.raises(CutoffBeyondFaithful):
        ring.power(ring.a(0), 5)

def test_graded_scalars(cfg_gl2):
    ring = graded_ring(group_model(cfg_gl2), 4)
    a = ring.a(0)
    assert (a*5).is_zero()
    assert a*6 == a
    assert a*ring.b(0) == ring.mul(a, ring.b(0))

def test_build_JN():
    J = graded_structures.a_ideal(1)
    JN = build_JN(J, 1, 5)
    assert JN.f_tilde == [[Term((5,), (0,), 1)]]
    assert JN.polynomials()[-1] == [(1, (0, 0, 5))]
    assert build_JN(graded_structures.c_ideal(1), 1, 5).polynomials() == [[(1, (0, 0, 5))]]

def test_build_JN_twists_coefficients():
    cfg = PrimeConfig(p=5, f=2, M=2)
    alpha = cfg.field.primitive_element
    J = IdealSpec(2, [[Term((1, 0), (1, 0), int(alpha))]])
    (term,), = build_JN(J, 1, 5).f_tilde
    assert term.m == (5, 0) and term.n == (5, 0)
    assert term.coeff == int(alpha**5)
    assert term.coeff != int(alpha)

def test_non_homogeneous_ideals_are_homogenized():
    J = IdealSpec(1, [[Term((1,), (0,), 1), Term((2,), (0,), 1)]])
    assert not J.homogeneous
    H = J.homogenize()
    assert H.homogeneous and len(H.f_gens) == 2
    with pytest.raises(NonHomogeneousInput):
        build_JN(J, 1, 5)

def test_polynomial_class_rejects_mixed_degrees(cfg_gl2):
    ring = graded_ring(group_model(cfg_gl2), 4)
    with pytest.raises(NonHomogeneousInput):
        polynomial_class(ring, [Term((1,), (0,), 1), Term((1,), (1,), 1)])

def test_ideal_json(cfg_gl2):
    J = graded_structures.mixed_ideal(cfg_gl2)
    loaded = ideal_spec(cfg_gl2, J.to_dict(cfg_gl2.p))
    assert loaded.f_gens == J.f_gens
    with pytest.raises(ValueError):
        ideal_spec(cfg_gl2, 'b')

@pytest.mark.parametrize('name', ['c', 'a', 'mixed'])
def test_jn_containment(cfg_gl2, name):
    ring = graded_ring(group_model(cfg_gl2), 12)
    assert graded_structures.check_jn_containment(ring, ideal_spec(cfg_gl2, name), 1)['status'] == 'pass'

def test_tau_example(cfg_gl2):
    algebra = truncated_algebra(group_model(cfg_gl2), 10)
    assert tau_split((2, 6, 0), 1, 5) == ((0, 5, 0), (2, 1, 0))
    tau = tau_vector(algebra, (2, 6, 0), 1)
    assert algebra.nu(tau) == 8
    difference = algebra.nu(tau - algebra.unit((2, 6, 0)))
    assert isinstance(difference, AboveCutoff) or difference >= 9
    assert np.array_equal(algebra.expand_vector(tau_rewrite(algebra, (2, 6, 0), 1)), tau)

def test_tau_is_identity_below_p_to_the_N(cfg_gl2):
    algebra = truncated_algebra(group_model(cfg_gl2), 8)
    assert np.array_equal(tau_vector(algebra, (2, 1, 2), 1), algebra.unit((2, 1, 2)))

@pytest.mark.parametrize('k', [0, 1])
def test_sandwich(cfg_gl2, k, rng):
    algebra = truncated_algebra(group_model(cfg_gl2), 10)
    result = graded_structures.check_sandwich(algebra, k, 1, rng, 20, transcripts=10)
    assert result['status'] == 'pass'

def test_sandwich_needs_the_cutoff(cfg_gl2, rng):
    algebra = truncated_algebra(group_model(cfg_gl2), 8)
    with pytest.raises(CutoffBeyondFaithful):
        graded_structures.check_sandwich(algebra, 2, 1, rng, 1)

@pytest.mark.slow
def test_sandwich_acceptance(cfg_gl2, rng):
    algebra = truncated_algebra(group_model(cfg_gl2), 15)
    for k in range(4):
        assert graded_structures.check_sandwich(algebra, k, 1, rng, 200, transcripts=50)['status'] == 'pass'

def test_pigeonhole_c_ideal(cfg_gl2, rng):
    ring = graded_ring(group_model(cfg_gl2), 10)
    assert graded_structures.check_pigeonhole(ring, ideal_spec(cfg_gl2, 'c'), 1, rng, 5)['status'] == 'pass'

@pytest.mark.slow
@pytest.mark.parametrize('name', ['a', 'mixed'])
def test_pigeonhole(cfg_gl2, name, rng):
    ring = graded_ring(group_model(cfg_gl2), 20)
    assert graded_structures.check_pigeonhole(ring, ideal_spec(cfg_gl2, name), 1, rng, 20)['status'] == 'pass'

def test_pigeonhole_with_every_product_beyond_the_cutoff(cfg_gl2, rng):
    ring = graded_ring(group_model(cfg_gl2), 10)
    result = graded_structures.check_pigeonhole(ring, ideal_spec(cfg_gl2, 'a'), 1, rng, 3)
    assert result['details']['tested'] == 0
    assert result['status'] == 'indeterminate'
