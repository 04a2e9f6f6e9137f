from fractions import Fraction

import pytest

from iwapipe import group_models
from iwapipe.errors import LevelTooDeep, NotInGroup
from iwapipe.group_models import group_model

def test_unit_oracle_digits(cfg_gl2):
    model = group_model(cfg_gl2)
    g = model.element_from_word('B_0 A_0')
    assert list(model.digit_decompose(g)) == [21, 6, 24]
    assert model.compose([21, 6, 24]) == g

@pytest.mark.parametrize('case', ['GL2', 'QUAT'])
def test_identity_has_zero_digits(cfg_gl2, case):
    model = group_model(cfg_gl2.replace(case=case))
    assert list(model.digit_decompose(model.identity)) == [0, 0, 0]
    assert model.element_from_word('').is_identity()

@pytest.mark.parametrize('case', ['GL2', 'QUAT'])
def test_generator_omegas(cfg_gl2, case):
    model = group_model(cfg_gl2.replace(case=case))
    A, B, C = model.generators
    assert model.omega(A) == Fraction(1, 2)
    assert model.omega(B) == Fraction(1, 2)
    assert model.omega(C) == 1
    assert model.omega(A**5) == Fraction(3, 2)
    assert model.order == 5**6

@pytest.mark.parametrize('case', ['GL2', 'QUAT'])
def test_commutator_omega_is_superadditive(cfg_gl2, case):
    model = group_model(cfg_gl2.replace(case=case))
    A, B, _ = model.generators
    commutator = model.commutator(A, B)
    assert not commutator.is_identity()
    assert model.omega(commutator) >= 1

def test_subgroup_membership(cfg_gl2):
    model = group_model(cfg_gl2)
    A = model.generators[0]
    assert model.in_subgroup(A**5, 1)
    assert not model.in_subgroup(A, 1)
    with pytest.raises(LevelTooDeep):
        model.in_subgroup(A, 2)
    basis = model.subgroup_basis(1)
    assert [model.omega(g) for g in basis] == [Fraction(3, 2), Fraction(3, 2), 2]

def test_p_root(cfg_gl2):
    model = group_model(cfg_gl2)
    x = model.element_from_word('A_0^5 C_0^10')
    y = model.p_root(x)
    assert y is not None and y**5 == x
    assert model.p_root(model.generators[0]) is None

def test_normalize_rejects_matrices_outside_the_group(cfg_gl2):
    model = group_model(cfg_gl2)
    with pytest.raises(NotInGroup):
        model.normalize(((2, 0), (0, 1)))

def test_unknown_generator_name(cfg_gl2):
    with pytest.raises(ValueError):
        group_model(cfg_gl2).element_from_word('D_0')

@pytest.mark.parametrize('case', ['GL2', 'QUAT'])
def test_element_json(cfg_gl2, case, rng):
    model = group_model(cfg_gl2.replace(case=case))
    g = model.random_element(rng)
    data = model.element_to_dict(g)
    assert data['case'] == case
    assert model.element_from_dict(data) == g

@pytest.mark.parametrize('case', ['GL2', 'QUAT'])
@pytest.mark.parametrize('f', [1, 2])
@pytest.mark.parametrize('check', [group_models.check_round_trip, group_models.check_p_valuation,
                                   group_models.check_omega_consistency, group_models.check_saturation])
def test_model_checks_pass(cfg_gl2, case, f, check, rng):
    model = group_model(cfg_gl2.replace(case=case, f=f))
    assert check(model, rng, 30)['status'] == 'pass'

def test_subgroup_membership_check(cfg_gl2, rng):
    assert group_models.check_subgroup_membership(group_model(cfg_gl2), 1, rng, 30)['status'] == 'pass'

def test_quaternion_checks(cfg_quat, rng):
    model = group_model(cfg_quat)
    assert group_models.check_quaternion_power_image(model, rng, 30)['status'] == 'pass'
    assert group_models.check_retraction_equivalence(model, rng, 10)['status'] == 'pass'

def test_models_are_cached(cfg_gl2):
    assert group_model(cfg_gl2) is group_model(cfg_gl2.replace(N=None, seed=7))
