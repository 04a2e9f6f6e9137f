import h5py
import numpy as np
import pytest

from iwapipe import fileio, iwasawa_algebra
from iwapipe.errors import CutoffBeyondFaithful
from iwapipe.group_models import group_model
from iwapipe.iwasawa_algebra import (AboveCutoff, AlgebraElement, FiltrationKind, FiltrationTag, TruncatedAlgebra,
                                     m_power_member, nu, truncated_algebra)

@pytest.mark.parametrize('case', ['GL2', 'QUAT'])
def test_generator_weights(cfg_gl2, case):
    model = group_model(cfg_gl2.replace(case=case))
    A, B, C = model.generators
    assert nu(AlgebraElement.difference(A), 8) == 1
    assert nu(AlgebraElement.difference(B), 8) == 1
    assert nu(AlgebraElement.difference(C), 8) == 2

def test_nu_of_one_and_zero(cfg_gl2):
    model = group_model(cfg_gl2)
    assert nu(AlgebraElement.one(model), 8) == 0
    assert nu(AlgebraElement.zero(model), 8) == AboveCutoff(8)
    assert str(AboveCutoff(8)) == '> 8'

def test_m_power_membership(cfg_gl2):
    C = group_model(cfg_gl2).generators[2]
    x = AlgebraElement.difference(C)
    assert m_power_member(x, 2, 8)
    assert not m_power_member(x, 3, 8)
    with pytest.raises(CutoffBeyondFaithful):
        m_power_member(x, 9, 8)

def test_cutoff_must_stay_below_p_to_the_M(cfg_gl2):
    with pytest.raises(CutoffBeyondFaithful):
        TruncatedAlgebra(group_model(cfg_gl2), 25)
    assert TruncatedAlgebra(group_model(cfg_gl2), 25, faithful=False).cutoff == 25

def test_frobenius_on_group_differences(cfg_gl2):
    model = group_model(cfg_gl2)
    A = model.generators[0]
    assert AlgebraElement.difference(A)**5 == AlgebraElement.difference(A**5)

def test_monomials_expand_to_unit_vectors(cfg_gl2):
    algebra = truncated_algebra(group_model(cfg_gl2), 6)
    for exps in [(0, 0, 0), (1, 0, 0), (0, 2, 1), (2, 1, 1), (0, 0, 3)]:
        assert np.array_equal(algebra.expand_vector(algebra.monomial(exps)), algebra.unit(exps))

@pytest.mark.parametrize('case', ['GL2', 'QUAT'])
def test_expansion_is_multiplicative(cfg_gl2, case, rng):
    model = group_model(cfg_gl2.replace(case=case))
    algebra = truncated_algebra(model, 6)
    for _ in range(5):
        x = AlgebraElement.group(model.random_element(rng)) - AlgebraElement.group(model.random_element(rng))
        y = AlgebraElement.group(model.random_element(rng)) + AlgebraElement.one(model)*2
        product = algebra.mul(algebra.expand_vector(x), algebra.expand_vector(y))
        assert np.array_equal(product, algebra.expand_vector(x*y))

def test_left_matrix_is_left_multiplication(cfg_gl2):
    model = group_model(cfg_gl2)
    algebra = truncated_algebra(model, 6)
    B = AlgebraElement.difference(model.generators[1])
    for exps in [(1, 1, 0), (2, 0, 1), (0, 1, 2)]:
        row = algebra.unit(exps) @ algebra.left_matrix(1)
        assert np.array_equal(row, algebra.expand_vector(B*algebra.monomial(exps)))

def test_in_order_products_need_no_tables(cfg_gl2):
    algebra = truncated_algebra(group_model(cfg_gl2), 6)
    assert np.array_equal(algebra.mono_mul((1, 0, 0), (0, 1, 1)), algebra.unit((1, 1, 1)))

@pytest.mark.parametrize('case', ['GL2', 'QUAT'])
@pytest.mark.parametrize('f', [1, 2])
def test_maxideals_small_cutoff(cfg_gl2, case, f):
    algebra = truncated_algebra(group_model(cfg_gl2.replace(case=case, f=f)), 4)
    result = iwasawa_algebra.check_maxideals(algebra)
    assert result['status'] == 'pass'
    assert result['details']['dims'][0] == algebra.dim

@pytest.mark.slow
@pytest.mark.parametrize('case', ['GL2', 'QUAT'])
def test_maxideals_acceptance(cfg_gl2, case):
    algebra = truncated_algebra(group_model(cfg_gl2.replace(case=case)), 8)
    assert iwasawa_algebra.check_maxideals(algebra)['status'] == 'pass'

def test_quaternion_commutator_formula(cfg_quat):
    result = iwasawa_algebra.check_quaternion_commutator(cfg_quat)
    assert result['status'] == 'pass'
    assert result['details']['values'] == 25

def test_nu_additivity(cfg_gl2, rng):
    algebra = truncated_algebra(group_model(cfg_gl2), 6)
    assert iwasawa_algebra.check_nu_additivity(algebra, rng, 20)['status'] == 'pass'

def test_nu_additivity_without_samples_is_indeterminate(cfg_gl2, rng):
    algebra = truncated_algebra(group_model(cfg_gl2), 6)
    result = iwasawa_algebra.check_nu_additivity(algebra, rng, 0)
    assert result['status'] == 'indeterminate'
    assert result['details']['tested'] == 0

def test_subgroup_support_shows_in_exponents(cfg_gl2, rng):
    assert iwasawa_algebra.check_subgroup_expansion(group_model(cfg_gl2), 1, rng, 6)['status'] == 'pass'

def test_filtration_tags(cfg_gl2):
    with pytest.raises(ValueError):
        FiltrationTag(FiltrationKind.M_ADIC, -1)
    algebra = truncated_algebra(group_model(cfg_gl2), 6)
    assert algebra.span_of_filtration((FiltrationKind.N_RES, -2), 1).shape[0] == algebra.dim
    assert algebra.span_of_filtration((FiltrationKind.N_RES, 2), 1).shape[0] == 0
    assert algebra.span_of_filtration((FiltrationKind.M_ADIC, 6)).shape[0] == len(algebra.indices_of_degree(6))
    with pytest.raises(CutoffBeyondFaithful):
        algebra.span_of_filtration((FiltrationKind.N_INT, 2), 1)

def test_element_json(cfg_gl2, rng):
    model = group_model(cfg_gl2)
    x = AlgebraElement.group(model.random_element(rng))*3 - AlgebraElement.one(model)
    assert AlgebraElement.from_dict(model, x.to_dict()) == x
    assert truncated_algebra(model, 4).expand(x).to_dict()['cutoff'] == 4

def test_tables_are_cached_on_disk(cfg_gl2, tmp_path):
    (tmp_path / 'missing.conf').write_text(f'[cache]\ntables = "{tmp_path / "tables"}"\n')
    model = group_model(cfg_gl2)
    first = TruncatedAlgebra(model, 4)
    L = first.left_matrix(1)
    path = fileio.table_path(cfg_gl2, 4)
    with h5py.File(path, 'r') as f:
        assert 'left_1' in f
    second = TruncatedAlgebra(model, 4)
    assert np.array_equal(second.left_matrix(1), L)
