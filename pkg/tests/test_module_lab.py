import numpy as np
import pytest

from iwapipe import linalg, module_lab
from iwapipe.errors import ConfigMismatch, RelationCheckFailed
from iwapipe.graded_structures import build_JN, ideal_spec
from iwapipe.iwasawa_algebra import FiltrationKind
from iwapipe.module_lab import FiniteModule, build_module, dualize, grade, min_annihilator_exponent

@pytest.fixture
def small_quotient(cfg_small, rng):
    return build_module(cfg_small, 'quotient', rng=rng, max_dim=6)

@pytest.fixture
def quotient(cfg_gl2, rng):
    return build_module(cfg_gl2, 'quotient', rng=rng, max_dim=12)

def test_trivial_module(cfg_gl2, rng):
    trivial = build_module(cfg_gl2, 'trivial')
    assert trivial.dim == 1
    assert grade(trivial, FiltrationKind.M_ADIC).piece_dims == [1]
    report = min_annihilator_exponent(grade(trivial, FiltrationKind.M_ADIC), ideal_spec(cfg_gl2, 'c'))
    assert report.ell_min == 1
    assert report.to_dict()['ell_min'] == 1

def test_regular_module(cfg_small):
    regular = build_module(cfg_small, 'regular')
    assert regular.dim == 125
    pieces = grade(regular, FiltrationKind.M_ADIC).piece_dims
    assert sum(pieces) == 125
    assert pieces[:2] == [1, 2]

@pytest.mark.slow
def test_regular_module_relations(cfg_small, rng):
    result = module_lab.check_relations(build_module(cfg_small, 'regular'), rng)
    assert result['status'] == 'pass'
    assert result['details']['method'] == 'generators times all elements'

def test_quotient_modules(small_quotient, rng):
    assert 1 <= small_quotient.dim <= 6
    result = module_lab.check_relations(small_quotient, rng)
    assert result['status'] == 'pass'
    assert result['details']['method'] == 'all pairs'

def test_corpus_is_seeded(cfg_small):
    first = module_lab.module_corpus(cfg_small, 2, np.random.default_rng(3), max_dim=6)
    second = module_lab.module_corpus(cfg_small, 2, np.random.default_rng(3), max_dim=6)
    assert [m.to_dict() for m in first] == [m.to_dict() for m in second]

def test_dual_module(small_quotient, rng):
    dual = dualize(small_quotient)
    assert dual.dim == small_quotient.dim
    assert module_lab.check_relations(dual, rng)['status'] == 'pass'
    assert module_lab.find_isomorphism(small_quotient, dualize(dual), rng) is not None

def test_isomorphic_after_basis_change(small_quotient, rng):
    P = linalg.random_invertible(small_quotient.field, small_quotient.dim, rng)
    X = module_lab.find_isomorphism(small_quotient, small_quotient.transform(P), rng)
    assert X is not None and linalg.is_invertible(X)

def test_module_json(cfg_small):
    trivial = build_module(cfg_small, 'trivial')
    loaded = FiniteModule.from_dict(trivial.to_dict(), cfg_small)
    assert loaded.provenance == 'loaded'
    assert loaded.to_dict() == trivial.to_dict()

def test_module_json_rejects_other_configurations(cfg_small, cfg_gl2):
    data = build_module(cfg_small, 'trivial').to_dict()
    with pytest.raises(ConfigMismatch):
        FiniteModule.from_dict(data, cfg_gl2)

def test_explicit_matrices_must_be_a_representation(cfg_small):
    data = dict(dim=2, generators=[[[2, 0], [0, 1]], [[1, 0], [0, 1]], [[1, 0], [0, 1]]])
    with pytest.raises(RelationCheckFailed):
        FiniteModule.from_dict(data, cfg_small)
    data['generators'][0] = [[0, 0], [0, 0]]
    with pytest.raises(ValueError):
        FiniteModule.from_dict(data, cfg_small)
    data['generators'][0] = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    with pytest.raises(ValueError):
        FiniteModule.from_dict(data, cfg_small)

def test_unknown_source(cfg_small):
    with pytest.raises(ValueError):
        build_module(cfg_small, 'induced')

@pytest.mark.parametrize('kind', list(FiltrationKind))
def test_gradings_cover_the_module(quotient, kind):
    graded = grade(quotient, kind, 1)
    assert sum(graded.piece_dims) == quotient.dim
    assert graded.piece_dims[0] >= 1

def test_restricted_grading_needs_only_the_subgroup(quotient):
    full = grade(quotient, FiltrationKind.N_RES, 1)
    restricted = grade(quotient.restrict(1), FiltrationKind.N_RES)
    assert full.piece_dims == restricted.piece_dims
    with pytest.raises(ValueError):
        grade(quotient.restrict(1), FiltrationKind.M_ADIC)

def test_subgroup_exponent_on_restricted_grading(cfg_gl2, quotient):
    JN = build_JN(ideal_spec(cfg_gl2, 'c'), 1, cfg_gl2.p)
    report = min_annihilator_exponent(grade(quotient, FiltrationKind.N_RES, 1), JN)
    assert report.ell_min >= 1
    assert report.kind == 'N_RES'

@pytest.mark.parametrize('name', ['c', 'a', 'mixed'])
def test_exponent_transfer(cfg_gl2, quotient, name, rng):
    result = module_lab.check_exponent_transfer(quotient, ideal_spec(cfg_gl2, name), 1, rng)
    assert result['status'] == 'pass'
    exponents = result['details']['exponents']
    assert exponents['JN_gr'] <= exponents['J_gr']

def test_restriction_determinism(cfg_gl2, quotient, rng):
    result = module_lab.restriction_determinism(quotient, ideal_spec(cfg_gl2, 'c'), 1, rng, changes=2)
    assert result['status'] == 'pass'
