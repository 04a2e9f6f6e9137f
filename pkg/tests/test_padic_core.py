import itertools

import numpy as np
import pytest

from iwapipe.errors import ConfigError, InputNotUnitOne, LevelTooDeep
from iwapipe.padic_core import (Case, PrimeConfig, QuaternionInt, UnramifiedInt, base_ring, fourth_root,
                                hensel_sqrt, quad_ring, teichmuller)

def test_teichmuller_of_two_mod_25(cfg_gl2):
    assert teichmuller(2, cfg_gl2).coeffs == (7,)

def test_hensel_square_roots_mod_25(cfg_gl2):
    ring = base_ring(cfg_gl2)
    assert hensel_sqrt(ring(21)).coeffs == (11,)
    assert hensel_sqrt(ring(6)).coeffs == (16,)

def test_hensel_rejects_units_not_one_mod_p(cfg_gl2):
    ring = base_ring(cfg_gl2)
    with pytest.raises(InputNotUnitOne):
        hensel_sqrt(ring(2))

def test_fourth_root(cfg_gl2):
    ring = base_ring(cfg_gl2)
    u = ring(11)
    assert fourth_root(u)**4 == u

@pytest.mark.parametrize('f', [1, 2])
def test_teichmuller_properties(f):
    cfg = PrimeConfig(p=5, f=f, M=3)
    field = cfg.field
    lifts = {a: teichmuller(field(a), cfg) for a in range(1, field.order)}
    for a, ta in lifts.items():
        assert ta**cfg.q == ta
        assert ta.residue() == field(a)
    for a, b in itertools.product(lifts, repeat=2):
        assert teichmuller(field(a)*field(b), cfg) == lifts[a]*lifts[b]

def test_frobenius_is_an_automorphism_of_order_f():
    cfg = PrimeConfig(p=5, f=2, M=3)
    ring = base_ring(cfg)
    rng = np.random.default_rng(0)
    for _ in range(20):
        x, y = ring.random(rng), ring.random(rng)
        assert (x*y).frobenius() == x.frobenius()*y.frobenius()
        assert x.frobenius().frobenius() == x

@pytest.mark.parametrize('f', [1, 2])
def test_quadratic_frobenius_is_an_involution_fixing_the_base(f):
    cfg = PrimeConfig(p=5, f=f, M=2, case='QUAT')
    base, ring = base_ring(cfg), quad_ring(cfg)
    rng = np.random.default_rng(3)
    for _ in range(100):
        x, y = ring.random(rng), ring.random(rng)
        assert x.frobenius().frobenius() == x
        assert (x*y).frobenius() == x.frobenius()*y.frobenius()
        assert (x + y).frobenius() == x.frobenius() + y.frobenius()
        assert ring.embed_base(base.random(rng)).in_base()
    assert not ring.gen.in_base()
    assert ring.gen.frobenius() == ring.gen**(5**f)

def test_valuation_is_additive():
    ring = base_ring(PrimeConfig(p=7, f=2, M=4))
    rng = np.random.default_rng(4)
    for i, j in itertools.product(range(3), repeat=2):
        x = ring(7**i)*ring.random(rng, unit_one=True)
        y = ring(7**j)*ring.random(rng, unit_one=True)
        assert (x*y).valuation() == x.valuation() + y.valuation() == i + j
    assert (ring(49)*ring(49)).valuation() == 4

def test_valuation_and_division():
    ring = base_ring(PrimeConfig(p=7, f=1, M=3))
    x = ring(49*3)
    assert x.valuation() == 2
    assert x.divide_by_p(2) == ring(3)
    assert ring(0).valuation() == 3
    with pytest.raises(ValueError):
        ring(5).divide_by_p()

def test_inverse_in_degree_two():
    ring = base_ring(PrimeConfig(p=5, f=2, M=2))
    rng = np.random.default_rng(1)
    x = ring.random(rng, unit_one=True)
    assert x*x.inverse() == ring.one

def test_element_json_codec():
    ring = base_ring(PrimeConfig(p=5, f=2, M=2))
    x = ring((3, 17))
    assert UnramifiedInt.from_dict(x.to_dict()) == x

def test_quaternion_norm_is_multiplicative():
    cfg = PrimeConfig(p=5, f=1, M=2, case='QUAT')
    ring = quad_ring(cfg)
    rng = np.random.default_rng(2)
    for _ in range(10):
        x = QuaternionInt(ring.random(rng, unit_one=True), ring.random(rng))
        y = QuaternionInt(ring.random(rng, unit_one=True), ring.random(rng))
        assert (x*y).nrd() == x.nrd()*y.nrd()
        assert x*x.inverse() == 1

def test_pi_squared_is_p():
    ring = quad_ring(PrimeConfig(p=5, f=1, M=2, case='QUAT'))
    pi = QuaternionInt.pi(ring)
    assert pi*pi == 5

def test_one_plus_pi_times_one_minus_pi():
    cfg = PrimeConfig(p=5, f=2, M=2, case='QUAT')
    ring = quad_ring(cfg)
    one, pi = QuaternionInt.one(ring), QuaternionInt.pi(ring)
    assert (one + pi)*(one - pi) == 1 - cfg.p
    assert (one - pi)*(one + pi) == 1 - cfg.p

def test_config_validation():
    with pytest.raises(ConfigError):
        PrimeConfig(p=3, f=1, M=2)
    with pytest.raises(ConfigError):
        PrimeConfig(p=5, f=1, M=2, N=2)
    with pytest.raises(ConfigError):
        PrimeConfig(p=5, f=1, M=2, case='GL3')
    with pytest.raises(ConfigError):
        PrimeConfig.from_dict(dict(p=5, f=1))

def test_config_level():
    cfg = PrimeConfig(p=5, f=1, M=2)
    assert cfg.case is Case.GL2
    with pytest.raises(LevelTooDeep):
        cfg.level()
    assert cfg.replace(N=1).level() == 1
    assert PrimeConfig.from_dict(cfg.to_dict()) == cfg
