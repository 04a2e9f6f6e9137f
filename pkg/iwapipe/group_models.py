"""
The two models of G at level M: the pro-p Iwahori I_1 of GL_2(Q_{p^f}) modulo its center, and
the quaternion units U_1 = 1 + Pi O_D modulo their center.

Elements are stored by canonical representatives of G/G^{p^M}:
    GL2     det = 1 matrices with entries mod p^{M+1}, upper-right entry reduced mod p^M
    QUAT    a + b Pi with Nrd = 1, a mod p^{M+1}, b reduced mod p^M
Every element is a unique ordered product g_1^{x_1} ... g_{3f}^{x_{3f}} of the basis
A_0..A_{f-1}, B_0..B_{f-1}, C_0..C_{f-1} with digits x_i mod p^M.
"""

from __future__ import annotations

import functools
import itertools
import logging
import math
from fractions import Fraction

import numpy as np
import sympy

from iwapipe import linalg
from iwapipe.errors import ConfigMismatch, NotInGroup, LevelTooDeep, NonConvergent, ContractViolation
from iwapipe.padic_core import (Case, PrimeConfig, QuaternionInt, base_ring, quad_ring,
                                hensel_sqrt, fourth_root, residue_field, unramified_ring)
from iwapipe.utility import check_result, vp

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)

class DigitVector(tuple):
    """exponents of the ordered-basis normal form, each reduced mod p^M"""
    def __new__(cls, digits):
        return super().__new__(cls, (int(x) for x in digits))

    def to_dict(self):
        return dict(digits=list(self))

    @classmethod
    def from_dict(cls, data):
        return cls(data['digits'])

class GroupElement:
    """a canonical coset representative of G/G^{p^M}"""
    __slots__ = ('model', 'data')

    def __init__(self, model, data):
        self.model = model
        self.data = data

    def __mul__(self, other):
        return self.model.multiply(self, other)

    def __pow__(self, e):
        return self.model.power(self, e)

    def inverse(self):
        return self.model.invert(self)

    def digits(self):
        return self.model.digit_decompose(self)

    def omega(self):
        return self.model.omega(self)

    def is_identity(self):
        return self == self.model.identity

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.model is other.model and self.data == other.data

    def __hash__(self):
        return hash(self.data)

    def __repr__(self):
        return f'GroupElement({self.model.case.value}, {self.model.format(self)})'

    def to_dict(self):
        return self.model.element_to_dict(self)

class OrderedBasis:
    """generators of G (or of G^{p^N}) with their omega-values"""
    def __init__(self, elements, omegas, names):
        self.elements = tuple(elements)
        self.omegas = tuple(omegas)
        self.names = tuple(names)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

class GroupModel:
    """Shared machinery of both models: digits, omega, caches

    Subclasses provide _raw_generators, normalize, _multiply, _invert and omega_direct.
    """
    case = None

    def __init__(self, cfg):
        self.cfg = cfg
        self.p, self.f, self.M = cfg.p, cfg.f, cfg.M
        self.n = 3*cfg.f
        self.modulus = cfg.p**cfg.M
        self.omegas = (HALF,)*(2*self.f) + (Fraction(1),)*self.f
        self.weights = (1,)*(2*self.f) + (2,)*self.f
        self.names = tuple(f'{letter}_{i}' for letter in 'ABC' for i in range(self.f))

        self._power_cache = {}
        self._compose_cache = {}
        self._mul_cache = {}

        self.generators = tuple(self.normalize(raw) for raw in self._raw_generators())
        self.identity = self.normalize(self._raw_identity())

    def __repr__(self):
        return f'{type(self).__name__}(p={self.p}, f={self.f}, M={self.M})'

    def __reduce__(self):
        return (group_model, (self.cfg,))

    @property
    def order(self):
        return self.modulus**self.n

    @property
    def basis(self):
        return OrderedBasis(self.generators, self.omegas, self.names)

    def _check(self, *elements):
        for g in elements:
            if not isinstance(g, GroupElement) or g.model is not self:
                raise ConfigMismatch(f'{g!r} does not belong to {self}')

    def multiply(self, g, h):
        self._check(g, h)
        return self._multiply(g, h)

    def invert(self, g):
        self._check(g)
        return self._invert(g)

    def power(self, g, e):
        self._check(g)
        e %= self.modulus
        result = self.identity
        base = g
        while e:
            if e & 1:
                result = self._multiply(result, base)
            e >>= 1
            if e:
                base = self._multiply(base, base)
        return result

    def generator_power(self, i, e):
        """g_i^e, cached"""
        key = (i, e % self.modulus)
        if key not in self._power_cache:
            self._power_cache[key] = self.power(self.generators[i], key[1])
        return self._power_cache[key]

    def commutator(self, g, h):
        """[g, h] = g h g^{-1} h^{-1}"""
        return self.multiply(self.multiply(g, h), self.multiply(self.invert(g), self.invert(h)))

    def compose(self, digits):
        """the ordered product g_1^{x_1} ... g_n^{x_n}"""
        key = DigitVector(x % self.modulus for x in digits)
        if len(key) != self.n:
            raise ValueError(f'expected {self.n} digits, got {len(key)}')
        if key not in self._compose_cache:
            self._compose_cache[key] = self._compose(key)
        return self._compose_cache[key]

    def _compose(self, digits):
        result = self.identity
        for i, x in enumerate(digits):
            if x:
                result = self._multiply(result, self.generator_power(i, x))
        return result

    def mul_digits(self, x, y):
        """digits of compose(x) compose(y), cached"""
        key = (x, y)
        result = self._mul_cache.get(key)
        if result is None:
            result = self.digit_decompose(self._multiply(self.compose(x), self.compose(y)))
            self._mul_cache[key] = result
        return result

    def unit_digits(self, i, e=1):
        digits = [0]*self.n
        digits[i] = e % self.modulus
        return DigitVector(digits)

    def omega_of_digits(self, digits):
        """min_i omega(g_i) + v_p(x_i); infinite for the identity"""
        value = math.inf
        for omega, x in zip(self.omegas, digits):
            if x:
                value = min(value, omega + vp(x, self.p, self.M))
        return value

    def omega(self, g):
        return self.omega_of_digits(self.digit_decompose(g))

    def subgroup_basis(self, N):
        """the ordered basis (g_i^{p^N}) of G^{p^N}"""
        if N >= self.M or N < 0:
            raise LevelTooDeep(f'N={N} requires N < M = {self.M}')
        elements = [self.generator_power(i, self.p**N) for i in range(self.n)]
        omegas = [omega + N for omega in self.omegas]
        names = [name if N == 0 else f'{name}^{self.p}^{N}' for name in self.names]
        return OrderedBasis(elements, omegas, names)

    def in_subgroup(self, g, N):
        """membership in G^{p^N}: every digit divisible by p^N"""
        if N >= self.M or N < 0:
            raise LevelTooDeep(f'N={N} requires N < M = {self.M}')
        return all(x % self.p**N == 0 for x in self.digit_decompose(g))

    def random_digits(self, rng):
        return DigitVector(int(x) for x in rng.integers(0, self.modulus, size=self.n))

    def random_element(self, rng):
        return self.compose(self.random_digits(rng))

    def all_digits(self):
        """every digit vector; only sensible for small groups"""
        for digits in itertools.product(range(self.modulus), repeat=self.n):
            yield DigitVector(digits)

    def p_root(self, x):
        """some y with y^p = x, or None if the refinement does not close"""
        self._check(x)
        digits = self.digit_decompose(x)
        if any(d % self.p for d in digits):
            return None

        y = self.compose([d // self.p for d in digits])
        for _ in range(2*self.M + 4):
            residual = self._multiply(self._invert(self.power(y, self.p)), x)
            if residual == self.identity:
                return y
            rdigits = self.digit_decompose(residual)
            if any(d % self.p for d in rdigits):
                return None
            y = self._multiply(y, self.compose([d // self.p for d in rdigits]))
        return None

    def format(self, g):
        return str(g.data)

    def element_from_word(self, word):
        """product of named generators, e.g. 'B_0 A_0^-1'"""
        g = self.identity
        for token in word.replace('*', ' ').split():
            name, _, exponent = token.partition('^')
            if name not in self.names:
                raise ValueError(f"unknown generator '{name}' (expected one of {', '.join(self.names)})")
            e = int(exponent) if exponent else 1
            g = self._multiply(g, self.generator_power(self.names.index(name), e))
        return g

class GL2Model(GroupModel):
    """I_1/Z_1 inside GL_2(O_K), entries mod p^{M+1}"""
    case = Case.GL2

    def __init__(self, cfg):
        self.ring = base_ring(cfg, cfg.M + 1)
        self._torus_cache = {}
        super().__init__(cfg)

    def _raw_identity(self):
        one, zero = self.ring.one, self.ring.zero
        return ((one, zero), (zero, one))

    def _raw_generators(self):
        x, one, zero, p = self.ring.gen, self.ring.one, self.ring.zero, self.p
        raws = []
        for i in range(self.f):
            raws.append(((one, x**i), (zero, one)))
        for i in range(self.f):
            raws.append(((one, zero), (x**i*p, one)))
        for i in range(self.f):
            t = 1 + x**i*p
            raws.append(((t, zero), (zero, t.inverse())))
        return raws

    def _element(self, a, b, c, d):
        return GroupElement(self, ((a, b.truncate(self.M)), (c, d)))

    def normalize(self, raw):
        """lambda raw with lambda in 1 + pO_K the inverse square root of det(raw)"""
        (a, b), (c, d) = [[self.ring(e) if isinstance(e, int) else e for e in row] for row in raw]
        for e in (a, b, c, d):
            if e.ring is not self.ring:
                raise ConfigMismatch(f'matrix entries must lie in {self.ring}')
        if not (a.is_unit_one() and d.is_unit_one() and c.valuation() >= 1):
            raise NotInGroup('matrix is not unipotent upper triangular mod p')

        det = a*d - b*c
        if det != 1:
            lam = hensel_sqrt(det).inverse()
            a, b, c, d = a*lam, b*lam, c*lam, d*lam
        return self._element(a, b, c, d)

    def _multiply(self, g, h):
        (a, b), (c, d) = g.data
        (e, f), (k, l) = h.data
        return self._element(a*e + b*k, a*f + b*l, c*e + d*k, c*f + d*l)

    def _invert(self, g):
        (a, b), (c, d) = g.data
        return self._element(d, -b, -c, a)

    def torus_power(self, i, e):
        """(1 + p[alpha^i])^e"""
        key = (i, e % self.modulus)
        if key not in self._torus_cache:
            self._torus_cache[key] = (1 + self.ring.gen**i*self.p)**key[1]
        return self._torus_cache[key]

    def torus_digits(self, t):
        """exponents z with t = prod_i (1 + p[alpha^i])^{z_i}, for t in 1 + pO_K"""
        digits = [0]*self.f
        r = t
        for k in range(1, self.M + 1):
            for i, delta in enumerate((r - 1).digit_vector(k)):
                if delta:
                    digits[i] += delta*self.p**(k - 1)
                    r = r*self.torus_power(i, -delta*self.p**(k - 1))
        if r != 1:
            raise ContractViolation(f'torus refinement left the residual {r}')
        return [z % self.modulus for z in digits]

    def _compose(self, digits):
        f, p = self.f, self.p
        x = self.ring.gen
        u = sum((x**i*digits[i] for i in range(f)), self.ring.zero)
        v = sum((x**i*digits[f + i] for i in range(f)), self.ring.zero)
        t = self.ring.one
        for i in range(f):
            if digits[2*f + i]:
                t = t*self.torus_power(i, digits[2*f + i])
        tinv = t.inverse()
        return self._element((1 + u*v*p)*t, u*tinv, v*t*p, tinv)

    def digit_decompose(self, g):
        """closed-form Iwahori factorization upper x lower x diagonal"""
        self._check(g)
        (a, b), (c, d) = g.data
        t = d.inverse()
        u = (b*t).truncate(self.M)
        v = (c*d).divide_by_p()
        digits = [e % self.modulus for e in u.coeffs]
        digits += [e % self.modulus for e in v.coeffs]
        digits += self.torus_digits(t)
        return DigitVector(digits)

    def omega_direct(self, g):
        """min(v(b) + 1/2, v(c) - 1/2, v(a-1), v(d-1)), zero entries counting as infinite"""
        (a, b), (c, d) = g.data
        value = math.inf
        for entry, shift in ((b, HALF), (c, -HALF), (a - 1, 0), (d - 1, 0)):
            if not entry.is_zero():
                value = min(value, entry.valuation() + shift)
        return value

    def format(self, g):
        (a, b), (c, d) = g.data
        return f'[[{list(a.coeffs)}, {list(b.coeffs)}], [{list(c.coeffs)}, {list(d.coeffs)}]]'

    def element_to_dict(self, g):
        return dict(case=self.case.value, p=self.p, f=self.f, M=self.M,
                    matrix=[[list(e.coeffs) for e in row] for row in g.data])

    def element_from_dict(self, data):
        if data.get('case', self.case.value) != self.case.value:
            raise ConfigMismatch(f"element of case {data['case']} given to {self}")
        return self.normalize([[self.ring(e) for e in row] for row in data['matrix']])

class QuaternionModel(GroupModel):
    """U_1/Z_1 inside O_D^x, a mod p^{M+1}, b mod p^M"""
    case = Case.QUAT

    def __init__(self, cfg):
        self.ring = quad_ring(cfg, cfg.M + 1)
        self.base = base_ring(cfg, cfg.M + 1)
        self._residue_systems = {}
        super().__init__(cfg)

    def _raw_identity(self):
        return QuaternionInt.one(self.ring)

    def alpha_power(self, i):
        """[alpha^i] inside O_{K2}"""
        return self.ring.embed_base(self.base.gen**i)

    def _raw_generators(self):
        zeta, p = self.ring.gen, self.p
        one = self.ring.one
        raws = []
        for i in range(self.f):
            raws.append(QuaternionInt(one, self.alpha_power(i)))
        for i in range(self.f):
            raws.append(QuaternionInt(one, self.alpha_power(i)*zeta))
        for i in range(self.f):
            raws.append(QuaternionInt(1 + self.alpha_power(i)*zeta*p, self.ring.zero))
        return raws

    def normalize(self, raw):
        """raw r(raw)^{-1} with r(raw) = hensel_sqrt(Nrd(raw)) in 1 + pO_K"""
        if not isinstance(raw, QuaternionInt) or raw.ring is not self.ring:
            raise ConfigMismatch(f'quaternion must lie in O_D/p^{self.M + 1}')
        if not raw.is_unit_one():
            raise NotInGroup('quaternion is not in 1 + Pi O_D')
        norm = raw.nrd()
        if norm != 1:
            raw = raw*hensel_sqrt(norm).inverse()
        return GroupElement(self, raw.truncate_b(self.M))

    def retraction(self, raw):
        """r(raw) = hensel_sqrt(Nrd(raw))"""
        return hensel_sqrt(raw.nrd())

    def _multiply(self, g, h):
        return GroupElement(self, (g.data*h.data).truncate_b(self.M))

    def _invert(self, g):
        return GroupElement(self, g.data.conjugate().truncate_b(self.M))

    def omega_direct(self, g):
        """v_Pi(g - 1)/2 = min(v(a - 1), v(b) + 1/2)"""
        a, b = g.data.a, g.data.b
        value = math.inf
        if not (a - 1).is_zero():
            value = min(value, Fraction((a - 1).valuation()))
        if not b.is_zero():
            value = min(value, b.valuation() + HALF)
        return value

    def _residue_system(self, level):
        """residues at Pi-level `level` of the generators living there"""
        if level not in self._residue_systems:
            f = self.f
            if level % 2:
                k = level // 2
                indices = list(range(2*f))
                columns = [self.generator_power(i, self.p**k).data.b.digit_vector(k) for i in indices]
            else:
                k = level // 2 - 1
                indices = list(range(2*f, 3*f))
                columns = [(self.generator_power(i, self.p**k).data.a - 1).digit_vector(k + 1) for i in indices]
            self._residue_systems[level] = (k, indices, columns)
        return self._residue_systems[level]

    def digit_decompose(self, g):
        """level-by-level refinement along the omega filtration"""
        self._check(g)
        field = residue_field(self.p, 1)
        digits = [0]*self.n
        r = g
        previous = 0
        for _ in range(2*self.M + 2):
            omega = self.omega_direct(r)
            if omega == math.inf:
                return DigitVector(digits)

            level = int(2*omega)
            if level <= previous:
                raise NonConvergent(f'refinement of {g!r} stalled at level {level}')
            previous = level

            k, indices, columns = self._residue_system(level)
            if level % 2:
                target = r.data.b.digit_vector(k)
            else:
                target = (r.data.a - 1).digit_vector(k + 1)
            delta = linalg.solve_columns(field, columns, target)
            if delta is None:
                raise ContractViolation(f'residue {target} of {g!r} not spanned at level {level}')

            for i, d in zip(indices, delta):
                digits[i] = (digits[i] + d*self.p**k) % self.modulus
            r = self._multiply(self._invert(self.compose(digits)), g)

        raise NonConvergent(f'refinement of {g!r} did not terminate')

    def format(self, g):
        return f'a={list(g.data.a.coeffs)}, b={list(g.data.b.coeffs)}'

    def element_to_dict(self, g):
        return dict(case=self.case.value, p=self.p, f=self.f, M=self.M,
                    a=list(g.data.a.coeffs), b=list(g.data.b.coeffs))

    def element_from_dict(self, data):
        if data.get('case', self.case.value) != self.case.value:
            raise ConfigMismatch(f"element of case {data['case']} given to {self}")
        return self.normalize(QuaternionInt(self.ring(data['a']), self.ring(data['b'])))

@functools.lru_cache(maxsize=None)
def _group_model(case, p, f, M):
    cfg = PrimeConfig(p=p, f=f, M=M, case=case)
    if Case(case) is Case.GL2:
        return GL2Model(cfg)
    return QuaternionModel(cfg)

def group_model(cfg):
    """the cached model for (case, p, f, M)"""
    return _group_model(cfg.case.value, cfg.p, cfg.f, cfg.M)

def multiply(g, h):
    return g.model.multiply(g, h)

def invert(g):
    return g.model.invert(g)

def normalize_mod_center(model, raw):
    return model.normalize(raw)

def digit_decompose(g):
    return g.model.digit_decompose(g)

def compose(model, digits):
    return model.compose(digits)

def omega(g):
    return g.model.omega(g)

def subgroup_basis(model, N):
    return model.subgroup_basis(N)

def retraction_by_determinant(model, raw):
    """fourth root of det(left multiplication by raw on O_D), f = 1

    O_D/p^P is free over Z/p^P on 1, [zeta], Pi, [zeta]Pi; the determinant is Nrd(raw)^2.
    """
    if model.f != 1 or model.case is not Case.QUAT:
        raise ValueError('the determinant retraction is implemented for the quaternion case with f = 1')
    ring = model.ring
    basis = [QuaternionInt(ring.one), QuaternionInt(ring.gen),
             QuaternionInt.pi(ring), QuaternionInt(ring.zero, ring.gen)]
    columns = []
    for e in basis:
        image = raw*e
        columns.append(list(image.a.coeffs) + list(image.b.coeffs))
    det = int(sympy.Matrix(columns).T.det()) % ring.modulus
    return det, fourth_root(unramified_ring(model.p, 1, ring.prec)(det))

### checks

def check_round_trip(model, rng, samples):
    """compose o digit_decompose = id, exhaustive when the group is small"""
    exhaustive = model.M == 1
    source = model.all_digits() if exhaustive else (model.random_digits(rng) for _ in range(samples))
    count = 0
    for digits in source:
        g = model.compose(digits)
        if model.digit_decompose(g) != digits:
            return check_result(False, witness=dict(digits=digits, decomposed=model.digit_decompose(g)))
        count += 1
    return check_result(True, exhaustive=exhaustive, elements=count)

def check_p_valuation(model, rng, samples):
    """the p-valuation axioms on sampled pairs, within the range visible at level M"""
    visible = model.M
    tested = dict(quotient=0, commutator=0, power=0)
    for _ in range(samples):
        x, y = model.random_element(rng), model.random_element(rng)
        wx, wy = model.omega(x), model.omega(y)

        lower = min(wx, wy)
        if lower <= visible:
            value = model.omega(model.multiply(x, model.invert(y)))
            if value < lower:
                return check_result(False, witness=dict(axiom='quotient', x=x.digits(), y=y.digits()))
            tested['quotient'] += 1

        lower = wx + wy
        if lower <= visible:
            value = model.omega(model.commutator(x, y))
            if value < lower:
                return check_result(False, witness=dict(axiom='commutator', x=x.digits(), y=y.digits()))
            tested['commutator'] += 1

        if wx + 1 <= visible:
            value = model.omega(model.power(x, model.p))
            if value != wx + 1:
                return check_result(False, witness=dict(axiom='power', x=x.digits(), omega=value))
            tested['power'] += 1

    return check_result(True, samples=samples, tested=tested)

def check_omega_consistency(model, rng, samples):
    """the digit min-formula agrees with the entrywise valuation formula"""
    for _ in range(samples):
        g = model.random_element(rng)
        if model.omega(g) != model.omega_direct(g):
            return check_result(False, witness=dict(digits=g.digits(), omega=model.omega(g), direct=model.omega_direct(g)))
    return check_result(True, samples=samples)

def check_saturation(model, rng, samples):
    """every sampled x with omega(x) > p/(p-1) has a p-th root"""
    bound = Fraction(model.p, model.p - 1)
    found = 0
    for _ in range(samples):
        digits = [model.p*int(x) for x in rng.integers(0, model.modulus // model.p, size=model.n)]
        x = model.compose(digits)
        if not model.omega(x) > bound:
            continue
        y = model.p_root(x)
        if y is None or model.power(y, model.p) != x:
            return check_result(False, witness=dict(digits=x.digits()))
        found += 1
    return check_result(True, samples=samples, roots=found)

def check_subgroup_membership(model, N, rng, samples, brute_force_limit=20000):
    """g in G^{p^N} iff p^N divides every digit, against the set of p^N-th powers"""
    pN = model.p**N
    exact = model.order <= brute_force_limit
    if exact:
        powers = {model.digit_decompose(model.power(model.compose(d), pN)) for d in model.all_digits()}

    for n in range(samples):
        if n % 2:
            digits = DigitVector(pN*int(x) for x in rng.integers(0, model.modulus // pN, size=model.n))
        else:
            digits = model.random_digits(rng)
        g = model.compose(digits)
        predicted = model.in_subgroup(g, N)
        if exact:
            actual = digits in powers
        else:
            root = g
            for _ in range(N):
                root = model.p_root(root) if root is not None else None
            actual = root is not None and model.power(root, pN) == g
        if predicted != actual:
            return check_result(False, witness=dict(digits=digits, predicted=predicted, actual=actual))
    return check_result(True, samples=samples, brute_force=exact)

def check_quaternion_power_image(model, rng, samples):
    """g^p lies in 1 + p Pi O_D"""
    if model.case is not Case.QUAT:
        raise ValueError('the p-power image is a statement about the quaternion model')
    for _ in range(samples):
        g = model.random_element(rng)
        h = model.power(g, model.p)
        if not (h.data - 1).in_p_pi_order():
            return check_result(False, witness=dict(digits=g.digits()))
    return check_result(True, samples=samples)

def check_retraction_equivalence(model, rng, samples):
    """det of the 4x4 left multiplication matrix is Nrd^2, and its fourth root is r(u)"""
    ring = model.ring
    for _ in range(samples):
        raw = QuaternionInt(ring.random(rng, unit_one=True), ring.random(rng))
        norm = raw.nrd()
        det, root = retraction_by_determinant(model, raw)
        if det != (norm*norm).coeffs[0] or any((norm*norm).coeffs[1:]):
            return check_result(False, witness=dict(a=raw.a.coeffs, b=raw.b.coeffs, det=det))
        if list(root.coeffs) != [hensel_sqrt(norm).coeffs[0]]:
            return check_result(False, witness=dict(a=raw.a.coeffs, b=raw.b.coeffs, root=root.coeffs))
    return check_result(True, samples=samples)
