"""
Exact arithmetic in unramified p-adic rings truncated at a finite precision, and in the
quaternion order over them.

A ring O/p^P of degree d is realized as (Z/p^P)[x]/(phi) where phi is the minimal polynomial
of the Teichmuller lift of a root of the Conway polynomial of degree d. In particular x is
itself a Teichmuller representative, [alpha] in O_K and [zeta] in O_{K2}.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass, asdict

import galois

from iwapipe.errors import ConfigError, ConfigMismatch, InputNotUnitOne, LevelTooDeep

class Case(str, enum.Enum):
    GL2 = 'GL2'
    QUAT = 'QUAT'

@dataclass(frozen=True)
class PrimeConfig:
    """Parameters shared by every computation

    Arguments:
        p       prime, p > 3
        f       residue degree of K = Q_{p^f}
        M       truncation level: arithmetic mod p^M and modulo G^{p^M}
        N       subgroup level, 1 <= N < M (None when no subgroup is involved)
        case    GL2 (pro-p Iwahori modulo center) or QUAT (U_1 modulo center)
        seed    seed of every randomized computation
    """
    p: int
    f: int
    M: int
    N: int | None = None
    case: Case = Case.GL2
    seed: int = 0

    def __post_init__(self):
        try:
            object.__setattr__(self, 'case', Case(self.case))
        except ValueError:
            raise ConfigError(f"unknown case '{self.case}' (expected GL2 or QUAT)", 'case')

        for name in ('p', 'f', 'M', 'seed'):
            if not isinstance(getattr(self, name), int) or isinstance(getattr(self, name), bool):
                raise ConfigError(f'expected an integer, got {getattr(self, name)!r}', name)
        if self.p <= 3 or not galois.is_prime(self.p):
            raise ConfigError(f'p must be a prime larger than 3, got {self.p}', 'p')
        if self.f < 1:
            raise ConfigError(f'f must be positive, got {self.f}', 'f')
        if self.M < 1:
            raise ConfigError(f'M must be positive, got {self.M}', 'M')
        if self.N is not None and not 1 <= self.N < self.M:
            raise ConfigError(f'N must satisfy 1 <= N < M = {self.M}, got {self.N}', 'N')
        if self.seed < 0:
            raise ConfigError(f'seed must be unsigned, got {self.seed}', 'seed')

    @property
    def q(self):
        return self.p**self.f

    @property
    def field(self):
        """the coefficient field F = F_{p^f}"""
        return residue_field(self.p, self.f)

    @property
    def dim(self):
        """dimension 3f of the group"""
        return 3*self.f

    def level(self, N=None):
        """the subgroup level to use, raising LevelTooDeep if there is none below M"""
        N = self.N if N is None else N
        if N is None or N >= self.M or N < 0:
            raise LevelTooDeep(f'subgroup level N={N} requires 0 <= N < M = {self.M}')
        return N

    def replace(self, **changes):
        data = self.to_dict()
        data.update(changes)
        return PrimeConfig.from_dict(data)

    def to_dict(self):
        data = asdict(self)
        data['case'] = self.case.value
        return data

    @classmethod
    def from_dict(cls, data):
        known = {'p', 'f', 'M', 'N', 'case', 'seed'}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f'unknown keys {sorted(unknown)}', 'config')
        missing = {'p', 'f', 'M'} - set(data)
        if missing:
            raise ConfigError(f'missing keys {sorted(missing)}', 'config')
        return cls(**data)

@functools.lru_cache(maxsize=None)
def residue_field(p, degree):
    """F_{p^degree}, defined by the Conway polynomial"""
    if degree == 1:
        return galois.GF(p)
    return galois.GF(p**degree, irreducible_poly=galois.conway_poly(p, degree))

class UnramifiedRing:
    """(Z/p^prec)[x]/(phi), a truncated unramified ring of the given degree

    Arguments:
        p           prime
        degree      degree over Z_p
        prec        precision; elements are reduced mod p^prec
        phi         monic modulus, coefficients low to high
        frob_power  sigma is x -> x^{p^frob_power}
    """
    def __init__(self, p, degree, prec, phi, frob_power=1, quadratic=False):
        self.p = p
        self.degree = degree
        self.prec = prec
        self.modulus = p**prec
        self.phi = tuple(phi)
        self.frob_power = frob_power
        self.quadratic = quadratic
        self.element_type = QuadExtInt if quadratic else UnramifiedInt
        self._frob_images = None
        self._embed_images = None

    def __repr__(self):
        return f'UnramifiedRing(p={self.p}, degree={self.degree}, prec={self.prec})'

    def __call__(self, coeffs):
        if isinstance(coeffs, int):
            coeffs = (coeffs,) + (0,)*(self.degree - 1)
        return self.element_type(self, coeffs)

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    @property
    def gen(self):
        """x, the Teichmuller lift of the chosen generator of the residue field"""
        if self.degree == 1:
            return self(-self.phi[0])
        return self((0, 1) + (0,)*(self.degree - 2))

    @property
    def residue_field(self):
        return residue_field(self.p, self.degree)

    def at_precision(self, prec):
        return unramified_ring(self.p, self.degree, prec, self.frob_power, self.quadratic)

    def random(self, rng, unit_one=False):
        coeffs = [int(c) for c in rng.integers(0, self.modulus, size=self.degree)]
        if unit_one:
            coeffs = [self.p*c for c in coeffs]
            coeffs[0] += 1
        return self(coeffs)

    def elements(self):
        """every element, for exhaustive checks at small precision"""
        total = self.modulus**self.degree
        for n in range(total):
            coeffs = []
            for _ in range(self.degree):
                n, c = divmod(n, self.modulus)
                coeffs.append(c)
            yield self(coeffs)

    def polymul(self, u, v):
        d = self.degree
        prod = [0]*(2*d - 1)
        for i, a in enumerate(u):
            if a:
                for j, b in enumerate(v):
                    prod[i+j] += a*b

        phi = self.phi
        for k in range(2*d - 2, d - 1, -1):
            c = prod[k]
            if c:
                for j in range(d):
                    prod[k-d+j] -= c*phi[j]

        m = self.modulus
        return tuple(c % m for c in prod[:d])

    def frobenius_images(self):
        if self._frob_images is None:
            X = self.gen**(self.p**self.frob_power)
            self._frob_images = [X**i for i in range(self.degree)]
        return self._frob_images

    def embed_base(self, u):
        """image of an element of the degree-(degree/2) subring, [alpha] -> [zeta]^{p^f+1}"""
        f = self.degree // 2
        if not self.quadratic or u.ring.degree != f or u.ring.p != self.p:
            raise ConfigMismatch(f'cannot embed {u.ring} into {self}')
        if self._embed_images is None:
            Y = self.gen**(self.p**f + 1)
            self._embed_images = [Y**i for i in range(f)]
        return _linear_combination(self, u.coeffs, self._embed_images)

def _linear_combination(ring, coeffs, images):
    m = ring.modulus
    out = [0]*ring.degree
    for c, image in zip(coeffs, images):
        if c:
            for k, e in enumerate(image.coeffs):
                out[k] += c*e
    return ring([c % m for c in out])

@functools.lru_cache(maxsize=None)
def teichmuller_modulus(p, degree, prec):
    """minimal polynomial over Z/p^prec of the Teichmuller lift of a Conway root"""
    conway = tuple(int(c) for c in galois.conway_poly(p, degree).coeffs[::-1])
    ring = UnramifiedRing(p, degree, prec, conway)
    q = p**degree

    root = ring.gen
    for _ in range(prec):
        root = root**q

    ### prod_j (T - root^{p^j}), coefficients in the provisional ring
    poly = [ring.one]
    for j in range(degree):
        conj = root**(p**j)
        new = [ring.zero]*(len(poly) + 1)
        for k, c in enumerate(poly):
            new[k+1] = new[k+1] + c
            new[k] = new[k] - conj*c
        poly = new

    coeffs = []
    for c in poly:
        if any(c.coeffs[1:]):
            raise RuntimeError(f'Teichmuller modulus for p={p}, degree={degree} is not integral')
        coeffs.append(c.coeffs[0])
    return tuple(coeffs)

@functools.lru_cache(maxsize=None)
def unramified_ring(p, degree, prec, frob_power=1, quadratic=False):
    """the cached ring O/p^prec of the given degree"""
    phi = teichmuller_modulus(p, degree, prec)
    return UnramifiedRing(p, degree, prec, phi, frob_power, quadratic)

def base_ring(cfg, prec=None):
    """O_K/p^prec, default precision M"""
    return unramified_ring(cfg.p, cfg.f, cfg.M if prec is None else prec)

def quad_ring(cfg, prec=None):
    """O_{K2}/p^prec, sigma of order 2 over K"""
    return unramified_ring(cfg.p, 2*cfg.f, cfg.M if prec is None else prec, cfg.f, True)

class UnramifiedInt:
    """An element of O_K/p^P in coordinates 1, [alpha], ..., [alpha]^{f-1}"""
    __slots__ = ('ring', 'coeffs')

    def __init__(self, ring, coeffs):
        if len(coeffs) != ring.degree:
            raise ValueError(f'expected {ring.degree} coordinates, got {len(coeffs)}')
        m = ring.modulus
        self.ring = ring
        self.coeffs = tuple(int(c) % m for c in coeffs)

    def _coerce(self, other):
        if isinstance(other, UnramifiedInt):
            if other.ring is not self.ring:
                raise ConfigMismatch(f'operands live in {self.ring} and {other.ring}')
            return other
        if isinstance(other, int):
            return self.ring(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.ring([a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return self.ring([-a for a in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.ring([a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return self.ring([a*other for a in self.coeffs])
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.ring(self.ring.polymul(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            return self.inverse()**(-e)
        result = self.ring.one
        base = self
        while e:
            if e & 1:
                result = result*base
            e >>= 1
            if e:
                base = base*base
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring(other)
        if not isinstance(other, UnramifiedInt):
            return NotImplemented
        return self.ring is other.ring and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ring.p, self.ring.degree, self.ring.prec, self.coeffs))

    def __repr__(self):
        return f'{type(self).__name__}({list(self.coeffs)} mod {self.ring.p}^{self.ring.prec})'

    def is_zero(self):
        return not any(self.coeffs)

    def valuation(self):
        """v_p, capped at the precision (a capped value means '>= prec')"""
        p, cap = self.ring.p, self.ring.prec
        v = cap
        for c in self.coeffs:
            if c:
                k = 0
                while c % p == 0:
                    c //= p
                    k += 1
                v = min(v, k)
        return v

    def is_unit(self):
        return self.valuation() == 0 and any(c % self.ring.p for c in self.coeffs)

    def is_unit_one(self):
        """u = 1 mod p"""
        p = self.ring.p
        return (self.coeffs[0] - 1) % p == 0 and all(c % p == 0 for c in self.coeffs[1:])

    def inverse(self):
        if not self.is_unit():
            raise ZeroDivisionError(f'{self} is not a unit')
        ring = self.ring
        if ring.degree == 1:
            return ring(pow(self.coeffs[0], -1, ring.modulus))

        y = self**(ring.p**ring.degree - 2)
        for _ in range(ring.prec.bit_length() + 1):
            y = y*(2 - self*y)
        return y

    def reduce(self, prec):
        """image at a lower precision"""
        return self.ring.at_precision(prec)(self.coeffs)

    def lift(self, prec):
        """the same coordinates read at a higher precision"""
        return self.ring.at_precision(prec)(self.coeffs)

    def truncate(self, prec):
        """coordinates reduced mod p^prec, kept in the same ring"""
        m = self.ring.p**prec
        return self.ring([c % m for c in self.coeffs])

    def divide_by_p(self, k=1):
        """exact division by p^k; coordinates must be divisible"""
        pk = self.ring.p**k
        if any(c % pk for c in self.coeffs):
            raise ValueError(f'{self} is not divisible by p^{k}')
        return self.ring([c // pk for c in self.coeffs])

    def digit_vector(self, k):
        """the k-th p-adic digit of every coordinate"""
        p = self.ring.p
        return [(c // p**k) % p for c in self.coeffs]

    def residue(self):
        """reduction mod p, an element of the residue field"""
        p = self.ring.p
        return self.ring.residue_field(sum((c % p)*p**i for i, c in enumerate(self.coeffs)))

    def frobenius(self):
        """x -> x^{p^frob_power} on the generator, extended linearly"""
        ring = self.ring
        if ring.degree == 1:
            return self
        return _linear_combination(ring, self.coeffs, ring.frobenius_images())

    def to_dict(self):
        ring = self.ring
        data = dict(p=ring.p, f=ring.degree, M=ring.prec, digits=list(self.coeffs))
        if isinstance(self, QuadExtInt):
            data['f'] = ring.degree // 2
            data['quadratic'] = True
        return data

    @staticmethod
    def from_dict(data):
        p, f, prec = data['p'], data['f'], data['M']
        if data.get('quadratic', False):
            ring = unramified_ring(p, 2*f, prec, f, True)
        else:
            ring = unramified_ring(p, f, prec)
        return ring(data['digits'])

class QuadExtInt(UnramifiedInt):
    """An element of O_{K2}/p^P

    The ring is built with frob_power = f, so `frobenius` is sigma: [zeta] -> [zeta^{p^f}],
    the generator of Gal(K2/K). It has order 2 and fixes the K-subring.
    """
    __slots__ = ()

    def in_base(self):
        """whether the element is fixed by sigma"""
        return self.frobenius() == self

def frobenius(x):
    return x.frobenius()

def teichmuller_lift(a, ring):
    """[a] in the given ring, for a in its residue field"""
    field = ring.residue_field
    a = field(a) if not isinstance(a, field) else a
    p = ring.p
    n = int(a)
    coeffs = []
    for _ in range(ring.degree):
        n, c = divmod(n, p)
        coeffs.append(c)

    y = ring(coeffs)
    q = p**ring.degree
    for _ in range(ring.prec):
        y = y**q
    return y

def teichmuller(a, cfg, quadratic=False):
    """the Teichmuller lift of a residue field element at precision M"""
    ring = quad_ring(cfg) if quadratic else base_ring(cfg)
    return teichmuller_lift(a, ring)

def hensel_sqrt(u):
    """the square root of u = 1 mod p that is itself 1 mod p"""
    if not u.is_unit_one():
        raise InputNotUnitOne(f'{u} is not congruent to 1 mod p')
    ring = u.ring
    half = pow(2, -1, ring.modulus)
    y = ring.one
    for _ in range(ring.prec.bit_length() + 1):
        y = (y + u*y.inverse())*half
    return y

def fourth_root(u):
    return hensel_sqrt(hensel_sqrt(u))

class QuaternionInt:
    """a + b Pi in O_D/p^P, with Pi^2 = p and Pi x = sigma(x) Pi"""
    __slots__ = ('a', 'b')

    def __init__(self, a, b=None):
        if b is None:
            b = a.ring.zero
        if a.ring is not b.ring or not isinstance(a, QuadExtInt):
            raise ConfigMismatch('quaternion coordinates must lie in the same O_{K2}')
        self.a = a
        self.b = b

    @property
    def ring(self):
        return self.a.ring

    @classmethod
    def one(cls, ring):
        return cls(ring.one, ring.zero)

    @classmethod
    def pi(cls, ring):
        return cls(ring.zero, ring.one)

    def _coerce(self, other):
        if isinstance(other, QuaternionInt):
            if other.ring is not self.ring:
                raise ConfigMismatch('quaternions from different orders')
            return other
        if isinstance(other, int):
            return QuaternionInt(self.ring(other))
        if isinstance(other, QuadExtInt):
            return QuaternionInt(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return QuaternionInt(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return QuaternionInt(-self.a, -self.b)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return QuaternionInt(self.a - other.a, self.b - other.b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.ring.p
        a, b, c, d = self.a, self.b, other.a, other.b
        return QuaternionInt(a*c + b*d.frobenius()*p, a*d + b*c.frobenius())

    def __rmul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other*self

    def __pow__(self, e):
        if e < 0:
            return self.inverse()**(-e)
        result = QuaternionInt.one(self.ring)
        base = self
        while e:
            if e & 1:
                result = result*base
            e >>= 1
            if e:
                base = base*base
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = QuaternionInt(self.ring(other))
        if not isinstance(other, QuaternionInt):
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __repr__(self):
        return f'QuaternionInt(a={list(self.a.coeffs)}, b={list(self.b.coeffs)} mod {self.ring.p}^{self.ring.prec})'

    def nrd(self):
        """reduced norm a sigma(a) - p b sigma(b), an element of the K-subring"""
        return self.a*self.a.frobenius() - self.b*self.b.frobenius()*self.ring.p

    def conjugate(self):
        return QuaternionInt(self.a.frobenius(), -self.b)

    def inverse(self):
        norm = self.nrd()
        if not norm.is_unit():
            raise ZeroDivisionError(f'{self} is not a unit')
        return self.conjugate()*norm.inverse()

    def is_unit_one(self):
        """u in 1 + Pi O_D"""
        return (self.a - 1).valuation() >= 1

    def in_p_pi_order(self):
        """u in p Pi O_D, i.e. a = 0 mod p^2 and b = 0 mod p"""
        return self.a.valuation() >= 2 and self.b.valuation() >= 1

    def truncate_b(self, prec):
        return QuaternionInt(self.a, self.b.truncate(prec))

    def to_dict(self):
        data = self.a.to_dict()
        data.pop('digits')
        data.pop('quadratic', None)
        data.update(a=list(self.a.coeffs), b=list(self.b.coeffs))
        return data

    @staticmethod
    def from_dict(data):
        ring = unramified_ring(data["p"], 2*data["f"], data["M"], data["f"], True)
        return QuaternionInt(ring(data['a']), ring(data['b']))
