"""
The truncated completed group ring F[G/G^{p^M}]

Two representations are kept side by side:
    AlgebraElement      sparse combination of group elements, exact multiplication
    monomial vectors    coordinates on the monomials z^k = (g_1 - 1)^{k_1} ... (g_n - 1)^{k_n}
                        of weight sum_i k_i nu(g_i) <= T, for everything valuation-graded
Weights and cutoffs are measured in nu units: nu(A_i - 1) = nu(B_i - 1) = 1, nu(C_i - 1) = 2.
"""

from __future__ import annotations

import enum
import functools
import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np

from iwapipe import linalg, fileio
from iwapipe.errors import ConfigMismatch, CutoffBeyondFaithful, LevelTooDeep
from iwapipe.padic_core import QuaternionInt, base_ring, quad_ring
from iwapipe.utility import INDETERMINATE, PASS, binomial_table, check_result

logger = logging.getLogger(__name__)

@dataclass(frozen=True)
class AboveCutoff:
    """the valuation exceeds the cutoff; nothing more is known"""
    cutoff: int

    def __str__(self):
        return f'> {self.cutoff}'

def encode_coeff(value, p, f):
    """F_p-coordinates of a field element, lowest power first"""
    return [(int(value) // p**i) % p for i in range(f)]

def decode_coeff(field, coords):
    p = field.characteristic
    if isinstance(coords, int):
        coords = [coords]
    return field(sum((int(c) % p)*p**i for i, c in enumerate(coords)))

def _collect(field, keys, coeffs):
    """merge repeated keys and drop zero coefficients"""
    index = {}
    ids = np.fromiter((index.setdefault(k, len(index)) for k in keys), dtype=np.int64, count=len(keys))
    totals = field.Zeros(len(index))
    if len(keys):
        np.add.at(totals, ids, coeffs)
    nonzero = np.flatnonzero(totals)
    uniques = list(index)
    return tuple(uniques[i] for i in nonzero), totals[nonzero]

class AlgebraElement:
    """a finite F-linear combination of elements of G/G^{p^M}, keyed by digit vectors"""
    __slots__ = ('model', 'keys', 'coeffs')

    def __init__(self, model, keys=(), coeffs=None, collect=True):
        field = model.cfg.field
        keys = tuple(tuple(k) for k in keys)
        if coeffs is None:
            coeffs = field.Ones(len(keys))
        elif not isinstance(coeffs, field):
            coeffs = field(np.asarray(coeffs, dtype=np.int64) % field.characteristic)
        if collect:
            keys, coeffs = _collect(field, keys, coeffs)
        self.model = model
        self.keys = keys
        self.coeffs = coeffs

    @property
    def field(self):
        return self.model.cfg.field

    @classmethod
    def zero(cls, model):
        return cls(model)

    @classmethod
    def one(cls, model):
        return cls(model, [model.unit_digits(0, 0)])

    @classmethod
    def group(cls, g):
        """the basis element [g]"""
        return cls(g.model, [g.model.digit_decompose(g)])

    @classmethod
    def difference(cls, g):
        """[g] - 1"""
        model = g.model
        field = model.cfg.field
        return cls(model, [model.digit_decompose(g), model.unit_digits(0, 0)], field([1, field.characteristic - 1]))

    @classmethod
    def from_terms(cls, model, terms):
        """from a mapping digits -> coefficient"""
        field = model.cfg.field
        keys = list(terms)
        coeffs = field([int(terms[k]) % field.order for k in keys]) if keys else field.Zeros(0)
        return cls(model, keys, coeffs)

    def _scalar(self, c):
        field = self.field
        if isinstance(c, field):
            return c
        return field(int(c) % field.characteristic)

    def _check(self, other):
        if other.model is not self.model:
            raise ConfigMismatch(f'elements of {self.model} and {other.model}')

    def __add__(self, other):
        if not isinstance(other, AlgebraElement):
            other = AlgebraElement.one(self.model)*other
        self._check(other)
        return AlgebraElement(self.model, self.keys + other.keys, np.concatenate([self.coeffs, other.coeffs]).view(self.field))

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement(self.model, self.keys, -self.coeffs, collect=False)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, AlgebraElement):
            c = self._scalar(other)
            return AlgebraElement(self.model, self.keys, self.coeffs*c)
        self._check(other)
        if not self.keys or not other.keys:
            return AlgebraElement.zero(self.model)
        mul = self.model.mul_digits
        keys = [mul(x, y) for x in self.keys for y in other.keys]
        coeffs = np.multiply.outer(self.coeffs, other.coeffs).reshape(-1)
        return AlgebraElement(self.model, keys, coeffs)

    def __rmul__(self, other):
        return self*other

    def __pow__(self, e):
        result = AlgebraElement.one(self.model)
        base = self
        while e:
            if e & 1:
                result = result*base
            e >>= 1
            if e:
                base = base*base
        return result

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return not (self - other)

    def __bool__(self):
        return len(self.keys) > 0

    def __len__(self):
        return len(self.keys)

    def __repr__(self):
        terms = ', '.join(f'{int(c)}*{list(k)}' for k, c in zip(self.keys, self.coeffs))
        return f'AlgebraElement({terms})'

    def support(self):
        return {k: self.coeffs[n] for n, k in enumerate(self.keys)}

    def to_dict(self):
        p, f = self.model.p, self.model.f
        terms = sorted(zip(self.keys, self.coeffs), key=lambda t: t[0])
        return [dict(digits=list(k), coeff=encode_coeff(c, p, f)) for k, c in terms]

    @classmethod
    def from_dict(cls, model, data):
        field = model.cfg.field
        keys, coeffs = [], []
        for term in data:
            digits = [int(x) % model.modulus for x in term['digits']]
            if len(digits) != model.n:
                raise ValueError(f'expected {model.n} digits, got {len(digits)}')
            keys.append(tuple(digits))
            coeffs.append(int(decode_coeff(field, term.get('coeff', [1]))))
        return cls(model, keys, field(coeffs) if coeffs else field.Zeros(0))

def alg_add(x, y):
    return x + y

def alg_mul(x, y):
    return x*y

def monomial_terms(model, exponents):
    """group-basis expansion of z^k: sum over j <= k of prod binom(k_i, j_i)(-1)^{k_i - j_i} [j]"""
    p = model.p
    ranges = [range(k + 1) for k in exponents]
    keys, coeffs = [], []
    for j in itertools.product(*ranges):
        c = 1
        for ki, ji in zip(exponents, j):
            c *= math.comb(ki, ji)*(-1)**(ki - ji)
            c %= p
            if not c:
                break
        if c:
            keys.append(j)
            coeffs.append(c)
    return keys, coeffs

class FiltrationKind(str, enum.Enum):
    M_ADIC = 'M_ADIC'
    N_INT = 'N_INT'
    N_RES = 'N_RES'

@dataclass(frozen=True)
class FiltrationTag:
    """m^j, m^{j p^N} or n_j; only n_j accepts negative indices"""
    kind: FiltrationKind
    index: int

    def __post_init__(self):
        object.__setattr__(self, 'kind', FiltrationKind(self.kind))
        if self.index < 0 and self.kind is not FiltrationKind.N_RES:
            raise ValueError(f'{self.kind.value} filtration indices are non-negative')

class MonomialExpansion:
    """coefficients of an element on the monomials of weight <= T"""
    def __init__(self, algebra, vector):
        self.algebra = algebra
        self.vector = vector

    @property
    def cutoff(self):
        return self.algebra.cutoff

    def terms(self):
        """nonzero coefficients in lexicographic exponent order"""
        basis = self.algebra.basis
        return {basis[i]: self.vector[i] for i in np.flatnonzero(self.vector)}

    def nu(self):
        return self.algebra.nu(self.vector)

    def component(self, degree):
        """the coefficients of weight exactly `degree`"""
        return self.vector[self.algebra.indices_of_degree(degree)]

    def __eq__(self, other):
        if not isinstance(other, MonomialExpansion):
            return NotImplemented
        return self.algebra is other.algebra and np.array_equal(self.vector, other.vector)

    def __repr__(self):
        terms = ', '.join(f'{int(c)}*z^{list(k)}' for k, c in self.terms().items())
        return f'MonomialExpansion(T={self.cutoff}: {terms})'

    def to_dict(self):
        model = self.algebra.model
        terms = [dict(exps=list(k), coeff=encode_coeff(c, model.p, model.f)) for k, c in self.terms().items()]
        return dict(cutoff=self.cutoff, terms=terms)

class TruncatedAlgebra:
    """F[G/G^{p^M}] modulo the monomials of weight > T, on the lexicographic monomial basis

    Arguments:
        model       the group model
        cutoff      weight bound T (nu units)
        faithful    require T < p^M, where weights agree with the completed ring
    """
    def __init__(self, model, cutoff, faithful=True):
        if faithful and cutoff >= model.modulus:
            raise CutoffBeyondFaithful(f'cutoff {cutoff} is not below p^M = {model.modulus}')
        self.model = model
        self.cutoff = cutoff
        self.faithful = faithful
        self.field = model.cfg.field
        self.p = model.p
        self.weights = np.array(model.weights, dtype=np.int64)

        bounds = [min(model.modulus - 1, cutoff // w) for w in model.weights]
        basis = [k for k in itertools.product(*(range(b + 1) for b in bounds))
                 if sum(w*x for w, x in zip(model.weights, k)) <= cutoff]
        self.basis = basis
        self.index = {k: i for i, k in enumerate(basis)}
        self.exps = np.array(basis, dtype=np.int64).reshape(len(basis), model.n)
        self.degrees = self.exps @ self.weights

        self._monomials = {}
        self._tables = {}
        self._powers = {}
        self._madic = None
        self._table_file = fileio.table_path(model.cfg, cutoff)

    def __repr__(self):
        return f'TruncatedAlgebra({self.model}, T={self.cutoff})'

    def __reduce__(self):
        return (truncated_algebra, (self.model, self.cutoff, self.faithful))

    @classmethod
    def full(cls, model):
        """the whole finite group algebra; no comparison with the completed ring is claimed"""
        return truncated_algebra(model, sum(w*(model.modulus - 1) for w in model.weights), faithful=False)

    @property
    def dim(self):
        return len(self.basis)

    def weight(self, exponents):
        return int(sum(w*x for w, x in zip(self.model.weights, exponents)))

    def indices_of_degree(self, degree):
        return np.flatnonzero(self.degrees == degree)

    def indices_at_least(self, degree):
        return np.flatnonzero(self.degrees >= degree)

    def zeros(self):
        return self.field.Zeros(self.dim)

    def unit(self, exponents):
        """the vector of z^k (zero if the weight exceeds the cutoff)"""
        v = self.zeros()
        i = self.index.get(tuple(exponents))
        if i is not None:
            v[i] = 1
        return v

    def weight_space(self, degree):
        """{nu >= degree} as a coordinate subspace"""
        return linalg.coordinate_space(self.field, self.indices_at_least(degree), self.dim)

    def monomial(self, exponents):
        """z^k as an AlgebraElement"""
        exponents = tuple(int(x) for x in exponents)
        if exponents not in self._monomials:
            keys, coeffs = monomial_terms(self.model, exponents)
            self._monomials[exponents] = AlgebraElement(self.model, keys, coeffs)
        return self._monomials[exponents]

    def element(self, vector):
        """the AlgebraElement sum_k v_k z^k"""
        result = AlgebraElement.zero(self.model)
        for i in np.flatnonzero(vector):
            result = result + self.monomial(self.basis[i])*vector[i]
        return result

    def expand_vector(self, x, chunk=200000):
        """coefficient of z^k is sum_g c_g prod_i binom(x_i(g), k_i), binomials by Lucas"""
        if x.model is not self.model:
            raise ConfigMismatch(f'element of {x.model} expanded in {self}')
        if not x.keys:
            return self.zeros()
        table = binomial_table(self.p, self.model.M)
        X = np.array(x.keys, dtype=np.int64)
        rows = max(1, chunk // max(1, self.dim))
        result = self.zeros()
        for start in range(0, len(X), rows):
            block = X[start:start + rows]
            E = np.ones((len(block), self.dim), dtype=np.int64)
            for i in range(self.model.n):
                E = E*table[block[:, i][:, None], self.exps[:, i][None, :]] % self.p
            result = result + x.coeffs[start:start + rows] @ self.field(E)
        return result

    def expand(self, x):
        return MonomialExpansion(self, self.expand_vector(x))

    def nu(self, vector):
        """minimal weight of a nonzero coefficient, or AboveCutoff"""
        nonzero = np.flatnonzero(vector)
        if len(nonzero) == 0:
            return AboveCutoff(self.cutoff)
        return int(self.degrees[nonzero].min())

    ### multiplication tables

    def _generator_row(self, i, exponents, side):
        """coordinates of z_i z^k (side='left') or z^k z_i (side='right')"""
        k = list(exponents)
        n = self.model.n
        in_order = all(k[j] == 0 for j in range(i)) if side == 'left' else all(k[j] == 0 for j in range(i + 1, n))
        if in_order:
            k[i] += 1
            return self.unit(k)

        z = self.monomial(exponents)
        g = self.model.unit_digits(i)
        mul = self.model.mul_digits
        if side == 'left':
            keys = [mul(g, y) for y in z.keys]
        else:
            keys = [mul(y, g) for y in z.keys]
        shifted = AlgebraElement(self.model, list(keys) + list(z.keys),
                                 np.concatenate([z.coeffs, -z.coeffs]).view(self.field))
        return self.expand_vector(shifted)

    def _table(self, side, i):
        key = (side, i)
        if key not in self._tables:
            name = f'{side}_{i}'
            table = fileio.load_table(self._table_file, name) if self._table_file else None
            if table is None or table.shape != (self.dim, self.dim):
                logger.info(f'building {name} table of {self}')
                rows = [self._generator_row(i, k, side) for k in self.basis]
                table = linalg.as_field(self.field, [r[None, :] for r in rows], self.dim)
                if self._table_file:
                    fileio.write_table(self._table_file, name, table)
            self._tables[key] = self.field(np.asarray(table))
        return self._tables[key]

    def left_matrix(self, i):
        """row k holds z_i z^k; v -> v @ L_i is left multiplication by z_i"""
        return self._table('left', i)

    def right_matrix(self, i):
        """row k holds z^k z_i"""
        return self._table('right', i)

    def left_power(self, i, e):
        key = (i, e)
        if key not in self._powers:
            self._powers[key] = np.linalg.matrix_power(self.left_matrix(i), e)
        return self._powers[key]

    def apply_left(self, exponents, v, step=1):
        """z^k v, applying z_n^{k_n} first; exponents must be multiples of `step`"""
        for i in range(self.model.n - 1, -1, -1):
            e = exponents[i]
            if e:
                if e % step:
                    raise ValueError(f'exponent {e} is not a multiple of {step}')
                matrix = self.left_power(i, step)
                for _ in range(e // step):
                    v = v @ matrix
        return v

    def apply_right(self, exponents, v):
        """v z^k, applying z_1^{k_1} first"""
        for i in range(self.model.n):
            for _ in range(exponents[i]):
                v = v @ self.right_matrix(i)
        return v

    def _cost(self, u):
        nonzero = np.flatnonzero(u)
        return int(self.degrees[nonzero].sum())

    def mul(self, u, v):
        """truncated product of two coefficient vectors, expanding the cheaper factor"""
        result = self.zeros()
        if self._cost(u) <= self._cost(v):
            for i in np.flatnonzero(u):
                result = result + self.apply_left(self.basis[i], v)*u[i]
        else:
            for i in np.flatnonzero(v):
                result = result + self.apply_right(self.basis[i], u)*v[i]
        return result

    def mono_mul(self, k, l):
        """z^k z^l; in-order concatenations need no computation"""
        last = max((i for i, x in enumerate(k) if x), default=-1)
        first = min((i for i, x in enumerate(l) if x), default=self.model.n)
        if last <= first:
            return self.unit([a + b for a, b in zip(k, l)]) if all(a + b < self.model.modulus for a, b in zip(k, l)) else self.zeros()
        return self.apply_left(k, self.unit(l))

    ### filtrations

    def madic_chain(self):
        """images of m^0, m^1, ... up to the first zero piece"""
        if self._madic is None:
            n = self.model.n
            chain = [linalg.coordinate_space(self.field, range(self.dim), self.dim)]
            while chain[-1].shape[0] > 0:
                S = chain[-1]
                blocks = [S @ self.left_matrix(i) for i in range(n)] + [S @ self.right_matrix(i) for i in range(n)]
                chain.append(linalg.span(self.field, blocks, self.dim))
            self._madic = chain
        return self._madic

    def subgroup_monomial_operator(self, y, N):
        """matrix of left multiplication by z^{p^N y}"""
        pN = self.p**N
        Q = self.field.Identity(self.dim)
        for i in range(self.model.n - 1, -1, -1):
            for _ in range(y[i]):
                Q = Q @ self.left_power(i, pN)
        return Q

    def subgroup_exponents(self, N, minimum):
        """y with wt(y) >= minimum and p^N wt(y) <= T"""
        pN = self.p**N
        top = self.cutoff // pN
        bounds = [top // w for w in self.model.weights]
        for y in itertools.product(*(range(b + 1) for b in bounds)):
            wt = sum(w*x for w, x in zip(self.model.weights, y))
            if max(minimum, 0) <= wt <= top:
                yield y

    def span_of_filtration(self, tag, N=None):
        """the filtration piece inside the weight <= T space, as a row-reduced basis"""
        tag = tag if isinstance(tag, FiltrationTag) else FiltrationTag(*tag)
        if tag.kind is FiltrationKind.M_ADIC:
            j = tag.index
        else:
            N = self.model.cfg.level(N) if N is None else N
            if N >= self.model.M:
                raise LevelTooDeep(f'N={N} requires N < M = {self.model.M}')
            j = tag.index*self.p**N
        if j > self.cutoff and tag.kind is not FiltrationKind.N_RES:
            raise CutoffBeyondFaithful(f'filtration index {j} exceeds the cutoff {self.cutoff}')

        if tag.kind is FiltrationKind.N_RES:
            blocks = [self.subgroup_monomial_operator(y, N) for y in self.subgroup_exponents(N, tag.index)]
            return linalg.span(self.field, blocks, self.dim)

        chain = self.madic_chain()
        if j >= len(chain):
            return self.field.Zeros((0, self.dim))
        return chain[j]

@functools.lru_cache(maxsize=None)
def truncated_algebra(model, cutoff, faithful=True):
    """the cached truncated algebra of a model"""
    return TruncatedAlgebra(model, cutoff, faithful)

def expand(x, T):
    return truncated_algebra(x.model, T).expand(x)

def nu(x, T):
    return truncated_algebra(x.model, T).expand(x).nu()

def m_power_member(x, j, T):
    """x in m_G^j, i.e. nu(x) >= j; determinate whenever j <= T"""
    if j > T:
        raise CutoffBeyondFaithful(f'index {j} exceeds the cutoff {T}')
    value = nu(x, T)
    return isinstance(value, AboveCutoff) or value >= j

def span_of_filtration(model, tag, T, N=None):
    return truncated_algebra(model, T).span_of_filtration(tag, N)

def finite_expansion(x, limit=10**6):
    """exact monomial coefficients in the finite quotient, over all exponent vectors"""
    model = x.model
    size = model.modulus**model.n
    if size > limit:
        raise ValueError(f'the finite algebra has {size} monomials, more than {limit}')
    field = model.cfg.field
    if not x.keys:
        return field.Zeros(size)
    table = binomial_table(model.p, model.M)
    X = np.array(x.keys, dtype=np.int64)
    R = field(table[X[:, 0], :])*x.coeffs[:, None]
    for i in range(1, model.n):
        E = field(table[X[:, i], :])
        R = (R[:, :, None]*E[:, None, :]).reshape(len(X), -1)
    return field.Ones(len(X)) @ R

### checks

def check_maxideals(algebra):
    """span of m^j equals {nu >= j} for all j <= T"""
    chain = algebra.madic_chain()
    dims = []
    for j in range(algebra.cutoff + 1):
        span = chain[j] if j < len(chain) else algebra.field.Zeros((0, algebra.dim))
        weights = algebra.weight_space(j)
        dims.append(span.shape[0])
        if span.shape[0] != weights.shape[0] or not linalg.contains(weights, span) or not linalg.contains(span, weights):
            return check_result(False, witness=dict(index=j, span_dim=span.shape[0], weight_dim=weights.shape[0]))
    return check_result(True, cutoff=algebra.cutoff, dims=dims)

def check_quaternion_commutator(cfg, samples=None, rng=None):
    """[(1 + [zeta]Pi), (1 + gamma Pi)] = 1 + gamma([zeta] - [zeta^{p^f}])p mod p Pi O_D"""
    ring = quad_ring(cfg, 2)
    base = base_ring(cfg, 2)
    zeta = ring.gen
    x = QuaternionInt(ring.one, zeta)

    exhaustive = samples is None or base.modulus**base.degree <= samples
    gammas = base.elements() if exhaustive else (base.random(rng) for _ in range(samples))
    count = 0
    for gamma in gammas:
        g = ring.embed_base(gamma)
        y = QuaternionInt(ring.one, g)
        commutator = x*y*x.inverse()*y.inverse()
        target = QuaternionInt(1 + g*(zeta - zeta.frobenius())*cfg.p, ring.zero)
        if not (commutator - target).in_p_pi_order():
            return check_result(False, witness=dict(gamma=list(gamma.coeffs)))
        count += 1
    return check_result(True, values=count, exhaustive=exhaustive)

def random_sparse_vector(algebra, rng, terms=3, min_degree=0):
    field = algebra.field
    v = algebra.zeros()
    candidates = algebra.indices_at_least(min_degree)
    for i in rng.choice(candidates, size=min(terms, len(candidates)), replace=False):
        v[i] = int(rng.integers(1, field.order))
    return v

def check_nu_additivity(algebra, rng, samples):
    """nu(xy) = nu(x) + nu(y) whenever the sum is within the cutoff"""
    tested = skipped = 0
    for _ in range(samples):
        u = random_sparse_vector(algebra, rng, int(rng.integers(1, 4)), int(rng.integers(0, algebra.cutoff + 1)))
        v = random_sparse_vector(algebra, rng, int(rng.integers(1, 4)), int(rng.integers(0, algebra.cutoff + 1)))
        nu_u, nu_v = algebra.nu(u), algebra.nu(v)
        if nu_u + nu_v > algebra.cutoff:
            skipped += 1
            continue
        value = algebra.nu(algebra.mul(u, v))
        if value != nu_u + nu_v:
            return check_result(False, witness=dict(u=algebra.element(u).to_dict(), v=algebra.element(v).to_dict(), nu=str(value)))
        tested += 1
    return check_result(PASS if tested else INDETERMINATE, tested=tested, beyond_cutoff=skipped)

def check_subgroup_expansion(model, N, rng, samples, terms=4):
    """x is supported on G^{p^N} iff every exponent of its expansion lies in p^N Z"""
    pN = model.p**N
    field = model.cfg.field
    shape = (model.modulus,)*model.n
    for n in range(samples):
        keys = []
        for _ in range(terms):
            digits = model.random_digits(rng)
            keys.append(tuple(d - d % pN for d in digits) if n % 3 else tuple(digits))
        if n % 3 == 2:
            keys[-1] = tuple(model.random_digits(rng))
        coeffs = field(rng.integers(1, field.order, size=len(keys)))
        x = AlgebraElement(model, keys, coeffs)

        supported = all(d % pN == 0 for k in x.keys for d in k)
        dense = finite_expansion(x).reshape(shape)
        exponents = np.argwhere(dense != 0)
        divisible = bool(np.all(exponents % pN == 0))
        if supported != divisible:
            return check_result(False, witness=dict(element=x.to_dict(), supported=supported, divisible=divisible))
    return check_result(True, samples=samples)
