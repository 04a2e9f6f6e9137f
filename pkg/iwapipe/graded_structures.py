"""
The graded ring gr F[[G]] at truncation

gr^d is identified with the span of the monomial classes of weight d; classes are multiplied
through the truncated algebra and read off in the top degree. Ideals are tables of subspaces,
one per degree, closed under multiplication by the generators on both sides.
"""

from __future__ import annotations

import functools
import itertools
import logging
import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from iwapipe import linalg
from iwapipe.errors import ContractViolation, CutoffBeyondFaithful, NonConvergent, NonHomogeneousInput
from iwapipe.iwasawa_algebra import AboveCutoff, decode_coeff, encode_coeff, truncated_algebra
from iwapipe.padic_core import residue_field
from iwapipe.utility import INDETERMINATE, PASS, check_result

logger = logging.getLogger(__name__)

class GradedClass:
    """a homogeneous element of gr^degree, by its coordinates on the weight-degree monomials"""
    __slots__ = ('ring', 'degree', 'coords')

    def __init__(self, ring, degree, coords):
        self.ring = ring
        self.degree = degree
        self.coords = coords

    @property
    def rep(self):
        """a representative AlgebraElement with nu = degree"""
        return self.ring.algebra.element(self.ring.embed(self))

    def is_zero(self):
        return not np.any(self.coords)

    def _check(self, other):
        if other.ring is not self.ring or other.degree != self.degree:
            raise ValueError(f'cannot add classes of degrees {self.degree} and {other.degree}')

    def __add__(self, other):
        self._check(other)
        return GradedClass(self.ring, self.degree, self.coords + other.coords)

    def __sub__(self, other):
        self._check(other)
        return GradedClass(self.ring, self.degree, self.coords - other.coords)

    def __neg__(self):
        return GradedClass(self.ring, self.degree, -self.coords)

    def __mul__(self, other):
        if isinstance(other, GradedClass):
            return self.ring.mul(self, other)
        field = self.ring.field
        c = other if isinstance(other, field) else field(int(other) % field.characteristic)
        return GradedClass(self.ring, self.degree, self.coords*c)

    __rmul__ = __mul__

    def __pow__(self, e):
        return self.ring.power(self, e)

    def __eq__(self, other):
        if not isinstance(other, GradedClass):
            return NotImplemented
        return self.ring is other.ring and self.degree == other.degree and np.array_equal(self.coords, other.coords)

    def __repr__(self):
        basis = self.ring.basis(self.degree)
        terms = ' + '.join(f'{int(c)}*{self.ring.format_monomial(basis[i])}' for i, c in enumerate(self.coords) if c)
        return f'GradedClass(deg {self.degree}: {terms or "0"})'

class GradedRing:
    """gr F[[G]] in degrees <= T of a truncated algebra"""
    def __init__(self, algebra):
        self.algebra = algebra
        self.model = algebra.model
        self.field = algebra.field
        self.cutoff = algebra.cutoff
        self.f = self.model.f
        self._indices = [algebra.indices_of_degree(d) for d in range(self.cutoff + 1)]
        self._blocks = {}
        self._tables = {}

    def __repr__(self):
        return f'GradedRing({self.model}, T={self.cutoff})'

    def _require(self, degree):
        if degree > self.cutoff:
            raise CutoffBeyondFaithful(f'degree {degree} exceeds the cutoff {self.cutoff}')

    def dim(self, degree):
        return len(self._indices[degree])

    def basis(self, degree):
        return [self.algebra.basis[i] for i in self._indices[degree]]

    def format_monomial(self, exps):
        names = [name.lower() for name in self.model.names]
        return '*'.join(f'{name}^{e}' if e > 1 else name for name, e in zip(names, exps) if e) or '1'

    def zero(self, degree):
        self._require(degree)
        return GradedClass(self, degree, self.field.Zeros(self.dim(degree)))

    def monomial_class(self, exps):
        exps = tuple(exps)
        degree = self.algebra.weight(exps)
        self._require(degree)
        v = self.algebra.unit(exps)
        return GradedClass(self, degree, v[self._indices[degree]])

    def generator(self, i):
        """class of z_i: a_i for i < f, b_{i-f} for i < 2f, c_{i-2f} otherwise"""
        exps = [0]*self.model.n
        exps[i] = 1
        return self.monomial_class(exps)

    def a(self, i):
        return self.generator(i)

    def b(self, i):
        return self.generator(self.f + i)

    def c(self, i):
        return self.generator(2*self.f + i)

    def degree_one(self):
        return [self.generator(i) for i in range(2*self.f)]

    def embed(self, cls):
        v = self.algebra.zeros()
        v[self._indices[cls.degree]] = cls.coords
        return v

    def class_of(self, vector):
        """leading class of a nonzero coefficient vector"""
        degree = self.algebra.nu(vector)
        if isinstance(degree, AboveCutoff):
            raise CutoffBeyondFaithful('the element vanishes through the cutoff; its leading class is unknown')
        return GradedClass(self, degree, vector[self._indices[degree]])

    def component(self, vector, degree):
        return GradedClass(self, degree, vector[self._indices[degree]])

    def mul(self, x, y):
        """product of classes through the graded blocks, expanding the factor with fewer monomials"""
        degree = x.degree + y.degree
        self._require(degree)
        weights = self.model.weights
        result = self.field.Zeros(self.dim(degree))
        if np.count_nonzero(y.coords) <= np.count_nonzero(x.coords):
            basis = self.basis(y.degree)
            for idx in np.flatnonzero(y.coords):
                v, d = x.coords, x.degree
                for i, e in enumerate(basis[idx]):
                    for _ in range(e):
                        v = v @ self.block('right', i, d)
                        d += weights[i]
                result = result + v*y.coords[idx]
        else:
            basis = self.basis(x.degree)
            for idx in np.flatnonzero(x.coords):
                v, d = y.coords, y.degree
                for i in range(self.model.n - 1, -1, -1):
                    for _ in range(basis[idx][i]):
                        v = v @ self.block('left', i, d)
                        d += weights[i]
                result = result + v*x.coords[idx]
        return GradedClass(self, degree, result)

    def power(self, x, e):
        self._require(x.degree*e)
        result = self.monomial_class((0,)*self.model.n)
        for _ in range(e):
            result = self.mul(result, x)
        return result

    def commutator_class(self, x, y):
        return self.mul(x, y) - self.mul(y, x)

    ### blocks and ideals

    def block(self, side, i, degree):
        """matrix of z_i * (side 'left') or * z_i (side 'right') from gr^degree to gr^{degree + w_i}"""
        key = (side, i, degree)
        if key not in self._blocks:
            target = degree + self.model.weights[i]
            self._require(target)
            matrix = self.algebra.left_matrix(i) if side == 'left' else self.algebra.right_matrix(i)
            self._blocks[key] = matrix[np.ix_(self._indices[degree], self._indices[target])]
        return self._blocks[key]

    def ideal_table(self, generators, D=None):
        """the two-sided ideal generated by homogeneous classes, as one subspace of gr^d per d <= D"""
        D = self.cutoff if D is None else D
        self._require(D)
        key = (D,) + tuple(sorted((g.degree, tuple(int(c) for c in g.coords)) for g in generators))
        if key in self._tables:
            return self._tables[key]

        table = []
        for d in range(D + 1):
            blocks = [g.coords[None, :] for g in generators if g.degree == d]
            for i, w in enumerate(self.model.weights):
                if d - w >= 0 and table[d - w].shape[0]:
                    blocks.append(table[d - w] @ self.block('left', i, d - w))
                    blocks.append(table[d - w] @ self.block('right', i, d - w))
            table.append(linalg.span(self.field, blocks, self.dim(d)))
        logger.debug(f'ideal table of {len(generators)} generators: dims {[t.shape[0] for t in table]}')
        self._tables[key] = table
        return table

    def contains(self, table, cls):
        if cls.degree >= len(table):
            raise CutoffBeyondFaithful(f'degree {cls.degree} is beyond the ideal table')
        return linalg.contains(table[cls.degree], cls.coords[None, :])

    def c_ideal(self, D=None):
        return self.ideal_table([self.c(i) for i in range(self.f)], D)

    def hilbert_dims(self, quotient_by_c=False):
        """dim gr^j for j <= T from the m-adic chain, optionally modulo (c_0, ..., c_{f-1})"""
        chain = self.algebra.madic_chain()
        ranks = [chain[j].shape[0] if j < len(chain) else 0 for j in range(self.cutoff + 2)]
        dims = [ranks[j] - ranks[j + 1] for j in range(self.cutoff + 1)]
        if quotient_by_c:
            table = self.c_ideal()
            dims = [d - t.shape[0] for d, t in zip(dims, table)]
        return dims

@functools.lru_cache(maxsize=None)
def graded_ring(model, cutoff):
    return GradedRing(truncated_algebra(model, cutoff))

def hilbert_oracle(f, T, quotient_by_c=False):
    """monomial counts in 2f degree-one variables, plus f degree-two variables unless quotiented"""
    dims = []
    for d in range(T + 1):
        if quotient_by_c:
            dims.append(math.comb(d + 2*f - 1, 2*f - 1))
        else:
            dims.append(sum(math.comb(d - 2*k + 2*f - 1, 2*f - 1)*math.comb(k + f - 1, f - 1) for k in range(d//2 + 1)))
    return dims

def commutator_class(x, y):
    return x.ring.commutator_class(x, y)

def check_power_commutator_identity(ring, i, x, l):
    """[g_i^l, x] = l g_i^{l-1} [g_i, x] in gr, for a degree-one generator g_i"""
    g = ring.generator(i)
    ring._require(l*g.degree + x.degree)
    lhs = ring.commutator_class(ring.power(g, l), x)
    rhs = ring.mul(ring.power(g, l - 1), ring.commutator_class(g, x))*l
    return lhs == rhs

def check_centrality(ring, cls):
    """[cls, g] = 0 for every degree-one generator g"""
    ring._require(cls.degree + 1)
    return all(ring.commutator_class(cls, g).is_zero() for g in ring.degree_one())

def check_regular_sequence(ring):
    """multiplication by c_i is injective on gr/(c_0, ..., c_{i-1}) in every degree through the cutoff"""
    for i in range(ring.f):
        table = ring.ideal_table([ring.c(j) for j in range(i)])
        for d in range(ring.cutoff - 1):
            multiply = ring.block('left', 2*ring.f + i, d)
            image = linalg.span(ring.field, [multiply, table[d + 2]], ring.dim(d + 2))
            rank = image.shape[0] - table[d + 2].shape[0]
            expected = ring.dim(d) - table[d].shape[0]
            if rank != expected:
                return check_result(False, witness=dict(c_index=i, degree=d, rank=rank, expected=expected))
    return check_result(True, cutoff=ring.cutoff)

def subgroup_classes(ring, N):
    """the classes a_i^{p^N}, b_i^{p^N}, c_i^{p^N} generating gr F[[G^{p^N}]]"""
    pN = ring.model.p**N
    classes = []
    for i in range(ring.model.n):
        exps = [0]*ring.model.n
        exps[i] = pN
        if ring.algebra.weight(exps) <= ring.cutoff:
            classes.append(ring.monomial_class(exps))
    return classes

def check_subring_commutative(ring, N):
    """all pairwise commutators of the p^N-th power classes vanish through the cutoff"""
    classes = subgroup_classes(ring, N)
    tested = skipped = 0
    for x, y in itertools.combinations(classes, 2):
        if x.degree + y.degree > ring.cutoff:
            skipped += 1
            continue
        if not ring.commutator_class(x, y).is_zero():
            return check_result(False, witness=dict(x=repr(x), y=repr(y)))
        tested += 1
    return check_result(PASS if tested else INDETERMINATE, pairs=tested, beyond_cutoff=skipped)

### ideal specifications

@dataclass(frozen=True)
class Term:
    """coeff * a_0^{m_0} ... a_{f-1}^{m_{f-1}} b_0^{n_0} ... b_{f-1}^{n_{f-1}}"""
    m: tuple
    n: tuple
    coeff: int

    @property
    def degree(self):
        return sum(self.m) + sum(self.n)

@dataclass
class IdealSpec:
    """J = (f_1, ..., f_n) + (c_0, ..., c_{f-1}); each f_i is a list of Terms"""
    f: int
    f_gens: list = dataclass_field(default_factory=list)
    name: str = 'J'

    @property
    def homogeneous(self):
        return all(len({t.degree for t in gen}) <= 1 for gen in self.f_gens)

    def homogenize(self):
        """the smallest homogeneous overideal: every f_i replaced by its homogeneous components"""
        if self.homogeneous:
            return self
        gens = []
        for gen in self.f_gens:
            by_degree = {}
            for t in gen:
                by_degree.setdefault(t.degree, []).append(t)
            gens.extend(by_degree[d] for d in sorted(by_degree))
        logger.info(f'{self.name}: replaced {len(self.f_gens)} generators by {len(gens)} homogeneous components')
        return IdealSpec(self.f, gens, self.name)

    def classes(self, ring):
        """f_i classes followed by c_0, ..., c_{f-1}"""
        spec = self.homogenize()
        return [polynomial_class(ring, gen) for gen in spec.f_gens if gen] + [ring.c(i) for i in range(self.f)]

    def polynomials(self):
        """generators as lists of (coefficient, exponent vector) pairs, c_i last"""
        f = self.f
        spec = self.homogenize()
        result = [[(t.coeff, t.m + t.n + (0,)*f) for t in gen] for gen in spec.f_gens if gen]
        for i in range(f):
            exps = [0]*3*f
            exps[2*f + i] = 1
            result.append([(1, tuple(exps))])
        return result

    def to_dict(self, p):
        return dict(f_gens=[[dict(m=list(t.m), n=list(t.n), coeff=encode_coeff(t.coeff, p, self.f)) for t in gen]
                            for gen in self.f_gens])

    @classmethod
    def from_dict(cls, data, cfg, name='J'):
        field = cfg.field
        gens = []
        for gen in data.get('f_gens', []):
            terms = []
            for term in gen:
                m, n = tuple(int(x) for x in term['m']), tuple(int(x) for x in term['n'])
                if len(m) != cfg.f or len(n) != cfg.f:
                    raise ValueError(f'exponent vectors must have length f = {cfg.f}')
                terms.append(Term(m, n, int(decode_coeff(field, term.get('coeff', [1])))))
            gens.append(terms)
        return cls(cfg.f, gens, name)

@dataclass
class IdealSpecN:
    """J_N = (f~_1, ..., f~_n) + (c_0^{p^N}, ..., c_{f-1}^{p^N})"""
    f: int
    N: int
    f_tilde: list
    p: int
    name: str = 'J_N'

    def polynomials(self):
        """generators as lists of (coefficient, exponent vector) pairs, c_i^{p^N} last"""
        f = self.f
        result = [[(t.coeff, t.m + t.n + (0,)*f) for t in gen] for gen in self.f_tilde if gen]
        for i in range(f):
            exps = [0]*3*f
            exps[2*f + i] = self.p**self.N
            result.append([(1, tuple(exps))])
        return result

    def tilde_classes(self, ring):
        """the f~_i of degree within the cutoff"""
        return [polynomial_class(ring, gen) for gen in self.f_tilde if gen and gen[0].degree <= ring.cutoff]

    def classes(self, ring):
        """generators of degree within the cutoff"""
        pN = ring.model.p**self.N
        c_powers = []
        if 2*pN <= ring.cutoff:
            for i in range(self.f):
                exps = [0]*ring.model.n
                exps[2*self.f + i] = pN
                c_powers.append(ring.monomial_class(exps))
        return self.tilde_classes(ring) + c_powers

def polynomial_class(ring, terms):
    """class of a homogeneous polynomial in the a's and b's"""
    degrees = {t.degree for t in terms}
    if len(degrees) != 1:
        raise NonHomogeneousInput(f'terms of degrees {sorted(degrees)}')
    result = ring.zero(degrees.pop())
    for t in terms:
        result = result + ring.monomial_class(t.m + t.n + (0,)*ring.f)*ring.field(t.coeff)
    return result

def build_JN(J, N, p):
    """raise coefficients to the p^N-th power and multiply every exponent by p^N"""
    if not J.homogeneous:
        raise NonHomogeneousInput(f'{J.name} is not homogeneous')
    field = residue_field(p, J.f)
    pN = p**N
    f_tilde = [[Term(tuple(pN*x for x in t.m), tuple(pN*x for x in t.n), int(field(t.coeff)**pN)) for t in gen]
               for gen in J.f_gens]
    return IdealSpecN(J.f, N, f_tilde, p, f'{J.name}_{N}')

def c_ideal(f):
    return IdealSpec(f, [], 'c')

def a_ideal(f):
    """(a_0, ..., a_{f-1}) + c"""
    gens = []
    for i in range(f):
        m = [0]*f
        m[i] = 1
        gens.append([Term(tuple(m), (0,)*f, 1)])
    return IdealSpec(f, gens, 'a')

def mixed_ideal(cfg):
    """(a_0^2 + alpha a_0 b_0) + c, alpha a primitive element of F_{p^f}"""
    f = cfg.f
    e0 = (1,) + (0,)*(f - 1)
    alpha = int(cfg.field.primitive_element)
    gen = [Term(tuple(2*x for x in e0), (0,)*f, 1), Term(e0, e0, alpha)]
    return IdealSpec(f, [gen], 'mixed')

PRESET_IDEALS = dict(c=lambda cfg: c_ideal(cfg.f), a=lambda cfg: a_ideal(cfg.f), mixed=mixed_ideal)

def ideal_spec(cfg, spec):
    """a preset name or an IdealSpec JSON object"""
    if isinstance(spec, str):
        if spec not in PRESET_IDEALS:
            raise ValueError(f"unknown ideal '{spec}' (expected one of {', '.join(PRESET_IDEALS)})")
        return PRESET_IDEALS[spec](cfg)
    return IdealSpec.from_dict(spec, cfg).homogenize()

def check_jn_containment(ring, J, N):
    """J_N inside J through the cutoff, and gr/J commutative in degree two"""
    J = J.homogenize()
    table = ring.ideal_table(J.classes(ring))
    JN = build_JN(J, N, ring.model.p)
    checked = 0
    for cls in JN.classes(ring):
        if not ring.contains(table, cls):
            return check_result(False, witness=dict(generator=repr(cls)))
        checked += 1
    for x, y in itertools.combinations(ring.degree_one(), 2):
        if not ring.contains(table, ring.commutator_class(x, y)):
            return check_result(False, witness=dict(commutator=[repr(x), repr(y)]))
    return check_result(True, generators=checked)

### tau rewriting

def tau_split(exps, N, p):
    """floor multiples of p^N and fractional remainders of every exponent"""
    pN = p**N
    chunk = tuple(pN*(e//pN) for e in exps)
    rem = tuple(e % pN for e in exps)
    return chunk, rem

def tau_vector(algebra, exps, N):
    """tau(z^k) = z^{chunk} z^{rem} as a coefficient vector, checking nu(tau) = nu and nu(tau - z^k) > nu"""
    weight = algebra.weight(exps)
    if weight > algebra.cutoff:
        raise CutoffBeyondFaithful(f'monomial of weight {weight} exceeds the cutoff {algebra.cutoff}')
    chunk, rem = tau_split(exps, N, algebra.p)
    tau = algebra.apply_left(chunk, algebra.unit(rem), step=algebra.p**N)
    difference = algebra.nu(tau - algebra.unit(exps))
    if algebra.nu(tau) != weight or not (isinstance(difference, AboveCutoff) or difference > weight):
        raise ContractViolation(f'tau of {exps} changes the leading term')
    return tau

def tau_rewrite(algebra, exps, N):
    """the exact element (floor chunks in basis order) * (remainders in basis order)"""
    tau_vector(algebra, exps, N)
    chunk, rem = tau_split(exps, N, algebra.p)
    return algebra.monomial(chunk)*algebra.monomial(rem)

def sandwich_transcript(algebra, exps, N, max_steps=None):
    """rewrite z^k as sum c z^{p^N y} z^{rem} + (weight > T) by iterating tau over the lowest layer

    Returns a list of (coefficient, y, rem) terms.
    """
    pN = algebra.p**N
    residue = algebra.unit(exps)
    transcript = []
    previous = -1
    steps = 0
    while True:
        weight = algebra.nu(residue)
        if isinstance(weight, AboveCutoff):
            return transcript
        if weight <= previous:
            raise NonConvergent(f'residue weight {weight} did not increase past {previous}')
        previous = weight
        for i in algebra.indices_of_degree(weight):
            c = residue[i]
            if not c:
                continue
            k = algebra.basis[i]
            residue = residue - tau_vector(algebra, k, N)*c
            chunk, rem = tau_split(k, N, algebra.p)
            transcript.append((c, tuple(x//pN for x in chunk), rem))
        steps += 1
        if max_steps and steps > max_steps:
            raise NonConvergent(f'no convergence after {max_steps} layers')

def check_sandwich(algebra, k, N, rng, samples, transcripts=None):
    """n_k F[[G]] inside m^{k p^N} inside n_{k-4f} F[[G]], through the cutoff

    samples random elements test the first inclusion, transcripts random monomials the second
    (default: samples).
    """
    transcripts = samples if transcripts is None else transcripts
    p, f = algebra.p, algebra.model.f
    pN = p**N
    if k*pN > algebra.cutoff:
        raise CutoffBeyondFaithful(f'k p^N = {k*pN} exceeds the cutoff {algebra.cutoff}')
    weights = algebra.model.weights

    ### first inclusion
    subgroup = [y for y in algebra.subgroup_exponents(N, k)]
    for _ in range(samples if subgroup else 0):
        y = subgroup[rng.integers(len(subgroup))]
        m = algebra.basis[rng.integers(algebra.dim)]
        v = algebra.apply_left(tuple(pN*x for x in y), algebra.unit(m), step=pN)
        value = algebra.nu(v)
        if not isinstance(value, AboveCutoff) and value < k*pN:
            return check_result(False, witness=dict(inclusion='first', y=y, right=m, nu=value))

    ### second inclusion
    candidates = algebra.indices_at_least(k*pN)
    lowest = k - 4*f
    terms = 0
    for _ in range(transcripts if len(candidates) else 0):
        exps = algebra.basis[candidates[rng.integers(len(candidates))]]
        transcript = sandwich_transcript(algebra, exps, N, max_steps=algebra.cutoff + 1)
        total = algebra.zeros()
        for c, y, rem in transcript:
            if sum(w*x for w, x in zip(weights, y)) < lowest:
                return check_result(False, witness=dict(inclusion='second', monomial=exps, chunk=y))
            total = total + algebra.apply_left(tuple(pN*x for x in y), algebra.unit(rem), step=pN)*c
        if not np.array_equal(total, algebra.unit(exps)):
            return check_result(False, witness=dict(inclusion='second', monomial=exps, reason='re-expansion differs'))
        terms += len(transcript)
    return check_result(True, samples=samples, transcripts=transcripts, transcript_terms=terms, lowest_index=lowest)

def check_pigeonhole(ring, J, N, rng, samples):
    """products of (f+n)p^N generators of J lie in (f~) + c; f_i^{p^N} = f~_i mod c"""
    J = J.homogenize()
    p = ring.model.p
    pN = p**N
    generators = J.classes(ring)
    JN = build_JN(J, N, p)
    bins = len(generators)
    draws = bins*pN
    if draws*min(g.degree for g in generators) > ring.cutoff:
        raise CutoffBeyondFaithful(f'{draws} generator products exceed the cutoff {ring.cutoff}')

    c_table = ring.c_ideal()
    target = ring.ideal_table(JN.tilde_classes(ring) + [ring.c(i) for i in range(ring.f)])

    for terms, tilde_terms in zip(J.f_gens, JN.f_tilde):
        if not terms or terms[0].degree*pN > ring.cutoff:
            continue
        gen = polynomial_class(ring, terms)
        if not ring.contains(c_table, ring.power(gen, pN) - polynomial_class(ring, tilde_terms)):
            return check_result(False, witness=dict(reduction=repr(gen)))

    tested = skipped = 0
    for _ in range(samples):
        sequence = rng.integers(bins, size=draws)
        counts = np.bincount(sequence, minlength=bins)
        if counts.max() < pN:
            return check_result(False, witness=dict(pigeonhole=counts.tolist()))
        degree = sum(generators[i].degree for i in sequence)
        if degree > ring.cutoff:
            skipped += 1
            continue
        product = generators[sequence[0]]
        for i in sequence[1:]:
            product = ring.mul(product, generators[i])
        if not ring.contains(target, product):
            return check_result(False, witness=dict(product=sequence.tolist()))
        tested += 1
    return check_result(PASS if tested else INDETERMINATE, tested=tested, beyond_cutoff=skipped, draws=draws)
