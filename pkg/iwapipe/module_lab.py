"""
Finite smooth G-modules: representations of G/G^{p^M} over F = F_{p^f}

Matrices act on column vectors; subspaces are stored as row spaces of vectors.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from iwapipe import linalg
from iwapipe.config import get_config
from iwapipe.errors import BoundExceeded, ConfigMismatch, ContractViolation, LevelTooDeep, RelationCheckFailed
from iwapipe.graded_structures import build_JN
from iwapipe.group_models import group_model
from iwapipe.iwasawa_algebra import FiltrationKind, truncated_algebra
from iwapipe.utility import check_result

logger = logging.getLogger(__name__)

PAIR_LIMIT = 2*10**9
TWIST_LIMIT = 24

def _matrix(field, data, dim):
    array = np.asarray(data, dtype=np.int64)
    if array.shape != (dim, dim):
        raise ValueError(f'expected a {dim}x{dim} matrix, got shape {array.shape}')
    if np.any(array < 0) or np.any(array >= field.order):
        raise ValueError(f'matrix entries must lie in [0, {field.order})')
    return field(array)

class FiniteModule:
    """a representation of G/G^{p^M} given by the images of the ordered-basis generators

    Arguments:
        cfg             PrimeConfig
        generators      3f invertible matrices over F_{p^f}
        provenance      'constructed' or 'loaded'
        label           short description for reports
    """
    def __init__(self, cfg, generators, provenance='constructed', label='module'):
        self.cfg = cfg
        self.model = group_model(cfg)
        self.field = cfg.field
        self.generators = [self.field(g) for g in generators]
        if len(self.generators) != self.model.n:
            raise ValueError(f'expected {self.model.n} generator matrices, got {len(self.generators)}')
        self.dim = self.generators[0].shape[0]
        self.provenance = provenance
        self.label = label
        self._powers = None
        self._z_powers = {}

    def __repr__(self):
        return f'FiniteModule({self.label}, dim={self.dim}, {self.cfg.case.value} p={self.cfg.p} f={self.cfg.f} M={self.cfg.M})'

    def generator_powers(self):
        """rho(g_i)^e for 0 <= e <= p^M"""
        if self._powers is None:
            identity = self.field.Identity(self.dim)
            self._powers = []
            for g in self.generators:
                powers = [identity]
                for _ in range(self.model.modulus):
                    powers.append(powers[-1] @ g)
                self._powers.append(powers)
        return self._powers

    def action(self, digits):
        """rho(g_1^{x_1} ... g_n^{x_n})"""
        powers = self.generator_powers()
        result = self.field.Identity(self.dim)
        for i, x in enumerate(digits):
            if x:
                result = result @ powers[i][x]
        return result

    def z_power(self, i, e):
        """(rho(g_i) - 1)^e"""
        key = (i, e)
        if key not in self._z_powers:
            if e == 0:
                self._z_powers[key] = self.field.Identity(self.dim)
            else:
                Z = self.generators[i] - self.field.Identity(self.dim)
                self._z_powers[key] = self.z_power(i, e - 1) @ Z
        return self._z_powers[key]

    def operator(self, exps):
        """the action of z^k = (g_1 - 1)^{k_1} ... (g_n - 1)^{k_n}"""
        result = self.field.Identity(self.dim)
        for i, e in enumerate(exps):
            if e:
                result = result @ self.z_power(i, e)
        return result

    def ring_generators(self):
        """actions of z_1, ..., z_n with their weights"""
        return [(self.z_power(i, 1), w) for i, w in enumerate(self.model.weights)]

    def restrict(self, N=None):
        """the module restricted to G^{p^N}, keeping only the actions of the g_i^{p^N}"""
        N = self.cfg.level(N)
        powers = self.generator_powers()
        return RestrictedModule(self.cfg, N, [powers[i][self.cfg.p**N] for i in range(self.model.n)], self.label)

    def transform(self, P):
        """the same module on the basis given by the columns of P"""
        P_inv = np.linalg.inv(P)
        return FiniteModule(self.cfg, [P_inv @ g @ P for g in self.generators], self.provenance, self.label)

    def to_dict(self):
        return dict(dim=self.dim, field=dict(p=self.cfg.p, f=self.cfg.f), level=self.cfg.M, case=self.cfg.case.value,
                    generators=[np.asarray(g, dtype=np.int64).tolist() for g in self.generators])

    @classmethod
    def from_dict(cls, data, cfg):
        field = data.get('field', {})
        if field.get('p', cfg.p) != cfg.p or field.get('f', cfg.f) != cfg.f or data.get('level', cfg.M) != cfg.M \
                or data.get('case', cfg.case.value) != cfg.case.value:
            raise ConfigMismatch(f'module data does not match {cfg}')
        dim = int(data['dim'])
        generators = [_matrix(cfg.field, g, dim) for g in data['generators']]
        return build_module(cfg, 'explicit', matrices=generators, provenance='loaded')

class RestrictedModule:
    """a module known only through the actions of the G^{p^N} generators g_i^{p^N}"""
    def __init__(self, cfg, N, h_generators, label='module'):
        self.cfg = cfg
        self.N = N
        self.model = group_model(cfg)
        self.field = cfg.field
        self.h_generators = [self.field(h) for h in h_generators]
        self.dim = self.h_generators[0].shape[0]
        self.label = label
        self._z_powers = {}

    def __repr__(self):
        return f'RestrictedModule({self.label}, dim={self.dim}, N={self.N})'

    def z_power(self, i, e):
        """(rho(g_i^{p^N}) - 1)^e"""
        key = (i, e)
        if key not in self._z_powers:
            if e == 0:
                self._z_powers[key] = self.field.Identity(self.dim)
            else:
                Z = self.h_generators[i] - self.field.Identity(self.dim)
                self._z_powers[key] = self.z_power(i, e - 1) @ Z
        return self._z_powers[key]

    def subgroup_operator(self, y):
        result = self.field.Identity(self.dim)
        for i, e in enumerate(y):
            if e:
                result = result @ self.z_power(i, e)
        return result

    def subgroup_generators(self):
        return [(self.z_power(i, 1), w) for i, w in enumerate(self.model.weights)]

    def transform(self, P):
        P_inv = np.linalg.inv(P)
        return RestrictedModule(self.cfg, self.N, [P_inv @ h @ P for h in self.h_generators], self.label)

def dualize(module):
    """the contragredient module: generators act by inverse transposes"""
    if isinstance(module, RestrictedModule):
        return RestrictedModule(module.cfg, module.N, [np.linalg.inv(h).T for h in module.h_generators],
                                f'dual({module.label})')
    return FiniteModule(module.cfg, [np.linalg.inv(g).T for g in module.generators], module.provenance,
                        f'dual({module.label})')

### construction

def build_module(cfg, source, rng=None, matrices=None, max_dim=None, provenance='constructed'):
    """a FiniteModule from 'trivial', 'regular', 'quotient' (seeded) or 'explicit' matrices"""
    field = cfg.field
    model = group_model(cfg)
    if source == 'trivial':
        return FiniteModule(cfg, [field.Identity(1) for _ in range(model.n)], provenance, 'trivial')

    if source == 'regular':
        limit = get_config()['limits']['max_regular_dim']
        if model.order > limit:
            raise BoundExceeded(f'the regular module has dimension {model.order} > {limit}')
        elements = list(model.all_digits())
        index = {x: i for i, x in enumerate(elements)}
        generators = []
        for i in range(model.n):
            g = model.unit_digits(i)
            P = field.Zeros((len(elements), len(elements)))
            for col, x in enumerate(elements):
                P[index[model.mul_digits(g, x)], col] = 1
            generators.append(P)
        return FiniteModule(cfg, generators, provenance, 'regular')

    if source == 'quotient':
        max_dim = get_config()['limits']['max_module_dim'] if max_dim is None else max_dim
        return quotient_of_regular(cfg, rng, max_dim)

    if source == 'explicit':
        if matrices is None:
            raise ValueError('explicit modules need generator matrices')
        module = FiniteModule(cfg, matrices, provenance, 'explicit')
        for g in module.generators:
            if g.shape != (module.dim, module.dim) or not linalg.is_invertible(g):
                raise ValueError('generator matrices must be invertible and of equal size')
        samples = get_config()['limits']['relation_samples']
        result = check_relations(module, rng or np.random.default_rng(cfg.seed), samples)
        if result['status'] != 'pass':
            raise RelationCheckFailed('generator matrices do not define a representation', result.get('witness'))
        return module

    raise ValueError(f"unknown module source '{source}' (expected trivial, regular, quotient or explicit)")

def quotient_of_regular(cfg, rng, max_dim):
    """a seeded quotient of F[G/G^{p^M}]: the truncated algebra modulo the submodule generated by random vectors"""
    model = group_model(cfg)
    cutoff = 1
    while cutoff + 1 < model.modulus and truncated_algebra(model, cutoff + 1).dim <= 2*max_dim:
        cutoff += 1
    algebra = truncated_algebra(model, cutoff)
    field = algebra.field
    L = [algebra.left_matrix(i) for i in range(model.n)]

    def closure(rows):
        space = linalg.span(field, rows, algebra.dim)
        while True:
            grown = linalg.span(field, [space] + [space @ Li for Li in L], algebra.dim)
            if grown.shape[0] == space.shape[0]:
                return space
            space = grown

    depth = int(rng.integers(1, cutoff + 1))
    sub = field.Zeros((0, algebra.dim))
    attempts = 0
    while attempts == 0 or algebra.dim - sub.shape[0] > max_dim:
        candidates = algebra.indices_at_least(depth)
        v = algebra.zeros()
        v[candidates] = field(rng.integers(0, field.order, size=len(candidates)))
        sub = closure([sub, v[None, :]])
        attempts += 1
        if attempts % 3 == 0 and depth > 1:
            depth -= 1

    pivots = [int(np.flatnonzero(row)[0]) for row in sub]
    free = [c for c in range(algebra.dim) if c not in set(pivots)]
    generators = []
    for Li in L:
        action = field.Identity(algebra.dim) + Li
        Q = field.Zeros((len(free), len(free)))
        for r, c in enumerate(free):
            w = action[c]
            if pivots:
                w = w - w[pivots] @ sub
            Q[r] = w[free]
        generators.append(Q.T)
    logger.info(f'quotient module of dim {len(free)} from the T={cutoff} truncation (depth {depth})')
    return FiniteModule(cfg, generators, 'constructed', f'quotient(T={cutoff}, dim={len(free)})')

def module_corpus(cfg, count, rng, max_dim=None):
    """a seeded family of quotient modules"""
    return [build_module(cfg, 'quotient', rng=rng, max_dim=max_dim) for _ in range(count)]

### relations

def check_relations(module, rng, samples=10000):
    """rho is multiplicative on normal forms and every generator has order dividing p^M

    Exhaustive for M = 1 (all pairs when affordable, otherwise generator times every element,
    which implies all pairs), sampled pairs for M >= 2.
    """
    model = module.model
    powers = module.generator_powers()
    identity = module.field.Identity(module.dim)
    for i in range(model.n):
        if not np.array_equal(powers[i][model.modulus], identity):
            return check_result(False, witness=dict(generator=model.names[i], reason='order does not divide p^M'))

    if module.cfg.M == 1:
        elements = list(model.all_digits())
        images = {x: module.action(x) for x in elements}
        if len(elements)**2*module.dim**3 <= PAIR_LIMIT:
            left, method = elements, 'all pairs'
        else:
            left, method = [model.unit_digits(i) for i in range(model.n)], 'generators times all elements'
        for x in left:
            for y in elements:
                if not np.array_equal(images[x] @ images[y], images[model.mul_digits(x, y)]):
                    return check_result(False, witness=dict(x=list(x), y=list(y)))
        return check_result(True, method=method, elements=len(elements))

    samples = max(samples, 10000)
    for _ in range(samples):
        x, y = tuple(model.random_digits(rng)), tuple(model.random_digits(rng))
        if not np.array_equal(module.action(x) @ module.action(y), module.action(model.mul_digits(x, y))):
            return check_result(False, witness=dict(x=list(x), y=list(y)))
    return check_result(True, method='sampled pairs', samples=samples)

### maps between modules

def equivariant_maps(sources, targets):
    """basis of {X : X A_i = B_i X for all i}, as a list of matrices"""
    field = type(sources[0])
    d1, d2 = sources[0].shape[0], targets[0].shape[0]
    I1, I2 = field.Identity(d1), field.Identity(d2)
    blocks = [linalg.kron(I2, A.T) - linalg.kron(B, I1) for A, B in zip(sources, targets)]
    system = linalg.as_field(field, blocks, d1*d2)
    null = system.null_space()
    return [v.reshape(d2, d1) for v in null]

def module_maps(M1, M2):
    """G-equivariant maps M1 -> M2"""
    if M1.cfg != M2.cfg:
        raise ConfigMismatch('modules over different configurations')
    return equivariant_maps(M1.generators, M2.generators)

def find_isomorphism(M1, M2, rng, attempts=20):
    """an invertible equivariant map, or None"""
    if M1.dim != M2.dim:
        return None
    basis = module_maps(M1, M2)
    if not basis:
        return None
    field = M1.field
    for _ in range(attempts):
        coeffs = field(rng.integers(0, field.order, size=len(basis)))
        X = field.Zeros((M2.dim, M1.dim))
        for c, B in zip(coeffs, basis):
            X = X + B*c
        if linalg.is_invertible(X):
            return X
    return None

def twisted_partner(module, N, rng, attempts=20):
    """conjugate by a random invertible element of the commutant of the G^{p^N}-action

    The partner shares every action of G^{p^N} while the generators g_i may act differently.
    """
    restricted = module.restrict(N)
    commutant = equivariant_maps(restricted.h_generators, restricted.h_generators)
    field = module.field
    for _ in range(attempts):
        coeffs = field(rng.integers(0, field.order, size=len(commutant)))
        U = field.Zeros((module.dim, module.dim))
        for c, B in zip(coeffs, commutant):
            U = U + B*c
        if linalg.is_invertible(U):
            break
    else:
        U = field.Identity(module.dim)
    U_inv = np.linalg.inv(U)
    return FiniteModule(module.cfg, [U @ g @ U_inv for g in module.generators], module.provenance,
                        f'twisted({module.label})')

### gradings

@dataclass
class GradedModule:
    """an adapted basis of a filtered module with the induced graded actions

    Arguments:
        kind            M_ADIC (gr), N_INT (gr_{N,int}) or N_RES (gr_{N,res})
        N               subgroup level (None for gr)
        step            nu-degree of one filtration step: 1 for gr, p^N otherwise
        chain           decreasing row spaces F_0 > F_1 > ... > 0
        basis           adapted basis (rows); basis rows of piece >= j span F_j
        degrees         piece index of every basis row
        source          FiniteModule or RestrictedModule providing the operators
    """
    kind: FiltrationKind
    N: int | None
    step: int
    chain: list
    basis: object
    degrees: np.ndarray
    source: object
    _inverse: object = dataclass_field(default=None, repr=False)
    _graded: dict = dataclass_field(default_factory=dict, repr=False)

    @property
    def dim(self):
        return self.basis.shape[0]

    @property
    def piece_dims(self):
        return [int(d) for d in np.bincount(self.degrees, minlength=len(self.chain) - 1)]

    @property
    def field(self):
        return type(self.basis)

    def piece_degrees(self):
        """nu-degree of every piece"""
        return [i*self.step for i in range(len(self.piece_dims))]

    def graded_operator(self, X, shift):
        """matrix (row convention, adapted coordinates) of the map gr_i -> gr_{i+shift} induced by X"""
        if self._inverse is None:
            self._inverse = np.linalg.inv(self.basis)
        full = self.basis @ X.T @ self._inverse
        rows = self.degrees[:, None]
        cols = self.degrees[None, :]
        if np.any(full[cols < rows + shift] != 0):
            raise ContractViolation(f'operator does not raise the filtration by {shift}')
        mask = cols == rows + shift
        return self.field(np.where(mask, np.asarray(full), 0))

    def polynomial_operator(self, polynomial):
        """graded action of a homogeneous sum of (coefficient, exponent vector) terms"""
        key = tuple(polynomial)
        if key in self._graded:
            return self._graded[key]
        weights = self.source.model.weights
        p = self.source.cfg.p
        total = None
        shift = None
        for coeff, exps in polynomial:
            if self.kind is FiltrationKind.M_ADIC:
                X = self.source.operator(exps)
                s = sum(w*e for w, e in zip(weights, exps))
            else:
                pN = p**self.N
                if any(e % pN for e in exps):
                    raise ValueError(f'{exps} is not an exponent of G^{{p^N}}')
                y = tuple(e//pN for e in exps)
                X = self.source.subgroup_operator(y)
                s = sum(w*e for w, e in zip(weights, y))
            if shift is not None and s != shift:
                raise ValueError('polynomial is not homogeneous')
            shift = s
            term = X*self.field(coeff)
            total = term if total is None else total + term
        self._graded[key] = self.graded_operator(total, shift)
        return self._graded[key]

    def ring_operators(self):
        """graded actions of the generators of the acting graded ring"""
        n = self.source.model.n
        result = []
        for i in range(n):
            exps = [0]*n
            exps[i] = 1 if self.kind is FiltrationKind.M_ADIC else self.source.cfg.p**self.N
            result.append(self.polynomial_operator(((1, tuple(exps)),)))
        return result

    def closure(self, rows):
        """the graded submodule generated by rows"""
        space = linalg.span(self.field, [rows], self.dim)
        generators = self.ring_operators()
        while space.shape[0]:
            grown = linalg.span(self.field, [space] + [space @ G for G in generators], self.dim)
            if grown.shape[0] == space.shape[0]:
                break
            space = grown
        return space

def _filtration_chain(field, dim, operators, limit):
    """F_0 = everything, F_i = sum_j X_j F_{i - w_j} (F_i = F_0 for i <= 0), down to 0"""
    chain = [field.Identity(dim)]
    wmax = max(w for _, w in operators)
    while chain[-1].shape[0]:
        i = len(chain)
        blocks = [chain[max(i - w, 0)] @ X.T for X, w in operators]
        nxt = linalg.span(field, blocks, dim)
        if i >= wmax and all(chain[-k].shape[0] == nxt.shape[0] for k in range(1, wmax + 1)):
            raise ContractViolation('the filtration does not reach zero; the action is not unipotent')
        chain.append(nxt)
        if len(chain) > limit:
            raise ContractViolation(f'the filtration is longer than {limit}')
    return chain

def grade(module, kind, N=None):
    """gr, gr_{N,int} or gr_{N,res} of a module; gr_{N,res} only needs the G^{p^N} action"""
    kind = FiltrationKind(kind)
    field = module.field
    dim = module.dim
    if kind is FiltrationKind.M_ADIC:
        if isinstance(module, RestrictedModule):
            raise ValueError('gr needs the full G-action')
        chain = _filtration_chain(field, dim, [(X, 1) for X, _ in module.ring_generators()], 2*dim + 4)
        step = 1
        source = module
        N = None
    elif kind is FiltrationKind.N_INT:
        if isinstance(module, RestrictedModule):
            raise ValueError('gr_{N,int} needs the full G-action')
        N = module.cfg.level(N)
        step = module.cfg.p**N
        madic = _filtration_chain(field, dim, [(X, 1) for X, _ in module.ring_generators()], 2*dim + 4)
        chain = madic[::step]
        if chain[-1].shape[0]:
            chain.append(field.Zeros((0, dim)))
        source = module.restrict(N)
    else:
        if isinstance(module, RestrictedModule):
            if N is not None and N != module.N:
                raise LevelTooDeep(f'restricted to level {module.N}, asked for {N}')
            source = module
            N = module.N
        else:
            N = module.cfg.level(N)
            source = module.restrict(N)
        step = module.cfg.p**N
        chain = _filtration_chain(field, dim, source.subgroup_generators(), 2*dim + 4)

    basis, degrees = linalg.complement_basis(chain)
    return GradedModule(kind, N, step, chain, basis, np.array(degrees, dtype=np.int64), source)

### annihilators

@dataclass
class AnnihilatorReport:
    ideal: str
    kind: str
    ell_min: int | None
    bound: int
    piece_dims: list

    def to_dict(self):
        return dict(ideal=self.ideal, kind=self.kind, bound=self.bound, piece_dims=self.piece_dims,
                    ell_min=self.ell_min if self.ell_min is not None else f'none <= {self.bound}')

def min_annihilator_exponent(graded, ideal, name=None):
    """smallest l with J^l gr M = 0: X_0 = gr M, X_{k+1} = submodule generated by g_i X_k"""
    bound = graded.dim + 1
    operators = [graded.polynomial_operator(tuple(poly)) for poly in ideal.polynomials()]
    name = name or getattr(ideal, 'name', 'J')
    current = graded.field.Identity(graded.dim)
    for ell in range(1, bound + 1):
        if not operators:
            break
        image = linalg.span(graded.field, [current @ G for G in operators], graded.dim)
        current = graded.closure(image)
        if current.shape[0] == 0:
            return AnnihilatorReport(name, graded.kind.value, ell, bound, graded.piece_dims)
    raise BoundExceeded(f'{name} does not kill {graded.kind.value} within {bound} steps')

def _product_operators(module, ideal, ell, rng, limit=64):
    """operators on M of ell-fold products of ideal generators, with their degrees"""
    weights = module.model.weights
    polys = ideal.polynomials()
    singles = []
    for poly in polys:
        X = None
        for coeff, exps in poly:
            term = module.operator(exps)*module.field(coeff)
            X = term if X is None else X + term
        singles.append((X, sum(w*e for w, e in zip(weights, poly[0][1]))))
    total = len(singles)**ell
    if total <= limit:
        words = itertools.product(range(len(singles)), repeat=ell)
    else:
        words = (tuple(rng.integers(len(singles), size=ell)) for _ in range(limit))
    for word in words:
        X = module.field.Identity(module.dim)
        degree = 0
        for i in word:
            X = X @ singles[i][0]
            degree += singles[i][1]
        yield word, X, degree

def _maps_into(chain, k, X, target):
    image = chain[k] @ X.T
    if target >= len(chain):
        return not np.any(image)
    return linalg.contains(chain[target], image)

def check_exponent_transfer(module, J, N, rng):
    """measured exponents of J and J_N on gr, gr_{N,int}, gr_{N,res} and the transfer inequalities"""
    N = module.cfg.level(N)
    p = module.cfg.p
    pN = p**N
    four_f = 4*module.cfg.f
    JN = build_JN(J.homogenize(), N, p)

    gr = grade(module, FiltrationKind.M_ADIC)
    gr_int = grade(module, FiltrationKind.N_INT, N)
    gr_res = grade(module, FiltrationKind.N_RES, N)
    ell_J = min_annihilator_exponent(gr, J).ell_min
    ell_gr = min_annihilator_exponent(gr, JN).ell_min
    ell_int = min_annihilator_exponent(gr_int, JN).ell_min
    ell_res = min_annihilator_exponent(gr_res, JN).ell_min

    verdicts = {
        'containment': ell_gr <= ell_J,
        'gr_to_int': ell_int <= ell_gr*pN,
        'int_to_res': ell_res <= (four_f + 1)*ell_int,
        'res_to_int': ell_int <= (four_f + 1)*ell_res,
        'int_to_gr': ell_gr <= ell_int,
    }

    ### the iteration step: g M_k in M_{k + deg g + 1} implies g^{p^N} M_k in M_{k + p^N (deg g + 1)}
    chain = gr.chain
    iterate = True
    for word, X, degree in _product_operators(module, JN, ell_gr, rng):
        Xp = np.linalg.matrix_power(X, pN)
        for k in range(len(chain)):
            if not _maps_into(chain, k, X, k + degree + 1):
                raise ContractViolation(f'product {word} does not raise the m-adic filtration by {degree + 1}')
            if not _maps_into(chain, k, Xp, k + pN*(degree + 1)):
                iterate = False
                break
    verdicts['iterate'] = iterate

    exponents = dict(J_gr=ell_J, JN_gr=ell_gr, JN_int=ell_int, JN_res=ell_res)
    failed = [name for name, ok in verdicts.items() if not ok]
    witness = dict(failed=failed, exponents=exponents) if failed else None
    return check_result(not failed, witness=witness, exponents=exponents, verdicts=verdicts,
                        dims=dict(gr=gr.piece_dims, int=gr_int.piece_dims, res=gr_res.piece_dims))

def restricted_report(module, JN, N):
    """gr_{N,res} of the dual and the J_N exponent, from the G^{p^N} generators alone"""
    restricted = module.restrict(N) if isinstance(module, FiniteModule) else module
    graded = grade(dualize(restricted), FiltrationKind.N_RES, N)
    return min_annihilator_exponent(graded, JN).to_dict()

def restriction_determinism(module, J, N, rng, changes=5):
    """the gr_{N,res} exponent of the dual is a function of the G^{p^N}-action alone"""
    N = module.cfg.level(N)
    JN = build_JN(J.homogenize(), N, module.cfg.p)
    full = min_annihilator_exponent(grade(dualize(module), FiltrationKind.N_RES, N), JN).to_dict()
    restricted = restricted_report(module, JN, N)
    if full != restricted:
        return check_result(False, witness=dict(full=full, restricted=restricted))

    for n in range(changes):
        P = linalg.random_invertible(module.field, module.dim, rng)
        changed = restricted_report(module.transform(P), JN, N)
        if changed != full:
            return check_result(False, witness=dict(basis_change=n, full=full, changed=changed))

    if module.dim > TWIST_LIMIT:
        return check_result(True, report=full, basis_changes=changes, partner=f'skipped: dim {module.dim} > {TWIST_LIMIT}')
    partner = twisted_partner(module, N, rng)
    twisted = restricted_report(partner, JN, N)
    if twisted != full:
        return check_result(False, witness=dict(partner=partner.label, full=full, twisted=twisted))
    return check_result(True, report=full, basis_changes=changes, partner=partner.label)
