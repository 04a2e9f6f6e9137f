"""
Named verification checks

Every check receives a context with the fields
    cfg         PrimeConfig of the scenario
    cutoff      weight bound T (None when the scenario has none)
    samples     sample count for randomized checks
    rng         generator seeded from (seed, check id) only
    inputs      parsed input files by name
    params      free-form parameters of this check
and returns a check_result dictionary.
"""

import itertools

from iwapipe import group_models, iwasawa_algebra, graded_structures, linalg, module_lab
from iwapipe.errors import ConfigError
from iwapipe.graded_structures import graded_ring, ideal_spec
from iwapipe.group_models import group_model
from iwapipe.iwasawa_algebra import AboveCutoff, AlgebraElement, FiltrationKind, truncated_algebra
from iwapipe.padic_core import Case, PrimeConfig, base_ring, hensel_sqrt, fourth_root, quad_ring, teichmuller
from iwapipe.utility import INDETERMINATE, PASS, check_result, combine_status

CHECKS = {}

class registered_check:
    """a check function with the scenario fields it requires"""
    def __init__(self, name, function, needs=()):
        self.name = name
        self.function = function
        self.needs = tuple(needs)
        self.__doc__ = function.__doc__

    def __call__(self, ctx):
        return self.function(ctx)

def check(name, needs=()):
    """decorator registering a check under a dotted name"""
    def wrap(function):
        CHECKS[name] = registered_check(name, function, needs)
        return function
    return wrap

def validate_needs(name, cfg, cutoff, location):
    """raise ConfigError if the scenario lacks something the check needs"""
    entry = CHECKS[name]
    if 'cutoff' in entry.needs and cutoff is None:
        raise ConfigError(f"check '{name}' needs a cutoff", location)
    if 'N' in entry.needs and cfg.N is None:
        raise ConfigError(f"check '{name}' needs a subgroup level N", 'config.N')
    if 'QUAT' in entry.needs and cfg.case is not Case.QUAT:
        raise ConfigError(f"check '{name}' applies to the QUAT case only", 'config.case')

def _params(ctx, key, default=None):
    return ctx.params.get(key, default)

### p-adic arithmetic

@check('padic.unit_oracle')
def unit_oracle(ctx):
    """fixed constants at p=5, f=1, M=2: [2], square roots, digits of B_0 A_0"""
    cfg = PrimeConfig(p=5, f=1, M=2)
    ring = base_ring(cfg)
    model = group_model(cfg)
    g = model.element_from_word('B_0 A_0')
    digits = list(model.digit_decompose(g))
    measured = dict(teichmuller_2=teichmuller(2, cfg).coeffs[0],
                    sqrt_21=hensel_sqrt(ring(21)).coeffs[0],
                    sqrt_6=hensel_sqrt(ring(6)).coeffs[0],
                    digits_B0A0=digits,
                    recomposed=model.compose(digits) == g)
    expected = dict(teichmuller_2=7, sqrt_21=11, sqrt_6=16, digits_B0A0=[21, 6, 24], recomposed=True)
    wrong = {key: measured[key] for key in expected if measured[key] != expected[key]}
    return check_result(not wrong, witness=wrong or None, **measured)

@check('padic.teichmuller')
def teichmuller_properties(ctx):
    """[a]^q = [a], [a] reduces to a, [ab] = [a][b]"""
    cfg = ctx.cfg
    field = cfg.field
    for _ in range(ctx.samples):
        a, b = field(int(ctx.rng.integers(1, field.order))), field(int(ctx.rng.integers(1, field.order)))
        ta, tb = teichmuller(a, cfg), teichmuller(b, cfg)
        if ta**cfg.q != ta or ta.residue() != a or teichmuller(a*b, cfg) != ta*tb:
            return check_result(False, witness=dict(a=int(a), b=int(b)))
    return check_result(True, samples=ctx.samples)

@check('padic.hensel')
def hensel_properties(ctx):
    """square and fourth roots of units congruent to 1"""
    ring = base_ring(ctx.cfg)
    for _ in range(ctx.samples):
        u = ring.random(ctx.rng, unit_one=True)
        r = hensel_sqrt(u)
        if r*r != u or not r.is_unit_one() or fourth_root(u)**4 != u:
            return check_result(False, witness=dict(u=list(u.coeffs)))
    return check_result(True, samples=ctx.samples)

@check('padic.frobenius')
def frobenius_properties(ctx):
    """sigma is a ring automorphism of order f on O_K, and of order 2 on O_K2 fixing O_K"""
    cfg = ctx.cfg
    ring = base_ring(cfg)
    quad = quad_ring(cfg)
    for _ in range(ctx.samples):
        x, y = ring.random(ctx.rng), ring.random(ctx.rng)
        if (x*y).frobenius() != x.frobenius()*y.frobenius() or (x + y).frobenius() != x.frobenius() + y.frobenius():
            return check_result(False, witness=dict(x=list(x.coeffs), y=list(y.coeffs)))
        z = x
        for _ in range(cfg.f):
            z = z.frobenius()
        if z != x:
            return check_result(False, witness=dict(x=list(x.coeffs), reason='order'))
        if not quad.embed_base(x).in_base():
            return check_result(False, witness=dict(x=list(x.coeffs), reason='not fixed'))
        u, v = quad.random(ctx.rng), quad.random(ctx.rng)
        if (u*v).frobenius() != u.frobenius()*v.frobenius() or u.frobenius().frobenius() != u:
            return check_result(False, witness=dict(u=list(u.coeffs), v=list(v.coeffs), reason='quadratic'))
    return check_result(True, samples=ctx.samples)

### group models

@check('group.round_trip')
def round_trip(ctx):
    """compose and digit_decompose are inverse"""
    return group_models.check_round_trip(group_model(ctx.cfg), ctx.rng, ctx.samples)

@check('group.p_valuation')
def p_valuation(ctx):
    """the p-valuation axioms"""
    return group_models.check_p_valuation(group_model(ctx.cfg), ctx.rng, ctx.samples)

@check('group.omega_consistency')
def omega_consistency(ctx):
    """digit formula against direct valuation"""
    return group_models.check_omega_consistency(group_model(ctx.cfg), ctx.rng, ctx.samples)

@check('group.saturation')
def saturation(ctx):
    """p-th roots above p/(p-1)"""
    return group_models.check_saturation(group_model(ctx.cfg), ctx.rng, ctx.samples)

@check('group.subgroup_membership', needs=('N',))
def subgroup_membership(ctx):
    """G^{p^N} is the set of digit vectors divisible by p^N"""
    return group_models.check_subgroup_membership(group_model(ctx.cfg), ctx.cfg.N, ctx.rng, ctx.samples)

@check('group.quaternion_power_image', needs=('QUAT',))
def quaternion_power_image(ctx):
    """g^p in 1 + p Pi O_D"""
    return group_models.check_quaternion_power_image(group_model(ctx.cfg), ctx.rng, ctx.samples)

@check('group.retraction', needs=('QUAT',))
def retraction(ctx):
    """the determinant retraction agrees with the reduced-norm square root"""
    return group_models.check_retraction_equivalence(group_model(ctx.cfg), ctx.rng, ctx.samples)

### completed group ring

@check('algebra.maxideals', needs=('cutoff',))
def maxideals(ctx):
    """m^j equals the nu >= j subspace for every j <= T"""
    return iwasawa_algebra.check_maxideals(truncated_algebra(group_model(ctx.cfg), ctx.cutoff))

@check('algebra.generator_weights', needs=('cutoff',))
def generator_weights(ctx):
    """nu(A_i - 1) = nu(B_i - 1) = 1 and nu(C_i - 1) = 2"""
    model = group_model(ctx.cfg)
    algebra = truncated_algebra(model, ctx.cutoff)
    measured = {}
    for i, name in enumerate(model.names):
        value = algebra.expand(AlgebraElement.difference(model.generators[i])).nu()
        measured[name] = str(value) if isinstance(value, AboveCutoff) else value
    wrong = {name: v for (name, v), w in zip(measured.items(), model.weights) if v != w}
    return check_result(not wrong, witness=wrong or None, nu=measured)

@check('algebra.quaternion_commutator')
def quaternion_commutator(ctx):
    """[(1 + [zeta]Pi), (1 + gamma Pi)] mod p Pi O_D, every gamma mod p^2"""
    return iwasawa_algebra.check_quaternion_commutator(ctx.cfg)

@check('algebra.nu_additivity', needs=('cutoff',))
def nu_additivity(ctx):
    """nu(xy) = nu(x) + nu(y) through the cutoff"""
    return iwasawa_algebra.check_nu_additivity(truncated_algebra(group_model(ctx.cfg), ctx.cutoff), ctx.rng, ctx.samples)

@check('algebra.subgroup_expansion', needs=('N',))
def subgroup_expansion(ctx):
    """support on G^{p^N} is visible in the exponents of the expansion"""
    return iwasawa_algebra.check_subgroup_expansion(group_model(ctx.cfg), ctx.cfg.N, ctx.rng, ctx.samples)

@check('algebra.filtrations', needs=('cutoff', 'N'))
def filtrations(ctx):
    """n_j F[[G]] inside m^{j p^N} = M_ADIC piece j p^N for every j with j p^N <= T"""
    algebra = truncated_algebra(group_model(ctx.cfg), ctx.cutoff)
    N = ctx.cfg.N
    for j in range(ctx.cutoff//ctx.cfg.p**N + 1):
        res = algebra.span_of_filtration((FiltrationKind.N_RES, j), N)
        integral = algebra.span_of_filtration((FiltrationKind.N_INT, j), N)
        if not linalg.contains(integral, res):
            return check_result(False, witness=dict(index=j))
    return check_result(True, cutoff=ctx.cutoff)

### graded ring

@check('graded.hilbert', needs=('cutoff',))
def hilbert(ctx):
    """graded dimensions of gr and gr/(c) against monomial counts"""
    ring = graded_ring(group_model(ctx.cfg), ctx.cutoff)
    dims = ring.hilbert_dims()
    quotient = ring.hilbert_dims(quotient_by_c=True)
    oracle = graded_structures.hilbert_oracle(ctx.cfg.f, ctx.cutoff)
    quotient_oracle = graded_structures.hilbert_oracle(ctx.cfg.f, ctx.cutoff, quotient_by_c=True)
    ok = dims == oracle and quotient == quotient_oracle
    witness = None if ok else dict(dims=dims, oracle=oracle, quotient=quotient, quotient_oracle=quotient_oracle)
    return check_result(ok, witness=witness, dims=dims, quotient_dims=quotient)

@check('graded.commutator_classes', needs=('cutoff',))
def commutator_classes(ctx):
    """[a_0, a_0] = 0, [c_0, a_0] = 0, [a_i, b_j] lies in the span of the c's"""
    ring = graded_ring(group_model(ctx.cfg), ctx.cutoff)
    if not ring.commutator_class(ring.a(0), ring.a(0)).is_zero():
        return check_result(False, witness='[a_0, a_0] != 0')
    if ctx.cutoff >= 3 and not ring.commutator_class(ring.c(0), ring.a(0)).is_zero():
        return check_result(False, witness='[c_0, a_0] != 0')
    c_span = linalg.span(ring.field, [ring.c(i).coords[None, :] for i in range(ring.f)], ring.dim(2))
    nonzero = 0
    for x, y in itertools.combinations(ring.degree_one(), 2):
        bracket = ring.commutator_class(x, y)
        if not linalg.contains(c_span, bracket.coords[None, :]):
            return check_result(False, witness=dict(x=repr(x), y=repr(y)))
        nonzero += not bracket.is_zero()
    if ring.commutator_class(ring.a(0), ring.b(0)).is_zero():
        return check_result(False, witness='[a_0, b_0] = 0')
    return check_result(True, nonzero_brackets=nonzero)

@check('graded.power_commutator', needs=('cutoff',))
def power_commutator(ctx):
    """[g^l, x] = l g^{l-1} [g, x] for degree-one g"""
    ring = graded_ring(group_model(ctx.cfg), ctx.cutoff)
    exponents = _params(ctx, 'exponents', [1, 2, ctx.cfg.p])
    tested = 0
    for i, l in itertools.product(range(2*ring.f), exponents):
        for x in ring.degree_one():
            if l + x.degree > ring.cutoff:
                continue
            if not graded_structures.check_power_commutator_identity(ring, i, x, l):
                return check_result(False, witness=dict(generator=i, exponent=l, x=repr(x)))
            tested += 1
    status = PASS if tested else INDETERMINATE
    return check_result(status, tested=tested)

@check('graded.centrality', needs=('cutoff', 'N'))
def centrality(ctx):
    """c_i and the p^N-th power classes are central; a_0 is not"""
    ring = graded_ring(group_model(ctx.cfg), ctx.cutoff)
    central, skipped = [], []
    for cls in [ring.c(i) for i in range(ring.f)] + graded_structures.subgroup_classes(ring, ctx.cfg.N):
        if cls.degree + 1 > ring.cutoff:
            skipped.append(repr(cls))
            continue
        if not graded_structures.check_centrality(ring, cls):
            return check_result(False, witness=dict(not_central=repr(cls)))
        central.append(repr(cls))
    if graded_structures.check_centrality(ring, ring.a(0)):
        return check_result(False, witness='a_0 is central')
    return check_result(True, central=central, beyond_cutoff=skipped)

@check('graded.subring_commutative', needs=('cutoff', 'N'))
def subring_commutative(ctx):
    """the p^N-th power classes commute pairwise"""
    return graded_structures.check_subring_commutative(graded_ring(group_model(ctx.cfg), ctx.cutoff), ctx.cfg.N)

@check('graded.regular_sequence', needs=('cutoff',))
def regular_sequence(ctx):
    """c_0, ..., c_{f-1} is a regular sequence through the cutoff"""
    return graded_structures.check_regular_sequence(graded_ring(group_model(ctx.cfg), ctx.cutoff))

@check('graded.jn_containment', needs=('cutoff', 'N'))
def jn_containment(ctx):
    """J_N inside J for every configured ideal"""
    ring = graded_ring(group_model(ctx.cfg), ctx.cutoff)
    results = {}
    for name in _params(ctx, 'ideals', ['c', 'a', 'mixed']):
        results[str(name)] = graded_structures.check_jn_containment(ring, ideal_spec(ctx.cfg, name), ctx.cfg.N)
    return _combine(results)

@check('graded.tau', needs=('cutoff', 'N'))
def tau(ctx):
    """the tau contract on every monomial within the cutoff"""
    algebra = truncated_algebra(group_model(ctx.cfg), ctx.cutoff)
    for exps in algebra.basis:
        graded_structures.tau_vector(algebra, exps, ctx.cfg.N)
    return check_result(True, monomials=algebra.dim)

@check('graded.sandwich', needs=('cutoff', 'N'))
def sandwich(ctx):
    """n_k F[[G]] in m^{k p^N} in n_{k-4f} F[[G]] for every k in params.ks"""
    algebra = truncated_algebra(group_model(ctx.cfg), ctx.cutoff)
    pN = ctx.cfg.p**ctx.cfg.N
    ks = _params(ctx, 'ks', list(range(ctx.cutoff//pN + 1)))
    transcripts = _params(ctx, 'transcripts')
    results = {f'k={k}': graded_structures.check_sandwich(algebra, k, ctx.cfg.N, ctx.rng, ctx.samples, transcripts)
               for k in ks}
    return _combine(results)

@check('graded.pigeonhole', needs=('cutoff', 'N'))
def pigeonhole(ctx):
    """products of (f+n)p^N generators of J lie in (f~) + c"""
    ring = graded_ring(group_model(ctx.cfg), ctx.cutoff)
    results = {}
    for name in _params(ctx, 'ideals', ['c', 'a', 'mixed']):
        results[str(name)] = graded_structures.check_pigeonhole(ring, ideal_spec(ctx.cfg, name), ctx.cfg.N, ctx.rng, ctx.samples)
    return _combine(results)

### modules

def load_module(ctx, spec=None):
    """a module from params: 'trivial', 'regular', 'quotient' or the name of an input file"""
    spec = spec or _params(ctx, 'module', 'trivial')
    if spec in ('trivial', 'regular', 'quotient'):
        return module_lab.build_module(ctx.cfg, spec, rng=ctx.rng, max_dim=_params(ctx, 'max_dim'))
    return module_lab.FiniteModule.from_dict(ctx.inputs[spec], ctx.cfg)

def corpus(ctx):
    count = _params(ctx, 'modules', 20)
    return module_lab.module_corpus(ctx.cfg, count, ctx.rng, _params(ctx, 'max_dim'))

def _combine(results):
    status = combine_status(*(r['status'] for r in results.values()))
    failed = {name: r.get('witness') for name, r in results.items() if r['status'] != PASS}
    return check_result(status, witness=failed or None, results={name: r['status'] for name, r in results.items()})

@check('module.relations')
def relations(ctx):
    """the module is a representation of G/G^{p^M}"""
    module = load_module(ctx)
    return module_lab.check_relations(module, ctx.rng, max(ctx.samples, 10000))

@check('module.duality')
def duality(ctx):
    """dual(trivial) = trivial, dim dual = dim, double dual isomorphic to the module"""
    module = load_module(ctx)
    dual = module_lab.dualize(module)
    trivial = module_lab.build_module(ctx.cfg, 'trivial')
    if module_lab.dualize(trivial).generators[0].tolist() != trivial.generators[0].tolist():
        return check_result(False, witness='dual of the trivial module is not trivial')
    if dual.dim != module.dim:
        return check_result(False, witness=dict(dim=module.dim, dual_dim=dual.dim))
    iso = module_lab.find_isomorphism(module, module_lab.dualize(dual), ctx.rng) if module.dim <= 20 else None
    if module.dim <= 20 and iso is None:
        return check_result(False, witness='no isomorphism to the double dual')
    return check_result(True, dim=module.dim, isomorphism_checked=module.dim <= 20)

@check('module.gradings')
def gradings(ctx):
    """piece dimensions of every grading sum to dim; reports dim m M"""
    module = load_module(ctx)
    kinds = [FiltrationKind.M_ADIC]
    if ctx.cfg.N is not None:
        kinds += [FiltrationKind.N_INT, FiltrationKind.N_RES]
    dims = {}
    for kind in kinds:
        graded = module_lab.grade(module, kind, ctx.cfg.N)
        if sum(graded.piece_dims) != module.dim:
            return check_result(False, witness=dict(kind=kind.value, pieces=graded.piece_dims))
        dims[kind.value] = graded.piece_dims
    radical = module.dim - dims['M_ADIC'][0]
    return check_result(True, dim=module.dim, radical_dim=radical, pieces=dims)

@check('module.annihilator')
def annihilator(ctx):
    """minimal exponent of an ideal on a grading

    For the c ideal, J^l gr M is the image of c^l, so l_min is the nilpotency index of c on gr M.
    """
    module = load_module(ctx)
    name = _params(ctx, 'ideal', 'c')
    J = ideal_spec(ctx.cfg, name)
    kind = FiltrationKind(_params(ctx, 'kind', 'M_ADIC'))
    graded = module_lab.grade(module, kind, ctx.cfg.N)
    ideal = J if kind is FiltrationKind.M_ADIC else graded_structures.build_JN(J.homogenize(), ctx.cfg.N, ctx.cfg.p)
    report = module_lab.min_annihilator_exponent(graded, ideal)
    details = report.to_dict()
    if name == 'c' and len(ideal.polynomials()) == 1:
        G = graded.polynomial_operator(tuple(ideal.polynomials()[0]))
        power, oracle = G, 1
        while power.any():
            power = power @ G
            oracle += 1
        details['oracle'] = oracle
        if oracle != report.ell_min:
            return check_result(False, witness=dict(measured=report.ell_min, oracle=oracle), **details)
    return check_result(True, **details)

@check('module.exponent_transfer', needs=('N',))
def exponent_transfer(ctx):
    """the five transfer implications on the module corpus for every configured ideal"""
    results = {}
    modules = corpus(ctx)
    for name in _params(ctx, 'ideals', ['c', 'a', 'mixed']):
        J = ideal_spec(ctx.cfg, name)
        for n, module in enumerate(modules):
            results[f'{name}/{n}'] = module_lab.check_exponent_transfer(module, J, ctx.cfg.N, ctx.rng)
    return _combine(results)

@check('module.restriction_determinism', needs=('N',))
def restriction_determinism(ctx):
    """gr_{N,res} exponents of duals depend only on the G^{p^N}-action"""
    results = {}
    J = ideal_spec(ctx.cfg, _params(ctx, 'ideal', 'c'))
    for n, module in enumerate(corpus(ctx)):
        results[str(n)] = module_lab.restriction_determinism(module, J, ctx.cfg.N, ctx.rng, _params(ctx, 'basis_changes', 5))
    return _combine(results)
