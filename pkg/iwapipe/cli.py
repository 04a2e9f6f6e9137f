"""
Command line entry point: `verify <scenario.json>` and the one-shot subcommands
"""

import sys

from iwapipe import display, fileio
from iwapipe.checks import CHECKS
from iwapipe.errors import ConfigError, IwapipeError
from iwapipe.graded_structures import build_JN, ideal_spec
from iwapipe.group_models import group_model
from iwapipe.harness import Scenario, harness
from iwapipe.iwasawa_algebra import AlgebraElement, FiltrationKind, truncated_algebra
from iwapipe.module_lab import FiniteModule, build_module, grade, min_annihilator_exponent
from iwapipe.padic_core import PrimeConfig
from iwapipe.parser import ACTIONS, run_parser
from iwapipe.utility import jsonable, sub_rng

def prime_config(args):
    """PrimeConfig from --config, overridden by the individual flags"""
    data = fileio.read_json(args.config) if args.config else {}
    for key in ('p', 'f', 'M', 'N', 'case', 'seed'):
        value = getattr(args, key)
        if value is not None:
            data[key] = value
    return PrimeConfig.from_dict(data)

def group_element(model, args):
    if args.input is not None:
        return model.element_from_dict(fileio.read_json(args.input))
    return model.element_from_word(args.word or '')

def algebra_element(model, args):
    if args.input is not None:
        data = fileio.read_json(args.input)
        return AlgebraElement.from_dict(model, data['terms'] if isinstance(data, dict) else data)
    g = model.element_from_word(args.word or '')
    return AlgebraElement.difference(g) if args.minus_one else AlgebraElement.group(g)

def decompose(args):
    cfg = prime_config(args)
    model = group_model(cfg)
    g = group_element(model, args)
    return dict(digits=list(model.digit_decompose(g)), omega=model.omega(g), element=model.element_to_dict(g))

def nu(args):
    cfg = prime_config(args)
    model = group_model(cfg)
    expansion = truncated_algebra(model, args.cutoff).expand(algebra_element(model, args))
    return dict(cutoff=args.cutoff, nu=expansion.nu())

def expand(args):
    cfg = prime_config(args)
    model = group_model(cfg)
    return truncated_algebra(model, args.cutoff).expand(algebra_element(model, args)).to_dict()

def module_exponent(args):
    cfg = prime_config(args)
    if args.module is not None:
        module = FiniteModule.from_dict(fileio.read_json(args.module), cfg)
    else:
        module = build_module(cfg, args.source, rng=sub_rng(cfg.seed, 'module-exponent'))

    ideal = args.ideal
    if ideal not in ('c', 'a', 'mixed'):
        ideal = fileio.read_json(ideal)
    J = ideal_spec(cfg, ideal)

    kind = FiltrationKind(args.kind)
    if kind is FiltrationKind.M_ADIC:
        graded = grade(module, kind)
    else:
        N = cfg.level()
        graded = grade(module, kind, N)
        J = build_JN(J.homogenize(), N, cfg.p)
    return min_annihilator_exponent(graded, J).to_dict()

ONE_SHOT = {'decompose': decompose, 'nu': nu, 'expand': expand, 'module-exponent': module_exponent}

def main(argv=None):
    """parse arguments, dispatch, return the exit code"""
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] not in ACTIONS and not argv[0].startswith('-'):
        argv.insert(0, 'run')
    args = run_parser(argv)

    if args.action is None:
        run_parser(['--help'])

    if args.action == 'list':
        display.display_checks(CHECKS)
        return 0

    if args.action == 'run':
        try:
            scenario = Scenario.from_file(args.scenario)
        except ConfigError as err:
            display.config_error_message(err)
            return 2
        return harness(scenario, out=args.out, csv=args.csv, processes=args.processes, timings=args.timings).run()

    try:
        result = ONE_SHOT[args.action](args)
    except ConfigError as err:
        display.config_error_message(err)
        return 2
    except (IwapipeError, ValueError, KeyError, FileNotFoundError) as err:
        display.error_message(err)
        return 1
    print(fileio.dumps(jsonable(result)))
    return 0

if __name__ == '__main__':
    sys.exit(main())
