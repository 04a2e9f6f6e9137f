"""
Defines the argument parser
"""
import argparse
from iwapipe import config

processes_default = None if config.get_config()['execution']['parallel_default'] else 1

ACTIONS = ('run', 'list', 'decompose', 'nu', 'expand', 'module-exponent')

def _prime_arguments(p):
    group = p.add_argument_group('configuration')
    group.add_argument('--config', type=str, default=None, help='PrimeConfig JSON file (keys p, f, M, N, case, seed)')
    group.add_argument('--p', type=int, default=None, help='prime p > 3')
    group.add_argument('--f', type=int, default=None, help='residue degree f')
    group.add_argument('--M', type=int, default=None, help='truncation level M')
    group.add_argument('--N', type=int, default=None, help='subgroup level N, 1 <= N < M')
    group.add_argument('--case', type=str, default=None, choices=['GL2', 'QUAT'], help='group model')
    group.add_argument('--seed', type=int, default=None, help='seed of randomized constructions')

def _element_arguments(p):
    source = p.add_mutually_exclusive_group()
    source.add_argument('-i', '--input', type=str, default=None, help="JSON file ('-' for standard input)")
    source.add_argument('-w', '--word', type=str, default=None, help="product of generators, e.g. 'B_0 A_0^-1'")

def run_parser(argv=None):
    parser = argparse.ArgumentParser(prog='verify', description='exact checks in truncated completed group rings')

    subparsers = parser.add_subparsers(dest="action")
    run_parse = subparsers.add_parser('run', help='run the checks of a scenario file (default)')
    subparsers.add_parser('list', help='display available checks and descriptions')
    decompose_parse = subparsers.add_parser('decompose', help='ordered-basis digits of a group element')
    nu_parse = subparsers.add_parser('nu', help='the weight valuation of a group ring element')
    expand_parse = subparsers.add_parser('expand', help='monomial expansion of a group ring element')
    module_parse = subparsers.add_parser('module-exponent', help='minimal annihilating exponent of an ideal on a module')

    run_parse.add_argument('scenario', type=str, help='scenario JSON file')
    run_parse.add_argument('-o', '--out', type=str, default=None, help='report path (default: $IWAPIPE_OUTPUT_DIR/<name>.report.json)')
    run_parse.add_argument('--csv', type=str, default=None, help='also write a CSV summary')
    run_parse.add_argument('-p', '--processes', nargs='?', default=processes_default, type=int, help='number of processes to use in parallel execution (default: cpu_count)')
    run_parse.add_argument('--timings', action='store_true', default=False, help='include wall-clock times in the report')

    for p in [decompose_parse, nu_parse, expand_parse, module_parse]:
        _prime_arguments(p)

    _element_arguments(decompose_parse)
    for p in [nu_parse, expand_parse]:
        _element_arguments(p)
        p.add_argument('--minus-one', action='store_true', default=False, help='use g - 1 for the group element given by --word')
        p.add_argument('-T', '--cutoff', type=int, required=True, help='weight cutoff T < p^M')

    module_source = module_parse.add_mutually_exclusive_group()
    module_source.add_argument('--module', type=str, default=None, help="FiniteModule JSON file ('-' for standard input)")
    module_source.add_argument('--source', type=str, default='trivial', choices=['trivial', 'regular', 'quotient'], help='built-in module')
    module_parse.add_argument('--ideal', type=str, default='c', help='preset ideal (c, a, mixed) or IdealSpec JSON file')
    module_parse.add_argument('--kind', type=str, default='M_ADIC', choices=['M_ADIC', 'N_INT', 'N_RES'], help='grading')

    return parser.parse_args(argv)
