import sys

from termcolor import colored
import colorama
colorama.init()

STATUS_COLORS = dict(PASS='green', FAIL='red', INDETERMINATE='yellow')

def format_seconds(T):
    """format time T (in seconds) to a display string"""
    ret_fmt = '{mins}:{secs}'
    hrs = int(T // 3600)
    mins = int((T // 60) - 60*hrs)
    secs = int((T // 1) - 3600*hrs - 60*mins)

    ret = ret_fmt.format(mins=str(mins).zfill(2),
                       secs=str(secs).zfill(2))
    if hrs:
        ret = f'{hrs}:{ret}'

    return ret

def running_checks_message(name, njobs):
    """Display message when running the checks of a scenario"""
    print(colored(f"Running checks", color='yellow'), colored(name, attrs=['bold']), f'({njobs})')

def check_line(check_id, status, elapsed=None):
    """one colored line per check

    Arguments:
        check_id    id of the check in the scenario
        status      'pass', 'fail' or 'indeterminate'
        elapsed     wall-clock seconds (omitted if None)
    """
    label = colored(f'{status.upper():>13}', color=STATUS_COLORS.get(status.upper()), attrs=['bold'])
    timing = f'  [{format_seconds(elapsed)}]' if elapsed is not None else ''
    print(f'    {label}  {check_id}{timing}')

def check_summary(num_executed, num_failures, report_path):
    """display message when all checks have ran"""
    print()
    print(colored("Execution summary", color='yellow'))
    l1 = 'checks' if num_executed != 1 else 'check'
    l2 = 'failures' if num_failures != 1 else 'failure'
    message = f'    {num_executed} {l1}, {num_failures} {l2}'
    print(message)
    print(f'    report written to {report_path}')
    print()

def config_error_message(err):
    """Display a configuration error"""
    print(colored('Configuration error: ', color='red', attrs=['bold']) + str(err), file=sys.stderr)

def error_message(err):
    """Display an error of a one-shot command"""
    print(colored(f'{type(err).__name__}: ', color='red', attrs=['bold']) + str(err), file=sys.stderr)

def display_checks(checks):
    """Message shown when the 'list' command is run"""
    print(colored("checks:", color='yellow', attrs=['bold']))
    for name, entry in sorted(checks.items()):
        needs = f" (needs {', '.join(entry.needs)})" if entry.needs else ''
        print('    ', colored(name, color='yellow'), ' -- ', entry.__doc__, needs, sep='')
