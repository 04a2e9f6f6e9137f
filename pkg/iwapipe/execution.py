"""
Execution of checks
"""

import sys
import traceback
from time import perf_counter

from iwapipe.checks import CHECKS
from iwapipe.padic_core import PrimeConfig
from iwapipe.utility import Bunch, FAIL, check_result, sub_rng

class deferred_check:
    """a named check together with everything needed to run it in another process"""
    def __init__(self, check_id, name, cfg, cutoff=None, samples=100, params=None, inputs=None):
        self.check_id = check_id
        self.name = name
        self.cfg = cfg.to_dict()
        self.cutoff = cutoff
        self.samples = samples
        self.params = params or {}
        self.inputs = inputs or {}
        self.__doc__ = CHECKS[name].__doc__

    def context(self):
        cfg = PrimeConfig.from_dict(self.cfg)
        return Bunch(dict(cfg=cfg, cutoff=self.cutoff, samples=self.samples,
                          rng=sub_rng(cfg.seed, self.check_id),
                          params=self.params, inputs=self.inputs))

    def __call__(self):
        return CHECKS[self.name](self.context())

def execute_check(job):
    """run a deferred check, turning any exception into a failed result

    Returns:
        (result, traceback text or None, elapsed seconds)
    """
    start = perf_counter()
    try:
        result = job()
        tb = None
    except Exception as err:
        result = check_result(FAIL, witness=f'{type(err).__name__}: {err}')
        tb = f"Check '{job.check_id}' failed:\n" + "".join(traceback.format_exception(*sys.exc_info()))
    return result, tb, perf_counter() - start
