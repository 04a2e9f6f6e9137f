"""
Utility functions and classes
"""

import functools
import math
import zlib
from fractions import Fraction
import numpy as np

PASS = 'pass'
FAIL = 'fail'
INDETERMINATE = 'indeterminate'

class Bunch:
    """convert a dictionary into a class with data members equal to the dictionary keys"""
    def __init__(self, adict):
        self.__dict__.update(adict)

    def __getitem__(self, key):
        return self.__dict__[key]

    def __setitem__(self, key, value):
        self.__dict__[key] = value

    def get(self, key, default=None):
        return self.__dict__.get(key, default)

def check_result(status, witness=None, **details):
    """assemble the JSON-ready result of a single check

    Arguments:
        status      one of 'pass', 'fail', 'indeterminate' (or a bool: pass/fail)
        witness     description of the first counterexample found, if any
        details     additional measured quantities
    """
    if isinstance(status, (bool, np.bool_)):
        status = PASS if status else FAIL

    result = dict(status=status)
    if witness is not None:
        result['witness'] = jsonable(witness)
    if details:
        result['details'] = jsonable(details)
    return result

def combine_status(*statuses):
    """fail beats indeterminate beats pass"""
    if FAIL in statuses:
        return FAIL
    if INDETERMINATE in statuses:
        return INDETERMINATE
    return PASS

def jsonable(obj):
    """convert nested results into plain JSON types"""
    if isinstance(obj, dict):
        return {str(key): jsonable(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(x) for x in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, float):
        if math.isinf(obj):
            return 'inf'
        return obj
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)

def sub_rng(seed, name):
    """random generator for a named job; independent of every other name"""
    sequence = np.random.SeedSequence(seed, spawn_key=(zlib.crc32(name.encode()),))
    return np.random.default_rng(sequence)

def p_digits(n, p, length):
    """the first `length` base-p digits of n, least significant first"""
    digits = []
    for _ in range(length):
        n, d = divmod(n, p)
        digits.append(d)
    return digits

def vp(n, p, cap):
    """p-adic valuation of an integer, capped"""
    if n == 0:
        return cap
    v = 0
    while n % p == 0 and v < cap:
        n //= p
        v += 1
    return v

@functools.lru_cache(maxsize=None)
def binomial_table(p, M):
    """binom(x, k) mod p for 0 <= x, k < p^M, by Lucas' theorem"""
    size = p**M
    small = np.array([[math.comb(x, k) % p for k in range(p)] for x in range(p)], dtype=np.int64)
    table = np.ones((size, size), dtype=np.int64)
    x = np.arange(size)
    for level in range(M):
        xd = (x // p**level) % p
        table = table * small[xd[:, None], xd[None, :]] % p
    table.setflags(write=False)
    return table
