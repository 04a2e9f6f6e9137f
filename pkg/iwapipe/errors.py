"""
Exceptions raised by iwapipe
"""

class IwapipeError(Exception):
    """base class of every error raised by the library"""
    pass

class ConfigError(IwapipeError, ValueError):
    """an invalid configuration or scenario, with the location of the offending entry"""
    def __init__(self, message, location=None):
        self.location = location
        if location is not None:
            message = f'{location}: {message}'
        super().__init__(message)

class ConfigMismatch(IwapipeError, ValueError):
    """operands built from different configurations"""
    pass

class InputNotUnitOne(IwapipeError, ValueError):
    """a unit congruent to 1 mod p was required"""
    pass

class NotInGroup(IwapipeError, ValueError):
    """a raw element does not have the shape of I_1 or 1 + Pi O_D"""
    pass

class LevelTooDeep(IwapipeError, ValueError):
    """a subgroup level N with N >= M (or no level at all) was requested"""
    pass

class CutoffBeyondFaithful(IwapipeError, ValueError):
    """a weight cutoff at or above p^M, where the finite quotient stops being faithful"""
    pass

class NonHomogeneousInput(IwapipeError, ValueError):
    """an ideal generator that is not homogeneous"""
    pass

class NonConvergent(IwapipeError, RuntimeError):
    """an iteration whose residue weight did not increase strictly"""
    pass

class ContractViolation(IwapipeError, RuntimeError):
    """a per-call guarantee of an operation did not hold"""
    pass

class BoundExceeded(IwapipeError, RuntimeError):
    """a search ran past its proven bound"""
    pass

class RelationCheckFailed(IwapipeError, ValueError):
    """generator matrices that do not define a representation of G/G^{p^M}"""
    def __init__(self, message, witness=None):
        self.witness = witness
        if witness is not None:
            message = f'{message} (witness: {witness})'
        super().__init__(message)
