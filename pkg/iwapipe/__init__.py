"""
iwapipe
=======
"""

__version__ = '0.1.0'

from . import errors
from . import config
from . import utility
from . import fileio
from . import linalg
from . import padic_core
from . import group_models
from . import iwasawa_algebra
from . import graded_structures
from . import module_lab
from . import checks
from . import execution
from . import display
from . import harness

from .padic_core import Case, PrimeConfig
from .group_models import group_model
from .iwasawa_algebra import AlgebraElement, FiltrationKind, truncated_algebra
from .graded_structures import graded_ring, ideal_spec
from .module_lab import FiniteModule, build_module, grade
from .harness import Scenario, harness as run_harness
