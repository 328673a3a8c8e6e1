"""Audited lambda calculus: trails, explicit substitutions and an abstract machine.

Subpackages and modules:

* :mod:`cau.syntax` - nameless terms, trails and substitutions
* :mod:`cau.naive` - principal contractions and trail normalization (tau)
* :mod:`cau.sigma` - explicit substitutions and projections, lazy Beta
* :mod:`cau.machine` - call-by-value abstract machine
* :mod:`cau.oracle` - generators and property checks
* :mod:`cau.frontend` - parser, printer, traces and CLI
* :mod:`cau.deepstack` - big-stack worker for deep recursion
"""

import sys

from .syntax import *  # noqa: F401,F403
from .naive import cau_eval_cbv, cau_step, tau_normalize  # noqa: F401
from .sigma import sigmatau_normalize  # noqa: F401
from .rewrite import FuelExhausted  # noqa: F401

from .deepstack import call_deep  # noqa: F401

# trails and terms nest deeply; this much headroom is still safe on a default
# main-thread stack (use call_deep for more)
if sys.getrecursionlimit() < 10_000:
    sys.setrecursionlimit(10_000)

__version__ = "0.1.0"
