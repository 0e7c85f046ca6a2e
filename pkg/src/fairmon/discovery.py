"""Discovery probability of Poisson-distributed incidents.

With incident count X+1, X ~ Poisson(lam), and y attention units, the
expected discovered fraction E[min(X+1, y) / (X+1)] has the closed form
evaluated by :func:`eta`.  It is strictly decreasing in lam, which lets
a rate interval be mapped endpoint-wise onto a discovery-probability
interval.
"""

import math

from . import kernels
from .errors import ConfigError
from .estimator import SubExpParams
from .intervals import ConfidenceInterval

# The series is evaluated with exp(-lam) folded into every term; beyond
# this the leading factor underflows.  Monitor-scale rates are far below.
MAX_RATE = 700.0


def eta(y, lam):
    """Closed-form discovery probability for y >= 1 units at rate lam > 0."""
    if y < 1 or y != int(y):
        raise ConfigError(f"attention units must be a positive integer, got {y}")
    if not 0.0 < lam <= MAX_RATE:
        raise ConfigError(f"rate must be in (0, {MAX_RATE}], got {lam}")
    return kernels.eta(int(y), float(lam))


def eta_interval(y, lambda_ci):
    """Map a rate interval onto a discovery-probability interval.

    Valid because eta(y, .) is strictly decreasing: the upper rate gives
    the lower probability and vice versa.
    """
    if lambda_ci.lo <= 0.0:
        raise ConfigError(
            f"rate interval touches zero: lo={lambda_ci.lo}")
    return ConfidenceInterval(eta(y, lambda_ci.hi), eta(y, lambda_ci.lo),
                              lambda_ci.confidence)


def poisson_subexp_params(lambda_max):
    """Tail parameters of a centered Poisson variable with rate at most
    lambda_max: (2*lambda_max, 2)."""
    if lambda_max <= 0:
        raise ConfigError(f"rate bound must be positive, got {lambda_max}")
    return SubExpParams(2.0 * lambda_max, 2.0)


def check_parameter_floor(lambda_min, cumulative_shifts):
    """True iff the rate stays strictly positive at every prefix when
    started from the configured lower bound lambda_min."""
    if lambda_min <= 0:
        raise ConfigError(f"rate floor must be positive, got {lambda_min}")
    running = 0.0
    for shift in cumulative_shifts:
        running += shift
        if lambda_min + running <= 0.0:
            return False
    return True
