"""Shift-corrected streaming mean estimator.

Tracks the conditional mean of a drifting feature from a single
observation stream.  A known change function reports, per observation,
the exact shift it causes in that mean; the estimator removes the
accumulated shift from each incoming sample, averages the de-shifted
residuals, and adds the shift back to estimate the current mean.  A
concentration bound on the de-shifted average gives a per-step
confidence interval.
"""

import math
from dataclasses import dataclass

from . import kernels
from .errors import ConfigError
from .intervals import ConfidenceInterval


@dataclass(frozen=True)
class SubExpParams:
    """Sub-exponential tail parameters (variance proxy, scale) of the
    centered feature.  ``nu == 0`` is the sub-gaussian case."""

    sigma_sq: float
    nu: float

    def __post_init__(self):
        if self.sigma_sq < 0 or self.nu < 0:
            raise ConfigError(
                f"invalid parameters: sigma_sq={self.sigma_sq}, nu={self.nu}")
        if self.sigma_sq == 0 and self.nu == 0:
            raise ConfigError("invalid parameters: sigma_sq and nu both zero")


def _check_delta(delta):
    if not 0.0 < delta < 1.0:
        raise ConfigError(f"invalid confidence: delta={delta} not in (0, 1)")


def azuma_epsilon(t, delta, params):
    """Interval half-width after t updates at confidence budget delta.

    max( sqrt(2*sigma_sq/t * ln(2/delta)), (2*nu/t) * ln(2/delta) );
    nonincreasing in t, nondecreasing in sigma_sq, nu and 1/delta.
    """
    if t < 1:
        raise ConfigError(f"invalid step count t={t}")
    _check_delta(delta)
    return kernels.azuma_epsilon(t, delta, params.sigma_sq, params.nu)


class ShiftedMeanEstimator:
    """Single-writer streaming estimator; updates must be applied in
    trace order.  Distinct instances are independent."""

    def __init__(self, change_fn, delta, params):
        _check_delta(delta)
        if not isinstance(params, SubExpParams):
            params = SubExpParams(*params)
        self.change_fn = change_fn
        self.delta = delta
        self.params = params
        self.t = 0
        self._e1_hat = 0.0   # running estimate of the initial mean
        self._d = 0.0        # net shift, compensated summation
        self._d_comp = 0.0

    def update(self, record):
        """Consume one observation; returns the confidence interval for
        the conditional mean at this step (given history, excluding the
        shift this record itself causes)."""
        x = float(record.x)
        shift = float(self.change_fn(record))
        if not (math.isfinite(x) and math.isfinite(shift)):
            raise ValueError(
                f"corrupt observation: x={x}, shift={shift}")
        (self.t, self._e1_hat, self._d, self._d_comp,
         e_hat, eps) = kernels.estimator_step(
            self.t, self._e1_hat, self._d, self._d_comp, x, shift,
            self.delta, self.params.sigma_sq, self.params.nu)
        return ConfidenceInterval(e_hat - eps, e_hat + eps,
                                  1.0 - self.delta)

    def point_estimate_initial(self):
        """Running estimate of the mean before any observed shift."""
        if self.t == 0:
            raise RuntimeError("no observations")
        return self._e1_hat

    def point_estimate(self):
        """Estimate including every shift observed so far, i.e. the
        conditional mean for the *next* step.  The interval returned by
        :meth:`update` is centered at the pre-shift value instead."""
        if self.t == 0:
            raise RuntimeError("no observations")
        return self._e1_hat + self._d

    @property
    def net_shift(self):
        return self._d

    def state_dict(self):
        return {"t": self.t, "e1_hat": self._e1_hat,
                "d": self._d, "d_comp": self._d_comp}

    def load_state_dict(self, state):
        self.t = int(state["t"])
        self._e1_hat = float(state["e1_hat"])
        self._d = float(state["d"])
        self._d_comp = float(state["d_comp"])
