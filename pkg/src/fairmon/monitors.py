"""Composed disparity monitors.

Each monitor runs one shift-corrected estimator per group at budget
delta/2 and reports the interval difference of the two per-group
estimates at overall confidence 1 - delta (union bound).  Before both
groups have produced an estimate the output is marked inconclusive.
"""

from dataclasses import dataclass
from typing import Optional

from .discovery import eta_interval, poisson_subexp_params
from .estimator import ShiftedMeanEstimator, SubExpParams
from .intervals import ConfidenceInterval, interval_sub

GROUPS = ("A", "B")


@dataclass(frozen=True)
class MonitorOutput:
    """Per-step result: the disparity interval (None while inconclusive)
    and the two component intervals it was formed from."""

    t: int
    phi: Optional[ConfidenceInterval]
    per_group: dict
    clamped: bool = False
    floor_violation: bool = False

    @property
    def conclusive(self):
        return self.phi is not None


def _check_delta(delta):
    if not 0.0 < delta < 1.0:
        raise ValueError(f"invalid confidence: delta={delta}")


# --------------------------------------------------------------------
# Lending
# --------------------------------------------------------------------

@dataclass(frozen=True)
class LendingObservation:
    """One lending event: credit score, group, grant decision, repayment."""

    x: int
    g: str
    y: int
    z: int


@dataclass(frozen=True)
class LendingConfig:
    n_a: int
    n_b: int
    c_max: int
    delta: float

    def __post_init__(self):
        if self.n_a < 1 or self.n_b < 1:
            raise ValueError(
                f"group sizes must be positive: n_a={self.n_a}, n_b={self.n_b}")
        if self.c_max < 1:
            raise ValueError(f"c_max must be positive, got {self.c_max}")
        _check_delta(self.delta)

    def group_size(self, g):
        return self.n_a if g == "A" else self.n_b


def lending_change(obs, cfg):
    """Shift in the observed group's mean credit score caused by one event:
    +-1/N_g on a repaid/defaulted grant, unless the score pins at a bound."""
    if obs.y == 1 and obs.z == 1 and obs.x < cfg.c_max:
        return 1.0 / cfg.group_size(obs.g)
    if obs.y == 1 and obs.z == 0 and obs.x > 0:
        return -1.0 / cfg.group_size(obs.g)
    return 0.0


class LendingMonitor:
    """Streams lending events; estimates the disparity in mean credit
    score between groups A and B."""

    kind = "lending"

    def __init__(self, cfg):
        self.cfg = cfg
        params = SubExpParams(float(cfg.c_max) ** 2, 0.0)
        self._estimators = {
            g: ShiftedMeanEstimator(
                lambda obs, cfg=cfg: lending_change(obs, cfg),
                cfg.delta / 2.0, params)
            for g in GROUPS
        }
        self._last = {g: None for g in GROUPS}
        self.t = 0

    def estimator(self, g):
        return self._estimators[g]

    def _validate(self, obs):
        if obs.g not in GROUPS:
            raise ValueError(f"unknown group {obs.g!r}")
        if not 0 <= obs.x <= self.cfg.c_max:
            raise ValueError(
                f"credit score {obs.x} outside [0, {self.cfg.c_max}]")
        if obs.y not in (0, 1) or obs.z not in (0, 1):
            raise ValueError(f"decision/reaction must be 0 or 1: {obs}")

    def update(self, obs):
        self._validate(obs)
        self.t += 1
        self._last[obs.g] = self._estimators[obs.g].update(obs)
        phi = None
        if all(self._last[g] is not None for g in GROUPS):
            phi = interval_sub(self._last["A"], self._last["B"])
        return MonitorOutput(self.t, phi, dict(self._last))

    def state_dict(self):
        return {
            "t": self.t,
            "estimators": {g: self._estimators[g].state_dict()
                           for g in GROUPS},
            "last": {g: None if ci is None else [ci.lo, ci.hi, ci.confidence]
                     for g, ci in self._last.items()},
        }

    def load_state_dict(self, state):
        self.t = int(state["t"])
        for g in GROUPS:
            self._estimators[g].load_state_dict(state["estimators"][g])
            raw = state["last"][g]
            self._last[g] = None if raw is None else ConfidenceInterval(*raw)


# --------------------------------------------------------------------
# Attention allocation
# --------------------------------------------------------------------

@dataclass(frozen=True)
class AttentionObservation:
    """One allocation round over the monitored pair of locations:
    sampled counts (incidents are x+1), attention units, total capacity."""

    x_a: int
    x_b: int
    y_a: int
    y_b: int
    k: int


@dataclass(frozen=True)
class AttentionConfig:
    gamma: float
    lambda_min: float
    lambda_max: float
    delta: float
    # Lower endpoint of a rate interval is clamped to at least this
    # before the discovery-probability mapping, which requires rate > 0.
    rate_floor: float = 1e-9

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError(f"gamma must be nonnegative, got {self.gamma}")
        if not 0 < self.lambda_min < self.lambda_max:
            raise ValueError(
                "rate bounds must satisfy 0 < lambda_min < lambda_max, got "
                f"[{self.lambda_min}, {self.lambda_max}]")
        _check_delta(self.delta)
        if self.rate_floor <= 0:
            raise ValueError(f"rate_floor must be positive, got {self.rate_floor}")


def attention_change(y_units, gamma):
    """Shift in a location's incident rate after receiving y_units of
    attention: +gamma when ignored, -gamma*y_units otherwise."""
    if y_units == 0:
        return gamma
    return -gamma * y_units


@dataclass(frozen=True)
class _GroupStep:
    """Per-location slice of an attention observation."""

    x: int
    y: int


class AttentionMonitor:
    """Streams allocation rounds; estimates the disparity in incident
    discovery probability between the two monitored locations."""

    kind = "attention"

    def __init__(self, cfg):
        self.cfg = cfg
        params = poisson_subexp_params(cfg.lambda_max)
        self._estimators = {
            g: ShiftedMeanEstimator(
                lambda step, gamma=cfg.gamma: attention_change(step.y, gamma),
                cfg.delta / 2.0, params)
            for g in GROUPS
        }
        # Running prefix state of the per-group shift sums; equivalent to
        # evaluating check_parameter_floor on the full shift log, in O(1).
        self._shift_sum = {g: 0.0 for g in GROUPS}
        self._shift_min_prefix = {g: 0.0 for g in GROUPS}
        self.t = 0

    def estimator(self, g):
        return self._estimators[g]

    def _validate(self, obs):
        if min(obs.x_a, obs.x_b, obs.y_a, obs.y_b) < 0 or obs.k < 1:
            raise ValueError(f"negative counts or capacity in {obs}")
        if obs.y_a + obs.y_b > obs.k:
            raise ValueError(
                f"allocation {obs.y_a}+{obs.y_b} exceeds capacity {obs.k}")

    def _omega_interval(self, step, rate_ci):
        """Discovery-probability interval for one location; returns
        (interval, clamped)."""
        clamped = rate_ci.lo < self.cfg.rate_floor
        if clamped:
            lo = self.cfg.rate_floor
            hi = max(rate_ci.hi, self.cfg.rate_floor)
            rate_ci = ConfidenceInterval(lo, hi, rate_ci.confidence)
        if step.y == 0:
            # No attention discovers nothing; the mapping degenerates to 0.
            return ConfidenceInterval(0.0, 0.0, rate_ci.confidence), clamped
        return eta_interval(step.y, rate_ci), clamped

    def update(self, obs):
        self._validate(obs)
        self.t += 1
        steps = {"A": _GroupStep(obs.x_a, obs.y_a),
                 "B": _GroupStep(obs.x_b, obs.y_b)}
        per_group = {}
        clamped = False
        for g, step in steps.items():
            rate_ci = self._estimators[g].update(step)
            omega, c = self._omega_interval(step, rate_ci)
            per_group[g] = omega
            clamped = clamped or c
            shift = attention_change(step.y, self.cfg.gamma)
            self._shift_sum[g] += shift
            self._shift_min_prefix[g] = min(self._shift_min_prefix[g],
                                            self._shift_sum[g])
        floor_violation = any(
            self.cfg.lambda_min + self._shift_min_prefix[g] <= 0.0
            for g in GROUPS)
        phi = interval_sub(per_group["A"], per_group["B"])
        return MonitorOutput(self.t, phi, per_group,
                             clamped=clamped,
                             floor_violation=floor_violation)

    def state_dict(self):
        return {
            "t": self.t,
            "estimators": {g: self._estimators[g].state_dict()
                           for g in GROUPS},
            "shift_sum": dict(self._shift_sum),
            "shift_min_prefix": dict(self._shift_min_prefix),
        }

    def load_state_dict(self, state):
        self.t = int(state["t"])
        for g in GROUPS:
            self._estimators[g].load_state_dict(state["estimators"][g])
            self._shift_sum[g] = float(state["shift_sum"][g])
            self._shift_min_prefix[g] = float(state["shift_min_prefix"][g])


# --------------------------------------------------------------------
# Coin (single drifting Bernoulli stream; no disparity, the monitored
# property is the bias itself)
# --------------------------------------------------------------------

@dataclass(frozen=True)
class CoinObservation:
    x: int


@dataclass(frozen=True)
class CoinMonitorConfig:
    epsilon: float
    delta: float
    sigma_sq: float = 1.0
    nu: float = 0.0

    def __post_init__(self):
        if not 0 <= self.epsilon < 1:
            raise ValueError(f"epsilon must be in [0, 1), got {self.epsilon}")
        _check_delta(self.delta)


def coin_change(obs, epsilon):
    return epsilon if obs.x == 1 else -epsilon


class CoinMonitor:
    """Tracks the drifting bias of a single coin-toss stream."""

    kind = "coin"

    def __init__(self, cfg):
        self.cfg = cfg
        self._estimator = ShiftedMeanEstimator(
            lambda obs, eps=cfg.epsilon: coin_change(obs, eps),
            cfg.delta, SubExpParams(cfg.sigma_sq, cfg.nu))
        self.t = 0

    @property
    def estimator(self):
        return self._estimator

    def update(self, obs):
        if obs.x not in (0, 1):
            raise ValueError(f"coin outcome must be 0 or 1, got {obs.x}")
        self.t += 1
        ci = self._estimator.update(obs)
        return MonitorOutput(self.t, ci, {"A": ci, "B": None})

    def state_dict(self):
        return {"t": self.t, "estimator": self._estimator.state_dict()}

    def load_state_dict(self, state):
        self.t = int(state["t"])
        self._estimator.load_state_dict(state["estimator"])


# --------------------------------------------------------------------
# Construction from plain config dicts (CLI / snapshot surface)
# --------------------------------------------------------------------

def build_monitor(config):
    """Build a monitor from a plain dict with a ``kind`` field."""
    cfg = dict(config)
    kind = cfg.pop("kind", None)
    try:
        if kind == "lending":
            return LendingMonitor(LendingConfig(**cfg))
        if kind == "attention":
            return AttentionMonitor(AttentionConfig(**cfg))
        if kind == "coin":
            return CoinMonitor(CoinMonitorConfig(**cfg))
    except TypeError as exc:
        raise ValueError(f"bad monitor config for kind {kind!r}: {exc}") from exc
    raise ValueError(f"unknown monitor kind {kind!r}")
