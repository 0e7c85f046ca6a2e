"""Pipeline operations behind the CLI: simulate, monitor, eval, bench,
and snapshot/resume."""

import random
import statistics
import time

from .errors import ConfigError, TraceFormatError
from .monitors import (AttentionObservation, LendingObservation,
                       build_monitor)
from .sim import attention, coin, lending
from . import traceio

_SIM_CONFIGS = {
    "coin": coin.CoinConfig,
    "lending": lending.LendingSimConfig,
    "attention": attention.AttentionSimConfig,
}
_SIM_GENERATORS = {
    "coin": coin.generate,
    "lending": lending.generate,
    "attention": attention.generate,
}


def build_sim(config):
    """Parse a simulator config dict (with a ``kind`` field)."""
    cfg = dict(config)
    kind = cfg.pop("kind", None)
    if kind not in _SIM_CONFIGS:
        raise ConfigError(f"unknown simulator kind {kind!r}")
    try:
        return kind, _SIM_CONFIGS[kind](**cfg)
    except TypeError as exc:
        raise ConfigError(f"bad simulator config for {kind!r}: {exc}") from exc


def simulate(config, out_path, include_truth=True):
    """Generate a trace file; deterministic per (config, seed)."""
    kind, cfg = build_sim(config)
    payloads = _SIM_GENERATORS[kind](cfg)
    if not include_truth:
        payloads = (
            {k: v for k, v in p.items() if k != "truth"} for p in payloads)
    traceio.write_trace(out_path, kind, dict(config), payloads)
    return kind


def monitor_trace(trace_path, monitor_config, out_path,
                  snapshot_in=None, snapshot_out=None):
    """Stream a trace file through a monitor, one estimate per record.

    Never holds more than one record in memory.  Returns a per-update
    latency summary (microseconds).
    """
    if snapshot_in is not None:
        _, cfg, state = traceio.read_snapshot(snapshot_in)
        if monitor_config is not None and dict(cfg) != dict(monitor_config):
            raise TraceFormatError(
                "snapshot monitor config differs from the requested one")
        monitor_config = cfg
        mon = build_monitor(cfg)
        mon.load_state_dict(state)
    else:
        mon = build_monitor(monitor_config)
    meta, records = traceio.read_records(trace_path, start_t=mon.t + 1)
    if meta["kind"] != mon.kind:
        raise TraceFormatError(
            f"trace kind {meta['kind']!r} does not match monitor kind "
            f"{mon.kind!r}")

    latencies = []

    def estimates():
        for rec in records:
            obs = traceio.observation_from_record(mon.kind, rec)
            start = time.perf_counter_ns()
            out = mon.update(obs)
            latencies.append(time.perf_counter_ns() - start)
            yield traceio.estimate_record(out)

    traceio.write_estimates(out_path, mon.kind, dict(monitor_config),
                            meta, estimates())
    if snapshot_out is not None:
        traceio.write_snapshot(snapshot_out, mon, dict(monitor_config))
    return _latency_summary(latencies)


def _latency_summary(latencies_ns):
    if not latencies_ns:
        return {"updates": 0, "median_us": None, "p99_us": None,
                "mean_us": None}
    ordered = sorted(latencies_ns)
    p99 = ordered[int(0.99 * (len(ordered) - 1))]
    return {"updates": len(ordered),
            "median_us": statistics.median(ordered) / 1e3,
            "p99_us": p99 / 1e3,
            "mean_us": statistics.fmean(ordered) / 1e3}


def evaluate(estimates_path, trace_path):
    """Per-step containment of the true property in the emitted interval,
    plus interval-width statistics."""
    est_meta, est_records = traceio.read_records(
        estimates_path, expected_file="estimates")
    trace_meta, trace_records = traceio.read_records(trace_path)
    if est_meta["kind"] != trace_meta["kind"]:
        raise TraceFormatError("estimates and trace kinds differ")

    steps = conclusive = contained = truth_steps = 0
    widths = []
    decay = []
    next_checkpoint = 1
    try:
        pairs = list(zip(est_records, trace_records, strict=True))
    except ValueError as exc:
        raise TraceFormatError(
            "estimates and trace files have different lengths") from exc
    for est, rec in pairs:
        if est["t"] != rec["t"]:
            raise TraceFormatError(
                f"misaligned files at t={est['t']} vs t={rec['t']}")
        steps += 1
        if not est["conclusive"]:
            continue
        conclusive += 1
        width = est["phi_hi"] - est["phi_lo"]
        widths.append(width)
        if est["t"] >= next_checkpoint:
            decay.append({"t": est["t"], "width": width})
            next_checkpoint *= 2
        truth = rec.get("truth")
        if truth is not None and "phi" in truth:
            truth_steps += 1
            if est["phi_lo"] <= truth["phi"] <= est["phi_hi"]:
                contained += 1
    report = {
        "steps": steps,
        "conclusive_steps": conclusive,
        "truth_steps": truth_steps,
        "contained": contained,
        "containment": contained / truth_steps if truth_steps else None,
        "mean_width": statistics.fmean(widths) if widths else None,
        "median_width": statistics.median(widths) if widths else None,
        "width_decay": decay,
    }
    return report


# --------------------------------------------------------------------
# Synthetic-update benchmark
# --------------------------------------------------------------------

def _synthetic_observations(kind, n, seed):
    rng = random.Random(seed)
    if kind == "lending":
        return [LendingObservation(x=rng.randrange(101),
                                   g="A" if rng.random() < 0.5 else "B",
                                   y=rng.randrange(2), z=rng.randrange(2))
                for _ in range(n)]
    if kind == "attention":
        obs = []
        for _ in range(n):
            y_a = rng.randrange(4)
            y_b = rng.randrange(7 - y_a)
            obs.append(AttentionObservation(
                x_a=rng.randrange(20), x_b=rng.randrange(20),
                y_a=y_a, y_b=y_b, k=6))
        return obs
    raise ConfigError(f"no benchmark for kind {kind!r}")


def _default_monitor_config(kind):
    if kind == "lending":
        return {"kind": "lending", "n_a": 100, "n_b": 100,
                "c_max": 100, "delta": 0.05}
    return {"kind": "attention", "gamma": 0.0025, "lambda_min": 4.0,
            "lambda_max": 12.0, "delta": 0.05}


def bench(kind, updates, seed=0, monitor_config=None):
    """Median / p99 per-update latency over an in-memory trace."""
    observations = _synthetic_observations(kind, updates, seed)
    mon = build_monitor(monitor_config or _default_monitor_config(kind))
    latencies = []
    append = latencies.append
    clock = time.perf_counter_ns
    update = mon.update
    for obs in observations:
        start = clock()
        update(obs)
        append(clock() - start)
    summary = _latency_summary(latencies)
    summary["kind"] = kind
    return summary


def bench_backends(kind, updates, seed=0):
    """Run the benchmark once per available kernel backend."""
    from . import kernels

    current = kernels.backend_name()
    results = []
    try:
        for name in kernels.available_backends():
            kernels.set_backend(name)
            summary = bench(kind, updates, seed)
            summary["backend"] = name
            results.append(summary)
    finally:
        kernels.set_backend(current)
    return results
