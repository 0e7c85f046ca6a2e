"""JSON-lines trace and estimates files.

Every file starts with one metadata line (format version, kind, config,
config hash); each following line is one record.  Floats go through
``json`` unchanged, which round-trips doubles exactly.  Corrupt lines
abort with their line number: the per-sequence guarantee does not
survive silent gaps.
"""

import csv
import hashlib
import json

from .errors import TraceFormatError
from .monitors import (AttentionObservation, CoinObservation,
                       LendingObservation)

FORMAT_VERSION = 1
KINDS = ("coin", "lending", "attention")


def config_hash(config):
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _dumps(obj):
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)


def write_trace(path, kind, config, payloads):
    """Write a trace file; ``payloads`` yields per-step dicts with "t"."""
    if kind not in KINDS:
        raise TraceFormatError(f"unknown trace kind {kind!r}")
    meta = {"format": FORMAT_VERSION, "file": "trace", "kind": kind,
            "config": config, "config_hash": config_hash(config)}
    with open(path, "w") as fh:
        fh.write(_dumps(meta) + "\n")
        for payload in payloads:
            fh.write(_dumps(payload) + "\n")


def _read_meta(fh, path, expected_file):
    line = fh.readline()
    if not line:
        raise TraceFormatError(f"{path}: empty file, missing metadata line")
    try:
        meta = json.loads(line)
    except json.JSONDecodeError as exc:
        raise TraceFormatError(f"{path}:1: corrupt metadata: {exc}") from exc
    if meta.get("format") != FORMAT_VERSION:
        raise TraceFormatError(
            f"{path}: unsupported format version {meta.get('format')!r}")
    if meta.get("file") != expected_file:
        raise TraceFormatError(
            f"{path}: expected a {expected_file} file, got "
            f"{meta.get('file')!r}")
    return meta


def read_records(path, expected_file="trace", start_t=1):
    """Return (metadata, record iterator).  The iterator validates line
    syntax and that t starts at ``start_t`` (1 for whole files; a resumed
    run continues from its snapshot's step count) and increases by 1."""
    fh = open(path)
    meta = _read_meta(fh, path, expected_file)

    def records():
        expected_t = start_t
        with fh:
            for lineno, line in enumerate(fh, start=2):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise TraceFormatError(
                        f"{path}:{lineno}: corrupt record: {exc}") from exc
                if rec.get("t") != expected_t:
                    raise TraceFormatError(
                        f"{path}:{lineno}: expected t={expected_t}, "
                        f"got {rec.get('t')!r}")
                expected_t += 1
                yield rec

    return meta, records()


def observation_from_record(kind, rec):
    try:
        if kind == "coin":
            return CoinObservation(x=rec["x"])
        if kind == "lending":
            return LendingObservation(x=rec["x"], g=rec["g"],
                                      y=rec["y"], z=rec["z"])
        if kind == "attention":
            return AttentionObservation(x_a=rec["x_a"], x_b=rec["x_b"],
                                        y_a=rec["y_a"], y_b=rec["y_b"],
                                        k=rec["k"])
    except KeyError as exc:
        raise TraceFormatError(
            f"record t={rec.get('t')} missing field {exc}") from exc
    raise TraceFormatError(f"unknown trace kind {kind!r}")


def estimate_record(output):
    """Serialize one MonitorOutput."""
    def pair(ci):
        return None if ci is None else [ci.lo, ci.hi]

    rec = {"t": output.t, "conclusive": output.conclusive,
           "phi_lo": None, "phi_hi": None, "point": None,
           "clamped": output.clamped,
           "floor_violation": output.floor_violation,
           "group_intervals": {g: pair(ci)
                               for g, ci in output.per_group.items()}}
    if output.conclusive:
        rec["phi_lo"] = output.phi.lo
        rec["phi_hi"] = output.phi.hi
        rec["point"] = output.phi.midpoint
    return rec


def write_estimates(path, kind, monitor_config, trace_meta, records):
    meta = {"format": FORMAT_VERSION, "file": "estimates", "kind": kind,
            "monitor_config": monitor_config,
            "trace_config_hash": trace_meta.get("config_hash")}
    with open(path, "w") as fh:
        fh.write(_dumps(meta) + "\n")
        for rec in records:
            fh.write(_dumps(rec) + "\n")


def write_snapshot(path, monitor, monitor_config):
    blob = {"format": FORMAT_VERSION, "file": "snapshot",
            "kind": monitor.kind, "monitor_config": monitor_config,
            "state": monitor.state_dict()}
    with open(path, "w") as fh:
        fh.write(_dumps(blob) + "\n")


def read_snapshot(path):
    """Return (kind, monitor_config, state)."""
    with open(path) as fh:
        meta = _read_meta(fh, path, "snapshot")
    return meta["kind"], meta["monitor_config"], meta["state"]


CSV_FIELDS = ["t", "conclusive", "phi_lo", "phi_hi", "point",
              "clamped", "floor_violation",
              "a_lo", "a_hi", "b_lo", "b_hi"]


def export_csv(estimates_path, csv_path):
    """Flatten an estimates file to CSV for plotting."""
    _, records = read_records(estimates_path, expected_file="estimates")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        writer.writeheader()
        for rec in records:
            groups = rec.get("group_intervals", {})
            a = groups.get("A") or [None, None]
            b = groups.get("B") or [None, None]
            writer.writerow({
                "t": rec["t"], "conclusive": rec["conclusive"],
                "phi_lo": rec["phi_lo"], "phi_hi": rec["phi_hi"],
                "point": rec["point"], "clamped": rec["clamped"],
                "floor_violation": rec["floor_violation"],
                "a_lo": a[0], "a_hi": a[1], "b_lo": b[0], "b_hi": b[1],
            })
