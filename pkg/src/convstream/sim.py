"""Interval-schedule simulator.

The device alternates sampling and compute on a fixed acquisition interval
(1000 / sampling_rate_hz milliseconds). In batch mode every interval holds
only the sample cost and the whole-sequence convolution runs after the last
sample, so it lands on the response latency in full. In streaming mode each
interval additionally carries that step's cascade cost, the end-of-sequence
work shrinks to the dense head, and the latency drops by exactly the
convolution cost, provided every step fits its interval.

Step costs come from a fill-state walk over the stage geometry; no weights
or samples are involved. Costs are converted to time with ``mac_ns``
(nanoseconds per MAC); when a profile leaves it unset it is calibrated so
the summed step costs reproduce the profile's measured convolution time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import ConfigError, EmptyTraceError
from .modelio import BATCH, STREAMING, ConvLayer, ModelSpec, mac_cost_model


@dataclass(frozen=True)
class TaskProfile:
    """Measured per-interval and per-sequence costs, in milliseconds.

    ``mac_ns`` of None means "calibrate from conv_ms"; an explicit 0 makes
    compute literally free.
    """

    sample_ms: float = 1.02
    conv_ms: float = 502.59
    feedforward_ms: float = 1.31
    communication_ms: float = 0.01
    sampling_rate_hz: float = 119.0
    per_interval_overhead_ms: float = 0.18
    mac_ns: float | None = None

    @property
    def interval_ms(self) -> float:
        return 1000.0 / self.sampling_rate_hz


_PROFILE_FIELDS = {
    "sample_ms", "conv_ms", "feedforward_ms", "communication_ms",
    "sampling_rate_hz", "per_interval_overhead_ms", "mac_ns",
}


def load_profile(data) -> TaskProfile:
    """Parse a profile JSON document; unknown keys are rejected, missing
    keys keep their defaults."""
    if isinstance(data, bytes):
        data = data.decode("utf-8", errors="replace")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"profile is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("profile must be a JSON object")
    unknown = set(doc) - _PROFILE_FIELDS
    if unknown:
        raise ConfigError(f"profile has unknown field(s) {sorted(unknown)}")
    for key, value in doc.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"profile field {key!r} must be a number")
        if value < 0:
            raise ConfigError(f"profile field {key!r} must be non-negative")
    if "sampling_rate_hz" in doc and doc["sampling_rate_hz"] <= 0:
        raise ConfigError("profile field 'sampling_rate_hz' must be positive")
    return TaskProfile(**{k: float(v) for k, v in doc.items()})


def load_profile_file(path) -> TaskProfile:
    with open(path, "rb") as fh:
        return load_profile(fh.read())


def calibrate_mac_ns(model: ModelSpec, conv_ms: float, n: int | None = None) -> float:
    """Nanoseconds per operation that make the stage pipeline's total work
    take ``conv_ms`` on a full sequence."""
    total = mac_cost_model(model, n=n).total
    if total == 0:
        raise ConfigError("model has no stage work to calibrate against")
    return conv_ms * 1e6 / total


def fit_overhead_ms(profile: TaskProfile, target_latency_ms: float, n: int) -> float:
    """Per-interval overhead that makes the batch latency hit a measured
    end-to-end figure."""
    fixed = (n * profile.interval_ms + profile.conv_ms
             + profile.feedforward_ms + profile.communication_ms)
    return (target_latency_ms - fixed) / n


# ---------------------------------------------------------------------------
# per-step cost walk


def step_mac_trace(model: ModelSpec, n: int | None = None):
    """Total stage cost charged to each of ``n`` sample arrivals."""
    caps, strides, costs = [], [], []
    cur_ch = model.input_channels
    for layer in model.stages:
        if isinstance(layer, ConvLayer):
            caps.append(layer.kernel)
            costs.append(layer.filters * cur_ch * layer.kernel)
            cur_ch = layer.filters
        else:
            caps.append(layer.window)
            costs.append(cur_ch * layer.window)
        strides.append(layer.stride)
    occ = [0] * len(caps)
    samples = model.input_length if n is None else n
    trace = []
    for _ in range(samples):
        macs = 0
        for i in range(len(caps)):
            occ[i] += 1
            if occ[i] < caps[i]:
                break
            macs += costs[i]
            occ[i] -= strides[i]
        trace.append(macs)
    return trace


# ---------------------------------------------------------------------------
# schedule simulation


@dataclass(frozen=True)
class IntervalRecord:
    index: int  # 1-based sample number
    sample_cost_ms: float
    step_cost_ms: float
    macs: int
    slack_ms: float


@dataclass(frozen=True)
class ScheduleTrace:
    mode: str
    samples: int
    interval_ms: float
    records: tuple
    conv_cost_ms: float  # end-of-sequence stage work (batch only)
    feedforward_cost_ms: float
    communication_cost_ms: float
    latency_ms: float
    deadline_misses: int


def _resolve_mac_ns(model: ModelSpec, profile: TaskProfile) -> float:
    if profile.mac_ns is None:
        return calibrate_mac_ns(model, profile.conv_ms)
    return profile.mac_ns


def simulate(model: ModelSpec, profile: TaskProfile, mode: str,
             n: int | None = None) -> ScheduleTrace:
    """Walk one acquisition of ``n`` samples (default: the model's declared
    length) and return the per-interval schedule."""
    if mode not in (STREAMING, BATCH):
        raise ConfigError(f"unknown mode {mode!r}")
    samples = model.input_length if n is None else n
    if samples < 1:
        raise ConfigError("need at least one sample to simulate")
    interval = profile.interval_ms
    ns = _resolve_mac_ns(model, profile)
    macs = step_mac_trace(model, samples)

    records = []
    for i, m in enumerate(macs, start=1):
        step_ms = (m * ns / 1e6) if mode == STREAMING else 0.0
        records.append(IntervalRecord(
            index=i,
            sample_cost_ms=profile.sample_ms,
            step_cost_ms=step_ms,
            macs=m if mode == STREAMING else 0,
            slack_ms=interval - profile.sample_ms - step_ms,
        ))
    conv_cost = (sum(macs) * ns / 1e6) if mode == BATCH else 0.0
    latency = (samples * interval + conv_cost + profile.feedforward_ms
               + profile.communication_ms
               + samples * profile.per_interval_overhead_ms)
    return ScheduleTrace(
        mode=mode,
        samples=samples,
        interval_ms=interval,
        records=tuple(records),
        conv_cost_ms=conv_cost,
        feedforward_cost_ms=profile.feedforward_ms,
        communication_cost_ms=profile.communication_ms,
        latency_ms=latency,
        deadline_misses=sum(1 for r in records if r.slack_ms < 0),
    )


def compare_modes(model: ModelSpec, profile: TaskProfile, n: int | None = None):
    """Latency of both modes plus the percentage saved by streaming."""
    batch = simulate(model, profile, BATCH, n=n)
    streaming = simulate(model, profile, STREAMING, n=n)
    reduction = 100.0 * (batch.latency_ms - streaming.latency_ms) / batch.latency_ms
    return {
        "batch_latency_ms": batch.latency_ms,
        "streaming_latency_ms": streaming.latency_ms,
        "reduction_pct": reduction,
    }


# ---------------------------------------------------------------------------
# trace reporting


def step_cost_histogram(trace: ScheduleTrace):
    """MAC value -> interval count, keys ascending. The number of distinct
    values is bounded by the stage count plus one."""
    if not trace.records:
        raise EmptyTraceError("trace has no interval records")
    counts = {}
    for r in trace.records:
        counts[r.macs] = counts.get(r.macs, 0) + 1
    return dict(sorted(counts.items()))


@dataclass(frozen=True)
class RealtimeReport:
    feasible: bool
    max_step_cost_ms: float
    interval_budget_ms: float
    deadline_misses: int


def check_realtime(model: ModelSpec, profile: TaskProfile,
                   n: int | None = None) -> RealtimeReport:
    """Does every streaming step fit inside its acquisition interval?"""
    trace = simulate(model, profile, STREAMING, n=n)
    budget = trace.interval_ms - profile.sample_ms
    worst = max(r.step_cost_ms for r in trace.records)
    return RealtimeReport(
        feasible=trace.deadline_misses == 0,
        max_step_cost_ms=worst,
        interval_budget_ms=budget,
        deadline_misses=trace.deadline_misses,
    )


def timeline_csv(trace: ScheduleTrace) -> str:
    lines = ["interval,step_cost_ms,slack_ms"]
    for r in trace.records:
        lines.append(f"{r.index},{r.step_cost_ms:.6f},{r.slack_ms:.6f}")
    return "\n".join(lines) + "\n"


def histogram_csv(trace: ScheduleTrace) -> str:
    lines = ["macs,count"]
    for macs, count in step_cost_histogram(trace).items():
        lines.append(f"{macs},{count}")
    return "\n".join(lines) + "\n"


def trace_summary(trace: ScheduleTrace) -> dict:
    macs = [r.macs for r in trace.records]
    return {
        "mode": trace.mode,
        "samples": trace.samples,
        "interval_ms": trace.interval_ms,
        "latency_ms": trace.latency_ms,
        "conv_cost_ms": trace.conv_cost_ms,
        "feedforward_cost_ms": trace.feedforward_cost_ms,
        "communication_cost_ms": trace.communication_cost_ms,
        "deadline_misses": trace.deadline_misses,
        "step_macs": {
            "min": min(macs),
            "mean": sum(macs) / len(macs),
            "max": max(macs),
        },
    }
