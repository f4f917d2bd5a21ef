"""convstream: streaming 1D-CNN inference with static memory planning.

The streaming executor buffers only each layer's live window in per-channel
ring buffers, fires a stage the moment its window fills, and cascades the
result downstream within the same sample interval. The batch path, memory
planner, and schedule simulator quantify what that buys: a sequence-length-
independent footprint and a response latency that no longer pays for the
whole convolution stack after the last sample.
"""

from .errors import (
    BufferOverflowError,
    BufferUnderflowError,
    ConfigError,
    ConvstreamError,
    EmptyTraceError,
    IncompleteSequenceError,
    ParseError,
    SequenceOverrunError,
    ShapeError,
    ValidationError,
)
from .gen import (
    build_model,
    model_from_spec,
    parse_layer_spec,
    pool_free_model,
    random_input,
    reference_model,
)
from .kernels import available_backends, use_backend
from .layers import ConvStage, PoolStage, StepOutcome, output_count
from .modelio import (
    BATCH,
    STREAMING,
    ConvLayer,
    DenseLayer,
    FlattenLayer,
    MacCostModel,
    MemoryPlan,
    ModelSpec,
    PlanEntry,
    PoolLayer,
    SoftmaxLayer,
    StageCost,
    dump_model,
    load_model,
    load_model_file,
    mac_cost_model,
    param_count,
    plan_memory,
    save_model_file,
    to_document,
    weight_storage_bytes,
)
from .network import (
    DenseHead,
    StepReport,
    StreamingNetwork,
    batch_features,
    batch_infer,
    stream_infer,
)
from .ringbuf import StridedRingBuffer
from .sim import (
    IntervalRecord,
    RealtimeReport,
    ScheduleTrace,
    TaskProfile,
    calibrate_mac_ns,
    check_realtime,
    compare_modes,
    fit_overhead_ms,
    histogram_csv,
    load_profile,
    load_profile_file,
    simulate,
    step_cost_histogram,
    step_mac_trace,
    timeline_csv,
    trace_summary,
)

__version__ = "0.1.0"
