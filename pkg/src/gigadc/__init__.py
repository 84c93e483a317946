"""gigadc: analytical planning and simulation for gigawatt-scale LLM training datacenters.

The package is a library of pure functions over immutable value types. It
covers capital provisioning and facility power/cooling envelopes, model
sizing and memory accounting, compute-optimal scaling laws, 3D-parallelism
planning, per-layer step-time and exposed-communication prediction, scale-out
network topology design and costing, flow-level fabric simulation, and
autoregressive generation latency estimation. A small CLI (``gigadc``) drives
scenarios end to end and emits deterministic JSON/CSV reports.

All quantities use decimal units: 1 GB = 1e9 bytes, 1 Gbps = 1e9 bit/s.
"""

__version__ = "0.1.0"

from .errors import ConfigError, GigadcError, InfeasibleError
from .hardware import (
    AcceleratorSpec,
    BalancingAuthority,
    HardwareCatalog,
    PowerEnvelope,
    Provisioning,
    RackSpec,
    DEFAULT_CATALOG,
    GB200,
    GRID_HEADROOM,
    NVL72,
    adiabatic_water_range,
    free_air_area,
    heat_reuse_households,
    power_envelope,
    provision,
)
from .models import (
    DenseTransformerConfig,
    MemoryFootprint,
    MoEConfig,
    PrecisionPolicy,
    DEFAULT_PRECISION,
    DENSE_100T,
    MODEL_PRESETS,
    MOE_8X17T,
    activation_bytes_per_device,
    flops_forward_per_layer,
    layer_weight_params,
    memory_footprint,
    param_count,
    param_count_moe,
)
from .scaling import (
    ScalingLaw,
    TrainingBudget,
    DEFAULT_LAWS,
    law_through_anchor,
    optimal_allocation,
    training_time,
)
from .parallelism import ParallelismPlan, plan
from .steptime import (
    DpSchedule,
    DpStage,
    StepTimeReport,
    WanLink,
    DEFAULT_WAN,
    dp_schedule,
    layer_compute_times,
    p2p_time,
    pp_comm_per_pass,
    ring_all_gather_time,
    ring_all_reduce_time,
    step_time_report,
    sweep,
    tp_comm_per_pass,
)
from .topology import (
    PriceBook,
    SwitchChip,
    TopologyDesign,
    DEFAULT_PRICES,
    SWITCH_51T,
    combined_design,
    comparison_table,
    fat_tree,
    multi_plane,
    multi_rail,
    required_tiers,
)
from .flowsim import (
    Fabric,
    FctStats,
    TrafficPattern,
    build_fabric,
    simulate_permutation,
)
from .inference import (
    InferenceEstimate,
    LatencyModel,
    GENERATION_TABLE_100T,
    GENERATION_TABLE_50T,
    fit_latency,
    generation_time,
)
