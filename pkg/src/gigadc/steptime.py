"""Per-layer step-time prediction: collectives, the 5-stage DP schedule, and exposure.

Collective costs use the ring model: an all-reduce of M bytes among n peers
at B bytes/s per participant takes 2*M*(n-1)/(n*B); reduce-scatter and
all-gather each take half of that. Base latency terms are negligible at
these message sizes and default to zero.

The gradient exchange after each backward pass runs as five pipelined
stages on three different networks:

  1. scale-up  all-reduce across the layers_per_rack replicas in a rack
  2. scale-out all-reduce across the racks holding the same layer in a DC
  3. cross-DC  pairwise exchange of each device's slice over the WAN
  4. scale-out all-gather undoing stage 2's chunking
  5. scale-up  all-gather undoing stage 1's chunking

Exposure model: TP/SP and PP transfers sit on the critical path (in-layer
and layer-boundary dependencies) and are always exposed, once per forward
and once per backward pass. Each DP stage rides its own network and is
chunk-pipelined against backward compute, so it can hide up to one layer's
backward time; anything beyond that window is exposed. Pipeline fill/drain
is ignored; this is the steady state with all devices busy.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import ConfigError
from .hardware import HardwareCatalog
from .models import (
    DEFAULT_PRECISION,
    ModelConfig,
    PrecisionPolicy,
    flops_forward_per_layer,
    layer_weight_params,
)
from .parallelism import ParallelismPlan

# Compute-time increase from selectively recomputing activations in the
# backward pass instead of storing them all.
RECOMPUTE_OVERHEAD = 0.0097


@dataclass(frozen=True)
class WanLink:
    """Wide-area link between the two datacenter halves."""

    per_gpu_capacity: float      # bit/s of WAN bandwidth provisioned per device
    propagation_rtt: float       # s, round trip between the sites
    loss_penalty_rtts: float = 0.0  # extra RTTs charged for tail loss/retransmit

    def __post_init__(self):
        if self.per_gpu_capacity <= 0:
            raise ValueError("per_gpu_capacity must be > 0")
        if self.propagation_rtt < 0 or self.loss_penalty_rtts < 0:
            raise ValueError("RTT terms must be >= 0")


DEFAULT_WAN = WanLink(per_gpu_capacity=20e9, propagation_rtt=0.060)


@dataclass(frozen=True)
class CollectiveCost:
    """A collective step: message size, ring peers, and per-participant bandwidth."""

    message_bytes: float
    peers: int
    bandwidth: float      # bytes/s per participant
    base_latency: float = 0.0

    def __post_init__(self):
        if self.peers < 1:
            raise ValueError("peers must be >= 1")
        if self.bandwidth <= 0:
            raise ValueError("bandwidth must be > 0")

    def all_reduce_time(self) -> float:
        return ring_all_reduce_time(self.message_bytes, self.peers,
                                    self.bandwidth, self.base_latency)

    def all_gather_time(self) -> float:
        return ring_all_gather_time(self.message_bytes / self.peers, self.peers,
                                    self.bandwidth, self.base_latency)


def ring_all_reduce_time(message_bytes: float, peers: int, bandwidth: float,
                         base_latency: float = 0.0) -> float:
    """Ring all-reduce of a full message among peers: 2*M*(n-1)/(n*B)."""
    if peers < 1:
        raise ValueError("peers must be >= 1")
    if peers == 1:
        return 0.0
    return 2.0 * message_bytes * (peers - 1) / (peers * bandwidth) + base_latency


def ring_all_gather_time(bytes_per_peer: float, peers: int, bandwidth: float,
                         base_latency: float = 0.0) -> float:
    """Ring all-gather where each peer contributes bytes_per_peer: M_p*(n-1)/B.

    Equivalently full_size*(n-1)/(n*B) for a message assembled from n chunks.
    """
    if peers < 1:
        raise ValueError("peers must be >= 1")
    if peers == 1:
        return 0.0
    return bytes_per_peer * (peers - 1) / bandwidth + base_latency


def p2p_time(message_bytes: float, bandwidth: float) -> float:
    """Point-to-point transfer time, M/B."""
    if bandwidth <= 0:
        raise ValueError("bandwidth must be > 0")
    return message_bytes / bandwidth


@dataclass(frozen=True)
class DpStage:
    network: str              # "scale-up" | "scale-out" | "cross-dc"
    bytes_per_device: float
    peers: int
    time_s: float


@dataclass(frozen=True)
class DpSchedule:
    stages: tuple[DpStage, ...]
    note: str = ""

    @property
    def times(self) -> tuple[float, ...]:
        return tuple(s.time_s for s in self.stages)

    @property
    def total_time(self) -> float:
        return sum(self.times)


_STAGE_NETWORKS = ("scale-up", "scale-out", "cross-dc", "scale-out", "scale-up")


@dataclass(frozen=True)
class StepTimeReport:
    """Per-layer steady-state times and the exposure breakdown."""

    fwd_per_layer: float
    bwd_per_layer: float
    tp_bytes_per_pass: float
    tp_time_per_pass: float
    pp_bytes_per_pass: float
    pp_time_per_pass: float
    dp: DpSchedule
    tp_exposed: float               # both passes
    pp_exposed: float               # both passes
    dp_exposed: tuple[float, ...]   # per stage, beyond the masking window
    exposed_total: float
    exposed_fraction: float

    def to_dict(self) -> dict:
        return {
            "fwd_per_layer_s": self.fwd_per_layer,
            "bwd_per_layer_s": self.bwd_per_layer,
            "tp_bytes_per_pass": self.tp_bytes_per_pass,
            "tp_time_per_pass_s": self.tp_time_per_pass,
            "pp_bytes_per_pass": self.pp_bytes_per_pass,
            "pp_time_per_pass_s": self.pp_time_per_pass,
            "dp_stages": [
                {
                    "network": s.network,
                    "bytes_per_device": s.bytes_per_device,
                    "peers": s.peers,
                    "time_s": s.time_s,
                    "exposed_s": e,
                    "masked_s": s.time_s - e,
                }
                for s, e in zip(self.dp.stages, self.dp_exposed)
            ],
            "dp_note": self.dp.note,
            "tp_exposed_s": self.tp_exposed,
            "pp_exposed_s": self.pp_exposed,
            "exposed_total_s": self.exposed_total,
            "exposed_fraction": self.exposed_fraction,
        }


def layer_compute_times(cfg: ModelConfig, plan: ParallelismPlan, hw: HardwareCatalog,
                        recompute_overhead: float = RECOMPUTE_OVERHEAD) -> tuple[float, float]:
    """(forward, backward) seconds for one layer; backward is twice forward."""
    fwd = (flops_forward_per_layer(cfg)
           / (plan.tensor_degree * hw.accelerator.effective_flops)
           * (1.0 + recompute_overhead))
    return fwd, 2.0 * fwd


def tp_comm_per_pass(cfg: ModelConfig, plan: ParallelismPlan, hw: HardwareCatalog,
                     policy: PrecisionPolicy = DEFAULT_PRECISION) -> tuple[float, float]:
    """Tensor/sequence-parallel traffic per forward pass: (bytes, seconds).

    Two all-gathers and two reduce-scatters on an sbh activation tensor,
    approximated as two ring all-reduces of s*b*h*r bytes among the t
    in-rack peers, where r is the activation element size.
    """
    r = policy.activation_bytes_per_elem
    message = cfg.seq_len * cfg.microbatch * cfg.hidden * r
    time = 2.0 * ring_all_reduce_time(message, plan.tensor_degree,
                                      hw.accelerator.scale_up_bw)
    return 2.0 * message, time


def pp_comm_per_pass(cfg: ModelConfig, plan: ParallelismPlan, hw: HardwareCatalog,
                     policy: PrecisionPolicy = DEFAULT_PRECISION) -> tuple[float, float]:
    """Pipeline-parallel boundary transfer per pass: each device sends its
    sequence-parallel chunk of sbh*r to its same-rank peer in the next layer."""
    r = policy.activation_bytes_per_elem
    chunk = cfg.seq_len * cfg.microbatch * cfg.hidden * r / plan.tensor_degree
    return chunk, p2p_time(chunk, hw.accelerator.scale_out_bw)


def dp_schedule(cfg: ModelConfig, plan: ParallelismPlan, hw: HardwareCatalog,
                wan: WanLink = DEFAULT_WAN,
                policy: PrecisionPolicy = DEFAULT_PRECISION) -> DpSchedule:
    """The five-stage hierarchical gradient exchange for one layer.

    Per-layer gradient volume G excludes embeddings and covers every expert
    for MoE. Stage messages shrink down the hierarchy: G/t per device in the
    rack, a 1/layers_per_rack chunk of that across the DC, and a
    1/peers slice of the chunk across the WAN; stages 4 and 5 are the
    matching all-gathers. A single replica degenerates to an all-zero
    schedule.
    """
    grads = layer_weight_params(cfg) * policy.grad_bytes_per_param
    t = plan.tensor_degree
    lpr = plan.layers_per_rack
    # Racks per DC holding the same layer; a degenerate ring of 1 costs zero.
    peers_dc = max(1, plan.dp_replicas_per_dc // lpr)

    if plan.dp_replicas_total < 2:
        zero = tuple(
            DpStage(network=n, bytes_per_device=0.0, peers=1, time_s=0.0)
            for n in _STAGE_NETWORKS
        )
        return DpSchedule(stages=zero, note="no data parallelism")

    b1 = grads / t
    b2 = b1 / lpr
    b3 = b2 / peers_dc
    su = hw.accelerator.scale_up_bw
    so = hw.accelerator.scale_out_bw
    wan_bw = wan.per_gpu_capacity / 8.0  # bytes/s

    # Pairwise cross-DC exchange overlaps both directions: transfer plus the
    # one-way propagation for the last byte, plus any loss penalty in RTTs.
    t3 = (p2p_time(b3, wan_bw) + wan.propagation_rtt / 2.0
          + wan.loss_penalty_rtts * wan.propagation_rtt)

    stages = (
        DpStage("scale-up", b1, lpr, ring_all_reduce_time(b1, lpr, su)),
        DpStage("scale-out", b2, peers_dc, ring_all_reduce_time(b2, peers_dc, so)),
        DpStage("cross-dc", b3, 2, t3),
        DpStage("scale-out", b2, peers_dc,
                ring_all_gather_time(b2 / peers_dc, peers_dc, so)),
        DpStage("scale-up", b1, lpr, ring_all_gather_time(b1 / lpr, lpr, su)),
    )
    return DpSchedule(stages=stages)


def step_time_report(cfg: ModelConfig, plan: ParallelismPlan, hw: HardwareCatalog,
                     wan: WanLink = DEFAULT_WAN,
                     policy: PrecisionPolicy = DEFAULT_PRECISION,
                     recompute_overhead: float = RECOMPUTE_OVERHEAD) -> StepTimeReport:
    """Assemble the per-layer steady-state report with the exposure breakdown."""
    fwd, bwd = layer_compute_times(cfg, plan, hw, recompute_overhead)
    tp_bytes, tp_time = tp_comm_per_pass(cfg, plan, hw, policy)
    pp_bytes, pp_time = pp_comm_per_pass(cfg, plan, hw, policy)
    dp = dp_schedule(cfg, plan, hw, wan, policy)

    tp_exposed = 2.0 * tp_time
    pp_exposed = 2.0 * pp_time
    dp_exposed = tuple(max(0.0, t - bwd) for t in dp.times)
    exposed = tp_exposed + pp_exposed + sum(dp_exposed)
    compute = fwd + bwd
    fraction = exposed / (compute + exposed) if exposed > 0 else 0.0

    return StepTimeReport(
        fwd_per_layer=fwd,
        bwd_per_layer=bwd,
        tp_bytes_per_pass=tp_bytes,
        tp_time_per_pass=tp_time,
        pp_bytes_per_pass=pp_bytes,
        pp_time_per_pass=pp_time,
        dp=dp,
        tp_exposed=tp_exposed,
        pp_exposed=pp_exposed,
        dp_exposed=dp_exposed,
        exposed_total=exposed,
        exposed_fraction=fraction,
    )


SWEEP_AXES = ("scale-up", "scale-out", "wan")

SWEEP_COLUMNS = (
    "axis_name", "axis_value_bps", "model", "fwd_ms", "bwd_ms", "tp_ms", "pp_ms",
    "dp_stage1_ms", "dp_stage2_ms", "dp_stage3_ms", "dp_stage4_ms", "dp_stage5_ms",
    "exposed_ms", "exposed_fraction",
)


def sweep(axis: str, values_bps, models, policy: PrecisionPolicy,
          hw: HardwareCatalog, plans, wan: WanLink = DEFAULT_WAN,
          recompute_overhead: float = RECOMPUTE_OVERHEAD) -> list[dict]:
    """Sweep one network speed and report exposure per (value, model).

    values_bps are link speeds in bit/s for any axis. models is a sequence of
    (name, config) pairs and plans maps each name to its ParallelismPlan
    (plans are memory-driven and do not change with link speed). Rows come
    back in deterministic order: values outer, models inner.
    """
    if axis not in SWEEP_AXES:
        raise ConfigError(f"unknown sweep axis {axis!r}; expected one of {SWEEP_AXES}")
    if not values_bps:
        raise ConfigError("sweep needs at least one value")

    rows = []
    for value in values_bps:
        acc = hw.accelerator
        wan_v = wan
        if axis == "scale-up":
            acc = replace(acc, scale_up_bw=value / 8.0)
        elif axis == "scale-out":
            acc = replace(acc, scale_out_bw=value / 8.0)
        else:
            wan_v = replace(wan, per_gpu_capacity=value)
        hw_v = HardwareCatalog(accelerator=acc, rack=hw.rack)
        for name, cfg in models:
            rep = step_time_report(cfg, plans[name], hw_v, wan_v, policy,
                                   recompute_overhead)
            ms = 1e3
            rows.append({
                "axis_name": axis,
                "axis_value_bps": value,
                "model": name,
                "fwd_ms": rep.fwd_per_layer * ms,
                "bwd_ms": rep.bwd_per_layer * ms,
                "tp_ms": rep.tp_time_per_pass * ms,
                "pp_ms": rep.pp_time_per_pass * ms,
                "dp_stage1_ms": rep.dp.times[0] * ms,
                "dp_stage2_ms": rep.dp.times[1] * ms,
                "dp_stage3_ms": rep.dp.times[2] * ms,
                "dp_stage4_ms": rep.dp.times[3] * ms,
                "dp_stage5_ms": rep.dp.times[4] * ms,
                "exposed_ms": rep.exposed_total * ms,
                "exposed_fraction": rep.exposed_fraction,
            })
    return rows
