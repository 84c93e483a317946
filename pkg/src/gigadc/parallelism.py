"""3D-parallelism planning: tensor degree, rack layout, and replica counts.

The placement convention: one layer is sharded across t devices inside a
rack (tensor/sequence parallelism), a rack holds gpus_per_rack/t layers, and
those layers are the same layer index of different model replicas. Pipeline
parallelism spans racks with degree equal to the layer count, and data
parallelism spans whole replicas, split evenly across datacenters.

The tensor degree search picks the smallest t whose per-device training
state plus activation working set fits device memory. Activations for other
pipeline stages are assumed offloaded to host memory, so only one layer's
working set is held on-device.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InfeasibleError
from .hardware import HardwareCatalog, Provisioning
from .models import (
    ModelConfig,
    PrecisionPolicy,
    activation_bytes_per_device,
    layer_weight_params,
)


@dataclass(frozen=True)
class ParallelismPlan:
    tensor_degree: int
    layers_per_rack: int
    pp_degree: int               # = model layers
    dp_replicas_total: int
    dp_replicas_per_dc: int
    racks_per_replica: float     # fractional racks allowed
    per_device_state_bytes: float
    per_device_activation_bytes: float

    def to_dict(self) -> dict:
        return {
            "tensor_degree": self.tensor_degree,
            "layers_per_rack": self.layers_per_rack,
            "pp_degree": self.pp_degree,
            "dp_replicas_total": self.dp_replicas_total,
            "dp_replicas_per_dc": self.dp_replicas_per_dc,
            "racks_per_replica": self.racks_per_replica,
            "per_device_state_bytes": self.per_device_state_bytes,
            "per_device_activation_bytes": self.per_device_activation_bytes,
        }


def layer_state_bytes(cfg: ModelConfig, policy: PrecisionPolicy) -> float:
    """Training state (weights + grads + optimizer) of one layer in bytes."""
    return layer_weight_params(cfg) * policy.state_bytes_per_param


def _tensor_degree_candidates(gpus_per_rack: int, divisors_only: bool) -> list[int]:
    if divisors_only:
        return [t for t in range(1, gpus_per_rack + 1) if gpus_per_rack % t == 0]
    return list(range(1, gpus_per_rack + 1))


def plan(
    cfg: ModelConfig,
    policy: PrecisionPolicy,
    hw: HardwareCatalog,
    provisioning: Provisioning,
    num_datacenters: int = 2,
    divisors_only: bool = True,
) -> ParallelismPlan:
    """Derive the parallelism plan for a model on a provisioned fleet.

    Candidate tensor degrees are the divisors of gpus_per_rack so that
    layers_per_rack stays integral; set divisors_only=False to scan every
    degree (layers_per_rack is then the floor, leaving some devices idle).
    """
    gpr = hw.rack.gpus_per_rack
    mem = hw.accelerator.memory_bytes
    state = layer_state_bytes(cfg, policy)

    chosen = None
    for t in _tensor_degree_candidates(gpr, divisors_only):
        need = state / t + activation_bytes_per_device(cfg, t)
        if need <= mem:
            chosen = t
            break
    if chosen is None:
        worst = state / gpr + activation_bytes_per_device(cfg, gpr)
        raise InfeasibleError(
            f"model does not fit: one layer needs {worst:.4g} bytes/device even at "
            f"tensor degree {gpr}, device memory is {mem:.4g} bytes "
            f"(deficit {worst - mem:.4g} bytes)"
        )

    layers_per_rack = gpr // chosen
    racks_per_replica = cfg.layers / layers_per_rack
    dp_total = math.floor(provisioning.rack_count / racks_per_replica)
    if dp_total < 1:
        raise InfeasibleError(
            f"fleet of {provisioning.rack_count} racks cannot hold one replica "
            f"({racks_per_replica:.4g} racks needed)"
        )
    return ParallelismPlan(
        tensor_degree=chosen,
        layers_per_rack=layers_per_rack,
        pp_degree=cfg.layers,
        dp_replicas_total=dp_total,
        dp_replicas_per_dc=dp_total // num_datacenters,
        racks_per_replica=racks_per_replica,
        per_device_state_bytes=state / chosen,
        per_device_activation_bytes=activation_bytes_per_device(cfg, chosen),
    )
