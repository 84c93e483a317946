"""Hardware catalog, capital provisioning, and facility power/cooling envelopes.

The defaults describe a GB200 NVL72-class rack: 72 GPUs, $3M, 130 kW TDP,
720 dense FP4 PFLOP/s per rack, 192 GB and 14.4 Tbps scale-up per GPU, with
an 800 Gbps scale-out NIC. All types are immutable values and all operations
are pure functions; they are safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import units
from .errors import ConfigError, InfeasibleError


@dataclass(frozen=True)
class AcceleratorSpec:
    """One accelerator as seen by the performance model."""

    memory_bytes: float     # device memory capacity
    effective_flops: float  # FLOP/s used for compute-time prediction
    scale_up_bw: float      # bytes/s per device, in-rack fabric
    scale_out_bw: float     # bytes/s per device, datacenter fabric

    def __post_init__(self):
        for name in ("memory_bytes", "effective_flops", "scale_up_bw", "scale_out_bw"):
            if getattr(self, name) <= 0:
                raise ValueError(f"AcceleratorSpec.{name} must be > 0")


@dataclass(frozen=True)
class RackSpec:
    """One rack: unit of purchase, power draw, and scale-up domain."""

    gpus_per_rack: int
    cost: float         # USD per rack
    tdp: float          # W at full load
    dense_flops: float  # FLOP/s for the whole rack, dense arithmetic

    def __post_init__(self):
        if self.gpus_per_rack < 1:
            raise ValueError("RackSpec.gpus_per_rack must be >= 1")
        if self.cost <= 0 or self.tdp <= 0 or self.dense_flops <= 0:
            raise ValueError("RackSpec cost/tdp/dense_flops must be > 0")

    @property
    def dense_flops_per_gpu(self) -> float:
        return self.dense_flops / self.gpus_per_rack


@dataclass(frozen=True)
class HardwareCatalog:
    """Accelerator plus rack: everything the planner needs to know about metal."""

    accelerator: AcceleratorSpec
    rack: RackSpec

    def to_dict(self) -> dict:
        return {
            "accelerator": {
                "memory_bytes": self.accelerator.memory_bytes,
                "effective_flops": self.accelerator.effective_flops,
                "scale_up_bw_bytes_per_s": self.accelerator.scale_up_bw,
                "scale_out_bw_bytes_per_s": self.accelerator.scale_out_bw,
            },
            "rack": {
                "gpus_per_rack": self.rack.gpus_per_rack,
                "cost_usd": self.rack.cost,
                "tdp_w": self.rack.tdp,
                "dense_flops": self.rack.dense_flops,
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "HardwareCatalog":
        try:
            acc = data.get("accelerator", {})
            rack = data.get("rack", {})
            unknown = set(data) - {"accelerator", "rack"}
            unknown |= {
                f"accelerator.{k}" for k in set(acc) - {
                    "memory_bytes", "effective_flops",
                    "scale_up_bw_bytes_per_s", "scale_out_bw_bytes_per_s"}
            }
            unknown |= {
                f"rack.{k}" for k in set(rack) - {
                    "gpus_per_rack", "cost_usd", "tdp_w", "dense_flops"}
            }
            if unknown:
                raise ConfigError(f"unknown hardware catalog keys: {sorted(unknown)}")
            return cls(
                accelerator=AcceleratorSpec(
                    memory_bytes=float(acc.get("memory_bytes", GB200.memory_bytes)),
                    effective_flops=float(acc.get("effective_flops", GB200.effective_flops)),
                    scale_up_bw=float(acc.get("scale_up_bw_bytes_per_s", GB200.scale_up_bw)),
                    scale_out_bw=float(acc.get("scale_out_bw_bytes_per_s", GB200.scale_out_bw)),
                ),
                rack=RackSpec(
                    gpus_per_rack=int(rack.get("gpus_per_rack", NVL72.gpus_per_rack)),
                    cost=float(rack.get("cost_usd", NVL72.cost)),
                    tdp=float(rack.get("tdp_w", NVL72.tdp)),
                    dense_flops=float(rack.get("dense_flops", NVL72.dense_flops)),
                ),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad hardware catalog value: {exc}") from exc


# Defaults. effective_flops is the sparse-FP4 per-GPU rate (2e16); the dense
# rate is half of that. Compute-time prediction calibrates against the
# sparse figure.
GB200 = AcceleratorSpec(
    memory_bytes=192 * units.GB,
    effective_flops=2.0e16,
    scale_up_bw=units.bytes_per_s(14.4e12),
    scale_out_bw=units.bytes_per_s(800e9),
)
NVL72 = RackSpec(gpus_per_rack=72, cost=3e6, tdp=130 * units.KW, dense_flops=720e15)
DEFAULT_CATALOG = HardwareCatalog(accelerator=GB200, rack=NVL72)


@dataclass(frozen=True)
class Provisioning:
    """What a compute budget buys."""

    rack_count: int
    gpu_count: int
    total_dense_flops: float  # FLOP/s
    it_compute_power: float   # W


@dataclass(frozen=True)
class PowerEnvelope:
    """IT power including storage/network overhead, and the facility range after PUE."""

    it_power: float            # W
    facility_power_min: float  # W
    facility_power_max: float  # W


def provision(budget: float, compute_fraction: float, rack: RackSpec) -> Provisioning:
    """Buy as many whole racks as the compute share of the budget allows."""
    if budget <= 0:
        raise ValueError("budget must be > 0")
    if not 0 < compute_fraction <= 1:
        raise ValueError("compute_fraction must be in (0, 1]")
    rack_count = math.floor(budget * compute_fraction / rack.cost)
    if rack_count < 1:
        raise InfeasibleError(
            f"infeasible: compute budget {budget * compute_fraction:.4g} USD "
            f"does not cover one rack at {rack.cost:.4g} USD"
        )
    return Provisioning(
        rack_count=rack_count,
        gpu_count=rack_count * rack.gpus_per_rack,
        total_dense_flops=rack_count * rack.dense_flops,
        it_compute_power=rack_count * rack.tdp,
    )


def power_envelope(
    p: Provisioning,
    overhead_fraction: float = 0.2,
    pue_min: float = 1.15,
    pue_max: float = 1.3,
) -> PowerEnvelope:
    """Total IT power (compute plus storage/networking overhead) and facility range.

    overhead_fraction is the extra power drawn by storage and networking as a
    fraction of compute power; PUE multiplies IT power up to facility power.
    """
    if pue_min < 1 or pue_max < pue_min:
        raise ValueError("require pue_min >= 1 and pue_max >= pue_min")
    if overhead_fraction < 0:
        raise ValueError("overhead_fraction must be >= 0")
    it_power = p.it_compute_power * (1 + overhead_fraction)
    return PowerEnvelope(
        it_power=it_power,
        facility_power_min=it_power * pue_min,
        facility_power_max=it_power * pue_max,
    )


# Facility/cooling constants.
ERF_WINTER = 0.69  # energy reuse factor, winter
ERF_SUMMER = 0.86
HOUSEHOLD_HEATING_WH_PER_YEAR = 6.3e6   # 6300 kWh heats one household for a year
FREE_AIR_DISSIPATION_W_PER_M2 = 2076.0  # heat a datacenter floor can shed to free air
ADIABATIC_REFERENCE_POWER_W = 5 * units.GW
ADIABATIC_REFERENCE_RANGE_L_PER_H = (1e5, 3.5e6)  # direct evaporative cooling at 5 GW


def heat_reuse_households(
    annual_energy_wh: float,
    erf: float,
    per_household_wh: float = HOUSEHOLD_HEATING_WH_PER_YEAR,
) -> int:
    """Households heatable by redirecting a fraction (ERF) of annual energy."""
    if not 0 <= erf <= 1:
        raise ValueError("erf must be in [0, 1]")
    if per_household_wh <= 0:
        raise ValueError("per_household_wh must be > 0")
    return math.floor(annual_energy_wh * erf / per_household_wh)


def free_air_area(
    power: float,
    dissipation_density: float = FREE_AIR_DISSIPATION_W_PER_M2,
) -> float:
    """Floor area in m^2 needed to shed the given power to free air."""
    if dissipation_density <= 0:
        raise ValueError("dissipation_density must be > 0")
    return power / dissipation_density


def adiabatic_water_range(power: float) -> tuple[float, float]:
    """Hourly water draw band (L/h) for direct evaporative cooling, linear in power."""
    if power <= 0:
        raise ValueError("power must be > 0")
    scale = power / ADIABATIC_REFERENCE_POWER_W
    lo, hi = ADIABATIC_REFERENCE_RANGE_L_PER_H
    return (lo * scale, hi * scale)


@dataclass(frozen=True)
class BalancingAuthority:
    """A grid operator and its spare generation headroom."""

    name: str
    max_available_mw: float
    region: str


# Grid operators with the largest spare capacity (max registered generation
# minus max registered demand), shipped as static data.
GRID_HEADROOM = (
    BalancingAuthority("PJM", 9915, "Mid-Atlantic"),
    BalancingAuthority("SRP", 2634, "Southwest"),
    BalancingAuthority("NEVP", 2209, "Northwest"),
    BalancingAuthority("BPAT", 2143, "Northwest"),
)
