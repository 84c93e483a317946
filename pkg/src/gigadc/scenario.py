"""Declarative scenario files: schema, validation, and hashing.

A scenario is a JSON document with a versioned ``schema_version`` key that
drives every subcommand. Unknown keys are rejected with their path so typos
surface immediately. Network speeds are written in Gbit/s in the file and
converted to the library's bytes/s convention on load. The full schema is
documented in the README; every section is optional except schema_version,
and omitted sections fall back to the shipped defaults.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, replace
from importlib import resources

from .errors import ConfigError
from .hardware import HardwareCatalog
from .models import DEFAULT_PRECISION, ModelConfig, PrecisionPolicy, resolve_model
from .scaling import DEFAULT_LAW_NAME, DEFAULT_LAWS, ScalingLaw, law_through_anchor
from .steptime import DEFAULT_WAN, RECOMPUTE_OVERHEAD, SWEEP_AXES, WanLink

SCHEMA_VERSION = 1

BUILTIN_SCENARIOS = ("paper-dense", "paper-moe")


@dataclass(frozen=True)
class Scenario:
    name: str
    hardware: HardwareCatalog
    precision: PrecisionPolicy
    models: tuple[tuple[str, ModelConfig], ...]
    budget_usd: float
    compute_fraction: float
    power_overhead_fraction: float
    pue_min: float
    pue_max: float
    annual_energy_wh: float
    erf: float
    household_wh_per_year: float
    wan: WanLink
    num_datacenters: int
    divisors_only: bool
    recompute_overhead: float
    scaling_law: ScalingLaw
    training: dict | None       # {"utilization": .., "duration_s": ..}
    sweep: dict | None          # {"axis": .., "values_bps": [..]}
    topology: dict | None
    flowsim: dict | None
    inference: dict | None
    notes: tuple[str, ...]
    raw: dict                   # canonical source, basis of the hash

    @property
    def hash(self) -> str:
        return scenario_hash(self.raw)


def scenario_hash(raw: dict) -> str:
    canonical = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def _check_keys(section: dict, allowed: set[str], where: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {where}")


def _gbps(value: float) -> float:
    return float(value) * 1e9


_TOP_KEYS = {
    "schema_version", "name", "budget_usd", "compute_fraction", "hardware",
    "precision", "models", "power", "facility", "network", "parallelism",
    "recompute_overhead", "scaling_law", "training", "sweep", "topology",
    "flowsim", "inference", "notes",
}


def parse_scenario(raw: dict) -> Scenario:
    if not isinstance(raw, dict):
        raise ConfigError("scenario must be a JSON object")
    version = raw.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(
            f"scenario schema_version must be {SCHEMA_VERSION}, got {version!r}")
    _check_keys(raw, _TOP_KEYS, "scenario")

    hardware = HardwareCatalog.from_dict(raw.get("hardware", {}))

    precision = DEFAULT_PRECISION
    if "precision" in raw:
        sec = raw["precision"]
        _check_keys(sec, {"weights_bytes_per_param", "grad_bytes_per_param",
                          "optimizer_bytes_per_param", "activation_bytes_per_elem"},
                    "precision")
        try:
            precision = PrecisionPolicy(
                weights_bytes_per_param=float(sec.get("weights_bytes_per_param", 1.5)),
                grad_bytes_per_param=float(sec.get("grad_bytes_per_param", 0.5)),
                optimizer_bytes_per_param=float(sec.get("optimizer_bytes_per_param", 2.0)),
                activation_bytes_per_elem=float(sec.get("activation_bytes_per_elem", 0.5)),
            )
        except ValueError as exc:
            raise ConfigError(f"bad precision value: {exc}") from exc

    models = tuple(resolve_model(ref) for ref in raw.get("models", ["dense-100t"]))
    if not models:
        raise ConfigError("scenario needs at least one model")

    power = raw.get("power", {})
    _check_keys(power, {"overhead_fraction", "pue_min", "pue_max"}, "power")

    facility = raw.get("facility", {})
    _check_keys(facility, {"annual_energy_wh", "erf", "household_wh_per_year"},
                "facility")

    network = raw.get("network", {})
    _check_keys(network, {"scale_up_gbps", "scale_out_gbps", "wan_gbps_per_gpu",
                          "wan_rtt_s", "wan_loss_penalty_rtts"}, "network")
    acc = hardware.accelerator
    if "scale_up_gbps" in network:
        acc = replace(acc, scale_up_bw=_gbps(network["scale_up_gbps"]) / 8.0)
    if "scale_out_gbps" in network:
        acc = replace(acc, scale_out_bw=_gbps(network["scale_out_gbps"]) / 8.0)
    if acc is not hardware.accelerator:
        hardware = HardwareCatalog(accelerator=acc, rack=hardware.rack)
    wan = WanLink(
        per_gpu_capacity=_gbps(network.get("wan_gbps_per_gpu",
                                           DEFAULT_WAN.per_gpu_capacity / 1e9)),
        propagation_rtt=float(network.get("wan_rtt_s", DEFAULT_WAN.propagation_rtt)),
        loss_penalty_rtts=float(network.get("wan_loss_penalty_rtts", 0.0)),
    )

    par = raw.get("parallelism", {})
    _check_keys(par, {"num_datacenters", "divisors_only"}, "parallelism")

    law = _resolve_law(raw.get("scaling_law", DEFAULT_LAW_NAME))

    training = raw.get("training")
    if training is not None:
        _check_keys(training, {"utilization", "duration_s"}, "training")

    sweep = None
    if "sweep" in raw and raw["sweep"]:
        sec = raw["sweep"]
        _check_keys(sec, {"axis", "values_gbps"}, "sweep")
        axis = sec.get("axis")
        if axis not in SWEEP_AXES:
            raise ConfigError(f"sweep.axis must be one of {SWEEP_AXES}, got {axis!r}")
        values = [_gbps(v) for v in sec.get("values_gbps", [])]
        if not values:
            raise ConfigError("sweep.values_gbps must be non-empty")
        sweep = {"axis": axis, "values_bps": values}

    topology = raw.get("topology")
    if topology is not None:
        _check_keys(topology, {"hosts", "radix", "rails", "planes", "gpus_per_rack",
                               "transceiver_usd", "chip_usd", "oversubscription"},
                    "topology")

    flowsim = raw.get("flowsim")
    if flowsim is not None:
        _check_keys(flowsim, {"hosts", "tiers", "radix", "link_gbps",
                              "flow_size_bytes", "participation", "policies",
                              "trials", "seed"}, "flowsim")

    inference = raw.get("inference")
    if inference is not None:
        _check_keys(inference, {"tokens", "table"}, "inference")

    notes = raw.get("notes", [])
    if not isinstance(notes, list) or not all(isinstance(n, str) for n in notes):
        raise ConfigError("notes must be a list of strings")

    return Scenario(
        name=str(raw.get("name", "unnamed")),
        hardware=hardware,
        precision=precision,
        models=models,
        budget_usd=float(raw.get("budget_usd", 100e9)),
        compute_fraction=float(raw.get("compute_fraction", 0.7)),
        power_overhead_fraction=float(power.get("overhead_fraction", 0.2)),
        pue_min=float(power.get("pue_min", 1.15)),
        pue_max=float(power.get("pue_max", 1.3)),
        annual_energy_wh=float(facility.get("annual_energy_wh", 52.66e12)),
        erf=float(facility.get("erf", 0.69)),
        household_wh_per_year=float(facility.get("household_wh_per_year", 6.3e6)),
        wan=wan,
        num_datacenters=int(par.get("num_datacenters", 2)),
        divisors_only=bool(par.get("divisors_only", True)),
        recompute_overhead=float(raw.get("recompute_overhead", RECOMPUTE_OVERHEAD)),
        scaling_law=law,
        training=training,
        sweep=sweep,
        topology=topology,
        flowsim=flowsim,
        inference=inference,
        notes=tuple(notes),
        raw=raw,
    )


def _resolve_law(ref) -> ScalingLaw:
    if isinstance(ref, str):
        if ref not in DEFAULT_LAWS:
            raise ConfigError(
                f"unknown scaling law {ref!r}; shipped laws: {sorted(DEFAULT_LAWS)}")
        return DEFAULT_LAWS[ref]
    if isinstance(ref, dict):
        _check_keys(ref, {"name", "coefficient", "exponent"}, "scaling_law")
        try:
            if "coefficient" in ref:
                return ScalingLaw(name=str(ref.get("name", "custom")),
                                  coefficient=float(ref["coefficient"]),
                                  exponent=float(ref["exponent"]))
            return law_through_anchor(str(ref.get("name", "custom")),
                                      float(ref["exponent"]))
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad scaling_law: {exc}") from exc
    raise ConfigError("scaling_law must be a name or a table with exponent[/coefficient]")


def load_scenario(source: str) -> Scenario:
    """Load a scenario from a file path or a built-in name."""
    if os.path.exists(source):
        try:
            with open(source, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{source}: line {exc.lineno}: {exc.msg}") from exc
        return parse_scenario(raw)
    name = source.removesuffix(".scenario")
    if name in BUILTIN_SCENARIOS:
        text = (resources.files("gigadc") / "scenarios" / f"{name}.scenario").read_text()
        return parse_scenario(json.loads(text))
    raise ConfigError(
        f"scenario {source!r} is neither a file nor a built-in "
        f"({', '.join(BUILTIN_SCENARIOS)})")
