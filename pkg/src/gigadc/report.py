"""Scenario orchestration and deterministic JSON/CSV report emission.

``run`` evaluates every section a scenario asks for and returns one plain
dict; identical scenario input yields byte-identical JSON output. Files are
written atomically (temp file plus rename) and every number is checked
finite before emission.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile

from . import __version__
from .errors import ConfigError
from .flowsim import POLICIES, TrafficPattern, build_fabric, simulate_permutation, trial_fcts
from .hardware import (
    adiabatic_water_range,
    free_air_area,
    heat_reuse_households,
    power_envelope,
    provision,
)
from .inference import (
    GENERATION_TABLE_100T,
    GENERATION_TABLE_50T,
    fit_latency_short_context,
    generation_time,
)
from .models import MoEConfig, memory_footprint, param_count, param_count_moe
from .parallelism import plan as plan_parallelism
from .scaling import TrainingBudget, optimal_allocation
from .scenario import SCHEMA_VERSION, Scenario
from .steptime import SWEEP_COLUMNS, step_time_report, sweep as run_sweep
from .topology import PriceBook, comparison_table

REPORT_SCHEMA_VERSION = 1

TOPOLOGY_COLUMNS = ("design", "tiers", "chips", "boxes", "host_cables",
                    "switch_cables", "cost_usd")
FLOW_COLUMNS = ("policy", "participation", "trial", "flow_id", "fct_s", "inflation")
INFERENCE_COLUMNS = ("table", "tokens", "total_s", "tokens_per_s")


def run(scenario: Scenario, sections=None) -> dict:
    """Evaluate a scenario into a report dict; sections mirror the scenario.

    sections, when given, names the optional sections to evaluate
    ("models", "scaling", "sweep", "topology", "flowsim", "inference");
    provisioning, power, and facility are always cheap and always present.
    By default everything the scenario asks for is evaluated.
    """
    def wanted(name):
        return sections is None or name in sections

    prov = provision(scenario.budget_usd, scenario.compute_fraction,
                     scenario.hardware.rack)
    env = power_envelope(prov, scenario.power_overhead_fraction,
                         scenario.pue_min, scenario.pue_max)

    report: dict = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "tool_version": __version__,
        "scenario": {"name": scenario.name, "schema_version": SCHEMA_VERSION,
                     "hash": scenario.hash},
        "provisioning": {
            "rack_count": prov.rack_count,
            "gpu_count": prov.gpu_count,
            "total_dense_flops": prov.total_dense_flops,
            "it_compute_power_w": prov.it_compute_power,
        },
        "power": {
            "it_power_w": env.it_power,
            "facility_power_min_w": env.facility_power_min,
            "facility_power_max_w": env.facility_power_max,
        },
        "facility": _facility_section(scenario, env),
        "models": {},
        "notes": list(scenario.notes),
    }

    plans = {}
    model_work = scenario.models if (wanted("models") or wanted("sweep")) else []
    for name, cfg in model_work:
        p = plan_parallelism(cfg, scenario.precision, scenario.hardware, prov,
                             scenario.num_datacenters, scenario.divisors_only)
        plans[name] = p
        rep = step_time_report(cfg, p, scenario.hardware, scenario.wan,
                               scenario.precision, scenario.recompute_overhead)
        if isinstance(cfg, MoEConfig):
            counts = param_count_moe(cfg)
            params = {"total": counts.total, "active": counts.active,
                      "per_expert_model": counts.per_expert_model}
            total = counts.total
        else:
            total = param_count(cfg)
            params = {"total": total}
        mem = memory_footprint(total, scenario.precision)
        report["models"][name] = {
            "parameters": params,
            "memory": {
                "weights_bytes": mem.weights_bytes,
                "grad_bytes": mem.grad_bytes,
                "optimizer_bytes": mem.optimizer_bytes,
                "total_bytes": mem.total_bytes,
            },
            "parallelism": p.to_dict(),
            "step_time": rep.to_dict(),
        }

    if scenario.training is not None and wanted("scaling"):
        if "duration_s" not in scenario.training:
            raise ConfigError("training.duration_s is required; there is no "
                              "default training duration")
        budget = TrainingBudget(
            aggregate_rate=prov.total_dense_flops,
            utilization=float(scenario.training.get("utilization", 1.0)),
            duration=float(scenario.training["duration_s"]),
        )
        alloc = optimal_allocation(budget.compute, scenario.scaling_law)
        report["scaling"] = {
            "law": scenario.scaling_law.name,
            "compute_flop": budget.compute,
            "optimal_params": alloc.params,
            "optimal_tokens": alloc.tokens,
        }

    if scenario.sweep is not None and wanted("sweep"):
        report["sweep"] = run_sweep(
            scenario.sweep["axis"], scenario.sweep["values_bps"], scenario.models,
            scenario.precision, scenario.hardware, plans, scenario.wan,
            scenario.recompute_overhead)

    if scenario.topology is not None and wanted("topology"):
        report["topology"] = _topology_section(scenario.topology)

    if scenario.flowsim is not None and wanted("flowsim"):
        report["flowsim"] = _flowsim_section(scenario.flowsim)

    if scenario.inference is not None and wanted("inference"):
        report["inference"] = _inference_section(scenario.inference)

    _check_finite(report, "report")
    return report


def _facility_section(scenario: Scenario, env) -> dict:
    area = free_air_area(env.facility_power_max)
    water_lo, water_hi = adiabatic_water_range(env.facility_power_max)
    households = heat_reuse_households(scenario.annual_energy_wh, scenario.erf,
                                       scenario.household_wh_per_year)
    return {
        "heat_reuse_households": households,
        "free_air_area_m2": area,
        "adiabatic_water_l_per_h": [water_lo, water_hi],
        "notes": [
            "free-air area follows power / dissipation_density; at 5 GW and "
            "2076 W/m^2 that is 2.409e6 m^2 (a widely repeated 2.41e9 m^2 "
            "figure is inconsistent with those inputs by a factor of 1000).",
        ],
    }


def _topology_section(params: dict) -> list[dict]:
    prices = PriceBook(
        transceiver_cost=float(params.get("transceiver_usd", 1000.0)),
        chip_cost=float(params.get("chip_usd", 20000.0)),
    )
    designs = comparison_table(
        hosts=int(params.get("hosts", 800000)),
        gpus_per_rack=int(params.get("gpus_per_rack", 72)),
        rails=int(params.get("rails", 76)),
        planes=int(params.get("planes", 4)),
        prices=prices,
    )
    return [d.to_dict() for d in designs]


def _flowsim_section(params: dict) -> dict:
    fabric = build_fabric(
        hosts=int(params.get("hosts", 8192)),
        tiers=int(params.get("tiers", 2)),
        radix=int(params.get("radix", 128)),
        link_speed=float(params.get("link_gbps", 800)) * 1e9,
    )
    pattern = TrafficPattern(
        flow_size=float(params.get("flow_size_bytes", 2e6)),
        participation=float(params.get("participation", 1.0)),
    )
    trials = int(params.get("trials", 100))
    seed = int(params.get("seed", 1))
    policies = params.get("policies", list(POLICIES))
    out: dict = {
        "fabric": {"hosts": fabric.hosts, "tiers": fabric.tiers,
                   "radix": fabric.radix, "link_speed_bps": fabric.link_speed,
                   "leaves": fabric.leaves, "spines": fabric.spines},
        "pattern": {"flow_size_bytes": pattern.flow_size,
                    "participation": pattern.participation},
        "trials": trials,
        "seed": seed,
        "policies": {},
    }
    for policy in policies:
        stats = simulate_permutation(fabric, pattern, policy, trials, seed)
        out["policies"][policy] = stats.to_dict()
    return out


def flow_records(params: dict) -> list[dict]:
    """Per-flow CSV rows for the flowsim subcommand."""
    fabric = build_fabric(
        hosts=int(params.get("hosts", 8192)),
        tiers=int(params.get("tiers", 2)),
        radix=int(params.get("radix", 128)),
        link_speed=float(params.get("link_gbps", 800)) * 1e9,
    )
    pattern = TrafficPattern(
        flow_size=float(params.get("flow_size_bytes", 2e6)),
        participation=float(params.get("participation", 1.0)),
    )
    trials = int(params.get("trials", 100))
    seed = int(params.get("seed", 1))
    optimal = pattern.flow_size / fabric.link_bytes_per_s
    rows = []
    for policy in params.get("policies", list(POLICIES)):
        for trial, fcts in enumerate(trial_fcts(fabric, pattern, policy, trials, seed)):
            for flow_id, fct in enumerate(fcts):
                rows.append({
                    "policy": policy,
                    "participation": pattern.participation,
                    "trial": trial,
                    "flow_id": flow_id,
                    "fct_s": float(fct),
                    "inflation": float(fct) / optimal,
                })
    return rows


def _inference_section(params: dict) -> dict:
    table_ref = params.get("table", "100t")
    tables: dict[str, tuple] = {}
    if table_ref == "100t":
        tables["100t"] = GENERATION_TABLE_100T
    elif table_ref == "50t":
        tables["50t"] = GENERATION_TABLE_50T
    elif table_ref == "both":
        tables = {"100t": GENERATION_TABLE_100T, "50t": GENERATION_TABLE_50T}
    elif isinstance(table_ref, list):
        tables["custom"] = tuple((float(t), float(y)) for t, y in table_ref)
    else:
        raise ConfigError("inference.table must be '100t', '50t', 'both', or rows")

    tokens = [int(t) for t in params.get("tokens", [512, 1024, 2048, 16000, 32000])]
    out = {}
    for name, table in tables.items():
        model = fit_latency_short_context(table)
        out[name] = {
            "linear_coeff_s_per_token": model.linear_coeff,
            "quad_coeff_s_per_token2": model.quad_coeff,
            "rows": [
                {"tokens": t,
                 "total_s": generation_time(model, t).total_time,
                 "tokens_per_s": generation_time(model, t).tokens_per_second}
                for t in tokens
            ],
        }
    return out


def _check_finite(node, path: str) -> None:
    if isinstance(node, dict):
        for k, v in node.items():
            _check_finite(v, f"{path}.{k}")
    elif isinstance(node, (list, tuple)):
        for i, v in enumerate(node):
            _check_finite(v, f"{path}[{i}]")
    elif isinstance(node, float) and not math.isfinite(node):
        raise ValueError(f"non-finite number at {path}")


def report_json_bytes(report: dict) -> bytes:
    return (json.dumps(report, sort_keys=True, indent=2) + "\n").encode("utf-8")


def _write_atomic(path: str, data: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".gigadc-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_json(report: dict, path: str) -> None:
    _check_finite(report, "report")
    _write_atomic(path, report_json_bytes(report))


def emit_csv(rows: list[dict], columns: tuple[str, ...], path: str) -> None:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({c: row.get(c, "") for c in columns})
    _write_atomic(path, buf.getvalue().encode("utf-8"))


def primary_table(report: dict) -> tuple[tuple[str, ...], list[dict]]:
    """The tabular view of a report, for CSV emission."""
    if "sweep" in report:
        return SWEEP_COLUMNS, report["sweep"]
    if "topology" in report:
        rows = [
            {"design": d["kind"], "tiers": d["tiers"], "chips": d["chips"],
             "boxes": d["boxes"], "host_cables": d["host_cables"],
             "switch_cables": d["switch_cables"], "cost_usd": d["bom"]["total_usd"]}
            for d in report["topology"]
        ]
        return TOPOLOGY_COLUMNS, rows
    if "inference" in report:
        rows = []
        for name in sorted(report["inference"]):
            for r in report["inference"][name]["rows"]:
                rows.append({"table": name, "tokens": r["tokens"],
                             "total_s": r["total_s"],
                             "tokens_per_s": r["tokens_per_s"]})
        return INFERENCE_COLUMNS, rows
    # Generic fallback: flatten scalars to key/value rows.
    rows = []

    def walk(node, prefix):
        if isinstance(node, dict):
            for k in node:
                walk(node[k], f"{prefix}.{k}" if prefix else str(k))
        elif isinstance(node, (list, tuple)):
            for i, v in enumerate(node):
                walk(v, f"{prefix}[{i}]")
        else:
            rows.append({"key": prefix, "value": node})

    walk(report, "")
    return ("key", "value"), rows


def emit(report: dict, fmt: str, path: str) -> None:
    """Write a report atomically as JSON or as its primary CSV table."""
    if fmt == "json":
        emit_json(report, path)
    elif fmt == "csv":
        columns, rows = primary_table(report)
        emit_csv(rows, columns, path)
    else:
        raise ConfigError(f"unknown format {fmt!r}; expected 'json' or 'csv'")
