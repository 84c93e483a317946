"""Command-line front end.

Subcommands: plan, sweep, topo, flowsim, infer, facility. One scenario file
(or built-in name) drives all of them; command-line flags override scenario
keys. Human-readable tables go to stdout (suppressed by --quiet) and machine
output goes to --out as JSON or CSV.

Exit codes: 0 success, 2 configuration error, 3 infeasible design, 1 other
failures (I/O and the like).
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .errors import ConfigError, InfeasibleError
from .report import FLOW_COLUMNS, emit, emit_csv, flow_records, primary_table, run
from .scenario import load_scenario, parse_scenario
from .steptime import SWEEP_AXES


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scenario", default="paper-dense",
                   help="scenario file path or built-in name (default: paper-dense)")
    p.add_argument("--out", default=None, help="write machine output to this path")
    p.add_argument("--format", choices=("json", "csv"), default="json",
                   help="machine output format (default: json)")
    p.add_argument("--quiet", action="store_true", help="suppress stdout tables")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="gigadc",
        description="Planning and simulation for gigawatt-scale LLM training datacenters.")
    p.add_argument("--version", action="version", version=f"gigadc {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("plan", help="provisioning, parallelism plan, and step-time report")
    _add_common(sp)
    sp.add_argument("--model", action="append", default=None,
                    help="model preset to plan (repeatable; overrides scenario)")
    sp.add_argument("--law", default=None,
                    help="scaling law for the optional scaling section "
                         "(hoffmann-approach1/2/3 or kaplan)")

    sp = sub.add_parser("sweep", help="exposure vs. one network speed")
    _add_common(sp)
    sp.add_argument("--axis", choices=SWEEP_AXES, default=None)
    sp.add_argument("--values", default=None,
                    help="comma-separated speeds in Gbit/s, e.g. 800,1600,3200")

    sp = sub.add_parser("topo", help="topology designs and bill of materials")
    _add_common(sp)
    sp.add_argument("--hosts", type=int, default=None)
    sp.add_argument("--rails", type=int, default=None)
    sp.add_argument("--planes", type=int, default=None)

    sp = sub.add_parser("flowsim", help="flow-level permutation-traffic simulation")
    _add_common(sp)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--trials", type=int, default=None)
    sp.add_argument("--participation", type=float, default=None)
    sp.add_argument("--flows-csv", default=None,
                    help="also write per-flow records to this CSV path")

    sp = sub.add_parser("infer", help="generation latency table")
    _add_common(sp)
    sp.add_argument("--tokens", default=None, help="comma-separated token counts")
    sp.add_argument("--table", choices=("100t", "50t", "both"), default=None)

    sp = sub.add_parser(
        "facility", help="power envelope and cooling options",
        description="Power envelope and cooling options. The heat-reuse "
                    "calculation reads the scenario's facility.annual_energy_wh "
                    "in watt-hours per year (the 5 GW reference site consumes "
                    "about 5.266e13 Wh/yr).")
    _add_common(sp)
    return p


def _scenario_for(args):
    scenario = load_scenario(args.scenario)
    raw = dict(scenario.raw)

    if args.command == "plan":
        if args.model:
            raw["models"] = args.model
        if args.law:
            raw["scaling_law"] = args.law
    elif args.command == "sweep":
        swp = dict(raw.get("sweep") or {})
        if args.axis:
            swp["axis"] = args.axis
        if args.values:
            swp["values_gbps"] = [float(v) for v in args.values.split(",")]
        if not swp:
            raise ConfigError("sweep needs --axis/--values or a sweep section "
                              "in the scenario")
        raw["sweep"] = swp
    elif args.command == "topo":
        topo = dict(raw.get("topology") or {})
        for key in ("hosts", "rails", "planes"):
            value = getattr(args, key)
            if value is not None:
                topo[key] = value
        raw["topology"] = topo
    elif args.command == "flowsim":
        fs = dict(raw.get("flowsim") or {})
        for key in ("seed", "trials", "participation"):
            value = getattr(args, key)
            if value is not None:
                fs[key] = value
        raw["flowsim"] = fs
    elif args.command == "infer":
        inf = dict(raw.get("inference") or {})
        if args.tokens:
            inf["tokens"] = [int(t) for t in args.tokens.split(",")]
        if args.table:
            inf["table"] = args.table
        raw["inference"] = inf

    return parse_scenario(raw)


_RUN_SECTIONS = {
    "plan": ("models", "scaling"),
    "sweep": ("sweep",),
    "topo": ("topology",),
    "flowsim": ("flowsim",),
    "infer": ("inference",),
    "facility": (),
}

_SECTION_FOR_COMMAND = {
    "plan": ("provisioning", "power", "models", "notes", "scenario",
             "schema_version", "tool_version", "scaling"),
    "sweep": ("sweep", "scenario", "schema_version", "tool_version", "notes"),
    "topo": ("topology", "scenario", "schema_version", "tool_version", "notes"),
    "flowsim": ("flowsim", "scenario", "schema_version", "tool_version", "notes"),
    "infer": ("inference", "scenario", "schema_version", "tool_version", "notes"),
    "facility": ("provisioning", "power", "facility", "scenario",
                 "schema_version", "tool_version", "notes"),
}


def _trim(report: dict, command: str) -> dict:
    keep = _SECTION_FOR_COMMAND[command]
    return {k: v for k, v in report.items() if k in keep}


def _print_tables(report: dict, command: str) -> None:
    if command in ("plan", "facility"):
        prov = report["provisioning"]
        pw = report["power"]
        print(f"racks: {prov['rack_count']:,}   gpus: {prov['gpu_count']:,}   "
              f"dense: {prov['total_dense_flops']:.4g} FLOP/s")
        print(f"IT power: {pw['it_power_w'] / 1e9:.3f} GW   facility: "
              f"{pw['facility_power_min_w'] / 1e9:.3f}-"
              f"{pw['facility_power_max_w'] / 1e9:.3f} GW")
    if command == "plan":
        for name, m in report["models"].items():
            pl = m["parallelism"]
            st = m["step_time"]
            print(f"\n[{name}] t={pl['tensor_degree']} "
                  f"layers/rack={pl['layers_per_rack']} "
                  f"replicas={pl['dp_replicas_total']} "
                  f"({pl['dp_replicas_per_dc']}/DC) "
                  f"state/device={pl['per_device_state_bytes'] / 1e9:.1f} GB")
            print(f"  fwd {st['fwd_per_layer_s'] * 1e3:.2f} ms  "
                  f"bwd {st['bwd_per_layer_s'] * 1e3:.2f} ms  "
                  f"tp {st['tp_time_per_pass_s'] * 1e3:.2f} ms  "
                  f"pp {st['pp_time_per_pass_s'] * 1e3:.2f} ms")
            stages = "  ".join(f"{s['time_s'] * 1e3:.2f}" for s in st["dp_stages"])
            print(f"  dp stages [ms]: {stages}")
            print(f"  exposed: {st['exposed_fraction'] * 100:.2f}%")
    elif command == "facility":
        fac = report["facility"]
        print(f"heat reuse: {fac['heat_reuse_households']:,} households")
        print(f"free-air area: {fac['free_air_area_m2']:.4g} m^2")
        lo, hi = fac["adiabatic_water_l_per_h"]
        print(f"adiabatic water: {lo:.4g}-{hi:.4g} L/h")
        for note in fac["notes"]:
            print(f"note: {note}")
    elif command == "sweep":
        cols, rows = primary_table(report)
        print("  ".join(cols))
        for r in rows:
            print("  ".join(str(r.get(c, "")) for c in cols))
    elif command == "topo":
        cols, rows = primary_table(report)
        print("  ".join(f"{c:>14}" for c in cols))
        for r in rows:
            print("  ".join(f"{str(r.get(c, '')):>14}" for c in cols))
    elif command == "flowsim":
        for policy, stats in report["flowsim"]["policies"].items():
            print(f"[{policy}] optimal {stats['optimal_fct_s'] * 1e3:.3f} ms  "
                  f"p50x{stats['inflation_p50']:.2f}  p99x{stats['inflation_p99']:.2f}  "
                  f"maxx{stats['inflation_max']:.2f}")
    elif command == "infer":
        for name, fit in report["inference"].items():
            print(f"[{name}] time = {fit['linear_coeff_s_per_token']:.3g}*T + "
                  f"{fit['quad_coeff_s_per_token2']:.3g}*T^2")
            for row in fit["rows"]:
                print(f"  {row['tokens']:>6} tok  {row['total_s']:>10.1f} s  "
                      f"{row['tokens_per_s']:.2f} tok/s")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scenario = _scenario_for(args)
        report = _trim(run(scenario, sections=_RUN_SECTIONS[args.command]),
                       args.command)
        if not args.quiet:
            _print_tables(report, args.command)
        if args.out:
            emit(report, args.format, args.out)
            if not args.quiet:
                print(f"wrote {args.format} to {args.out}")
        if args.command == "flowsim" and getattr(args, "flows_csv", None):
            rows = flow_records(scenario.flowsim or {})
            emit_csv(rows, FLOW_COLUMNS, args.flows_csv)
            if not args.quiet:
                print(f"wrote per-flow csv to {args.flows_csv}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
