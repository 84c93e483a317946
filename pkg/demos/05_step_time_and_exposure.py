"""A training step under the microscope: compute, collectives, exposure.

Prints the full per-layer step-time report for both models, then sweeps
each network speed to show where exposed communication comes from.
"""

from gigadc import (
    DEFAULT_CATALOG,
    DEFAULT_PRECISION,
    DEFAULT_WAN,
    DENSE_100T,
    MOE_8X17T,
    NVL72,
    WanLink,
    plan,
    provision,
    step_time_report,
    sweep,
)

MS = 1e3
prov = provision(100e9, 0.7, NVL72)
models = [("dense-100t", DENSE_100T), ("moe-8x17t", MOE_8X17T)]
plans = {n: plan(c, DEFAULT_PRECISION, DEFAULT_CATALOG, prov) for n, c in models}

for name, cfg in models:
    rep = step_time_report(cfg, plans[name], DEFAULT_CATALOG)
    print(f"[{name}]")
    print(f"  compute: fwd {rep.fwd_per_layer*MS:7.2f} ms, bwd {rep.bwd_per_layer*MS:7.2f} ms")
    print(f"  tp/sp:   {rep.tp_bytes_per_pass/1e9:5.2f} GB -> {rep.tp_time_per_pass*MS:6.2f} ms/pass (exposed)")
    print(f"  pp:      {rep.pp_bytes_per_pass/1e6:5.0f} MB -> {rep.pp_time_per_pass*MS:6.2f} ms/pass (exposed)")
    for i, (stage, exp) in enumerate(zip(rep.dp.stages, rep.dp_exposed), 1):
        print(f"  dp{i} {stage.network:9s} {stage.bytes_per_device/1e9:7.2f} GB "
              f"x{stage.peers:<3d} {stage.time_s*MS:7.2f} ms"
              + (f"  ({exp*MS:.1f} ms exposed)" if exp else "  (masked)"))
    print(f"  => exposed fraction {rep.exposed_fraction:.1%}\n")

# The three sweeps behind the headline numbers.
for axis, values in (
    ("scale-up", [800e9, 1.6e12, 3.2e12, 7.2e12, 14.4e12]),
    ("scale-out", [100e9, 200e9, 400e9, 800e9, 1.6e12]),
    ("wan", [5e9, 10e9, 20e9, 40e9]),
):
    print(f"exposed fraction vs {axis} speed:")
    rows = sweep(axis, values, models, DEFAULT_PRECISION, DEFAULT_CATALOG, plans)
    for row in rows:
        print(f"  {row['axis_value_bps']/1e9:7.0f} Gbps  {row['model']:11s} "
              f"{row['exposed_fraction']:6.1%}")
    print()

# Tail loss on the WAN: one 60 ms RTT penalty unmasks the MoE exchange.
lossy = WanLink(per_gpu_capacity=20e9, propagation_rtt=0.06, loss_penalty_rtts=1)
rep = step_time_report(MOE_8X17T, plans["moe-8x17t"], DEFAULT_CATALOG, wan=lossy)
print(f"moe with one lost-RTT penalty: stage-3 {rep.dp.times[2]*MS:.1f} ms vs "
      f"{rep.bwd_per_layer*MS:.1f} ms window -> exposed {rep.exposed_fraction:.1%} "
      f"(lossless: {step_time_report(MOE_8X17T, plans['moe-8x17t'], DEFAULT_CATALOG, wan=DEFAULT_WAN).exposed_fraction:.1%})")
