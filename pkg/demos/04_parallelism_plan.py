"""How the planner lands on t=18: the memory feasibility scan.

Reproduces the tensor-degree search for both reference models and shows
the per-device memory at each candidate degree.
"""

from gigadc import (
    DEFAULT_CATALOG,
    DEFAULT_PRECISION,
    DENSE_100T,
    MOE_8X17T,
    NVL72,
    activation_bytes_per_device,
    plan,
    provision,
)
from gigadc.parallelism import layer_state_bytes

GB = 1e9
prov = provision(100e9, 0.7, NVL72)
mem = DEFAULT_CATALOG.accelerator.memory_bytes

for name, cfg in (("dense-100t", DENSE_100T), ("moe-8x17t", MOE_8X17T)):
    state = layer_state_bytes(cfg, DEFAULT_PRECISION)
    print(f"[{name}] one layer carries {state/1e12:.2f} TB of training state")
    print(f"  {'t':>3s} {'state/dev':>10s} {'acts/dev':>9s} {'fits 192 GB?':>12s}")
    for t in (1, 2, 3, 4, 6, 8, 9, 12, 18, 24, 36, 72):
        s = state / t
        a = activation_bytes_per_device(cfg, t)
        print(f"  {t:3d} {s/GB:9.1f}G {a/GB:8.2f}G {'yes' if s + a <= mem else 'no':>12s}")

    p = plan(cfg, DEFAULT_PRECISION, DEFAULT_CATALOG, prov)
    print(f"  -> t={p.tensor_degree}, {p.layers_per_rack} layers/rack, "
          f"{p.racks_per_replica:g} racks/replica,")
    print(f"     {p.dp_replicas_total} replicas total "
          f"({p.dp_replicas_per_dc} per DC), "
          f"{p.per_device_state_bytes/GB:.0f} GB state/device\n")
