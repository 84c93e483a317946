"""Sizing the two reference models and their training-state memory.

Counts parameters for the dense ~100T transformer and its 8-expert MoE
sibling, then prices the memory bill under the mixed-precision policy.
"""

from gigadc import (
    DEFAULT_PRECISION,
    DENSE_100T,
    MOE_8X17T,
    activation_bytes_per_device,
    flops_forward_per_layer,
    memory_footprint,
    param_count,
    param_count_moe,
)

TB = 1e12

dense = param_count(DENSE_100T)
print(f"dense-100t: {DENSE_100T.layers} layers x {DENSE_100T.hidden:,} hidden")
print(f"  {dense/1e12:.1f}T parameters")

mem = memory_footprint(dense, DEFAULT_PRECISION)
print(f"  weights {mem.weights_bytes/TB:.2f} TB + grads {mem.grad_bytes/TB:.2f} TB "
      f"+ optimizer {mem.optimizer_bytes/TB:.2f} TB = {mem.total_bytes/TB:.2f} TB")

moe = param_count_moe(MOE_8X17T)
print(f"\nmoe-8x17t: {MOE_8X17T.experts} experts, top_k={MOE_8X17T.top_k}")
print(f"  total {moe.total/1e12:.1f}T, active {moe.active/1e12:.1f}T, "
      f"{moe.per_expert_model/1e12:.1f}T per expert path")
print(f"  memory {memory_footprint(moe.total, DEFAULT_PRECISION).total_bytes/TB:.2f} TB "
      f"(similar bill, a quarter of the active compute)")

# Compute per layer: the MoE forward touches only 2 of 8 expert blocks.
f_dense = flops_forward_per_layer(DENSE_100T)
f_moe = flops_forward_per_layer(MOE_8X17T)
print(f"\nforward FLOPs/layer: dense {f_dense:.3g}, moe {f_moe:.3g} "
      f"({f_moe/f_dense:.0%})")

# Activation working set per device shrinks with the tensor degree.
for t in (1, 9, 18, 36, 72):
    act = activation_bytes_per_device(DENSE_100T, t)
    print(f"  t={t:2d}: activations/device {act/1e9:6.2f} GB")
