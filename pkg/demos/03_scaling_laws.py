"""Compute-optimal model sizes for the provisioned fleet under different laws.

Shows how the shipped power laws split a compute budget C into parameters
and tokens with the C = 6*N*D closure, and how long the fleet would chew
through it.
"""

from gigadc import (
    DEFAULT_LAWS,
    NVL72,
    TrainingBudget,
    optimal_allocation,
    provision,
    training_time,
)

YEAR = 365.25 * 86400

prov = provision(100e9, 0.7, NVL72)
budget = TrainingBudget(aggregate_rate=prov.total_dense_flops, utilization=1.0,
                        duration=3.3 * YEAR)
C = budget.compute
print(f"fleet rate {prov.total_dense_flops:.3g} FLOP/s, "
      f"{budget.duration/YEAR:.1f} years -> C = {C:.3g} FLOP\n")

print(f"{'law':22s} {'N (params)':>12s} {'D (tokens)':>12s} {'tokens/param':>13s}")
for name in sorted(DEFAULT_LAWS):
    n, d = optimal_allocation(C, DEFAULT_LAWS[name])
    print(f"{name:22s} {n:12.3g} {d:12.3g} {d/n:13.1f}")

# Inverting: how long to train a 103.8T model compute-optimally?
law = DEFAULT_LAWS["hoffmann-approach2"]
target_n = 1.038e14
c_needed = (target_n / law.coefficient) ** (1 / law.exponent)
n, d = optimal_allocation(c_needed, law)
t = training_time(n, d, budget)
print(f"\n103.8T optimum needs C = {c_needed:.3g} FLOP "
      f"= {t/YEAR:.2f} years at full utilization")
print(f"(at 40% utilization: {t/0.4/YEAR:.1f} years)")
