"""Generation latency: quadratic growth with context length.

Fits the a*T + b*T^2 latency model to the shipped calibration tables and
compares predictions against every table row, including the long-context
rows the quadratic slightly underestimates.
"""

from gigadc import (
    GENERATION_TABLE_100T,
    GENERATION_TABLE_50T,
    fit_latency,
    generation_time,
)
from gigadc.inference import DEPLOYMENT_RACKS_100T, fit_latency_short_context

for name, table in (("100t", GENERATION_TABLE_100T), ("50t", GENERATION_TABLE_50T)):
    model = fit_latency_short_context(table)
    print(f"[{name}] fit on rows <= 2048 tokens: "
          f"time = {model.linear_coeff:.3g}*T + {model.quad_coeff:.4g}*T^2")
    print(f"  {'tokens':>7s} {'measured':>9s} {'predicted':>10s} {'error':>7s} {'tok/s':>7s}")
    for tokens, seconds in table:
        est = generation_time(model, int(tokens))
        err = (est.total_time - seconds) / seconds
        print(f"  {int(tokens):7d} {seconds:9.1f} {est.total_time:10.1f} "
              f"{err:+7.1%} {est.tokens_per_second:7.2f}")
    print()

print(f"deployment footprint of the 100T model: {DEPLOYMENT_RACKS_100T} racks "
      f"(one layer per rack)")

# Fitting on the full table shifts the coefficient a little; the long rows
# run above pure quadratic.
full = fit_latency(GENERATION_TABLE_100T)
short = fit_latency_short_context(GENERATION_TABLE_100T)
print(f"100t quad coefficient: short-context fit {short.quad_coeff:.4g}, "
      f"all-rows fit {full.quad_coeff:.4g}")
