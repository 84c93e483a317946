"""What does $100B buy, and what does it take to power and cool it?

Walks the capital and facility envelope: racks and GPUs from the budget,
IT and facility power under a PUE range, then the three cooling options.
"""

from gigadc import (
    GRID_HEADROOM,
    NVL72,
    adiabatic_water_range,
    free_air_area,
    heat_reuse_households,
    power_envelope,
    provision,
)

BUDGET = 100e9          # USD
COMPUTE_FRACTION = 0.7  # rest goes to networking, storage, facility

prov = provision(BUDGET, COMPUTE_FRACTION, NVL72)
print(f"budget ${BUDGET/1e9:.0f}B at {COMPUTE_FRACTION:.0%} compute share:")
print(f"  {prov.rack_count:,} racks = {prov.gpu_count:,} GPUs")
print(f"  {prov.total_dense_flops:.3g} dense FLOP/s")
print(f"  {prov.it_compute_power/1e9:.2f} GW of compute power")

# Storage and networking add another fifth; PUE turns IT watts into grid watts.
env = power_envelope(prov, overhead_fraction=0.2, pue_min=1.15, pue_max=1.3)
print(f"\nIT power {env.it_power/1e9:.2f} GW -> facility "
      f"{env.facility_power_min/1e9:.2f}-{env.facility_power_max/1e9:.2f} GW")

print("\ngrid operators with that much headroom:")
for ba in GRID_HEADROOM:
    flag = "fits" if ba.max_available_mw * 1e6 > env.facility_power_min / 2 else "too small"
    print(f"  {ba.name:5s} {ba.max_available_mw:6,.0f} MW ({ba.region}): "
          f"{flag} for one of two halves")

# Cooling option 1: sell the heat. A 5 GW site consumes ~52.66 TWh/yr.
households = heat_reuse_households(52.66e12, erf=0.69)
print(f"\nwinter heat reuse at ERF 0.69: {households/1e6:.2f}M households")

# Option 2: free-air cooling needs area.
area = free_air_area(5e9)
print(f"free-air floor for 5 GW: {area:.3g} m^2 (~{area/1e6:.1f} km^2)")

# Option 3: evaporative cooling needs water.
lo, hi = adiabatic_water_range(5e9)
print(f"adiabatic water draw at 5 GW: {lo:,.0f}-{hi:,.0f} L/h")
