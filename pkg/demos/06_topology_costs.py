"""Connecting 800K NICs: four scale-out designs and what they cost.

Compares the straight fat tree against multi-plane, multi-rail, and the
combined design, with the transceiver-dominated bill of materials.
"""

from gigadc import comparison_table, fat_tree, multi_rail

HOSTS = 800000  # one datacenter's worth of 800G NICs

print(f"{'design':12s} {'tiers':>5s} {'chips':>8s} {'boxes':>8s} "
      f"{'switch cables':>14s} {'BOM':>9s}")
designs = comparison_table(HOSTS, gpus_per_rack=72, rails=76, planes=4)
for d in designs:
    print(f"{d.kind:12s} {d.tiers:5d} {d.chips:8,d} {d.boxes:8,d} "
          f"{d.switch_cables:14,d} ${d.bom['total_usd']/1e9:7.2f}B")

ft = designs[0]
print(f"\nfat tree transceivers alone: "
      f"${ft.bom['switch_transceivers_usd']/1e9:.1f}B "
      f"({ft.switch_cables:,} cables x 2 ends x $1K)")

mp = designs[1]
print(f"multi-plane saves {1 - mp.chips/ft.chips:.1%} of chips and "
      f"{1 - mp.switch_cables/ft.switch_cables:.1%} of cables (4 tiers -> 3)")

comb = designs[3]
print(f"combined (76 rails x 4 planes) saves {1 - comb.chips/ft.chips:.1%} chips, "
      f"{1 - comb.switch_cables/ft.switch_cables:.1%} cables (2 tiers)")

# Rails alone don't shrink tiers unless planes raise the radix too.
r64 = multi_rail(HOSTS, gpus_per_rack=72, rails=72, planes=1)
r256 = multi_rail(HOSTS, gpus_per_rack=72, rails=72, planes=4)
print(f"\n72 rails at radix 64: {r64.tiers} tiers/rail; with 4 planes: "
      f"{r256.tiers} tiers/rail")

# Small sanity case: the textbook k=4 fat tree.
toy = fat_tree(16, radix=4)
print(f"\nk=4 fat tree: {toy.chips} switches, {toy.switch_cables} switch links "
      f"(textbook: 20 and 32)")
