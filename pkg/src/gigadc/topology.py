"""Scale-out network designs: full fat tree, multi-plane, multi-rail, combined.

Counting conventions, full-bisection throughout unless an oversubscription
ratio is given:

  * An n-tier fat tree of radix r carries up to 2*(r/2)^n hosts, uses
    (2n-1)*h/r switching chips for h hosts (2h/r per non-top tier, h/r on
    top), h host cables, and (n-1)*h switch-to-switch cables.
  * Multi-plane splits each port's serdes lanes into p independent planes,
    multiplying effective box radix by p. A box holds p chips. Plane links
    share wires, so a physical cable carries p links and is counted once.
  * Multi-rail connects GPU i of every rack to rail network i; each rail is
    designed independently and totals are summed, with per-rail ceilings.

The bill of materials prices optical transceivers per switch-cable end
(host links are short enough for passive copper) and switching chips per
ASIC.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError, InfeasibleError

MAX_TIERS = 6


@dataclass(frozen=True)
class SwitchChip:
    """A switching ASIC and the port configurations it can be carved into."""

    bisection_bw: float                           # bit/s
    port_configs: tuple[tuple[int, float], ...]   # (port_count, port_speed bit/s)

    def __post_init__(self):
        for count, speed in self.port_configs:
            if count * speed != self.bisection_bw:
                raise ValueError(
                    f"port config {count}x{speed:.3g} does not match "
                    f"bisection {self.bisection_bw:.3g}")

    @property
    def base_ports(self) -> int:
        """Port count at the fastest (fewest-ports) configuration."""
        return min(count for count, _ in self.port_configs)

    def plane_config(self, planes: int) -> tuple[int, float]:
        """The (ports, speed) configuration that realizes the given plane count."""
        want = self.base_ports * planes
        for count, speed in self.port_configs:
            if count == want:
                return count, speed
        raise ConfigError(
            f"chip has no {want}-port configuration for {planes} planes; "
            f"available: {[c for c, _ in self.port_configs]}")


# 51.2 Tbps ASIC, carve-able from 64x800G down to 512x100G.
SWITCH_51T = SwitchChip(
    bisection_bw=51.2e12,
    port_configs=((64, 800e9), (128, 400e9), (256, 200e9), (512, 100e9)),
)


@dataclass(frozen=True)
class PriceBook:
    transceiver_cost: float = 1000.0  # USD per cable end
    chip_cost: float = 20000.0        # USD per switching ASIC
    budget_cap: float = 5e9           # USD, customary per-DC networking budget

    def __post_init__(self):
        if min(self.transceiver_cost, self.chip_cost, self.budget_cap) < 0:
            raise ValueError("PriceBook entries must be >= 0")


DEFAULT_PRICES = PriceBook()


@dataclass(frozen=True)
class TopologyDesign:
    kind: str             # fat-tree | multi-plane | multi-rail | combined
    hosts: int
    rails: int
    planes: int
    tiers: int
    chips: int            # switching ASICs
    boxes: int            # physical switch boxes (planes chips per box)
    host_cables: int
    switch_cables: int    # physical wires; plane links sharing a wire count once
    bom: dict

    def to_dict(self) -> dict:
        return {
            "kind": self.kind, "hosts": self.hosts, "rails": self.rails,
            "planes": self.planes, "tiers": self.tiers, "chips": self.chips,
            "boxes": self.boxes, "host_cables": self.host_cables,
            "switch_cables": self.switch_cables, "bom": dict(self.bom),
        }


def capacity(radix: int, tiers: int) -> int:
    """Maximum hosts of a full-bisection fat tree: 2*(radix/2)^tiers."""
    return 2 * (radix // 2) ** tiers


def required_tiers(hosts: int, radix: int, max_tiers: int = MAX_TIERS) -> int:
    """Smallest tier count whose capacity covers the host count."""
    if hosts < 1:
        raise ValueError("hosts must be >= 1")
    if radix < 2 or radix % 2:
        raise ValueError("radix must be even and >= 2")
    for n in range(1, max_tiers + 1):
        if capacity(radix, n) >= hosts:
            return n
    raise InfeasibleError(
        f"{hosts} hosts exceed a {max_tiers}-tier radix-{radix} fat tree "
        f"(capacity {capacity(radix, max_tiers)})")


def _bom(switch_cables: int, chips: int, prices: PriceBook) -> dict:
    transceivers = switch_cables * 2 * prices.transceiver_cost
    chips_usd = chips * prices.chip_cost
    return {
        "switch_transceivers_usd": transceivers,
        "chips_usd": chips_usd,
        "total_usd": transceivers + chips_usd,
    }


def fat_tree(hosts: int, radix: int = 64,
             prices: PriceBook = DEFAULT_PRICES) -> TopologyDesign:
    """Fully provisioned fat tree of single-chip switch boxes."""
    tiers = required_tiers(hosts, radix)
    chips = math.ceil((2 * tiers - 1) * hosts / radix)
    switch_cables = (tiers - 1) * hosts
    return TopologyDesign(
        kind="fat-tree", hosts=hosts, rails=1, planes=1, tiers=tiers,
        chips=chips, boxes=chips, host_cables=hosts, switch_cables=switch_cables,
        bom=_bom(switch_cables, chips, prices),
    )


def multi_plane(hosts: int, chip: SwitchChip = SWITCH_51T, planes: int = 4,
                prices: PriceBook = DEFAULT_PRICES) -> TopologyDesign:
    """Fat tree of multi-plane boxes: p chips per box, effective radix x p.

    With planes=1 this is field-for-field the plain fat tree. Wires are
    physical: one cable carries p plane links.
    """
    ports, _speed = chip.plane_config(planes)
    tiers = required_tiers(hosts, ports)
    boxes = math.ceil((2 * tiers - 1) * hosts / ports)
    chips = boxes * planes
    switch_cables = (tiers - 1) * hosts
    return TopologyDesign(
        kind="multi-plane" if planes > 1 else "fat-tree",
        hosts=hosts, rails=1, planes=planes, tiers=tiers,
        chips=chips, boxes=boxes, host_cables=hosts, switch_cables=switch_cables,
        bom=_bom(switch_cables, chips, prices),
    )


def multi_rail(hosts: int, gpus_per_rack: int, rails: int, planes: int = 1,
               chip: SwitchChip = SWITCH_51T,
               prices: PriceBook = DEFAULT_PRICES) -> TopologyDesign:
    """Independent rail networks, GPU i of each rack on rail i.

    Each rail is a multi-plane fat tree over ceil(hosts/rails) endpoints;
    totals are per-rail counts times the rail count, host cables excepted
    (every host still has exactly one NIC cable).
    """
    if rails < 1 or rails > gpus_per_rack:
        raise ConfigError(f"rails must be in 1..gpus_per_rack ({gpus_per_rack})")
    per_rail_hosts = math.ceil(hosts / rails)
    rail = multi_plane(per_rail_hosts, chip, planes, prices)
    chips = rail.chips * rails
    switch_cables = rail.switch_cables * rails
    return TopologyDesign(
        kind="multi-rail" if rails > 1 else rail.kind,
        hosts=hosts, rails=rails, planes=planes, tiers=rail.tiers,
        chips=chips, boxes=rail.boxes * rails,
        host_cables=hosts, switch_cables=switch_cables,
        bom=_bom(switch_cables, chips, prices),
    )


def combined_design(hosts: int, rails: int, planes: int,
                    chip: SwitchChip = SWITCH_51T,
                    prices: PriceBook = DEFAULT_PRICES,
                    oversubscription: float = 1.0) -> TopologyDesign:
    """Multi-rail of two-tier multi-plane leaf-spine networks, per-tier ceilings.

    Leaf boxes split their effective radix between hosts and uplinks at the
    oversubscription ratio (1.0 = full bisection); spine boxes are packed to
    terminate all uplinks. Raises when a rail does not fit in two tiers.
    """
    if rails < 1:
        raise ConfigError("rails must be >= 1")
    if oversubscription < 1.0:
        raise ConfigError("oversubscription must be >= 1.0")
    ports, _speed = chip.plane_config(planes)
    per_rail_hosts = math.ceil(hosts / rails)

    down = int(ports * oversubscription / (oversubscription + 1.0))
    up = ports - down
    if per_rail_hosts > down * ports:  # leaves would exceed spine reach
        need = required_tiers(per_rail_hosts, ports)
        raise InfeasibleError(
            f"{per_rail_hosts} hosts per rail exceed a 2-tier radix-{ports} "
            f"leaf-spine; {need} tiers would be required")

    leaves = math.ceil(per_rail_hosts / down)
    uplinks = leaves * up
    spines = math.ceil(uplinks / ports)
    boxes_per_rail = leaves + spines
    chips = boxes_per_rail * planes * rails
    switch_cables = uplinks * rails
    return TopologyDesign(
        kind="combined", hosts=hosts, rails=rails, planes=planes, tiers=2,
        chips=chips, boxes=boxes_per_rail * rails,
        host_cables=hosts, switch_cables=switch_cables,
        bom=_bom(switch_cables, chips, prices),
    )


def comparison_table(hosts: int, gpus_per_rack: int = 72, rails: int = 76,
                     planes: int = 4, chip: SwitchChip = SWITCH_51T,
                     prices: PriceBook = DEFAULT_PRICES) -> list[TopologyDesign]:
    """The four designs side by side for one datacenter's hosts."""
    return [
        fat_tree(hosts, chip.base_ports, prices),
        multi_plane(hosts, chip, planes, prices),
        multi_rail(hosts, gpus_per_rack, min(rails, gpus_per_rack), planes, chip, prices),
        combined_design(hosts, rails, planes, chip, prices),
    ]
