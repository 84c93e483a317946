"""Flow-level Monte-Carlo simulation of permutation traffic on leaf-spine fabrics.

The model is fluid, not packet-level: at any instant every flow receives its
max-min fair share of the links it crosses, recomputed at each completion
event (progressive filling). This captures the FCT inflation that single-path
ECMP hashing causes through link collisions without modeling PFC, congestion
control, or retransmissions.

Policies:
  * "single-path": each inter-leaf flow hashes onto one uplink and one
    downlink chosen uniformly among the spines, like ECMP.
  * "spray": each flow spreads over all paths, modeled as contending only
    for its leaf's aggregate up/down trunk capacity, so FCT is optimal
    whenever the load is admissible.

Randomness is counter-based (Philox) with substreams derived from
(seed, trial, stream), so results are identical no matter how trials are
scheduled; traffic and routing use separate substreams so both policies see
the same permutations under the same seed. Trial aggregation is ordered by
trial index. Fixed seed implies bit-identical statistics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import ConfigError, InfeasibleError

POLICIES = ("single-path", "spray")

# Relative tolerance for grouping simultaneous completions / equal fair shares.
# Rates in this model are small-denominator rational multiples of the link
# speed, so grouping at 1e-9 merges only true ties blurred by rounding.
_REL_EPS = 1e-9


@dataclass(frozen=True)
class Fabric:
    """A one- or two-tier full-bisection fabric with uniform link speed."""

    hosts: int
    tiers: int
    radix: int
    link_speed: float   # bit/s per link
    hosts_per_leaf: int
    leaves: int
    spines: int

    @property
    def link_bytes_per_s(self) -> float:
        return self.link_speed / 8.0


def build_fabric(hosts: int, tiers: int, radix: int, link_speed: float) -> Fabric:
    """Construct the fabric with deterministic indexing.

    Two-tier: radix/2 hosts per leaf, radix/2 spines, one link per
    (leaf, spine) pair. One-tier: a single switch.
    """
    if hosts < 1 or radix < 2 or radix % 2:
        raise ConfigError("need hosts >= 1 and an even radix >= 2")
    if link_speed <= 0:
        raise ConfigError("link_speed must be > 0")
    if tiers == 1:
        if hosts > radix:
            raise InfeasibleError(f"{hosts} hosts exceed a single radix-{radix} switch")
        return Fabric(hosts, 1, radix, link_speed,
                      hosts_per_leaf=hosts, leaves=1, spines=0)
    if tiers == 2:
        half = radix // 2
        leaves = math.ceil(hosts / half)
        if leaves > radix:
            raise InfeasibleError(
                f"{hosts} hosts exceed a 2-tier radix-{radix} leaf-spine "
                f"(capacity {radix * half})")
        return Fabric(hosts, 2, radix, link_speed,
                      hosts_per_leaf=half, leaves=leaves, spines=half)
    raise ConfigError("only 1- and 2-tier fabrics are supported")


@dataclass(frozen=True)
class TrafficPattern:
    flow_size: float        # bytes
    participation: float = 1.0  # fraction of hosts sending
    kind: str = "permutation"

    def __post_init__(self):
        if not 0 < self.participation <= 1:
            raise ValueError("participation must be in (0, 1]")
        if self.flow_size <= 0:
            raise ValueError("flow_size must be > 0")
        if self.kind != "permutation":
            raise ValueError("only permutation traffic is supported")


@dataclass(frozen=True)
class FctStats:
    optimal_fct: float
    mean: float
    p50: float
    p99: float
    max: float
    inflation_mean: float
    inflation_p50: float
    inflation_p99: float
    inflation_max: float
    flows: int
    trials: int

    def to_dict(self) -> dict:
        return {
            "optimal_fct_s": self.optimal_fct, "mean_s": self.mean,
            "p50_s": self.p50, "p99_s": self.p99, "max_s": self.max,
            "inflation_mean": self.inflation_mean,
            "inflation_p50": self.inflation_p50,
            "inflation_p99": self.inflation_p99,
            "inflation_max": self.inflation_max,
            "flows": self.flows, "trials": self.trials,
        }


def _rng(seed: int, trial: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=None, counter=None,
                                                seed=[seed, trial, stream]))


def _derangement(rng: np.random.Generator, n: int) -> np.ndarray:
    # Rejection sampling; expected ~e tries.
    idx = np.arange(n)
    while True:
        perm = rng.permutation(n)
        if not np.any(perm == idx):
            return perm


@njit(cache=True)
def _fluid_fcts(up, down, caps_ext, nic_rate, flow_size):  # pragma: no cover
    """Completion time of every flow under fluid max-min sharing.

    up/down hold one link id per flow; flows that skip the fabric point at
    the trailing dummy entry of caps_ext, whose capacity is infinite. Every
    flow is additionally capped at its NIC rate. Rates are recomputed by
    progressive filling at each completion event: each filling pass freezes
    the flows whose fair share sits at the current global minimum.
    """
    m = up.shape[0]
    nl = caps_ext.shape[0]
    eps = _REL_EPS

    rates = np.zeros(m)
    remaining = np.full(m, flow_size)
    fct = np.zeros(m)
    alive = np.ones(m, np.bool_)
    n_alive = m
    now = 0.0

    used = np.zeros(nl)
    counts = np.zeros(nl, np.int64)
    share = np.empty(nl)

    while n_alive > 0:
        # Max-min progressive filling over the alive flows.
        for l in range(nl):
            used[l] = 0.0
            counts[l] = 0
        for i in range(m):
            if alive[i]:
                counts[up[i]] += 1
                counts[down[i]] += 1
        unfrozen = alive.copy()
        left = n_alive
        while left > 0:
            for l in range(nl):
                share[l] = (caps_ext[l] - used[l]) / counts[l] if counts[l] > 0 else np.inf
            smin = np.inf
            for i in range(m):
                if unfrozen[i]:
                    f = min(share[up[i]], share[down[i]], nic_rate)
                    if f < smin:
                        smin = f
            cutoff = smin * (1.0 + eps)
            for i in range(m):
                if unfrozen[i]:
                    f = min(share[up[i]], share[down[i]], nic_rate)
                    if f <= cutoff:
                        rates[i] = f
                        unfrozen[i] = False
                        used[up[i]] += f
                        used[down[i]] += f
                        counts[up[i]] -= 1
                        counts[down[i]] -= 1
                        left -= 1

        # Advance to the next completion event.
        dt = np.inf
        for i in range(m):
            if alive[i]:
                t = remaining[i] / rates[i]
                if t < dt:
                    dt = t
        now += dt
        horizon = dt * (1.0 + eps)
        for i in range(m):
            if alive[i]:
                if remaining[i] / rates[i] <= horizon:
                    fct[i] = now
                    alive[i] = False
                    n_alive -= 1
                else:
                    remaining[i] -= rates[i] * dt
    return fct


def _trial_fcts(fabric: Fabric, pattern: TrafficPattern, policy: str,
                seed: int, trial: int) -> np.ndarray:
    traffic_rng = _rng(seed, trial, 0)
    route_rng = _rng(seed, trial, 1)

    n_active = max(2, int(round(fabric.hosts * pattern.participation)))
    n_active = min(n_active, fabric.hosts)
    if n_active == fabric.hosts:
        active = np.arange(fabric.hosts)
    else:
        active = np.sort(traffic_rng.choice(fabric.hosts, size=n_active, replace=False))
    perm = _derangement(traffic_rng, n_active)
    src = active
    dst = active[perm]

    if policy not in POLICIES:
        raise ConfigError(f"unknown policy {policy!r}; expected one of {POLICIES}")

    C = fabric.link_bytes_per_s
    if fabric.tiers == 1:
        # One switch: each output port serves exactly one flow of a permutation,
        # so every flow runs at full NIC rate.
        up = down = np.zeros(n_active, dtype=np.int64)
        caps = np.zeros(0)
    else:
        src_leaf = src // fabric.hosts_per_leaf
        dst_leaf = dst // fabric.hosts_per_leaf
        inter = src_leaf != dst_leaf
        if policy == "single-path":
            spines = route_rng.integers(0, fabric.spines, size=n_active)
            n_up = fabric.leaves * fabric.spines
            caps = np.full(2 * n_up, C)
            up = np.where(inter, src_leaf * fabric.spines + spines, 2 * n_up)
            down = np.where(inter, n_up + spines * fabric.leaves + dst_leaf, 2 * n_up)
        else:
            # Spray: aggregate trunks, all uplinks of a leaf pooled (downlinks too).
            caps = np.full(2 * fabric.leaves, fabric.spines * C)
            n_trunks = 2 * fabric.leaves
            up = np.where(inter, src_leaf, n_trunks)
            down = np.where(inter, fabric.leaves + dst_leaf, n_trunks)

    caps_ext = np.append(caps, np.inf)
    return _fluid_fcts(up.astype(np.int64), down.astype(np.int64), caps_ext, C,
                       float(pattern.flow_size))


def trial_fcts(fabric: Fabric, pattern: TrafficPattern, policy: str,
               trials: int, seed: int) -> list[np.ndarray]:
    """Per-trial FCT arrays, ordered by trial index."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    return [_trial_fcts(fabric, pattern, policy, seed, t) for t in range(trials)]


def simulate_permutation(fabric: Fabric, pattern: TrafficPattern, policy: str,
                         trials: int, seed: int) -> FctStats:
    """Run the Monte-Carlo permutation experiment and pool FCTs across trials."""
    per_trial = trial_fcts(fabric, pattern, policy, trials, seed)
    fcts = np.concatenate(per_trial)
    optimal = pattern.flow_size / fabric.link_bytes_per_s
    inflation = fcts / optimal
    return FctStats(
        optimal_fct=optimal,
        mean=float(fcts.mean()),
        p50=float(np.quantile(fcts, 0.50)),
        p99=float(np.quantile(fcts, 0.99)),
        max=float(fcts.max()),
        inflation_mean=float(inflation.mean()),
        inflation_p50=float(np.quantile(inflation, 0.50)),
        inflation_p99=float(np.quantile(inflation, 0.99)),
        inflation_max=float(inflation.max()),
        flows=int(fcts.size),
        trials=trials,
    )
