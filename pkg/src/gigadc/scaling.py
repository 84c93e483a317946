"""Compute-optimal model/token allocation under pluggable power-law scaling rules.

The FLOP convention throughout is C = 6*N*D: six floating-point operations
per parameter per training token. Law constants are configuration, not code;
the shipped defaults anchor published exponents through the well-known
compute-optimal point N = 7e10 parameters at C = 5.88e23 FLOP.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

FLOPS_PER_PARAM_TOKEN = 6  # C = 6*N*D

# (params, FLOP) at a published compute-optimal training run, used to pin the
# coefficient of each default law.
ANCHOR_PARAMS = 7.0e10
ANCHOR_COMPUTE = 5.88e23


@dataclass(frozen=True)
class ScalingLaw:
    """Optimal model size as a power law of compute: N_opt = G * C^a."""

    name: str
    coefficient: float  # G
    exponent: float     # a

    def __post_init__(self):
        if not 0 < self.exponent < 1:
            raise ValueError("exponent must be in (0, 1)")
        if self.coefficient <= 0:
            raise ValueError("coefficient must be > 0")

    def optimal_params(self, compute: float) -> float:
        return self.coefficient * compute**self.exponent


@dataclass(frozen=True)
class TrainingBudget:
    """Available compute: sustained rate times utilization times wall-clock time."""

    aggregate_rate: float  # FLOP/s across the fleet
    utilization: float     # fraction of the rate actually achieved
    duration: float        # s

    def __post_init__(self):
        if not 0 < self.utilization <= 1:
            raise ValueError("utilization must be in (0, 1]")
        if self.aggregate_rate <= 0 or self.duration <= 0:
            raise ValueError("aggregate_rate and duration must be > 0")

    @property
    def compute(self) -> float:
        return self.aggregate_rate * self.utilization * self.duration


class Allocation(NamedTuple):
    params: float
    tokens: float


def law_through_anchor(name: str, exponent: float,
                       anchor_params: float = ANCHOR_PARAMS,
                       anchor_compute: float = ANCHOR_COMPUTE) -> ScalingLaw:
    """Build a law with the given exponent whose curve passes through the anchor."""
    return ScalingLaw(name=name, exponent=exponent,
                      coefficient=anchor_params / anchor_compute**exponent)


DEFAULT_LAWS: dict[str, ScalingLaw] = {
    law.name: law
    for law in (
        law_through_anchor("hoffmann-approach1", 0.50),
        law_through_anchor("hoffmann-approach2", 0.49),
        law_through_anchor("hoffmann-approach3", 0.46),
        law_through_anchor("kaplan", 0.73),
    )
}
DEFAULT_LAW_NAME = "hoffmann-approach2"


def optimal_allocation(compute: float, law: ScalingLaw) -> Allocation:
    """Split a compute budget into model parameters and training tokens.

    Tokens follow from the budget closure D = C / (6N), so 6*N*D = C exactly.
    """
    if compute <= 0:
        raise ValueError("compute must be > 0")
    params = law.optimal_params(compute)
    tokens = compute / (FLOPS_PER_PARAM_TOKEN * params)
    return Allocation(params=params, tokens=tokens)


def training_time(params: float, tokens: float, budget: TrainingBudget) -> float:
    """Seconds to train N params on D tokens at the budget's sustained rate."""
    if params <= 0 or tokens <= 0:
        raise ValueError("params and tokens must be > 0")
    return (FLOPS_PER_PARAM_TOKEN * params * tokens
            / (budget.aggregate_rate * budget.utilization))
