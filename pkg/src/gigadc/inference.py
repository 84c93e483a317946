"""Autoregressive generation latency, fitted as total_time = a*T + b*T^2.

The quadratic term dominates at long context (attention over the growing
KV history); the linear coefficient is clamped at zero when a least-squares
fit would drive it negative. Shipped calibration tables give end-to-end
generation times (no pipeline or tensor-parallel overhead) for the two
reference models; rows beyond 2048 tokens run ~2-6% above the pure
quadratic, so fits default to the short-context rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True)
class LatencyModel:
    linear_coeff: float  # s/token
    quad_coeff: float    # s/token^2

    def __post_init__(self):
        if self.quad_coeff < 0:
            raise ValueError("quad_coeff must be >= 0")

    def total_time(self, tokens: float) -> float:
        return self.linear_coeff * tokens + self.quad_coeff * tokens * tokens


@dataclass(frozen=True)
class InferenceEstimate:
    tokens: int
    total_time: float        # s
    tokens_per_second: float


# (tokens generated, total seconds). Measured end to end, ideal network.
GENERATION_TABLE_100T: tuple[tuple[int, float], ...] = (
    (512, 18.0), (1024, 72.0), (2048, 289.0), (16000, 18664.0), (32000, 71838.0),
)
GENERATION_TABLE_50T: tuple[tuple[int, float], ...] = (
    (512, 9.58), (1024, 38.0), (2048, 153.0), (16000, 9504.0), (32000, 38526.0),
)

# Racks deployed per serving instance of the reference 100T model (one layer
# per rack). Metadata only; no latency consequence in this model.
DEPLOYMENT_RACKS_100T = 224

# Rows above this are extrapolation territory for the quadratic fit.
FIT_MAX_TOKENS = 2048


def fit_latency(table: Iterable[tuple[float, float]]) -> LatencyModel:
    """Least-squares fit of total_time = a*T + b*T^2 over (tokens, seconds) rows.

    If the unconstrained fit yields a negative linear term, it is clamped to
    zero and the quadratic term refit alone.
    """
    rows = list(table)
    if len(rows) < 2:
        raise ValueError("need at least 2 rows to fit")
    T = np.asarray([r[0] for r in rows], dtype=float)
    y = np.asarray([r[1] for r in rows], dtype=float)
    if np.all(T == T[0]):
        raise ValueError("degenerate table: all rows have the same token count")
    X = np.stack([T, T * T], axis=1)
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    a, b = float(coef[0]), float(coef[1])
    if a < 0:
        a = 0.0
        b = float((T * T * y).sum() / (T**4).sum())
    return LatencyModel(linear_coeff=a, quad_coeff=max(b, 0.0))


def fit_latency_short_context(table: Sequence[tuple[float, float]],
                              max_tokens: int = FIT_MAX_TOKENS) -> LatencyModel:
    """Fit on the rows at or below max_tokens; the default calibration."""
    short = [r for r in table if r[0] <= max_tokens]
    return fit_latency(short if len(short) >= 2 else table)


def generation_time(model: LatencyModel, tokens: int) -> InferenceEstimate:
    """Predict end-to-end generation time and throughput for a token count."""
    if tokens < 1:
        raise ValueError("tokens must be >= 1")
    total = model.total_time(tokens)
    return InferenceEstimate(tokens=tokens, total_time=total,
                             tokens_per_second=tokens / total)
