"""Transformer and Mixture-of-Experts architecture accounting.

Architectures are counted, never executed: parameters, forward FLOPs per
layer, training-state memory, and the per-device activation working set
under tensor/sequence partitioning. The block structure assumed throughout:
4h^2 attention weights plus 8h^2 feed-forward weights per layer (no biases),
untied input/output embeddings of 2Vh, and for MoE one router plus E expert
feed-forward blocks of 8h^2 each, top_k of which are active per token.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Union

from .errors import ConfigError


@dataclass(frozen=True)
class DenseTransformerConfig:
    layers: int
    hidden: int
    heads: int
    vocab: int
    seq_len: int       # tokens per sequence
    microbatch: int = 1  # sequences per microbatch

    def __post_init__(self):
        _validate_common(self)


@dataclass(frozen=True)
class MoEConfig:
    layers: int
    hidden: int
    heads: int
    vocab: int
    seq_len: int
    microbatch: int = 1
    experts: int = 8
    top_k: int = 2

    def __post_init__(self):
        _validate_common(self)
        if not 1 <= self.top_k <= self.experts:
            raise ValueError("require 1 <= top_k <= experts")


ModelConfig = Union[DenseTransformerConfig, MoEConfig]


def _validate_common(cfg) -> None:
    for name in ("layers", "hidden", "heads", "seq_len", "microbatch"):
        if getattr(cfg, name) < 1:
            raise ValueError(f"{type(cfg).__name__}.{name} must be >= 1")
    if cfg.vocab < 0:
        raise ValueError("vocab must be >= 0")
    if cfg.hidden % cfg.heads != 0:
        raise ValueError("hidden must be divisible by heads")


@dataclass(frozen=True)
class PrecisionPolicy:
    """Bytes of training state per parameter and per activation element.

    Defaults model mixed-precision training with an FP8 master copy plus an
    FP4 compute copy of the weights (1.5 B/param), FP4 gradients (0.5),
    two-moment optimizer state at FP8 (2.0), and FP4 activations (0.5).
    """

    weights_bytes_per_param: float = 1.5
    grad_bytes_per_param: float = 0.5
    optimizer_bytes_per_param: float = 2.0
    activation_bytes_per_elem: float = 0.5

    def __post_init__(self):
        for name in ("weights_bytes_per_param", "grad_bytes_per_param",
                     "optimizer_bytes_per_param", "activation_bytes_per_elem"):
            if getattr(self, name) < 0:
                raise ValueError(f"PrecisionPolicy.{name} must be >= 0")

    @property
    def state_bytes_per_param(self) -> float:
        return (self.weights_bytes_per_param + self.grad_bytes_per_param
                + self.optimizer_bytes_per_param)


DEFAULT_PRECISION = PrecisionPolicy()


@dataclass(frozen=True)
class MemoryFootprint:
    weights_bytes: float
    grad_bytes: float
    optimizer_bytes: float
    total_bytes: float


class MoeParamCount(NamedTuple):
    total: int
    active: int
    per_expert_model: int


def param_count(cfg: DenseTransformerConfig) -> int:
    """Total parameters: 12h^2 per layer plus 2Vh untied embeddings."""
    return 12 * cfg.hidden**2 * cfg.layers + 2 * cfg.vocab * cfg.hidden


def param_count_moe(cfg: MoEConfig) -> MoeParamCount:
    """Total, active, and single-expert-equivalent parameter counts.

    Per layer the total is (4 + 8E)h^2 and the active set is (4 + 8k)h^2;
    embeddings count toward total and active. The per-expert model is what
    one expert path would be as a standalone dense model, 12h^2 per layer.
    """
    h2 = cfg.hidden**2
    emb = 2 * cfg.vocab * cfg.hidden
    total = (4 + 8 * cfg.experts) * h2 * cfg.layers + emb
    active = (4 + 8 * cfg.top_k) * h2 * cfg.layers + emb
    per_expert = 12 * h2 * cfg.layers
    return MoeParamCount(total=total, active=active, per_expert_model=per_expert)


def layer_weight_params(cfg: ModelConfig) -> int:
    """Weight parameters of one layer, embeddings excluded.

    This is the per-layer gradient-exchange volume basis: 12h^2 for the dense
    block, (4 + 8E)h^2 for MoE since every expert synchronizes its gradients
    whether or not it was routed to.
    """
    if isinstance(cfg, MoEConfig):
        return (4 + 8 * cfg.experts) * cfg.hidden**2
    return 12 * cfg.hidden**2


def memory_footprint(params: float, policy: PrecisionPolicy) -> MemoryFootprint:
    """Training-state memory for a parameter count under a precision policy."""
    if params <= 0:
        raise ValueError("params must be > 0")
    w = params * policy.weights_bytes_per_param
    g = params * policy.grad_bytes_per_param
    o = params * policy.optimizer_bytes_per_param
    return MemoryFootprint(weights_bytes=w, grad_bytes=g, optimizer_bytes=o,
                           total_bytes=w + g + o)


def flops_forward_per_layer(cfg: ModelConfig, seq_len: int | None = None,
                            microbatch: int | None = None) -> float:
    """FLOPs for one layer's forward pass over one microbatch.

    Dense: 24*s*b*h^2 weight FLOPs plus the 4*s^2*b*h attention-score term.
    MoE: the feed-forward term covers only the top_k routed experts,
    (8 + 16k)*s*b*h^2 + 4*s^2*b*h.
    """
    s = cfg.seq_len if seq_len is None else seq_len
    b = cfg.microbatch if microbatch is None else microbatch
    h = cfg.hidden
    if isinstance(cfg, MoEConfig):
        weight_term = (8 + 16 * cfg.top_k) * s * b * h * h
    else:
        weight_term = 24 * s * b * h * h
    return weight_term + 4 * s * s * b * h


def activation_bytes_per_device(cfg: ModelConfig, tensor_degree: int) -> float:
    """Activation working set per device for one layer: s*b*h*(10/t) bytes.

    The formula is already in bytes; the factor 10 folds the residual
    activation tensors of one layer under mixed precision with selective
    recomputation.
    """
    if tensor_degree < 1:
        raise ValueError("tensor_degree must be >= 1")
    return cfg.seq_len * cfg.microbatch * cfg.hidden * 10.0 / tensor_degree


# Shipped presets.
DENSE_100T = DenseTransformerConfig(
    layers=134, hidden=244224, heads=256, vocab=256000, seq_len=32000, microbatch=1,
)
MOE_8X17T = MoEConfig(
    layers=118, hidden=109568, heads=256, vocab=256000, seq_len=32000, microbatch=1,
    experts=8, top_k=2,
)
MODEL_PRESETS: dict[str, ModelConfig] = {
    "dense-100t": DENSE_100T,
    "moe-8x17t": MOE_8X17T,
}


_MODEL_KEYS = {"kind", "layers", "hidden", "heads", "vocab", "seq_len",
               "microbatch", "experts", "top_k"}


def model_to_dict(cfg: ModelConfig) -> dict:
    d = {
        "kind": "moe" if isinstance(cfg, MoEConfig) else "dense",
        "layers": cfg.layers, "hidden": cfg.hidden, "heads": cfg.heads,
        "vocab": cfg.vocab, "seq_len": cfg.seq_len, "microbatch": cfg.microbatch,
    }
    if isinstance(cfg, MoEConfig):
        d["experts"] = cfg.experts
        d["top_k"] = cfg.top_k
    return d


def model_from_dict(data: dict) -> ModelConfig:
    unknown = set(data) - _MODEL_KEYS
    if unknown:
        raise ConfigError(f"unknown model config keys: {sorted(unknown)}")
    kind = data.get("kind", "dense")
    common = dict(
        layers=int(data["layers"]), hidden=int(data["hidden"]),
        heads=int(data["heads"]), vocab=int(data["vocab"]),
        seq_len=int(data["seq_len"]), microbatch=int(data.get("microbatch", 1)),
    )
    try:
        if kind == "dense":
            return DenseTransformerConfig(**common)
        if kind == "moe":
            return MoEConfig(**common, experts=int(data.get("experts", 8)),
                             top_k=int(data.get("top_k", 2)))
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"bad model config: {exc}") from exc
    raise ConfigError(f"unknown model kind {kind!r} (expected 'dense' or 'moe')")


def resolve_model(ref) -> tuple[str, ModelConfig]:
    """Resolve a preset name or inline dict to (name, config)."""
    if isinstance(ref, str):
        if ref not in MODEL_PRESETS:
            raise ConfigError(
                f"unknown model preset {ref!r}; shipped presets: {sorted(MODEL_PRESETS)}")
        return ref, MODEL_PRESETS[ref]
    if isinstance(ref, dict):
        name = ref.get("name", "custom")
        cfg = model_from_dict({k: v for k, v in ref.items() if k != "name"})
        return name, cfg
    raise ConfigError(f"model reference must be a preset name or a table, got {type(ref).__name__}")
