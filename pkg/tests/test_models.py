import math

import pytest
from hypothesis import given, strategies as st

import gigadc as g
from gigadc.errors import ConfigError
from gigadc.models import model_from_dict, model_to_dict, resolve_model

from conftest import rel_err


# Enumeration oracle: list every weight matrix by shape and sum the sizes.
def dense_shapes(layers, hidden, vocab):
    shapes = []
    for _ in range(layers):
        shapes += [(hidden, hidden)] * 4            # Wq Wk Wv Wo
        shapes += [(hidden, 4 * hidden), (4 * hidden, hidden)]  # FFN up/down
    shapes += [(vocab, hidden), (hidden, vocab)]    # untied embeddings
    return shapes


def moe_shapes(layers, hidden, vocab, experts):
    shapes = []
    for _ in range(layers):
        shapes += [(hidden, hidden)] * 4
        for _ in range(experts):
            shapes += [(hidden, 4 * hidden), (4 * hidden, hidden)]
    shapes += [(vocab, hidden), (hidden, vocab)]
    return shapes


def count(shapes):
    return sum(a * b for a, b in shapes)


class TestParamCount:
    def test_reference_dense(self):
        total = g.param_count(g.DENSE_100T)
        assert total == count(dense_shapes(134, 244224, 256000))
        assert rel_err(total, 96e12) < 0.005

    def test_unit_layer(self):
        cfg = g.DenseTransformerConfig(layers=1, hidden=1, heads=1, vocab=0, seq_len=1)
        assert g.param_count(cfg) == 12

    def test_small_enumeration(self):
        cfg = g.DenseTransformerConfig(layers=2, hidden=4, heads=1, vocab=10, seq_len=8)
        assert g.param_count(cfg) == 464  # 12*16*2 + 2*40, from the oracle
        assert g.param_count(cfg) == count(dense_shapes(2, 4, 10))

    @given(st.integers(1, 4), st.integers(1, 64), st.integers(0, 100))
    def test_matches_enumeration(self, layers, hidden, vocab):
        cfg = g.DenseTransformerConfig(layers=layers, hidden=hidden, heads=1,
                                       vocab=vocab, seq_len=8)
        assert g.param_count(cfg) == count(dense_shapes(layers, hidden, vocab))


class TestParamCountMoe:
    def test_reference_moe(self):
        total, active, per_expert = g.param_count_moe(g.MOE_8X17T)
        assert total == count(moe_shapes(118, 109568, 256000, 8))
        assert rel_err(total, 96.4e12) < 0.01
        assert rel_err(active, 28.4e12) < 0.01
        assert rel_err(per_expert, 17e12) < 0.01

    def test_all_experts_active(self):
        cfg = g.MoEConfig(layers=2, hidden=8, heads=2, vocab=16, seq_len=8,
                          experts=4, top_k=4)
        total, active, _ = g.param_count_moe(cfg)
        assert active == total

    def test_toy_enumeration(self):
        cfg = g.MoEConfig(layers=1, hidden=2, heads=1, vocab=0, seq_len=4,
                          experts=2, top_k=1)
        total, active, _ = g.param_count_moe(cfg)
        assert total == 80   # (4 + 8*2) * 4
        assert active == 48  # (4 + 8*1) * 4
        assert total == count(moe_shapes(1, 2, 0, 2))

    @given(st.integers(1, 3), st.integers(1, 16), st.integers(0, 50),
           st.integers(1, 6), st.data())
    def test_matches_enumeration_and_bound(self, layers, hidden, vocab, experts, data):
        top_k = data.draw(st.integers(1, experts))
        cfg = g.MoEConfig(layers=layers, hidden=hidden, heads=1, vocab=vocab,
                          seq_len=8, experts=experts, top_k=top_k)
        total, active, _ = g.param_count_moe(cfg)
        assert total == count(moe_shapes(layers, hidden, vocab, experts))
        assert active <= total
        if top_k == experts:
            assert active == total


class TestMemoryFootprint:
    def test_reference_breakdown(self):
        mem = g.memory_footprint(g.param_count(g.DENSE_100T), g.DEFAULT_PRECISION)
        assert rel_err(mem.weights_bytes, 144.04e12) < 0.002
        assert rel_err(mem.grad_bytes, 48.01e12) < 0.002
        assert rel_err(mem.optimizer_bytes, 192.05e12) < 0.002
        assert rel_err(mem.total_bytes, 384.14e12) < 0.002
        assert mem.total_bytes == mem.weights_bytes + mem.grad_bytes + mem.optimizer_bytes

    def test_moe_total(self):
        total, _, _ = g.param_count_moe(g.MOE_8X17T)
        mem = g.memory_footprint(total, g.DEFAULT_PRECISION)
        assert rel_err(mem.total_bytes, 385.54e12) < 0.005

    def test_zero_policy(self):
        mem = g.memory_footprint(100, g.PrecisionPolicy(0, 0, 0, 0))
        assert mem.total_bytes == 0

    @given(st.floats(1, 1e15), st.floats(0, 4), st.floats(0, 4), st.floats(0, 4))
    def test_linear_in_params_and_coefficients(self, params, w, gr, o):
        policy = g.PrecisionPolicy(w, gr, o, 0.5)
        m1 = g.memory_footprint(params, policy)
        m2 = g.memory_footprint(2 * params, policy)
        assert math.isclose(m2.total_bytes, 2 * m1.total_bytes, rel_tol=1e-12,
                            abs_tol=1e-9)
        doubled = g.PrecisionPolicy(2 * w, gr, o, 0.5)
        m3 = g.memory_footprint(params, doubled)
        assert math.isclose(m3.weights_bytes, 2 * m1.weights_bytes, rel_tol=1e-12,
                            abs_tol=1e-9)


class TestFlops:
    # Oracle: 2 FLOPs per weight per token over the active per-layer weights,
    # plus 4*s^2*b*h for attention scores and their weighted sum.
    @staticmethod
    def oracle(active_weight_params, s, b, h):
        return 2 * active_weight_params * s * b + 4 * s * s * b * h

    def test_reference_dense(self):
        got = g.flops_forward_per_layer(g.DENSE_100T)
        want = self.oracle(12 * 244224**2, 32000, 1, 244224)
        assert got == want
        assert rel_err(got, 4.681e16) < 0.001

    def test_reference_moe(self):
        got = g.flops_forward_per_layer(g.MOE_8X17T)
        want = self.oracle((4 + 8 * 2) * 109568**2, 32000, 1, 109568)
        assert got == want
        assert rel_err(got, 1.582e16) < 0.001

    def test_zero_microbatch(self):
        assert g.flops_forward_per_layer(g.DENSE_100T, microbatch=0) == 0

    @given(st.integers(1, 64), st.integers(1, 128), st.integers(1, 4))
    def test_single_expert_moe_equals_dense(self, hidden, seq, b):
        dense = g.DenseTransformerConfig(layers=1, hidden=hidden, heads=1,
                                         vocab=0, seq_len=seq, microbatch=b)
        moe = g.MoEConfig(layers=1, hidden=hidden, heads=1, vocab=0, seq_len=seq,
                          microbatch=b, experts=1, top_k=1)
        assert g.flops_forward_per_layer(dense) == g.flops_forward_per_layer(moe)


class TestActivations:
    def test_reference_working_set(self):
        got = g.activation_bytes_per_device(g.DENSE_100T, 18)
        assert math.isclose(got, 32000 * 244224 * 10 / 18)
        assert rel_err(got, 4.34e9) < 0.001

    def test_no_partitioning(self):
        cfg = g.DENSE_100T
        assert g.activation_bytes_per_device(cfg, 1) == cfg.seq_len * cfg.hidden * 10

    @given(st.integers(1, 36))
    def test_doubling_degree_halves(self, t):
        one = g.activation_bytes_per_device(g.DENSE_100T, t)
        two = g.activation_bytes_per_device(g.DENSE_100T, 2 * t)
        assert math.isclose(one, 2 * two, rel_tol=1e-12)


class TestConfigValidation:
    def test_heads_must_divide_hidden(self):
        with pytest.raises(ValueError):
            g.DenseTransformerConfig(layers=1, hidden=10, heads=3, vocab=0, seq_len=1)

    def test_top_k_bounds(self):
        with pytest.raises(ValueError):
            g.MoEConfig(layers=1, hidden=4, heads=1, vocab=0, seq_len=1,
                        experts=2, top_k=3)

    def test_presets_ship(self):
        assert set(g.MODEL_PRESETS) == {"dense-100t", "moe-8x17t"}
        assert g.MODEL_PRESETS["dense-100t"].layers == 134
        assert g.MODEL_PRESETS["moe-8x17t"].experts == 8

    def test_dict_round_trip(self):
        for cfg in g.MODEL_PRESETS.values():
            assert model_from_dict(model_to_dict(cfg)) == cfg

    def test_unknown_keys_rejected(self):
        with pytest.raises(ConfigError, match="unknown"):
            model_from_dict({"layers": 1, "hidden": 4, "heads": 1, "vocab": 0,
                             "seq_len": 8, "bogus": 3})
        with pytest.raises(ConfigError, match="preset"):
            resolve_model("dense-999t")
