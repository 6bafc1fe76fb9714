# -*- coding: utf-8 -*-
"""
SIRAN Model Unit Tests
======================
"""

import numpy as np
import pytest

from src.sinkdem.diffnet import backward, forward, save_checkpoint
from src.sinkdem.errors import ConfigError, FormatError, ShapeError, ValidationError
from src.sinkdem.model import (
    MANIFEST_NAME,
    AttentionMap,
    PolarizedSpatialAttention,
    SiranConfig,
    build_generator,
    build_siran,
    d_spatial_attention,
    discriminator_attention,
    generator_forward,
    generator_inputs,
    load_models,
    psa,
    read_manifest,
    save_models,
    spatial_attention_forward,
    spatial_attention_vjp,
)

TINY = SiranConfig(base_channels=4, n_dmrb_g=1, n_dmrb_d=2, rcb_per_dmrb=2, mlp_hidden=8)


def _batch(n: int = 2, size: int = 8, seed: int = 0):
    rng = np.random.default_rng(seed)
    x = rng.random((n, 1, size, size)).astype(np.float32)
    z = rng.random((n, 3, size, size)).astype(np.float32)
    return x, z


class TestSiranConfig:
    """아키텍처 설정 테스트"""

    def test_rejects_non_positive(self):
        """0 채널 거부"""
        with pytest.raises(ConfigError):
            SiranConfig(base_channels=0)

    def test_rejects_bad_slope(self):
        """LReLU 기울기 범위"""
        with pytest.raises(ConfigError):
            SiranConfig(leaky_slope=1.5)

    def test_toy_preset(self):
        """데스크 규모 기본값"""
        assert SiranConfig.toy().base_channels == 32
        assert SiranConfig.toy(n_dmrb_g=2).n_dmrb_g == 2


class TestArchitecture:
    """생성자/판별자 구성 테스트"""

    def test_generator_output_shape(self):
        """ŷ 형상 = x̃ 형상"""
        G, D = build_siran(TINY, seed=0)
        x, z = _batch()
        trace = discriminator_attention(D, x)
        y_hat = generator_forward(G, x, z, trace.attention)
        assert y_hat.shape == x.shape
        assert y_hat.dtype == np.float32

    def test_generator_without_prior(self):
        """prior 없는 생성자는 x만 입력"""
        G, _ = build_siran(SiranConfig(base_channels=4, n_dmrb_g=1, n_dmrb_d=1, rcb_per_dmrb=1,
                                       use_prior=False), seed=0)
        x, _ = _batch()
        assert set(generator_inputs(G, x, None, None)) == {"x"}
        assert generator_forward(G, x, None, None).shape == x.shape

    def test_prior_required(self):
        """prior 생성자에 z 누락"""
        G, _ = build_siran(TINY, seed=0)
        x, _ = _batch()
        with pytest.raises(ShapeError):
            generator_inputs(G, x, None, None)

    def test_attention_shape_mismatch(self):
        """A_s 해상도 불일치"""
        G, _ = build_siran(TINY, seed=0)
        x, z = _batch()
        with pytest.raises(ShapeError):
            generator_inputs(G, x, z, AttentionMap.ones(2, 4, 4))

    def test_attention_in_unit_interval(self):
        """A_s ∈ [0,1], 해상도 = x̃"""
        _, D = build_siran(TINY, seed=3)
        x, _ = _batch(size=12)
        for use_psa in (True, False):
            trace = discriminator_attention(D, x, use_psa)
            values = trace.attention.values
            assert trace.attention.shape == (12, 12)
            assert values.min() >= 0.0 and values.max() <= 1.0

    def test_taps_one_per_dmrb(self):
        """판별자 탭 수 = DMRB 수"""
        _, D = build_siran(TINY, seed=0)
        assert len(D.taps) == TINY.n_dmrb_d
        assert D.taps == D.net.taps

    def test_seeding(self):
        """같은 seed → 같은 지문, G/D/PSA 시드 분리"""
        G1, D1 = build_siran(TINY, seed=4)
        G2, D2 = build_siran(TINY, seed=4)
        assert G1.net.fingerprint() == G2.net.fingerprint()
        assert D1.net.fingerprint() == D2.net.fingerprint()
        assert D1.psa.net.seed == 6
        G3, _ = build_siran(TINY, seed=5)
        assert G3.net.fingerprint() != G1.net.fingerprint()

    def test_hidden_layer_exists(self):
        """기울기 프로브 대상 층 존재"""
        G, _ = build_siran(TINY, seed=0)
        assert G.first_layer in G.params
        assert G.hidden_layer in G.params

    def test_global_skip_identity(self):
        """스킵 외 가중치 0, 스킵 conv1x1 = 항등 → ŷ = x̃"""
        G, D = build_siran(TINY, seed=0)
        for value in G.params.values():
            value[...] = 0.0
        G.params["skip.weight"][...] = 1.0
        x, z = _batch()
        a_s = discriminator_attention(D, x).attention
        assert np.array_equal(generator_forward(G, x, z, a_s), x)

    def test_parameter_count_formula(self):
        """생성자 파라미터 수 = 층별 닫힌 식"""

        def conv3(a, b):
            return 9 * a * b + b

        def conv1(a, b):
            return a * b + b

        for cfg in (TINY, SiranConfig.toy()):
            c, n = cfg.base_channels, cfg.rcb_per_dmrb
            dmrb = n * 2 * conv3(c, c)
            dmrb += sum(conv1((i + 1) * c, c) for i in range(1, n))
            dmrb += conv1((n + 1) * c, c)
            expected = (
                conv3(1, c) + conv3(cfg.prior_channels, c) + conv1(2 * c, c)
                + cfg.n_dmrb_g * dmrb + conv3(c, 1) + conv1(1, 1)
            )
            assert build_generator(cfg, seed=0).net.parameter_count() == expected

    def test_prior_head_receives_gradient(self):
        """z ⊙ A_s 경로로 prior head까지 기울기 전달, A_s = 0이면 차단"""
        G, _ = build_siran(TINY, seed=1)
        x, z = _batch(seed=2)
        y = np.random.default_rng(3).random(x.shape).astype(np.float32)
        a_s = AttentionMap(np.random.default_rng(4).random((2, 8, 8)).astype(np.float32))

        acts = forward(G.net, generator_inputs(G, x, z, a_s))
        grads, _ = backward(G.net, acts, 2.0 * (acts["out"] - y) / y.size)
        assert np.linalg.norm(grads["head_z.weight"]) > 0.0

        zero = AttentionMap(np.zeros((2, 8, 8), dtype=np.float32))
        acts = forward(G.net, generator_inputs(G, x, z, zero))
        grads, _ = backward(G.net, acts, 2.0 * (acts["out"] - y) / y.size)
        assert not np.any(grads["head_z.weight"])


class TestSpatialAttention:
    """D_SA 테스트"""

    def test_normalized_extremes(self):
        """최소 0, 최대 1"""
        tap = np.random.default_rng(0).standard_normal((2, 3, 5, 5))
        values = d_spatial_attention([tap]).values
        assert np.allclose(values.reshape(2, -1).min(axis=1), 0.0)
        assert np.allclose(values.reshape(2, -1).max(axis=1), 1.0)

    def test_constant_map_is_zero(self):
        """상수 탭 → 0 맵"""
        values = d_spatial_attention([np.ones((1, 2, 4, 4))]).values
        assert not np.any(values)

    def test_channel_absolute_sum(self):
        """채널 절대값 합의 순서 보존"""
        tap = np.zeros((1, 2, 1, 3))
        tap[0, 0, 0] = [1.0, -2.0, 0.5]
        tap[0, 1, 0] = [-1.0, 0.0, 0.5]
        values = d_spatial_attention([tap]).values[0, 0]
        assert values[1] == pytest.approx(1.0)
        assert values[2] == pytest.approx(0.0)
        assert values[0] == pytest.approx(1.0)

    def test_rejects_out_of_range_map(self):
        """[0,1] 밖 값 거부"""
        with pytest.raises(ValidationError):
            AttentionMap(np.full((1, 2, 2), 1.5))

    def test_requires_taps(self):
        """탭 없음"""
        with pytest.raises(ValidationError):
            d_spatial_attention([])

    def test_vjp_matches_finite_difference(self):
        """서로 다른 해상도 탭의 VJP vs 중심 차분"""
        rng = np.random.default_rng(1)
        taps = [rng.standard_normal((1, 2, 6, 6)), rng.standard_normal((1, 3, 3, 3))]
        W = rng.standard_normal((1, 6, 6))

        def objective(ts):
            attention, _ = spatial_attention_forward(ts, (6, 6))
            return float(np.sum(W * attention.values))

        _, cache = spatial_attention_forward(taps, (6, 6))
        grads = spatial_attention_vjp(cache, W)
        h = 1e-6
        for t, idx in ((0, (0, 1, 2, 3)), (1, (0, 2, 1, 1)), (0, (0, 0, 5, 0))):
            plus = [a.copy() for a in taps]
            minus = [a.copy() for a in taps]
            plus[t][idx] += h
            minus[t][idx] -= h
            fd = (objective(plus) - objective(minus)) / (2 * h)
            assert grads[t][idx] == pytest.approx(fd, rel=1e-5, abs=1e-8)


class TestPsa:
    """PSA 테스트"""

    def test_resolution_preserved(self):
        """출력 해상도 = 입력 해상도, [0,1] 범위"""
        module = PolarizedSpatialAttention(seed=0)
        a = AttentionMap(np.random.default_rng(0).random((2, 7, 5)).astype(np.float32))
        module_out, _ = module.apply(a)
        assert module_out.shape == (7, 5)
        assert module_out.values.min() >= 0.0 and module_out.values.max() <= 1.0

    def test_input_gradient(self):
        """PSA 입력 기울기 vs 중심 차분"""
        rng = np.random.default_rng(1)
        module = PolarizedSpatialAttention(seed=1, dtype=np.float64)
        m = rng.uniform(0.1, 0.9, (1, 4, 4))
        W = rng.standard_normal((1, 4, 4))

        def objective(values):
            out, _ = module.apply(AttentionMap(values))
            return float(np.sum(W * out.values))

        _, cache = module.apply(AttentionMap(m))
        param_grads, g_in = module.vjp(cache, W)
        assert set(param_grads) == set(module.params)
        h = 1e-6
        for idx in ((0, 0, 0), (0, 1, 2), (0, 3, 3)):
            mp, mm = m.copy(), m.copy()
            mp[idx] += h
            mm[idx] -= h
            fd = (objective(mp) - objective(mm)) / (2 * h)
            assert g_in[idx] == pytest.approx(fd, rel=1e-5, abs=1e-8)

    def test_uniform_input_gives_uniform_output(self):
        """상수 맵 → softmax 균등 → 정규화 후 0 맵"""
        module = PolarizedSpatialAttention(seed=0, dtype=np.float64)
        out, _ = module.apply(AttentionMap(np.full((2, 5, 6), 0.4)))
        assert not np.any(out.values)

    def test_hotspot_keeps_argmax(self):
        """단일 우세 지점 → 같은 위치가 출력 최대"""
        rng = np.random.default_rng(5)
        values = rng.uniform(0.0, 0.2, (1, 9, 9))
        values[0, 2, 6] = 1.0
        for seed in range(3):
            out = psa(AttentionMap(values), PolarizedSpatialAttention(seed=seed, dtype=np.float64))
            assert np.unravel_index(np.argmax(out.values[0]), (9, 9)) == (2, 6)
            assert out.values[0, 2, 6] == pytest.approx(1.0)

    def test_output_bounds_random_trials(self):
        """무작위 입력 100회: 출력 ∈ [0,1], 해상도 유지"""
        rng = np.random.default_rng(6)
        for trial in range(100):
            h, w = (int(s) for s in rng.integers(2, 10, size=2))
            module = PolarizedSpatialAttention(seed=trial)
            out = psa(AttentionMap(rng.random((1, h, w)).astype(np.float32)), module)
            assert out.shape == (h, w)
            assert out.values.min() >= 0.0 and out.values.max() <= 1.0


class TestModelPersistence:
    """체크포인트 + manifest 테스트"""

    def test_save_and_load(self, tmp_path):
        """저장 후 재구성 → 같은 지문과 같은 출력"""
        G, D = build_siran(TINY, seed=2)
        save_models(G, D, 2, tmp_path)
        G2, D2, seed = load_models(tmp_path)
        assert seed == 2
        assert G2.cfg == TINY
        x, z = _batch()
        a = discriminator_attention(D, x).attention
        b = discriminator_attention(D2, x).attention
        assert np.array_equal(generator_forward(G, x, z, a), generator_forward(G2, x, z, b))

    def test_manifest_keys(self, tmp_path):
        """manifest: 설정 전 키 + seed + 지문"""
        G, D = build_siran(TINY, seed=0)
        save_models(G, D, 0, tmp_path)
        manifest = read_manifest(tmp_path / MANIFEST_NAME)
        assert manifest["config"] == TINY
        assert set(manifest["fingerprints"]) == {"generator", "discriminator", "psa"}

    def test_fingerprint_mismatch(self, tmp_path):
        """다른 가중치로 바꾼 체크포인트 거부"""
        G, D = build_siran(TINY, seed=0)
        save_models(G, D, 0, tmp_path)
        other, _ = build_siran(TINY, seed=9)
        save_checkpoint(other.params, tmp_path / "generator.sdnc")
        with pytest.raises(FormatError):
            load_models(tmp_path)

    def test_unknown_manifest_key(self, tmp_path):
        """알 수 없는 manifest 키"""
        path = tmp_path / MANIFEST_NAME
        path.write_text("seed=0\ncolour=blue\n", encoding="utf-8")
        with pytest.raises(FormatError):
            read_manifest(path)

    def test_manifest_requires_seed(self, tmp_path):
        """seed 누락"""
        path = tmp_path / MANIFEST_NAME
        path.write_text("base_channels=4\n", encoding="utf-8")
        with pytest.raises(FormatError):
            read_manifest(path)
