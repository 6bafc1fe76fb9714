# -*- coding: utf-8 -*-
"""
SIRAN Model Module
==================

생성자 G(x̃, z ⊙ A_s)와 어텐션 탭을 노출하는 판별자 D 구성.

생성자:  head_x(conv3x3) / head_z(conv3x3) → concat → conv1x1 → DMRB×n → tail conv3x3
         + x̃ 전역 스킵 (conv1x1, 활성화 없음)
판별자:  stride-2 conv 2단 → DMRB×k (탭) → decoder conv → GAP → MLP → 로짓
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from ..diffnet import Network, forward, load_into, save_checkpoint
from ..diffnet import layers as L
from ..errors import FormatError, ShapeError
from .attention import (
    AttentionMap,
    PolarizedSpatialAttention,
    PsaCache,
    SpatialAttentionCache,
    spatial_attention_forward,
)
from .blocks import add_dmrb
from .config import MANIFEST_NAME, SiranConfig, read_manifest, write_manifest


@dataclass
class GeneratorModel:
    """생성자 네트워크 (입력: x 1채널, z prior_channels, a_s 1채널)"""

    net: Network
    cfg: SiranConfig

    first_layer: str = "head_x.weight"
    hidden_layer: str = ""

    @property
    def params(self) -> Dict[str, np.ndarray]:
        return self.net.params


@dataclass
class DiscriminatorModel:
    """판별자 네트워크와 탭 이름, PSA 모듈"""

    net: Network
    cfg: SiranConfig
    psa: PolarizedSpatialAttention
    taps: List[str] = field(default_factory=list)

    @property
    def params(self) -> Dict[str, np.ndarray]:
        return self.net.params


def build_generator(cfg: SiranConfig, seed: int, dtype: Any = np.float32) -> GeneratorModel:
    c, slope = cfg.base_channels, cfg.leaky_slope
    net = Network(seed=seed, dtype=dtype, name="generator")
    net.add_input("x", 1)

    h = net.add("head_x", L.conv3x3(1, c), "x")
    h = net.add("head_x.act", L.leaky_relu(slope), h)
    if cfg.use_prior:
        net.add_input("z", cfg.prior_channels)
        net.add_input("a_s", 1)
        prior = net.add("prior", L.elementwise_mul(), ["z", "a_s"])
        hz = net.add("head_z", L.conv3x3(cfg.prior_channels, c), prior)
        hz = net.add("head_z.act", L.leaky_relu(slope), hz)
        cat = net.add("heads", L.concat(), [h, hz])
        h = net.add("fuse", L.conv1x1(2 * c, c), cat)

    for i in range(cfg.n_dmrb_g):
        h = add_dmrb(net, f"dmrb{i}", h, c, cfg.rcb_per_dmrb, slope)

    tail = net.add("tail", L.conv3x3(c, 1), h)
    skip = net.add("skip", L.conv1x1(1, 1), "x")
    net.add("out", L.add(), [tail, skip])

    hidden = f"dmrb{cfg.n_dmrb_g // 2}.rcb0.conv_a.weight"
    return GeneratorModel(net=net, cfg=cfg, hidden_layer=hidden)


def build_discriminator(cfg: SiranConfig, seed: int, dtype: Any = np.float32) -> DiscriminatorModel:
    c, slope = cfg.base_channels, cfg.leaky_slope
    net = Network(seed=seed, dtype=dtype, name="discriminator")
    net.add_input("x", 1)

    h = net.add("enc1", L.conv3x3(1, c, stride=2), "x")
    h = net.add("enc1.act", L.leaky_relu(slope), h)
    h = net.add("enc2", L.conv3x3(c, c, stride=2), h)
    h = net.add("enc2.act", L.leaky_relu(slope), h)

    taps: List[str] = []
    for i in range(cfg.n_dmrb_d):
        h = add_dmrb(net, f"dmrb{i}", h, c, cfg.rcb_per_dmrb, slope)
        net.tap(h)
        taps.append(h)

    h = net.add("dec", L.conv3x3(c, c), h)
    h = net.add("dec.act", L.leaky_relu(slope), h)
    h = net.add("gap", L.global_avg_pool(), h)
    h = net.add("mlp1", L.dense(c, cfg.mlp_hidden), h)
    h = net.add("mlp1.act", L.leaky_relu(slope), h)
    net.add("logit", L.dense(cfg.mlp_hidden, 1), h)

    psa_module = PolarizedSpatialAttention(seed=seed + 1, dtype=dtype)
    return DiscriminatorModel(net=net, cfg=cfg, psa=psa_module, taps=taps)


def build_siran(cfg: SiranConfig, seed: int, dtype: Any = np.float32) -> Tuple[GeneratorModel, DiscriminatorModel]:
    """생성자(seed)와 판별자(seed+1, PSA seed+2) 구성"""
    return build_generator(cfg, seed, dtype), build_discriminator(cfg, seed + 1, dtype)


# =============================================================================
# 순전파
# =============================================================================


def generator_inputs(
    G: GeneratorModel, x: np.ndarray, z: Optional[np.ndarray], A_s: Optional[AttentionMap]
) -> Dict[str, np.ndarray]:
    inputs = {"x": x}
    if not G.cfg.use_prior:
        return inputs
    if z is None:
        raise ShapeError("generator built with a prior needs z")
    if A_s is None:
        A_s = AttentionMap.ones(x.shape[0], z.shape[2], z.shape[3])
    if A_s.shape != tuple(z.shape[2:]):
        raise ShapeError(f"A_s shape {A_s.shape} != prior spatial shape {tuple(z.shape[2:])}")
    inputs["z"] = z
    inputs["a_s"] = A_s.as_channel()
    return inputs


def generator_forward(
    G: GeneratorModel, x: np.ndarray, z: Optional[np.ndarray], A_s: Optional[AttentionMap]
) -> np.ndarray:
    """ŷ = G(x̃, z ⊙ A_s)"""
    acts = forward(G.net, generator_inputs(G, x, z, A_s))
    return acts["out"]


@dataclass
class AttentionTrace:
    """A_s 계산 과정의 캐시 (VJP용)"""

    d_activations: Dict[str, np.ndarray]
    dsa: AttentionMap
    dsa_cache: SpatialAttentionCache
    attention: AttentionMap
    psa_cache: Optional[PsaCache] = None


def discriminator_attention(
    D: DiscriminatorModel, x: np.ndarray, use_psa: bool = True
) -> AttentionTrace:
    """A_s = PSA(D_SA(taps of D on x̃)), 탭은 x̃ 해상도로 리사이즈"""
    acts = forward(D.net, {"x": x})
    size = (int(x.shape[2]), int(x.shape[3]))
    dsa, dsa_cache = spatial_attention_forward([acts[t] for t in D.taps], size)
    if use_psa:
        attention, psa_cache = D.psa.apply(dsa)
        return AttentionTrace(acts, dsa, dsa_cache, attention, psa_cache)
    return AttentionTrace(acts, dsa, dsa_cache, dsa)


# =============================================================================
# 저장/적재
# =============================================================================


def save_models(G: GeneratorModel, D: DiscriminatorModel, seed: int, out_dir: Union[str, Path]) -> Path:
    """SDNC 체크포인트 3개 + model.manifest"""
    out = Path(out_dir)
    save_checkpoint(G.params, out / "generator.sdnc")
    save_checkpoint(D.params, out / "discriminator.sdnc")
    save_checkpoint(D.psa.params, out / "psa.sdnc")
    fingerprints = {
        "generator": G.net.fingerprint(),
        "discriminator": D.net.fingerprint(),
        "psa": D.psa.net.fingerprint(),
    }
    return write_manifest(G.cfg, seed, fingerprints, out / MANIFEST_NAME)


def load_models(in_dir: Union[str, Path]) -> Tuple[GeneratorModel, DiscriminatorModel, int]:
    """manifest로 재구성 후 체크포인트 적재, 지문 검증"""
    src = Path(in_dir)
    manifest = read_manifest(src / MANIFEST_NAME)
    cfg, seed = manifest["config"], manifest["seed"]
    G, D = build_siran(cfg, seed)
    load_into(G.net, src / "generator.sdnc")
    load_into(D.net, src / "discriminator.sdnc")
    load_into(D.psa.net, src / "psa.sdnc")

    actual = {"generator": G.net, "discriminator": D.net, "psa": D.psa.net}
    for name, expected in manifest["fingerprints"].items():
        if name in actual and actual[name].fingerprint() != expected:
            raise FormatError(f"{src}: fingerprint mismatch for {name}")
    return G, D, seed
