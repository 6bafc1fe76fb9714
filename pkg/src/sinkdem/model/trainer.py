# -*- coding: utf-8 -*-
"""
SIRAN Trainer Module
====================

한 번의 학습 스텝: 판별자 1회 갱신 → 갱신된 D로 A_s 재계산 → 생성자 1회 갱신.

판별자 목적함수: adversarial + λ_DA · ‖D_SA(x̃) - D_SA(y)‖²
생성자 목적함수: λ_P L_P + λ_str L_str + λ_ADV L_ADV + λ_OT L_OT
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Mapping, Optional, Tuple

import numpy as np

from ..data.metrics import MetricsRecord
from ..diffnet import AdamState, adam_step, backward, forward, spectral_norm
from ..errors import TrainingDivergedError
from ..losses import (
    LossValue,
    LossWeights,
    OtMode,
    SsimConfig,
    adv_d_loss,
    adv_g_loss,
    da_loss,
    discriminator_total,
    generator_total,
    pixel_loss,
    sinkhorn_batch_loss,
    ssim_loss,
)
from ..ot import SinkhornConfig
from .attention import AttentionMap, spatial_attention_forward, spatial_attention_vjp
from .siran import (
    AttentionTrace,
    DiscriminatorModel,
    GeneratorModel,
    discriminator_attention,
    generator_forward,
    generator_inputs,
)

logger = logging.getLogger(__name__)

Grads = Dict[str, np.ndarray]
Observer = Callable[[str, Dict[str, Any]], None]


@dataclass
class TrainOptions:
    """학습 스텝 옵션 (모듈 제거 실험 플래그 포함)"""

    use_attention: bool = True
    use_psa: bool = True
    use_sinkhorn: bool = True
    detach_attention: bool = True
    ot_mode: OtMode = OtMode.BATCH
    sinkhorn: SinkhornConfig = field(default_factory=SinkhornConfig)
    ssim: SsimConfig = field(default_factory=SsimConfig)
    spec_iters: int = 20
    spec_seed: int = 0


@dataclass
class SiranOptimizers:
    """생성자/판별자/PSA Adam 상태

    d_attention: detach_attention=false 일 때 생성자 목적함수가 판별자를 움직이는
    갱신 전용 상태. opt.d 의 스텝 카운터는 스텝당 한 번만 증가한다.
    """

    g: AdamState
    d: AdamState
    psa: AdamState
    d_attention: AdamState

    @classmethod
    def create(cls, G: GeneratorModel, D: DiscriminatorModel, lr: float) -> "SiranOptimizers":
        return cls(
            g=AdamState.for_params(G.params, lr),
            d=AdamState.for_params(D.params, lr),
            psa=AdamState.for_params(D.psa.params, lr),
            d_attention=AdamState.for_params(D.params, lr),
        )


def _check(term: str, value: float, epoch: int) -> None:
    if not math.isfinite(value):
        raise TrainingDivergedError(term, value, iteration=epoch)


def _accumulate(total: Grads, extra: Grads) -> Grads:
    for name, g in extra.items():
        total[name] = total[name] + g
    return total


def _logit_grad(grad: np.ndarray, like: np.ndarray) -> np.ndarray:
    return np.asarray(grad).reshape(like.shape).astype(like.dtype)


def _dsa_of(D: DiscriminatorModel, acts: Dict[str, np.ndarray], size: Tuple[int, int]) -> Any:
    return spatial_attention_forward([acts[t] for t in D.taps], size)


def discriminator_update(
    G: GeneratorModel,
    D: DiscriminatorModel,
    batch: Mapping[str, np.ndarray],
    opt: SiranOptimizers,
    w: LossWeights,
    options: TrainOptions,
    epoch: int = 0,
) -> Dict[str, float]:
    """D 한 번 갱신, 손실 항 값 반환"""
    x, y, z = batch["x"], batch["y"], batch.get("z")
    size = (int(x.shape[2]), int(x.shape[3]))

    use_attention = options.use_attention and G.cfg.use_prior
    trace: Optional[AttentionTrace] = None
    if use_attention:
        trace = discriminator_attention(D, x, options.use_psa)
    y_hat = generator_forward(G, x, z, trace.attention if trace else None)

    acts_real = forward(D.net, {"x": y})
    acts_fake = forward(D.net, {"x": y_hat})
    adv = adv_d_loss(acts_real["logit"], acts_fake["logit"])
    _check("L_D", adv.value, epoch)

    da: Optional[LossValue] = None
    acts_x: Optional[Dict[str, np.ndarray]] = None
    dsa_cache = None
    if w.lambda_DA > 0:
        acts_x = trace.d_activations if trace else forward(D.net, {"x": x})
        dsa_x, dsa_cache = _dsa_of(D, acts_x, size)
        dsa_y, _ = _dsa_of(D, acts_real, size)
        da = da_loss(dsa_x, dsa_y)
        _check("L_DA", da.value, epoch)

    bundle = discriminator_total(adv, da, w.lambda_DA)
    grads, _ = backward(D.net, acts_real, _logit_grad(bundle.grads["real"], acts_real["logit"]))
    fake_grads, _ = backward(D.net, acts_fake, _logit_grad(bundle.grads["fake"], acts_fake["logit"]))
    _accumulate(grads, fake_grads)
    if da is not None and acts_x is not None and dsa_cache is not None:
        tap_grads = spatial_attention_vjp(dsa_cache, bundle.grads["da"])
        da_grads, _ = backward(D.net, acts_x, dict(zip(D.taps, tap_grads)))
        _accumulate(grads, da_grads)

    adam_step(D.params, grads, opt.d)
    return {"L_D": bundle.value, "L_DA": da.value if da is not None else 0.0}


def train_step(
    batch: Mapping[str, np.ndarray],
    models: Tuple[GeneratorModel, DiscriminatorModel],
    opt: SiranOptimizers,
    w: LossWeights,
    options: Optional[TrainOptions] = None,
    *,
    epoch: int = 0,
    observer: Optional[Observer] = None,
) -> MetricsRecord:
    """판별자 1회 → 생성자 1회 갱신, 손실 항과 기울기 스펙트럴 노름 반환

    batch: {"x": (N,1,H,W) 저해상 입력, "z": (N,C,H,W) prior, "y": (N,1,H,W) 정답}
    """
    options = options or TrainOptions()
    G, D = models
    dtype = G.net.dtype
    data = {k: np.asarray(v, dtype=dtype) for k, v in batch.items() if v is not None}
    x, y, z = data["x"], data["y"], data.get("z")

    d_losses = discriminator_update(G, D, data, opt, w, options, epoch)
    if observer is not None:
        observer("discriminator_updated", {"generator": G, "discriminator": D})

    # 갱신된 D로 A_s 재계산
    use_attention = options.use_attention and G.cfg.use_prior
    trace = discriminator_attention(D, x, options.use_psa) if use_attention else None
    A_s: Optional[AttentionMap] = trace.attention if trace else None

    acts_g = forward(G.net, generator_inputs(G, x, z, A_s))
    y_hat = acts_g["out"]

    parts: Dict[str, Optional[LossValue]] = {"L_P": pixel_loss(y_hat, y)}
    if w.lambda_str > 0 or min(y.shape[2:]) >= options.ssim.window_size:
        parts["L_str"] = ssim_loss(y_hat, y, options.ssim)

    acts_f = forward(D.net, {"x": y_hat})
    adv = adv_g_loss(acts_f["logit"])
    adv_grad = np.zeros_like(y_hat)
    if w.lambda_ADV > 0:
        _, in_grads = backward(D.net, acts_f, _logit_grad(adv.grad, acts_f["logit"]))
        adv_grad = in_grads["x"]
    parts["L_ADV"] = LossValue(value=adv.value, grad=adv_grad)

    if options.use_sinkhorn and w.lambda_OT > 0:
        parts["L_OT"] = sinkhorn_batch_loss(y_hat, y, options.sinkhorn, options.ot_mode)

    for term, part in parts.items():
        if part is not None:
            _check(term, part.value, epoch)

    total = generator_total(parts, w)
    _check("L_G", total.value, epoch)
    g_grads, g_inputs = backward(G.net, acts_g, total.grad.astype(dtype))

    # A_s 경로: PSA 파라미터, 선택적으로 판별자 탭까지
    psa_grads: Optional[Grads] = None
    d_grads: Optional[Grads] = None
    if trace is not None and "a_s" in g_inputs:
        g_map = g_inputs["a_s"][:, 0].astype(np.float64)
        if trace.psa_cache is not None:
            psa_grads, g_map = D.psa.vjp(trace.psa_cache, g_map)
        if not options.detach_attention:
            tap_grads = spatial_attention_vjp(trace.dsa_cache, g_map)
            d_grads, _ = backward(D.net, trace.d_activations, dict(zip(D.taps, tap_grads)))

    if observer is not None:
        observer("generator_gradients", {"grads": g_grads, "psa_grads": psa_grads})

    adam_step(G.params, g_grads, opt.g)
    if psa_grads is not None:
        adam_step(D.psa.params, psa_grads, opt.psa)
    if d_grads is not None:
        adam_step(D.params, d_grads, opt.d_attention)

    pixel = parts["L_P"]
    structural = parts.get("L_str")
    transport = parts.get("L_OT")
    record = MetricsRecord(
        epoch=epoch,
        mse=pixel.value if pixel is not None else None,
        g_first=spectral_norm(g_grads[G.first_layer], options.spec_iters, options.spec_seed),
        g_hidden=spectral_norm(g_grads[G.hidden_layer], options.spec_iters, options.spec_seed),
        L_P=pixel.value if pixel is not None else None,
        L_str=structural.value if structural is not None else None,
        L_ADV=adv.value,
        L_OT=transport.value if transport is not None else 0.0,
        L_DA=d_losses["L_DA"],
    )
    logger.debug(
        "train_step epoch=%d L_P=%.6g L_ADV=%.6g L_OT=%.6g L_DA=%.6g g_hidden=%.4g",
        epoch, record.L_P, record.L_ADV, record.L_OT, record.L_DA, record.g_hidden,
    )
    return record
