# -*- coding: utf-8 -*-
"""
MNIST Denoising Module
======================

가우시안 잡음을 더한 MNIST 복원으로 학습 방식 비교.

생성자: 인코더/디코더 각 2개 합성곱 층의 오토인코더 (또는 토이 SIRAN)
판별자: 은닉 1024, 256 뉴런의 3층 완전연결 ReLU 네트워크
갱신: 생성자 1회당 판별자 1회, 에포크마다 테스트 MSE로 target_mse 도달 판정
"""

import logging
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from ..config import settings
from ..data import MetricsRecord, eval_metrics, load_mnist
from ..diffnet import AdamState, Network, adam_step, backward, forward, save_checkpoint, spectral_norm
from ..diffnet import layers as L
from ..errors import NumericalFailureError, ShapeError, TrainingDivergedError
from ..losses import LossValue, LossWeights, generator_total, pixel_loss, sinkhorn_batch_loss, ssim_loss
from ..model import (
    SiranOptimizers,
    TrainOptions,
    build_siran,
    discriminator_attention,
    generator_forward,
    save_models,
    train_step,
)
from ..ot import SinkhornConfig
from .config import ExperimentConfig
from .objectives import clip_weights, discriminator_pair, generator_adversarial, penalty_terms
from .runner import RunResult, mean_record, run_dir, write_run

logger = logging.getLogger(__name__)

Grads = Dict[str, np.ndarray]

LEAKY_SLOPE = 0.2


# =============================================================================
# 데이터
# =============================================================================


@dataclass
class DenoiseData:
    """깨끗한 이미지 (N, 1, H, W), [0,1]"""

    train: np.ndarray
    test: np.ndarray

    def __post_init__(self) -> None:
        for name in ("train", "test"):
            arr = getattr(self, name)
            if arr.ndim != 4 or arr.shape[1] != 1:
                raise ShapeError(f"{name} images must be (N, 1, H, W), got {arr.shape}")
        if self.train.shape[2:] != self.test.shape[2:]:
            raise ShapeError(f"train {self.train.shape[2:]} and test {self.test.shape[2:]} sizes differ")


def load_denoise_data(cfg: ExperimentConfig, directory: Optional[Union[str, Path]] = None) -> DenoiseData:
    """MNIST 학습/테스트 분할의 앞부분 subset"""
    root = directory if directory is not None else settings.mnist_dir
    train = load_mnist(root, "train")
    test = load_mnist(root, "test")
    if cfg.subset_size is not None:
        train = train.subset(cfg.subset_size)
    if cfg.test_subset_size is not None:
        test = test.subset(cfg.test_subset_size)
    return DenoiseData(train=train.images[:, None], test=test.images[:, None])


def add_noise(clean: np.ndarray, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """가산 가우시안 잡음 후 [0,1] 클램프"""
    noisy = clean + sigma * rng.standard_normal(clean.shape)
    return np.clip(noisy, 0.0, 1.0).astype(clean.dtype)


# =============================================================================
# 네트워크
# =============================================================================


def build_autoencoder(channels: Sequence[int] = (16, 32), seed: int = 0, dtype: object = np.float32) -> Network:
    """stride-2 합성곱 2개 → (업샘플 + 합성곱) 2개 → sigmoid"""
    c1, c2 = channels
    net = Network(seed=seed, dtype=dtype, name="autoencoder")
    net.add_input("x", 1)
    h = net.add("enc1", L.conv3x3(1, c1, stride=2), "x")
    h = net.add("enc1.act", L.leaky_relu(LEAKY_SLOPE), h)
    h = net.add("enc2", L.conv3x3(c1, c2, stride=2), h)
    h = net.add("enc2.act", L.leaky_relu(LEAKY_SLOPE), h)
    h = net.add("up1", L.upsample_bilinear(2), h)
    h = net.add("dec1", L.conv3x3(c2, c1), h)
    h = net.add("dec1.act", L.leaky_relu(LEAKY_SLOPE), h)
    h = net.add("up2", L.upsample_bilinear(2), h)
    h = net.add("dec2", L.conv3x3(c1, 1), h)
    net.add("out", L.sigmoid(), h)
    return net


def build_mlp_discriminator(
    in_features: int, hidden: Sequence[int] = (1024, 256), seed: int = 0, dtype: object = np.float32
) -> Network:
    """flatten → fc1 → ReLU → fc2 → ReLU → out (로짓)"""
    h1, h2 = hidden
    net = Network(seed=seed, dtype=dtype, name="mlp_discriminator")
    net.add_input("x", 1)
    h = net.add("flat", L.flatten(), "x")
    h = net.add("fc1", L.dense(in_features, h1), h)
    h = net.add("fc1.act", L.relu(), h)
    h = net.add("fc2", L.dense(h1, h2), h)
    h = net.add("fc2.act", L.relu(), h)
    net.add("out", L.dense(h2, 1), h)
    return net


@dataclass
class AutoencoderModels:
    """오토인코더 생성자 + MLP 판별자와 Adam 상태"""

    generator: Network
    discriminator: Network
    opt_g: AdamState
    opt_d: AdamState
    first_layer: str = "enc1.weight"
    hidden_layer: str = "enc2.weight"

    @classmethod
    def create(cls, cfg: ExperimentConfig, image_shape: Sequence[int], dtype: object = np.float32) -> "AutoencoderModels":
        H, W = int(image_shape[0]), int(image_shape[1])
        if H % 4 or W % 4:
            raise ShapeError(f"autoencoder needs image sides divisible by 4, got {H}×{W}")
        G = build_autoencoder(cfg.ae_channels, seed=cfg.seed, dtype=dtype)
        D = build_mlp_discriminator(H * W, cfg.disc_hidden, seed=cfg.seed + 1, dtype=dtype)
        return cls(
            generator=G,
            discriminator=D,
            opt_g=AdamState.for_params(G.params, cfg.learning_rate),
            opt_d=AdamState.for_params(D.params, cfg.learning_rate),
        )


# =============================================================================
# 학습 스텝
# =============================================================================


def _check(term: str, value: float, epoch: int) -> None:
    if not np.isfinite(value):
        raise TrainingDivergedError(term, value, iteration=epoch)


def _add(total: Grads, extra: Grads) -> Grads:
    for name, g in extra.items():
        total[name] = total[name] + g
    return total


def autoencoder_step(
    models: AutoencoderModels,
    x: np.ndarray,
    y: np.ndarray,
    cfg: ExperimentConfig,
    sink: SinkhornConfig,
    w: LossWeights,
    rng: np.random.Generator,
    epoch: int = 0,
) -> MetricsRecord:
    """판별자 1회 → 생성자 1회 갱신"""
    G, D, method = models.generator, models.discriminator, cfg.method

    acts_g = forward(G, {"x": x})
    y_hat = acts_g["out"]

    # 판별자 (비평가)
    acts_r = forward(D, {"x": y})
    acts_f = forward(D, {"x": y_hat})
    pair = discriminator_pair(method, acts_r["out"], acts_f["out"])
    d_value = pair.value
    grads, _ = backward(D, acts_r, pair.real.grad)
    _add(grads, backward(D, acts_f, pair.fake.grad)[0])
    if method == "wgan_gp":
        gp_value, gp_grads = penalty_terms(D, y, y_hat, cfg.gp_lambda, rng)
        d_value += gp_value
        _add(grads, gp_grads)
    _check("L_D", d_value, epoch)
    adam_step(D.params, grads, models.opt_d)
    if method == "wgan":
        clip_weights(D, cfg.clip_c)

    # 생성자 (갱신된 D 기준)
    acts_f = forward(D, {"x": y_hat})
    adv = generator_adversarial(method, acts_f["out"])
    _, in_grads = backward(D, acts_f, adv.grad)

    parts: Dict[str, Optional[LossValue]] = {
        "L_P": pixel_loss(y_hat, y),
        "L_ADV": LossValue(value=adv.value, grad=in_grads["x"]),
    }
    if w.lambda_str > 0:
        parts["L_str"] = ssim_loss(y_hat, y)
    if method == "sinkhorn_gan" and w.lambda_OT > 0:
        parts["L_OT"] = sinkhorn_batch_loss(y_hat, y, sink, cfg.ot)
    for term, part in parts.items():
        if part is not None:
            _check(term, part.value, epoch)

    total = generator_total(parts, w)
    _check("L_G", total.value, epoch)
    g_grads, _ = backward(G, acts_g, total.grad)
    adam_step(G.params, g_grads, models.opt_g)

    structural, transport = parts.get("L_str"), parts.get("L_OT")
    return MetricsRecord(
        epoch=epoch,
        g_first=spectral_norm(g_grads[models.first_layer], cfg.spec_iters),
        g_hidden=spectral_norm(g_grads[models.hidden_layer], cfg.spec_iters),
        L_P=parts["L_P"].value if parts["L_P"] is not None else None,
        L_str=structural.value if structural is not None else None,
        L_ADV=adv.value,
        L_OT=transport.value if transport is not None else 0.0,
    )


# =============================================================================
# 학습 루프
# =============================================================================


class DenoiseTrainer:
    """한 (방법, ε, 시드) 실행의 모델/옵티마이저/스텝 묶음"""

    def __init__(self, cfg: ExperimentConfig, data: DenoiseData):
        self.cfg = cfg
        self.data = data
        self.dtype = np.dtype(settings.float_dtype)
        self.rng = np.random.default_rng(cfg.seed)
        self.train = data.train.astype(self.dtype)
        # 테스트 잡음은 실행 동안 고정
        self.test_noisy = add_noise(
            data.test.astype(self.dtype), cfg.noise_sigma, np.random.default_rng((cfg.seed, 1))
        )
        self.sink = cfg.sinkhorn()
        self.weights = cfg.weights()
        if cfg.denoise_architecture == "siran":
            self._init_siran()
        else:
            self.models = AutoencoderModels.create(cfg, self.train.shape[2:], self.dtype)

    def _init_siran(self) -> None:
        cfg = self.cfg
        self.siran_cfg = cfg.siran()
        self.G, self.D = build_siran(self.siran_cfg, cfg.seed, self.dtype)
        self.opt = SiranOptimizers.create(self.G, self.D, cfg.learning_rate)
        self.options = TrainOptions(
            use_attention=cfg.use_attention,
            use_psa=cfg.use_psa,
            use_sinkhorn=cfg.use_sinkhorn and cfg.method == "sinkhorn_gan",
            detach_attention=cfg.detach_attention,
            ot_mode=cfg.ot,
            sinkhorn=self.sink,
            spec_iters=cfg.spec_iters,
        )

    @property
    def is_siran(self) -> bool:
        return self.cfg.denoise_architecture == "siran"

    def _prior(self, x: np.ndarray) -> np.ndarray:
        """잡음 이미지를 prior 채널 수만큼 복제"""
        return np.repeat(x, self.siran_cfg.prior_channels, axis=1)

    def step(self, x: np.ndarray, y: np.ndarray, epoch: int) -> MetricsRecord:
        if self.is_siran:
            batch = {"x": x, "z": self._prior(x), "y": y}
            return train_step(batch, (self.G, self.D), self.opt, self.weights, self.options, epoch=epoch)
        return autoencoder_step(self.models, x, y, self.cfg, self.sink, self.weights, self.rng, epoch)

    def predict(self, x: np.ndarray) -> np.ndarray:
        if self.is_siran:
            trace = None
            if self.options.use_attention and self.siran_cfg.use_prior:
                trace = discriminator_attention(self.D, x, self.options.use_psa)
            return generator_forward(self.G, x, self._prior(x), trace.attention if trace else None)
        return forward(self.models.generator, {"x": x})["out"]

    def evaluate(self) -> MetricsRecord:
        chunk = max(self.cfg.batch, 256)
        noisy = self.test_noisy
        pred = np.concatenate([self.predict(noisy[i:i + chunk]) for i in range(0, noisy.shape[0], chunk)])
        return eval_metrics(pred, self.data.test)

    def fit(self) -> RunResult:
        """target_mse 또는 max_epochs까지 학습, 발산 시 실패 행 기록"""
        cfg = self.cfg
        result = RunResult(name=cfg.name, method=cfg.method, seed=cfg.seed, epsilon=cfg.epsilon)
        started = time.perf_counter()

        def clock() -> float:
            return time.perf_counter() - started if cfg.record_wallclock else 0.0

        n = self.train.shape[0]
        for epoch in range(1, cfg.max_epochs + 1):
            try:
                order = self.rng.permutation(n)
                steps: List[MetricsRecord] = []
                for start in range(0, n, cfg.batch):
                    y = self.train[order[start:start + cfg.batch]]
                    x = add_noise(y, cfg.noise_sigma, self.rng)
                    steps.append(self.step(x, y, epoch))
                record = mean_record(steps, epoch).merge(self.evaluate())
            except NumericalFailureError as exc:
                logger.warning(
                    "denoise diverged name=%s method=%s seed=%d epoch=%d error=%s",
                    cfg.name, cfg.method, cfg.seed, epoch, exc,
                )
                result.records.append(MetricsRecord.failure(epoch, clock()))
                result.failed = True
                break

            record = replace(record, wallclock_s=clock())
            result.records.append(record)
            logger.info(
                "denoise name=%s method=%s eps=%g seed=%d epoch=%d mse=%.6g g_first=%.4g g_hidden=%.4g",
                cfg.name, cfg.method, cfg.epsilon, cfg.seed, epoch, record.mse, record.g_first, record.g_hidden,
            )
            if record.mse is not None and record.mse <= cfg.target_mse:
                result.epochs_to_target = epoch
                break
        return result

    def save(self, out: Path) -> None:
        """SDNC 체크포인트 (SIRAN은 manifest 포함)"""
        if self.is_siran:
            save_models(self.G, self.D, self.cfg.seed, out)
            return
        save_checkpoint(self.models.generator.params, out / "generator.sdnc")
        save_checkpoint(self.models.discriminator.params, out / "discriminator.sdnc")


def run_denoise(
    cfg: ExperimentConfig,
    out: Optional[Union[str, Path]] = None,
    data: Optional[DenoiseData] = None,
) -> RunResult:
    """학습 후 runs/<name>/ 에 metrics.csv, config.echo, 체크포인트 기록"""
    data = data if data is not None else load_denoise_data(cfg)
    trainer = DenoiseTrainer(cfg, data)
    result = trainer.fit()
    out_dir = write_run(result, cfg, run_dir(cfg, out))
    if not result.failed:
        trainer.save(out_dir)
    return result
