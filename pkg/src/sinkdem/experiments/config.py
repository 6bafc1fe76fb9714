# -*- coding: utf-8 -*-
"""
Experiment Config Module
========================

실험 설정 (pydantic 모델, 알 수 없는 키는 오류).

파일 형식: 한 줄에 key=value 하나, '#' 주석, 리스트는 쉼표 구분.
--set 재정의는 파일 파싱 이후 적용되며 config.echo에 그대로 남는다.
"""

from pathlib import Path
from typing import Any, Dict, Iterable, List, Literal, Mapping, Optional, Tuple, Union, get_args, get_origin

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..errors import ConfigError, DataIOError
from ..losses import LossWeights, OtMode
from ..model import SiranConfig
from ..ot import SinkhornConfig

ECHO_NAME = "config.echo"

ExperimentKind = Literal["denoise", "eps_sweep", "baselines", "sr_toy", "ablation", "smoothness"]
Method = Literal["sinkhorn_gan", "gan", "wgan", "wgan_gp"]

ALL_METHODS: Tuple[str, ...] = ("sinkhorn_gan", "gan", "wgan", "wgan_gp")

# 실험 종류별 기본 학습률
DEFAULT_LR = {"denoise": 1e-3, "eps_sweep": 1e-3, "baselines": 1e-3, "sr_toy": 1e-4, "ablation": 1e-4, "smoothness": 1e-3}


class ExperimentConfig(BaseModel):
    """재현 실험 설정 (필드 선언 순서 = config.echo 순서)"""

    model_config = ConfigDict(extra="forbid")

    # 실행 식별
    name: str = Field(default="run", min_length=1, description="runs/<name>/ 출력 디렉터리 이름")
    experiment: ExperimentKind = Field(default="denoise", description="실험 종류")
    seed: int = Field(default=0, ge=0, description="단일 실행 시드")
    seeds: List[int] = Field(default_factory=lambda: [0, 1, 2], min_length=1, description="다중 시드 실행")

    # 학습 방식
    method: Method = Field(default="sinkhorn_gan", description="학습 목적함수")
    methods: List[Method] = Field(default_factory=lambda: list(ALL_METHODS), min_length=1)

    # Sinkhorn
    epsilon: float = Field(default=0.1, gt=0)
    epsilon_list: List[float] = Field(default_factory=lambda: [0.001, 0.1, 10.0], min_length=1)
    sinkhorn_iters: int = Field(default=10, ge=1, description="Sinkhorn 반복 횟수 T")
    marginal_tol: float = Field(default=1e-6, ge=0)
    cost_p: float = Field(default=2.0, ge=1, le=2)
    ot_mode: Literal["batch", "pixel"] = "batch"

    # 학습 루프
    max_epochs: int = Field(default=500, ge=1)
    target_mse: float = Field(default=0.04, gt=0)
    batch: int = Field(default=64, ge=1)
    lr: Optional[float] = Field(default=None, gt=0, description="미지정 시 실험 종류별 기본값")
    subset_size: Optional[int] = Field(default=6000, ge=1)
    test_subset_size: Optional[int] = Field(default=1000, ge=1)
    noise_sigma: float = Field(default=0.3, ge=0)
    clip_c: float = Field(default=0.01, gt=0, description="WGAN 가중치 클리핑 한계")
    gp_lambda: float = Field(default=10.0, ge=0, description="WGAN-GP 페널티 가중치")

    # 손실 가중치
    lambda_DA: float = Field(default=0.1, ge=0)
    lambda_P: float = Field(default=100.0, ge=0)
    lambda_str: float = Field(default=1.0, ge=0)
    lambda_ADV: float = Field(default=1.0, ge=0)
    lambda_OT: float = Field(default=0.01, ge=0)

    # 디노이징 아키텍처
    denoise_architecture: Literal["autoencoder", "siran"] = "autoencoder"
    ae_channels: List[int] = Field(default_factory=lambda: [16, 32], min_length=2, max_length=2)
    disc_hidden: List[int] = Field(default_factory=lambda: [1024, 256], min_length=2, max_length=2)

    # 토이 SIRAN
    siran_base_channels: int = Field(default=32, ge=1)
    siran_n_dmrb: int = Field(default=2, ge=1)
    siran_rcb_per_dmrb: int = Field(default=2, ge=1)
    siran_mlp_hidden: int = Field(default=64, ge=1)
    use_prior: bool = True
    use_attention: bool = True
    use_psa: bool = True
    use_sinkhorn: bool = True
    detach_attention: bool = True

    # 합성 지형
    data_seed: int = Field(default=0, ge=0, description="지형 패치 시드 (모델 시드와 독립)")
    train_patches: int = Field(default=128, ge=1)
    test_patches: int = Field(default=16, ge=1)
    patch_size: int = Field(default=33, ge=3, description="2^k+1")
    degrade_factor: int = Field(default=4, ge=1)
    blur_sigma: float = Field(default=1.0, ge=0)
    roughness: float = Field(default=0.55, gt=0, lt=1)
    pixel_threshold: float = Field(default=0.005, gt=0, description="수렴 에포크 판정용 픽셀 손실 임계값")

    # 평활성 탐침
    probe_pairs: int = Field(default=50, ge=1)
    probe_points: int = Field(default=16, ge=2)
    probe_dim: int = Field(default=4, ge=1)
    lipschitz_scale: float = Field(default=1.0, gt=0)
    probe_iters: int = Field(default=2000, ge=1, description="탐침용 Sinkhorn 반복 상한")

    # 기록
    spec_iters: int = Field(default=20, ge=1)
    record_wallclock: bool = False
    workers: Optional[int] = Field(default=None, ge=1, description="미지정 시 SINKDEM_THREADS")
    plot_window: int = Field(default=10, ge=1)

    @field_validator("epsilon_list")
    @classmethod
    def _positive_epsilons(cls, value: List[float]) -> List[float]:
        if any(eps <= 0 for eps in value):
            raise ValueError("every epsilon must be > 0")
        return value

    @field_validator("seeds")
    @classmethod
    def _non_negative_seeds(cls, value: List[int]) -> List[int]:
        if any(s < 0 for s in value):
            raise ValueError("seeds must be >= 0")
        return value

    @model_validator(mode="after")
    def _check_consistency(self) -> "ExperimentConfig":
        if self.lr is None:
            self.lr = DEFAULT_LR[self.experiment]
        k = self.patch_size - 1
        if k & (k - 1):
            raise ConfigError(f"patch_size must be 2^k+1, got {self.patch_size}", key="patch_size")
        if k % self.degrade_factor:
            raise ConfigError(
                f"degrade_factor {self.degrade_factor} must divide patch_size-1 ({k})", key="degrade_factor"
            )
        if self.denoise_architecture == "siran" and self.method not in ("sinkhorn_gan", "gan"):
            raise ConfigError(
                f"method {self.method} is only available with the autoencoder architecture", key="method"
            )
        return self

    # -------------------------------------------------------------------------
    # 파생 설정
    # -------------------------------------------------------------------------

    @property
    def learning_rate(self) -> float:
        return float(self.lr if self.lr is not None else DEFAULT_LR[self.experiment])

    def weights(self) -> LossWeights:
        return LossWeights(
            lambda_DA=self.lambda_DA,
            lambda_P=self.lambda_P,
            lambda_str=self.lambda_str,
            lambda_ADV=self.lambda_ADV,
            lambda_OT=self.lambda_OT,
        )

    def sinkhorn(self, epsilon: Optional[float] = None) -> SinkhornConfig:
        return SinkhornConfig(
            epsilon=self.epsilon if epsilon is None else epsilon,
            max_iters=self.sinkhorn_iters,
            marginal_tol=self.marginal_tol,
            p=self.cost_p,
        )

    def siran(self) -> SiranConfig:
        return SiranConfig(
            base_channels=self.siran_base_channels,
            n_dmrb_g=self.siran_n_dmrb,
            n_dmrb_d=self.siran_n_dmrb,
            rcb_per_dmrb=self.siran_rcb_per_dmrb,
            scale_factor=self.degrade_factor if self.experiment in ("sr_toy", "ablation") else 1,
            mlp_hidden=self.siran_mlp_hidden,
            use_prior=self.use_prior,
        )

    @property
    def ot(self) -> OtMode:
        return OtMode(self.ot_mode)

    def with_changes(self, **changes: Any) -> "ExperimentConfig":
        """재검증을 거친 복사본"""
        data = self.model_dump()
        data.update(changes)
        return _validate(data)

    def echo(self) -> str:
        """key=value 텍스트 (필드 선언 순서)"""
        return "".join(f"{key}={_render(getattr(self, key))}\n" for key in type(self).model_fields)


# =============================================================================
# 파싱
# =============================================================================


def _render(value: Any) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return ",".join(_render(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _is_list(annotation: Any) -> bool:
    if get_origin(annotation) is list:
        return True
    return any(get_origin(arg) is list for arg in get_args(annotation))


def _is_optional(annotation: Any) -> bool:
    return type(None) in get_args(annotation)


def _convert(key: str, raw: str) -> Any:
    field = ExperimentConfig.model_fields.get(key)
    if field is None:
        raise ConfigError(f"unknown config key '{key}'", key=key)
    text = raw.strip()
    if _is_optional(field.annotation) and text.lower() == "none":
        return None
    if _is_list(field.annotation):
        return [item.strip() for item in text.split(",") if item.strip()]
    return text


def _validate(data: Mapping[str, Any]) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(dict(data))
    except ValidationError as exc:
        err = exc.errors()[0]
        key = str(err["loc"][0]) if err.get("loc") else None
        if err.get("type") == "extra_forbidden":
            raise ConfigError(f"unknown config key '{key}'", key=key) from exc
        raise ConfigError(f"invalid value for '{key}': {err.get('msg')}", key=key) from exc


def parse_config_text(text: str, source: str = "<config>") -> Dict[str, str]:
    """key=value 줄 → 원시 문자열 딕셔너리 (키 검사 포함)"""
    raw: Dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"{source}:{lineno}: expected key=value, got {line!r}")
        if key not in ExperimentConfig.model_fields:
            raise ConfigError(f"{source}:{lineno}: unknown config key '{key}'", key=key)
        if key in raw:
            raise ConfigError(f"{source}:{lineno}: duplicate config key '{key}'", key=key)
        raw[key] = value.strip()
    return raw


def parse_override(item: str) -> Tuple[str, str]:
    """--set KEY=VALUE 한 개 파싱"""
    key, sep, value = item.partition("=")
    key = key.strip()
    if not sep or not key:
        raise ConfigError(f"override must look like KEY=VALUE, got {item!r}")
    if key not in ExperimentConfig.model_fields:
        raise ConfigError(f"unknown config key '{key}'", key=key)
    return key, value.strip()


def build_config(raw: Mapping[str, str], overrides: Iterable[str] = ()) -> ExperimentConfig:
    merged = dict(raw)
    for item in overrides:
        key, value = parse_override(item)
        merged[key] = value
    return _validate({key: _convert(key, value) for key, value in merged.items()})


def read_config_file(path: Union[str, Path]) -> Dict[str, str]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataIOError(str(path), str(exc)) from exc
    return parse_config_text(text, source=str(path))


def load_config(path: Optional[Union[str, Path]] = None, overrides: Iterable[str] = ()) -> ExperimentConfig:
    """설정 파일(선택) 파싱 후 재정의 적용"""
    raw = read_config_file(path) if path is not None else {}
    return build_config(raw, overrides)


def write_echo(cfg: ExperimentConfig, out_dir: Union[str, Path]) -> Path:
    path = Path(out_dir) / ECHO_NAME
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(cfg.echo(), encoding="utf-8")
    except OSError as exc:
        raise DataIOError(str(path), str(exc)) from exc
    return path
