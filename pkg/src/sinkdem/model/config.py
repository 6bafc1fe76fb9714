# -*- coding: utf-8 -*-
"""
SIRAN Config Module
===================

아키텍처 설정과 model.manifest (key=value) 입출력.
"""

from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict, Union

from ..errors import ConfigError, DataIOError, FormatError

MANIFEST_NAME = "model.manifest"


@dataclass(frozen=True)
class SiranConfig:
    """SIRAN 아키텍처 설정

    scale_factor: 입력 x̃가 사전 보간된 배율 (네트워크 자체는 x̃ 해상도에서 동작)
    """

    base_channels: int = 64
    n_dmrb_g: int = 6
    n_dmrb_d: int = 6
    rcb_per_dmrb: int = 4
    scale_factor: int = 1
    leaky_slope: float = 0.2
    prior_channels: int = 3
    mlp_hidden: int = 64
    use_prior: bool = True

    def __post_init__(self) -> None:
        for key in ("base_channels", "n_dmrb_g", "n_dmrb_d", "rcb_per_dmrb", "scale_factor",
                    "prior_channels", "mlp_hidden"):
            value = getattr(self, key)
            if not isinstance(value, int) or value < 1:
                raise ConfigError(f"{key} must be a positive integer, got {value!r}", key=key)
        if not (0 < self.leaky_slope < 1):
            raise ConfigError(f"leaky_slope must lie in (0, 1), got {self.leaky_slope}", key="leaky_slope")

    @classmethod
    def toy(cls, **overrides: Any) -> "SiranConfig":
        """데스크 규모 설정 (c=32)"""
        return cls(**{"base_channels": 32, **overrides})

    @property
    def n_taps(self) -> int:
        return self.n_dmrb_d

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _parse_field(raw: str, kind: Any) -> Any:
    if kind is bool or kind == "bool":
        if raw.lower() not in ("true", "false"):
            raise ValueError(f"expected true/false, got {raw!r}")
        return raw.lower() == "true"
    if kind is int or kind == "int":
        return int(raw)
    return float(raw)


def write_manifest(cfg: SiranConfig, seed: int, fingerprints: Dict[str, str], path: Union[str, Path]) -> Path:
    """SiranConfig 전 키 + seed + 파라미터 지문 기록"""
    path = Path(path)
    lines = [f"{k}={str(v).lower() if isinstance(v, bool) else v}" for k, v in cfg.to_dict().items()]
    lines.append(f"seed={seed}")
    for name, digest in fingerprints.items():
        lines.append(f"fingerprint.{name}={digest}")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise DataIOError(str(path), str(exc)) from exc
    return path


def read_manifest(path: Union[str, Path]) -> Dict[str, Any]:
    """manifest → {"config": SiranConfig, "seed": int, "fingerprints": {...}}"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataIOError(str(path), str(exc)) from exc

    types = {f.name: f.type for f in fields(SiranConfig)}
    values: Dict[str, Any] = {}
    fingerprints: Dict[str, str] = {}
    seed = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, raw = line.partition("=")
        if not sep:
            raise FormatError(f"{path}:{lineno}: expected key=value")
        key, raw = key.strip(), raw.strip()
        try:
            if key == "seed":
                seed = int(raw)
            elif key.startswith("fingerprint."):
                fingerprints[key[len("fingerprint."):]] = raw
            elif key in types:
                values[key] = _parse_field(raw, types[key])
            else:
                raise FormatError(f"{path}:{lineno}: unknown manifest key '{key}'")
        except ValueError as exc:
            raise FormatError(f"{path}:{lineno}: bad value for '{key}': {exc}") from exc

    if seed is None:
        raise FormatError(f"{path}: manifest lacks seed")
    return {"config": SiranConfig(**values), "seed": seed, "fingerprints": fingerprints}
