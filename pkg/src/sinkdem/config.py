# -*- coding: utf-8 -*-
"""
sinkdem Configuration
=====================

환경변수 기반 설정 관리 (접두사 SINKDEM_).
"""

import os
from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """sinkdem 전역 설정"""

    # 로깅 설정
    log_level: str = "INFO"

    # 병렬 실행 설정 (SINKDEM_THREADS)
    threads: int = Field(default_factory=lambda: os.cpu_count() or 1, ge=1)

    # 경로 설정
    runs_dir: str = "runs"
    mnist_dir: str = "data/mnist"

    # 학습 버퍼 정밀도 (솔버/손실 누산은 항상 float64)
    float_dtype: str = "float32"

    model_config = SettingsConfigDict(
        env_prefix="SINKDEM_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )


@lru_cache
def get_settings() -> Settings:
    """싱글톤 설정 인스턴스 반환"""
    return Settings()


settings = get_settings()
