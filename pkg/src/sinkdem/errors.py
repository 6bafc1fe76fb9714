# -*- coding: utf-8 -*-
"""
sinkdem Errors
==============

라이브러리 전역 예외 계층.
라이브러리는 예외를 던지고, 종료 코드 매핑은 CLI에서만 수행한다.
"""

from typing import Optional


class SinkdemError(Exception):
    """sinkdem 최상위 예외"""


class ValidationError(SinkdemError):
    """입력 검증 실패"""


class ShapeError(ValidationError):
    """텐서/행렬 형상 불일치"""


class ConfigError(ValidationError):
    """설정 값 오류 (알 수 없는 키 포함)"""

    def __init__(self, message: str, key: Optional[str] = None):
        super().__init__(message)
        self.key = key


class NumericalFailureError(SinkdemError):
    """수치 실패 (NaN/Inf 발생)"""

    def __init__(self, message: str, iteration: Optional[int] = None):
        super().__init__(message)
        self.iteration = iteration


class TrainingDivergedError(NumericalFailureError):
    """학습 발산 - 어떤 손실 항에서 발생했는지 기록"""

    def __init__(self, term: str, value: float, iteration: Optional[int] = None):
        super().__init__(f"loss term '{term}' is not finite ({value})", iteration)
        self.term = term
        self.value = value


class FormatError(SinkdemError):
    """파일 포맷 오류 (IDX/SDEM/SDNC/CSV)"""


class ProtocolError(SinkdemError):
    """호출 순서 위반 (예: forward 캐시 없이 backward)"""


class DataIOError(SinkdemError):
    """경로 정보를 포함한 입출력 오류"""

    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason
