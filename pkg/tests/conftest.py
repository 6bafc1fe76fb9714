# -*- coding: utf-8 -*-
"""
Pytest Configuration
====================

공통 fixtures 및 설정.
"""

import sys
from pathlib import Path

import numpy as np
import pytest

# 프로젝트 루트를 sys.path에 추가
PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from src.sinkdem.data import encode_idx  # noqa: E402
from src.sinkdem.experiments import DenoiseData, build_config  # noqa: E402

CONFIGS_DIR = PROJECT_ROOT / "configs"


@pytest.fixture
def rng():
    """고정 시드 난수 생성기"""
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_images():
    """8×8 합성 숫자 이미지 (N, 1, 8, 8), [0,1]"""
    gen = np.random.default_rng(7)
    images = np.zeros((12, 1, 8, 8), dtype=np.float32)
    for i in range(images.shape[0]):
        r, c = gen.integers(1, 5, size=2)
        images[i, 0, r:r + 3, c:c + 3] = 1.0
    return images


@pytest.fixture
def tiny_denoise_data(tiny_images):
    """학습 8장, 테스트 4장"""
    return DenoiseData(train=tiny_images[:8], test=tiny_images[8:])


@pytest.fixture
def tiny_denoise_cfg():
    """몇 에포크만 도는 소형 디노이징 설정"""
    return build_config({
        "name": "tiny",
        "experiment": "denoise",
        "max_epochs": "3",
        "batch": "4",
        "target_mse": "1e-9",
        "lambda_P": "1",
        "lambda_str": "0",
        "lambda_ADV": "0.1",
        "lambda_OT": "1",
        "epsilon": "1.0",
        "sinkhorn_iters": "10",
        "ae_channels": "2,4",
        "disc_hidden": "8,4",
        "spec_iters": "5",
        "workers": "1",
    })


@pytest.fixture
def mnist_dir(tmp_path, tiny_images):
    """표준 파일 이름의 소형 IDX 디렉터리"""
    images = (tiny_images[:, 0] * 255).astype(np.uint8)
    labels = np.arange(images.shape[0], dtype=np.uint8) % 10
    root = tmp_path / "mnist"
    root.mkdir()
    for prefix in ("train", "t10k"):
        (root / f"{prefix}-images-idx3-ubyte").write_bytes(encode_idx(images))
        (root / f"{prefix}-labels-idx1-ubyte").write_bytes(encode_idx(labels))
    return root
