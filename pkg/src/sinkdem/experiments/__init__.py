# -*- coding: utf-8 -*-
"""
Experiments Package
===================

재현 실험 오케스트레이션.
MNIST 디노이징, ε 스윕, 기준선 비교, 토이 SIRAN 초해상도와 모듈 제거 실험, 평활성 탐침.
"""

from .baselines import ComparisonResult, run_baselines
from .config import (
    ExperimentConfig,
    build_config,
    load_config,
    parse_config_text,
    parse_override,
    read_config_file,
    write_echo,
)
from .denoise import (
    AutoencoderModels,
    DenoiseData,
    DenoiseTrainer,
    add_noise,
    autoencoder_step,
    build_autoencoder,
    build_mlp_discriminator,
    load_denoise_data,
    run_denoise,
)
from .objectives import clip_weights, gradient_penalty, interpolate
from .runner import NOT_REACHED, RunResult, mean_record, write_table
from .smoothness import SmoothnessResult, smoothness_probe, theory_log10
from .sr_toy import (
    ABLATION_ROWS,
    AblationResult,
    SrResult,
    TerrainSet,
    bicubic_baseline,
    evaluate_checkpoint,
    make_terrain_set,
    predict_patches,
    run_ablation,
    run_sr_toy,
)
from .sweep import SweepEntry, SweepResult, near_optimum_window, run_eps_sweep

__all__ = [
    "ExperimentConfig",
    "load_config",
    "build_config",
    "parse_config_text",
    "parse_override",
    "read_config_file",
    "write_echo",
    "RunResult",
    "NOT_REACHED",
    "mean_record",
    "write_table",
    "DenoiseData",
    "DenoiseTrainer",
    "AutoencoderModels",
    "load_denoise_data",
    "add_noise",
    "build_autoencoder",
    "build_mlp_discriminator",
    "autoencoder_step",
    "run_denoise",
    "clip_weights",
    "gradient_penalty",
    "interpolate",
    "SweepEntry",
    "SweepResult",
    "near_optimum_window",
    "run_eps_sweep",
    "ComparisonResult",
    "run_baselines",
    "TerrainSet",
    "SrResult",
    "AblationResult",
    "ABLATION_ROWS",
    "make_terrain_set",
    "bicubic_baseline",
    "run_sr_toy",
    "run_ablation",
    "evaluate_checkpoint",
    "predict_patches",
    "SmoothnessResult",
    "smoothness_probe",
    "theory_log10",
]
