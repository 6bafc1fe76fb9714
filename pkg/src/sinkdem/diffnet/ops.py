# -*- coding: utf-8 -*-
"""
Layer Ops Module
================

레이어 어휘(LayerSpec)와 연산별 forward/backward 구현.
im2col 기반 합성곱, 쌍선형 업샘플, 활성화, 결합/원소곱, 풀링, softmax.
배치 정규화는 어휘에 존재하지 않는다.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit

from ..errors import ShapeError

Arrays = List[np.ndarray]
ParamGrads = Dict[str, np.ndarray]
Params = Dict[str, np.ndarray]


class LayerKind(str, Enum):
    """레이어 유형"""

    CONV3X3 = "conv3x3"
    CONV1X1 = "conv1x1"
    DENSE = "dense"
    LEAKY_RELU = "leaky_relu"
    RELU = "relu"
    SIGMOID = "sigmoid"
    UPSAMPLE_BILINEAR = "upsample_bilinear"
    CONCAT = "concat"
    ELEMENTWISE_MUL = "elementwise_mul"
    GLOBAL_AVG_POOL = "global_avg_pool"
    SOFTMAX = "softmax"
    ADD = "add"
    FLATTEN = "flatten"


@dataclass(frozen=True)
class LayerSpec:
    """레이어 명세"""

    kind: LayerKind
    in_channels: int = 0
    out_channels: int = 0
    stride: int = 1
    in_features: int = 0
    units: int = 0
    slope: float = 0.2
    factor: int = 2
    axes: Tuple[int, ...] = field(default=(1,))

    @property
    def kernel(self) -> int:
        return 3 if self.kind == LayerKind.CONV3X3 else 1

    @property
    def padding(self) -> int:
        # stride 1에서 공간 크기 보존
        return self.kernel // 2

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "in_channels": self.in_channels,
            "out_channels": self.out_channels,
            "stride": self.stride,
            "in_features": self.in_features,
            "units": self.units,
            "slope": self.slope,
            "factor": self.factor,
            "axes": list(self.axes),
        }


# =============================================================================
# LayerSpec 생성 함수
# =============================================================================


def conv3x3(in_channels: int, out_channels: int, stride: int = 1) -> LayerSpec:
    return LayerSpec(LayerKind.CONV3X3, in_channels=in_channels, out_channels=out_channels, stride=stride)


def conv1x1(in_channels: int, out_channels: int, stride: int = 1) -> LayerSpec:
    return LayerSpec(LayerKind.CONV1X1, in_channels=in_channels, out_channels=out_channels, stride=stride)


def dense(in_features: int, units: int) -> LayerSpec:
    return LayerSpec(LayerKind.DENSE, in_features=in_features, units=units)


def leaky_relu(slope: float = 0.2) -> LayerSpec:
    return LayerSpec(LayerKind.LEAKY_RELU, slope=slope)


def relu() -> LayerSpec:
    return LayerSpec(LayerKind.RELU)


def sigmoid() -> LayerSpec:
    return LayerSpec(LayerKind.SIGMOID)


def upsample_bilinear(factor: int = 2) -> LayerSpec:
    return LayerSpec(LayerKind.UPSAMPLE_BILINEAR, factor=factor)


def concat() -> LayerSpec:
    return LayerSpec(LayerKind.CONCAT)


def elementwise_mul() -> LayerSpec:
    return LayerSpec(LayerKind.ELEMENTWISE_MUL)


def add() -> LayerSpec:
    return LayerSpec(LayerKind.ADD)


def global_avg_pool() -> LayerSpec:
    return LayerSpec(LayerKind.GLOBAL_AVG_POOL)


def softmax(axes: Sequence[int] = (1,)) -> LayerSpec:
    return LayerSpec(LayerKind.SOFTMAX, axes=tuple(axes))


def flatten() -> LayerSpec:
    return LayerSpec(LayerKind.FLATTEN)


# =============================================================================
# 보조 함수
# =============================================================================


def bilinear_matrix(in_size: int, out_size: int) -> np.ndarray:
    """1-D 쌍선형 보간 행렬 R (out×in), half-pixel 정렬

    행 합이 1이므로 상수 신호를 보존한다.
    """
    R = np.zeros((out_size, in_size), dtype=np.float64)
    scale = in_size / out_size
    for dst in range(out_size):
        src = max((dst + 0.5) * scale - 0.5, 0.0)
        i0 = min(int(np.floor(src)), in_size - 1)
        i1 = min(i0 + 1, in_size - 1)
        lam = src - i0
        R[dst, i0] += 1.0 - lam
        R[dst, i1] += lam
    return R


def resize_bilinear(x: np.ndarray, size: Tuple[int, int]) -> np.ndarray:
    """(..., H, W) 배열을 size로 쌍선형 리사이즈"""
    Rh = bilinear_matrix(x.shape[-2], size[0]).astype(x.dtype)
    Rw = bilinear_matrix(x.shape[-1], size[1]).astype(x.dtype)
    return np.asarray(Rh @ x @ Rw.T)


def resize_bilinear_adjoint(grad: np.ndarray, in_size: Tuple[int, int]) -> np.ndarray:
    """resize_bilinear의 수반(adjoint) 연산"""
    Rh = bilinear_matrix(in_size[0], grad.shape[-2]).astype(grad.dtype)
    Rw = bilinear_matrix(in_size[1], grad.shape[-1]).astype(grad.dtype)
    return np.asarray(Rh.T @ grad @ Rw)


def _im2col(xp: np.ndarray, k: int, stride: int) -> Tuple[np.ndarray, int, int]:
    """패딩된 입력 → (N, C*k*k, Ho*Wo) 열 행렬"""
    xp = np.ascontiguousarray(xp)
    N, C, Hp, Wp = xp.shape
    Ho = (Hp - k) // stride + 1
    Wo = (Wp - k) // stride + 1
    sN, sC, sH, sW = xp.strides
    patches = np.lib.stride_tricks.as_strided(
        xp,
        shape=(N, C, k, k, Ho, Wo),
        strides=(sN, sC, sH, sW, stride * sH, stride * sW),
        writeable=False,
    )
    return patches.reshape(N, C * k * k, Ho * Wo), Ho, Wo


def _col2im(
    cols: np.ndarray,
    padded_shape: Tuple[int, int, int, int],
    k: int,
    stride: int,
    Ho: int,
    Wo: int,
) -> np.ndarray:
    """열 행렬을 이미지로 누적 (im2col의 수반)"""
    N, C, Hp, Wp = padded_shape
    x = np.zeros(padded_shape, dtype=cols.dtype)
    cols6 = cols.reshape(N, C, k, k, Ho, Wo)
    for i in range(k):
        for j in range(k):
            x[:, :, i : i + stride * Ho : stride, j : j + stride * Wo : stride] += cols6[:, :, i, j]
    return x


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """브로드캐스트된 기울기를 원래 형상으로 축약"""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _expand_gate(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # (N, C) 게이트를 (N, C, 1, 1)로 확장
    if a.ndim == 4 and b.ndim == 2:
        return b[:, :, None, None]
    return b


# =============================================================================
# 연산 구현
# =============================================================================


class Op:
    """연산 기본 클래스"""

    arity: int = 1  # -1: 가변

    def param_shapes(self, spec: LayerSpec) -> Dict[str, Tuple[int, ...]]:
        return {}

    def fan_in(self, spec: LayerSpec) -> int:
        return 1

    def check(self, xs: Arrays, spec: LayerSpec) -> None:
        if self.arity >= 0 and len(xs) != self.arity:
            raise ShapeError(f"expected {self.arity} input(s), got {len(xs)}")

    def forward(self, xs: Arrays, params: Params, spec: LayerSpec) -> np.ndarray:
        raise NotImplementedError

    def backward(
        self,
        xs: Arrays,
        out: np.ndarray,
        grad: np.ndarray,
        params: Params,
        spec: LayerSpec,
    ) -> Tuple[Arrays, ParamGrads]:
        raise NotImplementedError


class ConvOp(Op):
    """2-D 합성곱 (im2col + 단일 matmul)"""

    def param_shapes(self, spec: LayerSpec) -> Dict[str, Tuple[int, ...]]:
        k = spec.kernel
        return {
            "weight": (spec.out_channels, spec.in_channels, k, k),
            "bias": (spec.out_channels,),
        }

    def fan_in(self, spec: LayerSpec) -> int:
        return spec.in_channels * spec.kernel * spec.kernel

    def check(self, xs: Arrays, spec: LayerSpec) -> None:
        super().check(xs, spec)
        x = xs[0]
        if x.ndim != 4:
            raise ShapeError(f"conv expects (N,C,H,W) input, got shape {x.shape}")
        if x.shape[1] != spec.in_channels:
            raise ShapeError(f"conv expects {spec.in_channels} channels, got {x.shape[1]}")

    def _cols(self, x: np.ndarray, spec: LayerSpec) -> Tuple[np.ndarray, Tuple[int, ...], int, int]:
        pad = spec.padding
        if pad:
            x = np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
        if spec.kernel == 1 and spec.stride == 1:
            N, C, H, W = x.shape
            return x.reshape(N, C, H * W), x.shape, H, W
        cols, Ho, Wo = _im2col(x, spec.kernel, spec.stride)
        return cols, x.shape, Ho, Wo

    def forward(self, xs: Arrays, params: Params, spec: LayerSpec) -> np.ndarray:
        x = xs[0]
        weight, bias = params["weight"], params["bias"]
        cols, _, Ho, Wo = self._cols(x, spec)
        Wmat = weight.reshape(spec.out_channels, -1)
        out = np.matmul(Wmat, cols) + bias[None, :, None]
        return out.reshape(x.shape[0], spec.out_channels, Ho, Wo)

    def backward(
        self, xs: Arrays, out: np.ndarray, grad: np.ndarray, params: Params, spec: LayerSpec
    ) -> Tuple[Arrays, ParamGrads]:
        x = xs[0]
        weight = params["weight"]
        cols, padded_shape, Ho, Wo = self._cols(x, spec)
        N = x.shape[0]
        go = grad.reshape(N, spec.out_channels, Ho * Wo)
        Wmat = weight.reshape(spec.out_channels, -1)

        grad_weight = np.matmul(go, cols.transpose(0, 2, 1)).sum(axis=0).reshape(weight.shape)
        grad_bias = go.sum(axis=(0, 2))
        grad_cols = np.matmul(Wmat.T, go)

        if spec.kernel == 1 and spec.stride == 1:
            grad_x = grad_cols.reshape(padded_shape)
        else:
            grad_x = _col2im(grad_cols, padded_shape, spec.kernel, spec.stride, Ho, Wo)

        pad = spec.padding
        if pad:
            grad_x = grad_x[:, :, pad:-pad, pad:-pad]
        return [np.ascontiguousarray(grad_x)], {"weight": grad_weight, "bias": grad_bias}


class DenseOp(Op):
    """완전연결 y = x Wᵀ + b"""

    def param_shapes(self, spec: LayerSpec) -> Dict[str, Tuple[int, ...]]:
        return {"weight": (spec.units, spec.in_features), "bias": (spec.units,)}

    def fan_in(self, spec: LayerSpec) -> int:
        return spec.in_features

    def check(self, xs: Arrays, spec: LayerSpec) -> None:
        super().check(xs, spec)
        x = xs[0]
        if x.ndim != 2 or x.shape[1] != spec.in_features:
            raise ShapeError(f"dense expects (N, {spec.in_features}) input, got shape {x.shape}")

    def forward(self, xs: Arrays, params: Params, spec: LayerSpec) -> np.ndarray:
        return xs[0] @ params["weight"].T + params["bias"]

    def backward(
        self, xs: Arrays, out: np.ndarray, grad: np.ndarray, params: Params, spec: LayerSpec
    ) -> Tuple[Arrays, ParamGrads]:
        return [grad @ params["weight"]], {"weight": grad.T @ xs[0], "bias": grad.sum(axis=0)}


class LeakyReluOp(Op):
    def forward(self, xs: Arrays, params: Params, spec: LayerSpec) -> np.ndarray:
        x = xs[0]
        slope = 0.0 if spec.kind == LayerKind.RELU else spec.slope
        return np.where(x > 0, x, x * x.dtype.type(slope))

    def backward(
        self, xs: Arrays, out: np.ndarray, grad: np.ndarray, params: Params, spec: LayerSpec
    ) -> Tuple[Arrays, ParamGrads]:
        x = xs[0]
        slope = 0.0 if spec.kind == LayerKind.RELU else spec.slope
        return [grad * np.where(x > 0, 1.0, slope).astype(grad.dtype)], {}


class SigmoidOp(Op):
    def forward(self, xs: Arrays, params: Params, spec: LayerSpec) -> np.ndarray:
        return expit(xs[0])

    def backward(
        self, xs: Arrays, out: np.ndarray, grad: np.ndarray, params: Params, spec: LayerSpec
    ) -> Tuple[Arrays, ParamGrads]:
        return [grad * out * (1 - out)], {}


class UpsampleBilinearOp(Op):
    def check(self, xs: Arrays, spec: LayerSpec) -> None:
        super().check(xs, spec)
        if xs[0].ndim != 4:
            raise ShapeError(f"upsample expects (N,C,H,W) input, got shape {xs[0].shape}")

    def forward(self, xs: Arrays, params: Params, spec: LayerSpec) -> np.ndarray:
        x = xs[0]
        return resize_bilinear(x, (x.shape[2] * spec.factor, x.shape[3] * spec.factor))

    def backward(
        self, xs: Arrays, out: np.ndarray, grad: np.ndarray, params: Params, spec: LayerSpec
    ) -> Tuple[Arrays, ParamGrads]:
        x = xs[0]
        return [resize_bilinear_adjoint(grad, (x.shape[2], x.shape[3]))], {}


class ConcatOp(Op):
    arity = -1

    def check(self, xs: Arrays, spec: LayerSpec) -> None:
        if not xs:
            raise ShapeError("concat needs at least one input")
        ref = xs[0].shape
        for x in xs[1:]:
            if x.ndim != len(ref) or x.shape[0] != ref[0] or x.shape[2:] != ref[2:]:
                raise ShapeError(f"concat shape mismatch: {ref} vs {x.shape}")

    def forward(self, xs: Arrays, params: Params, spec: LayerSpec) -> np.ndarray:
        return np.concatenate(xs, axis=1)

    def backward(
        self, xs: Arrays, out: np.ndarray, grad: np.ndarray, params: Params, spec: LayerSpec
    ) -> Tuple[Arrays, ParamGrads]:
        bounds = np.cumsum([x.shape[1] for x in xs])[:-1]
        return list(np.split(grad, bounds, axis=1)), {}


class ElementwiseOp(Op):
    """원소곱/원소합 (브로드캐스트 지원)"""

    arity = 2

    def check(self, xs: Arrays, spec: LayerSpec) -> None:
        super().check(xs, spec)
        a, b = xs[0], _expand_gate(xs[0], xs[1])
        try:
            np.broadcast_shapes(a.shape, b.shape)
        except ValueError as exc:
            raise ShapeError(f"cannot broadcast {a.shape} with {xs[1].shape}") from exc

    def forward(self, xs: Arrays, params: Params, spec: LayerSpec) -> np.ndarray:
        a, b = xs[0], _expand_gate(xs[0], xs[1])
        if spec.kind == LayerKind.ADD:
            return a + b
        return a * b

    def backward(
        self, xs: Arrays, out: np.ndarray, grad: np.ndarray, params: Params, spec: LayerSpec
    ) -> Tuple[Arrays, ParamGrads]:
        a, b_raw = xs
        b = _expand_gate(a, b_raw)
        if spec.kind == LayerKind.ADD:
            ga, gb = grad, grad
        else:
            ga, gb = grad * b, grad * a
        ga = _unbroadcast(ga, a.shape)
        gb = _unbroadcast(gb, b.shape).reshape(b_raw.shape)
        return [ga, gb], {}


class GlobalAvgPoolOp(Op):
    def check(self, xs: Arrays, spec: LayerSpec) -> None:
        super().check(xs, spec)
        if xs[0].ndim != 4:
            raise ShapeError(f"global_avg_pool expects (N,C,H,W), got shape {xs[0].shape}")

    def forward(self, xs: Arrays, params: Params, spec: LayerSpec) -> np.ndarray:
        return xs[0].mean(axis=(2, 3))

    def backward(
        self, xs: Arrays, out: np.ndarray, grad: np.ndarray, params: Params, spec: LayerSpec
    ) -> Tuple[Arrays, ParamGrads]:
        x = xs[0]
        scale = x.dtype.type(1.0 / (x.shape[2] * x.shape[3]))
        return [np.broadcast_to(grad[:, :, None, None] * scale, x.shape).copy()], {}


class SoftmaxOp(Op):
    def check(self, xs: Arrays, spec: LayerSpec) -> None:
        super().check(xs, spec)
        if max(spec.axes) >= xs[0].ndim:
            raise ShapeError(f"softmax axes {spec.axes} invalid for shape {xs[0].shape}")

    def forward(self, xs: Arrays, params: Params, spec: LayerSpec) -> np.ndarray:
        x = xs[0]
        shifted = x - x.max(axis=spec.axes, keepdims=True)
        e = np.exp(shifted)
        return e / e.sum(axis=spec.axes, keepdims=True)

    def backward(
        self, xs: Arrays, out: np.ndarray, grad: np.ndarray, params: Params, spec: LayerSpec
    ) -> Tuple[Arrays, ParamGrads]:
        inner = (grad * out).sum(axis=spec.axes, keepdims=True)
        return [out * (grad - inner)], {}


class FlattenOp(Op):
    def forward(self, xs: Arrays, params: Params, spec: LayerSpec) -> np.ndarray:
        x = xs[0]
        return x.reshape(x.shape[0], -1)

    def backward(
        self, xs: Arrays, out: np.ndarray, grad: np.ndarray, params: Params, spec: LayerSpec
    ) -> Tuple[Arrays, ParamGrads]:
        return [grad.reshape(xs[0].shape)], {}


OPS: Dict[LayerKind, Op] = {
    LayerKind.CONV3X3: ConvOp(),
    LayerKind.CONV1X1: ConvOp(),
    LayerKind.DENSE: DenseOp(),
    LayerKind.LEAKY_RELU: LeakyReluOp(),
    LayerKind.RELU: LeakyReluOp(),
    LayerKind.SIGMOID: SigmoidOp(),
    LayerKind.UPSAMPLE_BILINEAR: UpsampleBilinearOp(),
    LayerKind.CONCAT: ConcatOp(),
    LayerKind.ELEMENTWISE_MUL: ElementwiseOp(),
    LayerKind.ADD: ElementwiseOp(),
    LayerKind.GLOBAL_AVG_POOL: GlobalAvgPoolOp(),
    LayerKind.SOFTMAX: SoftmaxOp(),
    LayerKind.FLATTEN: FlattenOp(),
}


def get_op(kind: LayerKind) -> Op:
    """레이어 유형에 대응하는 연산 반환"""
    return OPS[kind]


def output_channels(spec: LayerSpec, in_channels: Optional[int]) -> Optional[int]:
    """채널/특징 수 추적 (네트워크 구성 시 검증용)"""
    if spec.kind in (LayerKind.CONV3X3, LayerKind.CONV1X1):
        return spec.out_channels
    if spec.kind == LayerKind.DENSE:
        return spec.units
    return in_channels
