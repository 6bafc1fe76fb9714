# -*- coding: utf-8 -*-
"""
Network Module
==============

이름 있는 노드로 구성된 DAG 계산 그래프와 역전파 엔진.
노드는 추가 순서가 곧 위상 순서이므로 순환이 생길 수 없다.
"""

import copy
import hashlib
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import ProtocolError, ShapeError, ValidationError
from .ops import LayerSpec, get_op

Activations = Dict[str, np.ndarray]
Grads = Dict[str, np.ndarray]


@dataclass
class Node:
    """그래프 노드 (레이어 명세 + 입력 노드 이름)"""

    name: str
    spec: LayerSpec
    inputs: Tuple[str, ...]

    def param_name(self, local: str) -> str:
        return f"{self.name}.{local}"

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "spec": self.spec.to_dict(), "inputs": list(self.inputs)}


class Network:
    """최소 역전파 계산 그래프

    파라미터는 "{node}.weight" / "{node}.bias" 이름의 평탄한 딕셔너리에 저장된다.
    동일 seed와 동일 구성 순서는 비트 단위로 같은 초기화를 만든다.
    """

    def __init__(self, seed: int = 0, dtype: Any = np.float32, name: str = "net"):
        self.seed = int(seed)
        self.dtype = np.dtype(dtype)
        self.name = name
        self.input_channels: Dict[str, int] = {}
        self.nodes: Dict[str, Node] = {}
        self.params: Dict[str, np.ndarray] = {}
        self.taps: List[str] = []
        self.output: Optional[str] = None
        self._rng = np.random.default_rng(self.seed)

    # -------------------------------------------------------------------------
    # 구성
    # -------------------------------------------------------------------------

    def add_input(self, name: str, channels: int) -> str:
        """입력 선언 (channels: 축 1의 크기)"""
        self._check_free(name)
        self.input_channels[name] = int(channels)
        return name

    def add(self, name: str, spec: LayerSpec, inputs: Union[str, Sequence[str]]) -> str:
        """노드 추가 및 He(fan-in) 정규 초기화"""
        self._check_free(name)
        srcs = (inputs,) if isinstance(inputs, str) else tuple(inputs)
        for src in srcs:
            if src not in self.nodes and src not in self.input_channels:
                raise ValidationError(f"node '{name}': unknown input '{src}'")

        node = Node(name=name, spec=spec, inputs=srcs)
        op = get_op(spec.kind)
        for local, shape in op.param_shapes(spec).items():
            if local == "bias":
                value = np.zeros(shape)
            else:
                std = np.sqrt(2.0 / op.fan_in(spec))
                value = self._rng.standard_normal(shape) * std
            self.params[node.param_name(local)] = value.astype(self.dtype)

        self.nodes[name] = node
        self.output = name
        return name

    def tap(self, name: str) -> None:
        """어텐션 등에 사용할 활성값 탭 지정"""
        if name not in self.nodes:
            raise ValidationError(f"cannot tap unknown node '{name}'")
        self.taps.append(name)

    def set_output(self, name: str) -> None:
        if name not in self.nodes:
            raise ValidationError(f"cannot mark unknown node '{name}' as output")
        self.output = name

    def _check_free(self, name: str) -> None:
        if name in self.nodes or name in self.input_channels:
            raise ValidationError(f"duplicate node name '{name}'")

    # -------------------------------------------------------------------------
    # 조회/복제
    # -------------------------------------------------------------------------

    def parameter_count(self) -> int:
        return int(sum(p.size for p in self.params.values()))

    def node_params(self, node: Node) -> Dict[str, np.ndarray]:
        op = get_op(node.spec.kind)
        return {local: self.params[node.param_name(local)] for local in op.param_shapes(node.spec)}

    def fingerprint(self) -> str:
        """파라미터 바이트의 SHA-256 (이름 순)"""
        h = hashlib.sha256()
        for name in sorted(self.params):
            h.update(name.encode("utf-8"))
            h.update(np.ascontiguousarray(self.params[name]).tobytes())
        return h.hexdigest()

    def copy(self) -> "Network":
        return copy.deepcopy(self)

    def astype(self, dtype: Any) -> "Network":
        """파라미터 dtype만 바꾼 복제본"""
        clone = self.copy()
        clone.dtype = np.dtype(dtype)
        clone.params = {k: v.astype(clone.dtype) for k, v in self.params.items()}
        return clone

    def zeros_like_params(self) -> Grads:
        return {k: np.zeros_like(v) for k, v in self.params.items()}

    def forward(self, inputs: Mapping[str, Any]) -> Activations:
        return forward(self, inputs)

    def backward(
        self, activations: Activations, loss_grad: Union[np.ndarray, Mapping[str, np.ndarray]]
    ) -> Tuple[Grads, Grads]:
        return backward(self, activations, loss_grad)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "seed": self.seed,
            "dtype": self.dtype.name,
            "inputs": dict(self.input_channels),
            "nodes": [n.to_dict() for n in self.nodes.values()],
            "taps": list(self.taps),
            "output": self.output,
            "parameter_count": self.parameter_count(),
        }


def forward(net: Network, inputs: Mapping[str, Any]) -> Activations:
    """모든 노드의 활성값 계산 (탭 포함)"""
    acts: Activations = {}
    for name, channels in net.input_channels.items():
        if name not in inputs:
            raise ShapeError(f"missing input '{name}'")
        arr = np.asarray(inputs[name], dtype=net.dtype)
        if arr.ndim < 2 or arr.shape[1] != channels:
            raise ShapeError(f"input '{name}': expected {channels} channels, got shape {arr.shape}")
        acts[name] = arr

    for node in net.nodes.values():
        op = get_op(node.spec.kind)
        xs = [acts[src] for src in node.inputs]
        try:
            op.check(xs, node.spec)
        except ShapeError as exc:
            raise ShapeError(f"node '{node.name}': {exc}") from exc
        acts[node.name] = op.forward(xs, net.node_params(node), node.spec)
    return acts


def backward(
    net: Network,
    activations: Activations,
    loss_grad: Union[np.ndarray, Mapping[str, np.ndarray]],
) -> Tuple[Grads, Grads]:
    """역전파: (파라미터 기울기, 입력 기울기)

    loss_grad는 출력 노드 기울기 배열 또는 {노드 이름: 기울기} 딕셔너리.
    """
    if isinstance(loss_grad, np.ndarray):
        if net.output is None:
            raise ProtocolError("network has no output node")
        seeds: Dict[str, np.ndarray] = {net.output: loss_grad}
    else:
        seeds = dict(loss_grad)

    for name in seeds:
        if name not in activations:
            raise ProtocolError(f"no cached activation for '{name}'; run forward first")

    grads: Grads = {}
    for name, g in seeds.items():
        grads[name] = np.asarray(g, dtype=activations[name].dtype)

    param_grads = net.zeros_like_params()

    for node in reversed(list(net.nodes.values())):
        g_out = grads.pop(node.name, None)
        if g_out is None:
            continue
        if node.name not in activations or any(src not in activations for src in node.inputs):
            raise ProtocolError(f"missing activation cache for node '{node.name}'")

        op = get_op(node.spec.kind)
        xs = [activations[src] for src in node.inputs]
        out = activations[node.name]
        if g_out.shape != out.shape:
            raise ShapeError(f"node '{node.name}': gradient shape {g_out.shape} != {out.shape}")

        g_inputs, g_params = op.backward(xs, out, g_out, net.node_params(node), node.spec)
        for local, g in g_params.items():
            param_grads[node.param_name(local)] += g.astype(net.dtype)
        for src, g in zip(node.inputs, g_inputs):
            if src in grads:
                grads[src] = grads[src] + g
            else:
                grads[src] = g

    input_grads: Grads = {}
    for name in net.input_channels:
        if name in grads:
            input_grads[name] = grads[name]
        elif name in activations:
            input_grads[name] = np.zeros_like(activations[name])
    return param_grads, input_grads
