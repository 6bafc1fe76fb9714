# -*- coding: utf-8 -*-
"""
Network Blocks Module
=====================

RCB (Residual Convolution Block) 와 DMRB (Densely connected Multi-Residual Block).
"""

from typing import List

from ..diffnet import Network
from ..diffnet import layers as L


def add_rcb(net: Network, prefix: str, x: str, channels: int, slope: float) -> str:
    """RCB: conv3x3 → LReLU → conv3x3, 입력을 더하는 잔차 연결"""
    a = net.add(f"{prefix}.conv_a", L.conv3x3(channels, channels), x)
    a = net.add(f"{prefix}.act", L.leaky_relu(slope), a)
    b = net.add(f"{prefix}.conv_b", L.conv3x3(channels, channels), a)
    return net.add(f"{prefix}.sum", L.add(), [x, b])


def add_dmrb(net: Network, prefix: str, x: str, channels: int, n_rcb: int, slope: float) -> str:
    """DMRB: 이전 RCB 출력 전체를 결합해 conv1x1로 융합하는 밀집 연결 + 블록 잔차"""
    outputs: List[str] = []
    for i in range(n_rcb):
        if i == 0:
            src = x
        else:
            cat = net.add(f"{prefix}.cat{i}", L.concat(), [x, *outputs])
            src = net.add(f"{prefix}.fuse{i}", L.conv1x1((i + 1) * channels, channels), cat)
        outputs.append(add_rcb(net, f"{prefix}.rcb{i}", src, channels, slope))

    cat = net.add(f"{prefix}.cat_out", L.concat(), [x, *outputs])
    fused = net.add(f"{prefix}.fuse_out", L.conv1x1((n_rcb + 1) * channels, channels), cat)
    return net.add(f"{prefix}.out", L.add(), [x, fused])
