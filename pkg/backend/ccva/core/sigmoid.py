"""Sigmoid 参数化模块

用 S(1_transient, (t_start, h_start); m, w; u, (t_end, h_max)) 七元组构造
P 测度段的分段线性违约强度路径，包括终点型（压力持续到终点）与
瞬态型（压力在 m 处达到峰值后回落到初始水平）两种形态。

控制点编号：
    1: (t_start, h_start)
    2: (m - w/2, h_start + u·(h_max - h_start))
    3: (m + w/2, h_max - u·(h_max - h_start))      终点型
       (m + w/2, h_start + u·(h_max - h_start))    瞬态型
    4: (t_end, h_max)                               终点型
       (t_end, h_start)                             瞬态型
    5: (m, h_max)                                   仅瞬态型
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

from ..exceptions import ParameterError
from .termstructures import HazardCurve

logger = logging.getLogger(__name__)

# 时间比较容差（年）
_TIME_EPS = 1e-12

Point = Tuple[float, float]


@dataclass(frozen=True)
class SigmoidParams:
    """Sigmoid 参数七元组

    Attributes:
        transient: 是否为瞬态型（1_transient）
        t_start: P 段起点时间，即最后一个可交易 CDS 期限（年）
        h_start: P 段起点强度（每年）；None 表示取 CDS 报价自举的平坦强度
        m: 冲击中点时间（年）
        w: 中间段宽度（年）
        u: 累积比例，取值 [0, 0.5)
        t_end: 冲击终点时间（年）
        h_max: 最大强度（每年）
    """

    transient: bool
    t_start: float
    h_start: Optional[float]
    m: float
    w: float
    u: float
    t_end: float
    h_max: float

    def __post_init__(self):
        values = (self.t_start, self.m, self.w, self.u, self.t_end, self.h_max)
        if self.h_start is not None:
            values += (self.h_start,)
        if not all(math.isfinite(v) for v in values):
            raise ParameterError(f"Sigmoid 参数必须为有限值: {self}")
        if self.t_start < 0:
            raise ParameterError(f"t_start 不能为负: {self.t_start}")
        if self.w < 0:
            raise ParameterError(f"宽度 w 不能为负: {self.w}")
        if not 0 <= self.u < 0.5:
            raise ParameterError(f"累积比例 u 必须在 [0, 0.5) 内: {self.u}")
        if self.h_max < 0:
            raise ParameterError(f"h_max 不能为负: {self.h_max}")
        if self.h_start is not None and not 0 <= self.h_start <= self.h_max:
            raise ParameterError(
                f"强度需满足 0 ≤ h_start ≤ h_max: h_start={self.h_start}, h_max={self.h_max}"
            )
        if not self.t_start < self.t_end:
            raise ParameterError(f"需满足 t_start < t_end: {self.t_start}, {self.t_end}")
        # 中间段端点允许与起点/终点重合（该处形成强度跳跃）
        if self.m - self.w / 2 < self.t_start - _TIME_EPS or self.m + self.w / 2 > self.t_end + _TIME_EPS:
            raise ParameterError(
                "中间段必须落在 [t_start, t_end] 内: "
                f"t_start={self.t_start}, m-w/2={self.m - self.w / 2}, "
                f"m+w/2={self.m + self.w / 2}, t_end={self.t_end}"
            )

    @property
    def resolved(self) -> bool:
        return self.h_start is not None

    @property
    def impact(self) -> float:
        """冲击幅度 h_max - h_start"""
        if self.h_start is None:
            raise ParameterError("h_start 尚未确定，需先与 CDS 报价拼接")
        return self.h_max - self.h_start

    @property
    def build_up_level(self) -> float:
        """点 2 的强度水平"""
        return self.h_start + self.u * self.impact

    def with_h_start(self, h_start: float) -> "SigmoidParams":
        return replace(self, h_start=h_start)


@dataclass(frozen=True)
class SigmoidCurve:
    """Sigmoid 控制点实现的 P 段曲线

    Attributes:
        params: 构造所用参数
        labels: 保留下来的控制点编号，按时间排序
        curve: 对应的 HazardCurve
    """

    params: SigmoidParams
    labels: Tuple[int, ...]
    curve: HazardCurve

    @property
    def nodes(self) -> List[Point]:
        return self.curve.nodes

    @property
    def removed_point_3(self) -> bool:
        return not self.params.transient and 3 not in self.labels


def _slope(a: Point, b: Point) -> float:
    rise = b[1] - a[1]
    span = b[0] - a[0]
    if span <= _TIME_EPS:
        if rise == 0:
            return 0.0
        return math.inf if rise > 0 else -math.inf
    return rise / span


def _drop_duplicates(points: List[Tuple[int, Point]]) -> List[Tuple[int, Point]]:
    kept = [points[0]]
    for label, point in points[1:]:
        if abs(point[0] - kept[-1][1][0]) <= _TIME_EPS and point[1] == kept[-1][1][1]:
            continue
        kept.append((label, point))
    return kept


def _to_sigmoid_curve(params: SigmoidParams, points: List[Tuple[int, Point]]) -> SigmoidCurve:
    points = _drop_duplicates(points)
    labels = tuple(label for label, _ in points)
    curve = HazardCurve.from_nodes(point for _, point in points)
    return SigmoidCurve(params=params, labels=labels, curve=curve)


def build_endpoint_curve(params: SigmoidParams) -> SigmoidCurve:
    """构造终点型 P 段曲线

    先按定义计算点 1-4，再应用去点规则：若末段斜率大于中间段斜率，
    去掉内部点 3，曲线由点 2 直线连接到点 4（P 段末端不允许跳跃）。
    w=0 时点 2、3 重合，同样去掉点 3。

    Args:
        params: transient 为 False 的 Sigmoid 参数

    Returns:
        SigmoidCurve: 控制点与对应强度曲线
    """
    if params.transient:
        raise ParameterError("终点型曲线要求 transient=False")

    p = params
    delta_u = p.u * p.impact
    point1 = (p.t_start, p.h_start)
    point2 = (p.m - p.w / 2, p.h_start + delta_u)
    point3 = (p.m + p.w / 2, p.h_max - delta_u)
    point4 = (p.t_end, p.h_max)

    points = [(1, point1), (2, point2), (3, point3), (4, point4)]
    if p.w <= _TIME_EPS:
        # 点 2、3 时间重合，中间段退化，按去点规则处理
        points = [(1, point1), (2, point2), (4, point4)]
    elif _slope(point3, point4) > _slope(point2, point3):
        logger.debug(f"末段斜率大于中间段斜率，去掉点 3: {point3}")
        points = [(1, point1), (2, point2), (4, point4)]

    return _to_sigmoid_curve(params, points)


def build_transient_curve(params: SigmoidParams) -> SigmoidCurve:
    """构造瞬态型 P 段曲线

    强度在 m 处达到 h_max，两侧对称上升/下降，t_end 时回到 h_start。
    w=0 时点 2、5、3 重合于 m，零宽尖峰对累计强度没有贡献，只保留点 2。
    """
    if not params.transient:
        raise ParameterError("瞬态型曲线要求 transient=True")

    p = params
    shoulder = p.build_up_level
    point1 = (p.t_start, p.h_start)
    point2 = (p.m - p.w / 2, shoulder)
    point5 = (p.m, p.h_max)
    point3 = (p.m + p.w / 2, shoulder)
    point4 = (p.t_end, p.h_start)

    if p.w <= _TIME_EPS:
        points = [(1, point1), (2, point2), (4, point4)]
    else:
        points = [(1, point1), (2, point2), (5, point5), (3, point3), (4, point4)]
    return _to_sigmoid_curve(params, points)


def build_curve(params: SigmoidParams) -> SigmoidCurve:
    """按 transient 标志分派到终点型或瞬态型构造"""
    if params.transient:
        return build_transient_curve(params)
    return build_endpoint_curve(params)


def slowest_uniform_curve(t_start: float, h_start: float, t_end: float, h_max: float) -> HazardCurve:
    """最慢匀速逼近：(t_start, h_start) 到 (t_end, h_max) 的直线，之后保持 h_max

    Args:
        t_start: 起点时间（年）
        h_start: 起点强度
        t_end: 气候终点时间（年）
        h_max: 终点强度

    Returns:
        HazardCurve: 两节点线性曲线
    """
    if not t_end > t_start:
        raise ParameterError(f"需满足 t_end > t_start: {t_start}, {t_end}")
    if not 0 <= h_start <= h_max:
        raise ParameterError(f"需满足 0 ≤ h_start ≤ h_max: {h_start}, {h_max}")
    return HazardCurve.from_nodes([(t_start, h_start), (t_end, h_max)])
