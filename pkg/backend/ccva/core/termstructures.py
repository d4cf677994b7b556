"""期限结构模块

确定性贴现曲线与分段线性瞬时违约强度（hazard）曲线。
生存概率通过对线性分段精确求积得到，不引入数值积分误差。

时间统一以实数年表示（距估值日），不做日历/计息基准处理。
"""

import logging
from dataclasses import dataclass, field
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np

from ..exceptions import ParameterError

logger = logging.getLogger(__name__)

TimeLike = Union[float, Sequence[float], np.ndarray]


def _as_times(t: TimeLike) -> Tuple[np.ndarray, bool]:
    """把输入时间转换为一维数组，并返回是否为标量输入"""
    arr = np.asarray(t, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if not np.all(np.isfinite(arr)):
        raise ParameterError(f"时间必须为有限值: {t}")
    if np.any(arr < 0):
        raise ParameterError(f"时间不能为负: {t}")
    return arr, scalar


def _unwrap(values: np.ndarray, scalar: bool):
    return float(values[0]) if scalar else values


@dataclass(frozen=True)
class DiscountCurve:
    """平坦连续复利贴现曲线 D(t) = exp(-r·t)

    Attributes:
        flat_rate: 连续复利年化利率
    """

    flat_rate: float = 0.02

    def __post_init__(self):
        if not np.isfinite(self.flat_rate):
            raise ParameterError(f"贴现利率必须为有限值: {self.flat_rate}")

    def discount(self, t: TimeLike):
        """贴现因子

        Args:
            t: 时间（年），标量或数组，要求 t ≥ 0

        Returns:
            float | np.ndarray: exp(-flat_rate · t)
        """
        arr, scalar = _as_times(t)
        return _unwrap(np.exp(-self.flat_rate * arr), scalar)


@dataclass(frozen=True, eq=False)
class HazardCurve:
    """分段线性瞬时违约强度曲线 λ(t)

    节点之间线性插值，首节点之前与末节点之后水平外推。
    节点时间非递减；同一时间最多出现两次，表示 λ 在该时刻跳跃
    （左值、右值），跳跃时刻取右值。

    Attributes:
        times: 节点时间（年）
        hazards: 节点处的瞬时违约强度（每年）
    """

    times: np.ndarray
    hazards: np.ndarray
    _cumulative: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        times = np.array(self.times, dtype=float, ndmin=1)
        hazards = np.array(self.hazards, dtype=float, ndmin=1)

        if times.shape != hazards.shape or times.ndim != 1 or times.size == 0:
            raise ParameterError("节点时间与强度必须为等长的非空一维序列")
        if not (np.all(np.isfinite(times)) and np.all(np.isfinite(hazards))):
            raise ParameterError("节点必须为有限值")
        if times[0] < 0:
            raise ParameterError(f"节点时间不能为负: {times[0]}")
        if np.any(np.diff(times) < 0):
            raise ParameterError(f"节点时间必须非递减: {times.tolist()}")
        _, counts = np.unique(times, return_counts=True)
        if np.any(counts > 2):
            raise ParameterError("同一时间最多允许两个节点（表示一次跳跃）")
        if np.any(hazards < 0):
            raise ParameterError(f"违约强度不能为负: {hazards.tolist()}")

        # 节点处累计强度，首节点之前按首值水平积分
        cumulative = np.empty_like(times)
        cumulative[0] = hazards[0] * times[0]
        if times.size > 1:
            segments = np.diff(times) * 0.5 * (hazards[:-1] + hazards[1:])
            cumulative[1:] = cumulative[0] + np.cumsum(segments)

        times.setflags(write=False)
        hazards.setflags(write=False)
        cumulative.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "hazards", hazards)
        object.__setattr__(self, "_cumulative", cumulative)

    # ------------------------------------------------------------------
    # 构造
    # ------------------------------------------------------------------

    @classmethod
    def flat(cls, rate: float) -> "HazardCurve":
        """常数强度曲线"""
        return cls(times=[0.0], hazards=[rate])

    @classmethod
    def from_nodes(cls, nodes: Iterable[Tuple[float, float]]) -> "HazardCurve":
        """由 (时间, 强度) 节点列表构造"""
        nodes = list(nodes)
        if not nodes:
            raise ParameterError("节点列表不能为空")
        times, hazards = zip(*nodes)
        return cls(times=times, hazards=hazards)

    @classmethod
    def concatenate(cls, q_curve: "HazardCurve", p_curve: "HazardCurve",
                    t_switch: float) -> "HazardCurve":
        """测度切换拼接：[0, t_switch] 取 q_curve，之后取 p_curve

        切换时刻允许出现跳跃（Q 段末值与 P 段初值不同）。Q 段在切换时刻取左极限，
        其自身在该时刻及之后的节点全部舍弃。

        Args:
            q_curve: 可对冲的 Q 测度段
            p_curve: 切换之后的曲线段
            t_switch: 切换时刻（年）

        Returns:
            HazardCurve: 拼接后的曲线
        """
        if t_switch <= 0:
            raise ParameterError(f"切换时刻必须为正: {t_switch}")

        nodes: List[Tuple[float, float]] = [
            (t, h) for t, h in q_curve.nodes if t < t_switch
        ]
        nodes.append((t_switch, q_curve.hazard_left(t_switch)))

        tail = [(t, h) for t, h in p_curve.nodes if t >= t_switch]
        if not tail or tail[0][0] > t_switch:
            tail.insert(0, (t_switch, p_curve.hazard_at(t_switch)))
        # P 段若在切换时刻自带跳跃，其左值被 Q 段覆盖
        while len(tail) > 1 and tail[1][0] == t_switch:
            tail.pop(0)
        if tail[0][1] == nodes[-1][1]:
            tail = tail[1:]
        nodes.extend(tail)
        return cls.from_nodes(nodes)

    # ------------------------------------------------------------------
    # 查询
    # ------------------------------------------------------------------

    @property
    def nodes(self) -> List[Tuple[float, float]]:
        return list(zip(self.times.tolist(), self.hazards.tolist()))

    def _locate(self, arr: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.times, arr, side="right") - 1
        return np.clip(idx, 0, self.times.size - 1)

    def _interpolate(self, arr: np.ndarray, side: str = "right") -> np.ndarray:
        times, hazards = self.times, self.hazards
        idx = np.clip(np.searchsorted(times, arr, side=side) - 1, 0, times.size - 1)
        values = hazards[idx].astype(float)

        # side="right": times[i] ≤ t < times[i+1]；side="left": times[i] < t ≤ times[i+1]
        after_first = arr >= times[0] if side == "right" else arr > times[0]
        inner = after_first & (idx < times.size - 1)
        if np.any(inner):
            i = idx[inner]
            weight = (arr[inner] - times[i]) / (times[i + 1] - times[i])
            values[inner] = hazards[i] + weight * (hazards[i + 1] - hazards[i])
        return values

    def hazard_at(self, t: TimeLike):
        """瞬时违约强度 λ(t)

        Args:
            t: 时间（年），要求 t ≥ 0

        Returns:
            float | np.ndarray: 线性插值、两端水平外推后的强度
        """
        arr, scalar = _as_times(t)
        return _unwrap(self._interpolate(arr), scalar)

    def hazard_left(self, t: TimeLike):
        """左极限 λ(t⁻)，跳跃时刻取跳跃前的值"""
        arr, scalar = _as_times(t)
        return _unwrap(self._interpolate(arr, side="left"), scalar)

    def cumulative_hazard(self, t: TimeLike):
        """累计强度 Λ(t) = ∫₀ᵗ λ(s) ds

        线性分段上按梯形公式精确积分。

        Args:
            t: 时间（年），要求 t ≥ 0

        Returns:
            float | np.ndarray: 累计强度
        """
        arr, scalar = _as_times(t)
        times, hazards, cumulative = self.times, self.hazards, self._cumulative
        idx = self._locate(arr)

        values = cumulative[idx] + hazards[idx] * (arr - times[idx])

        before = arr < times[0]
        values[before] = hazards[0] * arr[before]

        inner = (~before) & (idx < times.size - 1)
        if np.any(inner):
            i = idx[inner]
            local = self._interpolate(arr[inner])
            values[inner] = cumulative[i] + (arr[inner] - times[i]) * 0.5 * (hazards[i] + local)
        return _unwrap(values, scalar)

    def survival(self, t: TimeLike):
        """生存概率 S(t) = exp(-Λ(t))"""
        arr, scalar = _as_times(t)
        return _unwrap(np.exp(-np.atleast_1d(self.cumulative_hazard(arr))), scalar)

    def default_density(self, t: TimeLike):
        """违约密度 λ(t)·S(t)"""
        arr, scalar = _as_times(t)
        return _unwrap(self._interpolate(arr) * np.atleast_1d(self.survival(arr)), scalar)

    def average_hazard(self, t: TimeLike):
        """平均（零息）强度 Λ(t)/t，t=0 处取 λ(0)"""
        arr, scalar = _as_times(t)
        cumulative = np.atleast_1d(self.cumulative_hazard(arr))
        safe = np.where(arr > 0, arr, 1.0)
        values = np.where(arr > 0, cumulative / safe, self._interpolate(arr))
        return _unwrap(values, scalar)

    def default_probability(self, t1: float, t2: float) -> float:
        """区间 [t1, t2] 内的违约概率 S(t1) - S(t2)"""
        if t2 < t1:
            raise ParameterError(f"区间端点顺序错误: [{t1}, {t2}]")
        return self.survival(t1) - self.survival(t2)

    def breakpoints(self, start: float, end: float) -> np.ndarray:
        """区间 (start, end) 内部的节点时间（去重），用于积分分段"""
        inside = self.times[(self.times > start) & (self.times < end)]
        return np.unique(inside)

    def dominates(self, other: "HazardCurve", horizon: float) -> bool:
        """在 [0, horizon] 上逐点不低于另一条曲线（在两曲线全部节点上检查）"""
        grid = np.unique(np.concatenate([
            [0.0, horizon],
            self.breakpoints(0.0, horizon),
            other.breakpoints(0.0, horizon),
        ]))
        return bool(np.all(self.hazard_at(grid) >= other.hazard_at(grid) - 1e-15))

    def survival_fn(self) -> "SurvivalFn":
        return SurvivalFn(self)

    def __repr__(self) -> str:
        return f"HazardCurve(nodes={self.nodes})"


@dataclass(frozen=True)
class SurvivalFn:
    """HazardCurve 的生存函数视图，提供 S(t) 与违约密度 λ(t)·S(t)"""

    curve: HazardCurve

    def __call__(self, t: TimeLike):
        return self.curve.survival(t)

    def density(self, t: TimeLike):
        return self.curve.default_density(t)
