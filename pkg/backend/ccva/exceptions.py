"""异常定义

CCVA 引擎统一的异常层级，命令行根据异常类型决定退出码
"""

from typing import Optional


class CcvaError(Exception):
    """所有 CCVA 异常的基类"""


class ParameterError(CcvaError, ValueError):
    """领域参数违反约束（严格校验，不做截断）"""


class ConfigError(CcvaError, ValueError):
    """运行配置无效

    Attributes:
        field: 出错字段的点分路径，例如 ``market.discount_rate``
        line: 配置文件中对应键所在行号（从 1 开始），未知时为 None
    """

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        self.field = field
        self.line = line
        super().__init__(message)

    def __str__(self) -> str:
        location = []
        if self.line is not None:
            location.append(f"第{self.line}行")
        if self.field:
            location.append(f"字段 {self.field}")
        prefix = f"[{', '.join(location)}] " if location else ""
        return f"{prefix}{super().__str__()}"


class ComputeError(CcvaError, RuntimeError):
    """计算失败，cell 标明失败的场景单元"""

    def __init__(self, message: str, cell: Optional[str] = None):
        self.cell = cell
        super().__init__(message)

    def __str__(self) -> str:
        if self.cell:
            return f"[单元 {self.cell}] {super().__str__()}"
        return super().__str__()
