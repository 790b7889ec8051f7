from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from calpha.numcore import LogScalar


class Method(str, Enum):
    TOEPLITZ = "toeplitz-extrapolation"
    NYSTROM = "nystrom"
    ODE = "ode-determinant"
    LSQ = "lsq-conditioning"


@dataclass(frozen=True)
class ConstantEstimate:
    """One estimate of c_alpha, tagged with how it was obtained."""

    alpha: int
    value: LogScalar
    method: Method
    params: dict = field(default_factory=dict)
    error_estimate: float = 0.0

    def __post_init__(self):
        if self.value.sign != 1:
            raise ValueError("c_alpha estimates must be positive")
        if not self.error_estimate >= 0:
            raise ValueError("error_estimate must be nonnegative")

    @property
    def c(self) -> float:
        return self.value.to_float()

    def to_json(self) -> dict:
        return {
            "method": self.method.value,
            "value": self.value.to_json(),
            "error_estimate": self.error_estimate,
            "params": self.params,
        }
