"""Parameter and basis-label types shared by every solver in the package."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

# Parameters usually arrive from parsed decimal text, so the resonance test
# uses a relative tolerance instead of exact equality.
DETUNING_RTOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Rabi-model parameters: field frequency, level splitting, coupling.

    All three are energies in one common unit.  The usual convention sets
    ``big_omega = 1``, but any positive values are accepted.
    """

    omega: float
    big_omega: float
    g: float

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if not self.big_omega > 0:
            raise ValueError(f"big_omega must be positive, got {self.big_omega}")
        if not self.g >= 0:
            raise ValueError(f"g must be non-negative, got {self.g}")


@dataclass(frozen=True)
class SpinFockLabel:
    """Basis label: spin axis ("x" or "z"), spin sign (+1/-1), photon number."""

    spin_axis: str
    spin_sign: int
    n: int

    def __post_init__(self):
        if self.spin_axis not in ("x", "z"):
            raise ValueError(f"spin_axis must be 'x' or 'z', got {self.spin_axis!r}")
        if self.spin_sign not in (+1, -1):
            raise ValueError(f"spin_sign must be +1 or -1, got {self.spin_sign}")
        if self.n < 0:
            raise ValueError(f"photon index must be non-negative, got {self.n}")


class DetuningClass(Enum):
    RESONANCE = "resonance"
    POSITIVE = "positive"
    NEGATIVE = "negative"


def parity_of(label: SpinFockLabel) -> int:
    """Parity of an x-basis label under -sigma_x (-1)^(a^dag a).

    Only x-axis labels are parity eigenstates; z-axis labels raise.
    """
    if label.spin_axis != "x":
        raise ValueError("parity is defined for x-axis spin labels only")
    return -label.spin_sign * (-1) ** label.n


def detuning_class(params: ModelParams) -> DetuningClass:
    """Classify the field frequency against the level splitting."""
    if math.isclose(params.omega, params.big_omega, rel_tol=DETUNING_RTOL, abs_tol=0.0):
        return DetuningClass.RESONANCE
    if params.omega < params.big_omega:
        return DetuningClass.POSITIVE
    return DetuningClass.NEGATIVE
