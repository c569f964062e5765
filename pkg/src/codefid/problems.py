"""Domain types for code-fidelity optimization problems."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .channels import ChannelChoi
from .systems import LabeledOperator


class CodeClass(enum.Enum):
    """Constraint class imposed on the code's bipartite operation."""

    NS = "ns"
    PPTP = "ppt"
    BOTH = "both"
    EABOUND = "eabound"

    @property
    def has_ns(self) -> bool:
        return self in (CodeClass.NS, CodeClass.BOTH)

    @property
    def has_ppt(self) -> bool:
        return self in (CodeClass.PPTP, CodeClass.BOTH)

    @classmethod
    def parse(cls, text: str) -> "CodeClass":
        for member in cls:
            if member.value == text.lower():
                return member
        raise ValueError(f"unknown code class {text!r}; expected ns|ppt|both|eabound")


@dataclass(frozen=True)
class CodeProblem:
    """A (channel, size K, code class) instance."""

    channel: ChannelChoi
    size: int
    cls: CodeClass

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("code size K must be >= 1")


@dataclass
class FeasiblePoint:
    """Primal candidate: Lambda on the input (x) output pair, rho on the input."""

    lam: LabeledOperator
    rho: LabeledOperator


@dataclass
class DualPoint:
    """Dual candidate (X, W, Omega, mu) for the fidelity SDP."""

    x_op: LabeledOperator
    w_op: LabeledOperator | None
    omega: LabeledOperator | None
    mu: float
