"""Shared domain types for the autoscaling lab.

Replica counts are plain integers and CPU quantities are integer millicores
(``MilliCPU``).  The only place fractional values appear is inside the
resource balancer, which divides a millicore pool by a per-replica request
and floors the result; everything crossing a module boundary is integral.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

MilliCPU = int


def milli(value: int) -> MilliCPU:
    """Construct a millicore quantity, rejecting negatives."""
    if value < 0:
        raise ValueError(f"milliCPU must be non-negative, got {value}")
    return int(value)


class ScaleAction(enum.Enum):
    """Closed three-valued scaling decision."""

    UP = "up"
    DOWN = "down"
    NONE = "none"

    @classmethod
    def from_wire(cls, text: str) -> "ScaleAction":
        try:
            return cls(text)
        except ValueError:
            raise ValueError(f"unknown scale action {text!r}") from None

    def to_wire(self) -> str:
        return self.value


@dataclass(frozen=True)
class MicroserviceSpec:
    """Static identity and per-replica CPU request/limit of one microservice."""

    name: str
    cpu_request: MilliCPU
    cpu_limit: MilliCPU

    def __post_init__(self):
        if not self.name:
            raise ValueError("microservice name must be non-empty")
        if self.cpu_request <= 0:
            raise ValueError(f"{self.name}: cpu_request must be > 0, got {self.cpu_request}")
        if self.cpu_limit < self.cpu_request:
            raise ValueError(
                f"{self.name}: cpu_limit ({self.cpu_limit}) must be >= cpu_request ({self.cpu_request})"
            )


@dataclass(frozen=True)
class PodMetrics:
    """Runtime observation of a microservice: utilization and replica count.

    ``cmv`` is percent CPU utilization of the request; it may exceed 100 up to
    100 * cpu_limit / cpu_request of the owning spec (the producer enforces
    that bound, since the metrics record does not carry its spec).
    """

    cmv: float
    cr: int

    def __post_init__(self):
        if self.cmv < 0:
            raise ValueError(f"cmv must be >= 0, got {self.cmv}")
        if self.cr < 0:
            raise ValueError(f"cr must be >= 0, got {self.cr}")


@dataclass(frozen=True)
class SlaMetrics:
    """SLA bounds: utilization threshold percent and replica range."""

    tmv: float
    min_r: int
    max_r: int

    def __post_init__(self):
        if not 0 < self.tmv <= 100:
            raise ValueError(f"tmv must be in (0, 100], got {self.tmv}")
        if not 1 <= self.min_r <= self.max_r:
            raise ValueError(f"need 1 <= min_r <= max_r, got min_r={self.min_r} max_r={self.max_r}")


@dataclass(frozen=True)
class ManagerVerdict:
    """One manager's output: desired replicas, decision, and capacity bound."""

    name: str
    dr: int
    sd: ScaleAction
    max_r: int

    def __post_init__(self):
        if self.dr < 0:
            raise ValueError(f"{self.name}: dr must be >= 0, got {self.dr}")


@dataclass(frozen=True)
class ResourcePlan:
    """Final per-microservice decision handed to the executor."""

    name: str
    res_sd: ScaleAction
    res_dr: int
    updated_max_r: int

    def __post_init__(self):
        if self.res_dr > self.updated_max_r:
            raise ValueError(
                f"{self.name}: res_dr ({self.res_dr}) must not exceed "
                f"updated_max_r ({self.updated_max_r})"
            )
