from __future__ import annotations

from dataclasses import asdict, dataclass

from ..errors import DomainError


@dataclass(frozen=True)
class ExperimentConfig:
    """Knobs shared by experiments, suites and the CLI.

    ``seed`` determines every random draw; two runs with equal configs give
    identical reports.
    """

    n: int = 12
    beta: float = 0.6
    delta: float = 0.05
    C: float = 3.0
    lam: float = 0.2
    seed: int = 0
    theta_nodes: int | None = None
    ell_max: int = 8
    nu_grid_size: int = 64
    enumeration_budget: int = 1 << 24
    output_format: str = "json"
    instances: int = 200
    workers: int = 1

    def __post_init__(self):
        if not 0.0 < self.beta <= 1.0:
            raise DomainError(f"beta must lie in (0, 1], got {self.beta}")
        if self.n < 1:
            raise DomainError("n must be positive")
        if self.output_format not in ("csv", "json"):
            raise DomainError(f"unknown output format {self.output_format!r}")

    def as_dict(self) -> dict:
        return asdict(self)
