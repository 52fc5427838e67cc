"""Per-step loss summary written to the training log"""

from __future__ import annotations

import math
from typing import Any

from pydantic import BaseModel, Field

COMPONENTS = ("g_adv", "d_adv", "r1", "reproj", "mrf")
LOG_COLUMNS = ("step", "total", *COMPONENTS, "eta", "valid_fraction")


class LossReport(BaseModel):
    """
    Loss components of one training iteration

    total = d_adv + lambda_r1 * r1 + g_adv + reproj_weight * (reproj or mrf),
    using only the components active in the current stage.
    """

    step: int = 0
    stage: int = 1
    total: float = 0.0
    components: dict[str, float] = Field(default_factory=dict)
    eta_used: float = 1.0
    valid_fraction: float = 0.0

    @classmethod
    def build(
        cls,
        step: int,
        stage: int,
        components: dict[str, float],
        eta: float,
        valid_fraction: float,
        lambda_r1: float,
        reproj_weight: float = 1.0,
    ) -> LossReport:
        unknown = set(components) - set(COMPONENTS)
        if unknown:
            raise ValueError(f"Unknown loss components: {sorted(unknown)}")
        total = (
            components.get("d_adv", 0.0)
            + lambda_r1 * components.get("r1", 0.0)
            + components.get("g_adv", 0.0)
            + reproj_weight * (components.get("reproj", 0.0) + components.get("mrf", 0.0))
        )
        return cls(
            step=step,
            stage=stage,
            total=total,
            components=dict(components),
            eta_used=eta,
            valid_fraction=valid_fraction,
        )

    def is_finite(self) -> bool:
        return math.isfinite(self.total) and all(math.isfinite(v) for v in self.components.values())

    def to_row(self) -> dict[str, Any]:
        """Flat row for the CSV log; inactive components are empty"""
        row: dict[str, Any] = {"step": self.step, "total": self.total}
        for name in COMPONENTS:
            row[name] = self.components.get(name, float("nan"))
        row["eta"] = self.eta_used
        row["valid_fraction"] = self.valid_fraction
        return row
