"""Resource budgets shared by the computational modules."""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, replace

ENV_BUDGET_ENTRIES = "SKEWFORM_BUDGET_ENTRIES"


class BudgetExceeded(RuntimeError):
    """Raised instead of starting a computation that would exceed a budget."""


def _default_entries() -> int:
    raw = os.environ.get(ENV_BUDGET_ENTRIES)
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(f"{ENV_BUDGET_ENTRIES} must be a positive integer, got {raw!r}")
        if value <= 0:
            raise ValueError(f"{ENV_BUDGET_ENTRIES} must be positive")
        return value
    return 5_000_000


@dataclass(frozen=True)
class Budget:
    max_dim: int = 24
    max_table_entries: int = 0  # 0 -> environment / built-in default
    max_columns: int = 50_000
    force: bool = False

    def __post_init__(self):
        if self.max_table_entries == 0:
            object.__setattr__(self, "max_table_entries", _default_entries())
        if min(self.max_dim, self.max_table_entries, self.max_columns) <= 0:
            raise ValueError("budgets must be positive")

    def with_(self, **kw) -> "Budget":
        return replace(self, **kw)

    def as_dict(self) -> dict:
        return asdict(self)


DEFAULT_BUDGET = Budget()
