"""End-to-end estimation: order, direct effects, total effects."""

from __future__ import annotations

from dataclasses import dataclass

from .effects import DirectEffects, TotalEffects, estimate_direct, estimate_total
from .linalg import Dataset, RidgeConfig, center_rows
from .ordering import CausalOrder, estimate_order
from .sparse import PATH_LEN


@dataclass
class LingamResult:
    order: CausalOrder
    direct: DirectEffects
    total: TotalEffects


def fit_lingam(data: Dataset, cfg: RidgeConfig = RidgeConfig(), jobs: int = 1,
               path_len: int = PATH_LEN) -> LingamResult:
    data = center_rows(data)
    order = estimate_order(data, cfg)
    direct = estimate_direct(data, order, cfg, jobs, path_len)
    total = estimate_total(data, direct, cfg, jobs, path_len)
    return LingamResult(order, direct, total)
