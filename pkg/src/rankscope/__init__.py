"""Character ratios, U-rank and tensor rank for GL_n(F_q) and SL_n(F_q) at small n, q."""

from ._accel import backend
from .atlas import GroupAtlas, get_atlas, parse_group
from .chartable import CharTable, get_table
from .errors import (
    BudgetExceeded, ConsistencyFailure, InvalidClass, NotInDomain, NotSquare, NumericalGuard,
    RankscopeError, UnsupportedField,
)

__version__ = "0.1.0"


def clear_caches() -> None:
    """Drop memoised atlases, tables and profiles (the big ones hold ~1 GB)."""
    from . import chartable, ranks

    ranks._PROFILES.clear()
    chartable._TABLES.clear()
    get_atlas.cache_clear()


__all__ = [
    "BudgetExceeded", "CharTable", "ConsistencyFailure", "GroupAtlas", "InvalidClass", "NotInDomain",
    "NotSquare", "NumericalGuard", "RankscopeError", "UnsupportedField", "backend", "clear_caches",
    "get_atlas", "get_table", "parse_group",
]
