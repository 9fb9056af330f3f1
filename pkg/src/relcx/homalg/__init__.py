"""Free integer complexes, multicomplexes, homology and the bar construction."""
from ._kernel import BACKEND
from .complexes import (
    ChainMap,
    ComparisonResult,
    FreeComplex,
    HomologyRecord,
    InvalidComplex,
    ZigZag,
    apply_table,
    cone,
    direct_sum,
    equal_on_homology,
    is_quasi_iso,
    shift,
    tensor,
    tensor_maps,
    vadd,
)

__all__ = [
    "BACKEND",
    "ChainMap",
    "ComparisonResult",
    "FreeComplex",
    "HomologyRecord",
    "InvalidComplex",
    "ZigZag",
    "apply_table",
    "cone",
    "direct_sum",
    "equal_on_homology",
    "is_quasi_iso",
    "shift",
    "tensor",
    "tensor_maps",
    "vadd",
]
