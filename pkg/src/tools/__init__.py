from .check import check_matrix
from .build import build_code_trellis_report, build_error_trellis_report
from .reduce import reduce_code_report, reduce_error_report
from .restore import restore_paths
from .verify import (
    verify_code_reduction,
    verify_code_trellis,
    verify_error_reduction,
    verify_error_trellis,
)

__all__ = [
    "check_matrix",
    "build_error_trellis_report",
    "build_code_trellis_report",
    "reduce_error_report",
    "reduce_code_report",
    "restore_paths",
    "verify_error_trellis",
    "verify_code_trellis",
    "verify_error_reduction",
    "verify_code_reduction",
]
