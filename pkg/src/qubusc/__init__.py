"""Qubus cluster-state compiler: generation schemes, counting, verification.

The package emits explicit conditional-displacement sequences that realize
n x m cluster states on a register coupled to a single bus mode, counts the
operations each scheduling scheme needs, and verifies the result exactly in
integer phase-space algebra, optionally cross-checked by a brute-force
basis-state oracle.
"""

from .algebra import (
    PHASE_UNITS_PER_PI,
    BusLedger,
    BusOp,
    OpSequence,
    Quadrature,
    accumulate,
    compose_step,
    invert,
    ledger_equal,
    pair_key,
)
from .targets import (
    GridSpec,
    TargetGraph,
    checkerboard_coloring,
    grid_coloring,
    grid_graph,
    local_corrections,
)
from .verify import (
    OracleLimitError,
    VerificationError,
    VerifyMode,
    VerifyReport,
    cross_validate,
    oracle_phase_function,
    oracle_verify,
    verify_target,
    walsh_coefficients,
)

__version__ = "0.1.0"

__all__ = [
    "PHASE_UNITS_PER_PI",
    "BusLedger",
    "BusOp",
    "OpSequence",
    "Quadrature",
    "accumulate",
    "compose_step",
    "invert",
    "ledger_equal",
    "pair_key",
    "GridSpec",
    "TargetGraph",
    "checkerboard_coloring",
    "grid_coloring",
    "grid_graph",
    "local_corrections",
    "OracleLimitError",
    "VerificationError",
    "VerifyMode",
    "VerifyReport",
    "cross_validate",
    "oracle_phase_function",
    "oracle_verify",
    "verify_target",
    "walsh_coefficients",
    "__version__",
]
