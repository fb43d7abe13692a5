"""Statevector toolkit for mixed-signal quantum option-pricing circuits."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CapacityError,
    DomainError,
    EncodingError,
    ModelError,
    QmixsigError,
    QubitIndexError,
    ShapeError,
)
from .statevector import (  # noqa: E402
    Circuit,
    CircuitMetrics,
    GateOp,
    StateVector,
    apply_circuit,
    apply_gate,
    circuit_metrics,
    marginal_prob_one,
    new_state,
    run,
    sample_counts,
)

__all__ = [
    "__version__",
    "QmixsigError",
    "CapacityError",
    "DomainError",
    "EncodingError",
    "ModelError",
    "QubitIndexError",
    "ShapeError",
    "Circuit",
    "CircuitMetrics",
    "GateOp",
    "StateVector",
    "apply_circuit",
    "apply_gate",
    "circuit_metrics",
    "marginal_prob_one",
    "new_state",
    "run",
    "sample_counts",
]
