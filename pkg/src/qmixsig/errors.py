"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes, so keep the hierarchy flat.
"""


class QmixsigError(Exception):
    """Base class for toolkit errors."""


class CapacityError(QmixsigError, ValueError):
    """A size limit (qubits, paths, table resolution) was exceeded."""


class DomainError(QmixsigError, ValueError):
    """A numeric argument lies outside the operation's domain."""


class ShapeError(QmixsigError, ValueError):
    """Register sizes or array lengths are inconsistent."""


class QubitIndexError(QmixsigError, IndexError):
    """A qubit index is out of range or targets overlap controls."""


class ModelError(QmixsigError, ValueError):
    """The input does not fit the model an operation requires."""


class EncodingError(DomainError):
    """An angle encoding would leave its calibrated region."""
