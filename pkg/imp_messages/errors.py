"""=== Exception tree ===============================================================================================
Every error the simulator raises on purpose derives from ImpulseError, so callers (the CLI first of all) can map
error classes onto stable exit codes.
==================================================================================================================="""


class ImpulseError(Exception):
    """Root of all simulator errors."""


class RowRangeError(ImpulseError, IndexError):
    """Row index outside the addressed subarray."""


class DecoderConstraintError(ImpulseError):
    """More read wordlines requested than the triple-row decoder can drive."""


class MappingViolationError(ImpulseError):
    """Data placed against the staggered slot layout (hole column, slot alignment)."""


class ParityMismatchError(MappingViolationError):
    """A V row named with a parity other than its alignment."""


class MalformedInstructionError(ImpulseError):
    """Operand set does not match the instruction kind."""


class UnknownInstructionError(ImpulseError):
    """Instruction kind the energy table cannot price."""


class StaleSpikeBufferError(ImpulseError):
    """Conditional write issued without a SpikeCheck of the same parity (strict mode)."""


class QuantizationError(ImpulseError, ValueError):
    """Value outside its fixed-point range. Values are never clamped silently."""


class CapacityError(ImpulseError):
    """Request exceeds one macro. required_macros says how many would fit it."""
    def __init__(self, message: str, required_macros: int = 0):
        super().__init__(message)
        self.required_macros: int = required_macros


class UnsupportedLayerError(CapacityError):
    """Layer shape the macro cannot host at all (Conv fan-in above 128)."""


class ShapeMismatchError(ImpulseError, ValueError):
    """Spike vectors, traces or matrices of inconsistent shape."""


class ModelSchemaError(ImpulseError):
    """Model file failed validation. field_path points at the offending entry."""
    def __init__(self, message: str, field_path: str = ""):
        super().__init__(message)
        self.field_path: str = field_path
