from enum import Enum, auto


class ErrorCode(Enum):
    INVALID_GRAPH = auto()
    NEGATIVE_ESTIMATE = auto()
    UNKNOWN_TECHNIQUE = auto()
    NEGATIVE_SIZE = auto()
    UNKNOWN_BOX_TYPE = auto()
    NEGATIVE_MULTIPLIER = auto()
    EMPTY_CHILDREN = auto()
    NEGATIVE_INPUT = auto()
    UNKNOWN_TECHNOLOGY = auto()
    NOT_COMBINED = auto()
    MODE_MISMATCH = auto()
    SLOT_RESOLUTION = auto()
    INVALID_ATTRIBUTE = auto()


class EstimationError(ValueError):
    def __init__(self, code: ErrorCode, message: str, *, service_id: str | None = None):
        self.code = code
        self.service_id = service_id
        prefix = f"{code.name}" if service_id is None else f"{code.name} ({service_id})"
        super().__init__(f"{prefix}: {message}")


class DocumentError(ValueError):
    """Raised when a graph or metrics document cannot be read or parsed."""
