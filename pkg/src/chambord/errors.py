"""Exception hierarchy shared by every module.

Each error carries a stable machine-readable ``code`` so the command line
frontend can map failures to distinct identifiers without parsing messages.
"""

from __future__ import annotations


class ChambordError(Exception):
    """Base class for all domain errors."""

    code = "error"


class DSLSyntaxError(ChambordError):
    """Malformed presentation text."""

    code = "dsl-syntax"


class NotArboreal(ChambordError):
    """Presentation violates one of the two arboreal conditions."""

    code = "not-arboreal"

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class UnknownName(ChambordError):
    """Catalog lookup for a name that is not shipped."""

    code = "unknown-name"


class NotAPLeaf(ChambordError):
    """An expansion was requested at a vertex that cannot be expanded."""

    code = "not-a-p-leaf"


class DimensionMismatch(ChambordError):
    """Braids over different (p, q) cannot be combined."""

    code = "dimension-mismatch"


class IndexOutOfRange(ChambordError):
    """Strand or gap index outside the valid range."""

    code = "index-out-of-range"


class BasewordMismatch(ChambordError):
    """Diagrams over different presentations or basewords cannot be combined."""

    code = "baseword-mismatch"


class InvalidDiagram(ChambordError):
    """A diagram violates one of its structural invariants."""

    code = "invalid-diagram"


class NotClosable(ChambordError):
    """An open diagram admits no closed extension."""

    code = "not-closable"


class BudgetExceeded(ChambordError):
    """A search exceeded its configured vertex or size cap."""

    code = "budget-exceeded"


class SchemaError(ChambordError):
    """A JSON document does not match the expected schema."""

    code = "schema"


class PresetUnsupported(ChambordError):
    """The requested catalog preset does not support this operation."""

    code = "preset-unsupported"
