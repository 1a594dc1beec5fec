"""Exception types shared across the package."""


class EsstriadError(Exception):
    """Base class for all package-specific errors."""


class DegenerateAxis(EsstriadError):
    """A rotation axis with zero length was supplied."""


class RankError(EsstriadError):
    """A matrix does not have the rank required by the operation."""


class NotEssential(EsstriadError):
    """A matrix fails the essential-matrix characterization."""


class FamilyParamError(EsstriadError):
    """Parameters violate a validity constraint of a triplet family."""


class ChainError(EsstriadError):
    """Edge rotations/baselines do not close into a consistent chain."""


class DegenerateInput(EsstriadError):
    """Input is degenerate for the requested solve (e.g. all-zero blocks)."""


class SchemaError(EsstriadError):
    """A document does not match the expected JSON schema.

    ``path`` is a JSON-pointer-style location of the offending element.
    """

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{message} (at {path or '/'})")
        self.path = path


class NonFiniteValue(EsstriadError):
    """A NaN or infinity was found where a finite number is required."""

    def __init__(self, message: str = "non-finite value", path: str = ""):
        super().__init__(f"{message} (at {path or '/'})" if path else message)
        self.path = path
