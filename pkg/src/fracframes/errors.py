"""Exception hierarchy shared by all fracframes modules."""


class FracFramesError(Exception):
    """Base class. ``code`` is a stable machine-readable identifier."""

    code = "error"


class DimensionError(FracFramesError, ValueError):
    code = "dimension"


class SingularMatrixError(FracFramesError, ValueError):
    code = "singular_matrix"


class IfsError(FracFramesError, ValueError):
    code = "invalid_ifs"


class NotExpansiveError(IfsError):
    code = "not_expansive"


class MissingZeroDigitError(IfsError):
    code = "missing_zero_digit"


class DuplicateDigitError(IfsError):
    code = "duplicate_digit"


class CongruentDigitsError(IfsError):
    code = "congruent_digits"


class CandidateError(FracFramesError, ValueError):
    code = "invalid_candidate"


class GridNotClosedError(FracFramesError, ValueError):
    code = "grid_not_closed"

    def __init__(self, missing):
        self.missing = list(missing)
        super().__init__(f"grid is not closed; missing points: {self.missing}")


class IsometryError(FracFramesError, ValueError):
    code = "not_isometry"


class UnsupportedError(FracFramesError, ValueError):
    code = "unsupported"


class AtomBudgetExceeded(FracFramesError, RuntimeError):
    code = "atom_budget"
