"""Exception hierarchy.

Every error carries a short machine-readable ``code``. Contract errors map to
CLI exit status 2, numerical failures to exit status 3.
"""


class QPencilError(Exception):
    code = "error"
    exit_status = 3

    def __init__(self, message="", stage=None, **info):
        super().__init__(message)
        self.stage = stage
        self.info = info

    def with_stage(self, stage):
        if self.stage is None:
            self.stage = stage
        return self

    def __str__(self):
        msg = super().__str__()
        if self.stage:
            return f"[{self.stage}] {msg}"
        return msg


class ContractError(QPencilError, ValueError):
    """Input violates a documented precondition."""

    code = "contract"
    exit_status = 2


class RankDeficiencyError(ContractError):
    code = "rank_deficient"


class NumericalError(QPencilError, ArithmeticError):
    """A kernel failed to converge or produced an unusable result."""

    code = "numerical"
    exit_status = 3


class IllConditionedError(NumericalError):
    code = "ill_conditioned"

    def __init__(self, message="", cond=float("inf"), **kw):
        super().__init__(message, cond=cond, **kw)
        self.cond = cond


class DegeneratePoleError(NumericalError):
    code = "degenerate_pole"


class CollinearityError(NumericalError):
    code = "collinear"


class DefectiveMatrixError(NumericalError):
    code = "defective"


class PreparationError(NumericalError):
    code = "preparation"


class DegenerateProjectionError(NumericalError):
    code = "degenerate_projection"


class UnstableOverlapError(NumericalError):
    code = "unstable_overlap"


class AmbiguousReferenceError(NumericalError):
    code = "ambiguous_reference"


class ResolutionError(NumericalError):
    """Two singular values cannot be told apart by the eigenvalue register."""

    code = "resolution"


class RegisterRangeError(ContractError):
    code = "register_range"
