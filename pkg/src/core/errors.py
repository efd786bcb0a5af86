"""Error hierarchy shared by the core modules and the command line."""


class RelstabError(Exception):
    """Base class for every mathematical failure reported by the library."""


class InvalidInput(RelstabError, ValueError):
    """A precondition of an operation was violated."""


class SingularMatrix(RelstabError):
    """A matrix that had to be inverted has rank below its size."""


class InconsistentSystem(RelstabError):
    """A linear system has no solution."""


class VarietyMismatch(RelstabError):
    """Operands live on different model varieties."""


class WrongVariety(RelstabError):
    """The operation is not defined on the given model variety."""


class NonIntegralResult(RelstabError):
    """An Euler characteristic came out non-integral."""


class NegativeTwist(RelstabError):
    """Direct images of O_pi(k) were requested for k < 0."""


class NonzeroC1(RelstabError):
    """A threshold that assumes c1 = 0 was given a sheaf with c1 != 0."""


class UnsupportedBaseDimension(RelstabError):
    """Usual-slope conversions are only known for bases of dimension 1 and 2."""


class RankOne(RelstabError):
    """Relative slope bounds are undefined for rank one."""


class RankOutOfRange(RelstabError):
    """The rank/second Chern number pair is outside n >= r >= 2."""


class GenericityFailure(RelstabError):
    """A block that the canonical-form reduction must invert is singular."""

    def __init__(self, which: str, draws: int = 0):
        """Record which block failed, or how many random draws were rejected."""
        if draws:
            super().__init__(f"no generic {which} in {draws} draws")
        else:
            super().__init__(f"block [{which}] is not invertible")
        self.which = which
        self.draws = draws


class TooFewColumns(RelstabError):
    """The matrix pair has fewer than r + r2 columns."""


class ShapeMismatch(RelstabError):
    """Matrix shapes do not fit together."""


class ZeroEvaluationEntry(RelstabError):
    """The top row of the right half vanishes at one of the points."""

    def __init__(self, index: int):
        """Record the offending point index."""
        super().__init__(f"top-right evaluation vanishes at point {index}")
        self.index = index


class SingularGroupElement(RelstabError):
    """A component of a group element is not invertible."""


class FormatError(RelstabError):
    """An input document could not be parsed."""
