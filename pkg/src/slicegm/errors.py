"""Exception types raised by the library.

Every error that describes a mathematical failure carries the offending
residual polynomial (or index) so callers can report something concrete.
"""

from __future__ import annotations


class SliceGmError(Exception):
    """Base class for all library errors."""


class ContextMismatch(SliceGmError):
    pass


class ParseError(SliceGmError):
    def __init__(self, message: str, line: int = 1, column: int = 1, path: str | None = None):
        self.message = message
        self.line = line
        self.column = column
        self.path = path
        where = f"line {line}, column {column}"
        if path:
            where = f"{path}: {where}"
        super().__init__(f"{where}: {message}")


class ProblemError(SliceGmError):
    """A problem file is well-formed TOML but not a valid problem."""


class NilpotencyUnconfirmed(SliceGmError):
    def __init__(self, bound: int):
        self.bound = bound
        super().__init__(f"local nilpotency not confirmed within bound {bound}")


class SliceInvalid(SliceGmError):
    def __init__(self, residual):
        self.residual = residual
        super().__init__(f"not a slice: D(s) - 1 = {residual}")


class NotInKernel(SliceGmError):
    def __init__(self, residual, index: int | None = None):
        self.residual = residual
        self.index = index
        label = "element" if index is None else f"element {index}"
        super().__init__(f"{label} is not in ker D: D(a) = {residual}")


class NotNice(SliceGmError):
    def __init__(self, index: int, value):
        self.index = index
        self.value = value
        super().__init__(f"derivation is not nice: D^2(x_{index + 1}) = {value}")


class NotInverse(SliceGmError):
    def __init__(self, index: int, residual, side: str = "forward∘inverse"):
        self.index = index
        self.residual = residual
        self.side = side
        super().__init__(f"{side} differs from identity at generator {index}: residual {residual}")


class NotTriangular(SliceGmError):
    def __init__(self, index: int, reason: str = ""):
        self.index = index
        super().__init__(f"map is not triangular at generator {index}" + (f": {reason}" if reason else ""))


class NotAnActionAtOne(SliceGmError):
    def __init__(self, index: int, residual):
        self.index = index
        self.residual = residual
        super().__init__(f"action is not the identity at t = 1 on generator {index}: residual {residual}")


class ConditionFailed(SliceGmError):
    pass


class InternalVerificationError(SliceGmError):
    """An identity that must hold by construction did not. Indicates a bug."""

    def __init__(self, message: str, residual=None):
        self.residual = residual
        text = message if residual is None else f"{message}: residual {residual}"
        super().__init__(text)


class HypothesesFail(SliceGmError):
    def __init__(self, which: str, residual=None):
        self.which = which
        self.residual = residual
        super().__init__(f"hypothesis {which} fails" + ("" if residual is None else f": residual {residual}"))


class TwoNonzeroEigenvalues(SliceGmError):
    def __init__(self, i: int, j: int):
        self.i = i
        self.j = j
        super().__init__(f"eigenvalues at positions {i} and {j} are both nonzero")


class EigenvalueMismatch(SliceGmError):
    def __init__(self, eigenvalue, n):
        self.eigenvalue = eigenvalue
        self.n = n
        super().__init__(f"pivot eigenvalue {eigenvalue} differs from N = {n}")


class GcdNotOne(SliceGmError):
    def __init__(self, gcd):
        self.gcd = gcd
        super().__init__(f"gcd(f, g) = {gcd} is not 1")


class NotUnivariate(SliceGmError):
    pass


class EmptyFamily(SliceGmError):
    pass
