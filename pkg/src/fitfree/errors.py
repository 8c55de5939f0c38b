"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class FitFreeError(ValueError):
    """Base class for every error raised by the package."""


class NotLatinSquare(FitFreeError):
    pass


class NoIdentityAtOne(FitFreeError):
    pass


class NotAssociative(FitFreeError):
    pass


class PartsNotPermuted(FitFreeError):
    pass


class DegreeMismatch(FitFreeError):
    pass


class DegreeCapExceeded(FitFreeError):
    pass


class NotAHomomorphism(FitFreeError):
    pass


class ElementNotInGroup(FitFreeError):
    pass


class NotTransitive(FitFreeError):
    pass


class NotABlockSystem(FitFreeError):
    pass


class InvariantViolation(FitFreeError):
    pass


class MalformedInstance(FitFreeError):
    pass


class RestrictionNotIsomorphism(FitFreeError):
    pass


class PhiNotHomomorphism(FitFreeError):
    pass


class IsGiant(FitFreeError):
    pass


class NotPrimitive(FitFreeError):
    pass


class NotSubdirectAlternating(FitFreeError):
    pass


class PreconditionViolated(FitFreeError):
    pass


class NotFittingFree(FitFreeError):
    pass


class GNotFittingFree(NotFittingFree):
    pass


class CentralizerNontrivial(FitFreeError):
    pass


class ChiNotIsomorphism(FitFreeError):
    pass


class NotUniqueMinimalNormal(FitFreeError):
    pass


class SocleMismatch(FitFreeError):
    pass


class DependentRows(FitFreeError):
    pass


class LengthMismatch(FitFreeError):
    pass


class BudgetExceeded(FitFreeError):
    pass


class UnknownHeader(FitFreeError):
    pass


class ValidationFailed(FitFreeError):
    pass
