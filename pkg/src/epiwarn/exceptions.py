"""Exception types raised across the package.

Every error carries a stable ``code`` (snake_case) that the HTTP layer and
CLI reuse, so callers can match on codes instead of class identity.
"""


class EpiwarnError(Exception):
    """Base class for all domain errors."""

    code = "error"


# -- series / preprocessing ------------------------------------------------

class EmptyInput(EpiwarnError):
    code = "empty_input"


class DegenerateRange(EpiwarnError):
    """All values equal: a min-max scaler cannot be fit."""

    code = "degenerate_range"


class TooShort(EpiwarnError):
    code = "too_short"


class SeedMismatch(EpiwarnError):
    code = "seed_mismatch"


class LengthMismatch(EpiwarnError):
    code = "length_mismatch"


class MaseUndefined(EpiwarnError):
    """Naive-forecast denominator is zero (or reference too short)."""

    code = "mase_undefined"


class ShapeMismatch(EpiwarnError):
    code = "shape_mismatch"


class NotFitted(EpiwarnError):
    code = "not_fitted"


# -- arima -----------------------------------------------------------------

class NonFinite(EpiwarnError):
    """Optimizer produced a non-finite sum of squares."""

    code = "non_finite"


class NoConvergedModel(EpiwarnError):
    code = "no_converged_model"


# -- classification --------------------------------------------------------

class SingleClassTrainSet(EpiwarnError):
    code = "single_class_train_set"


class EmptyTest(EpiwarnError):
    code = "empty_test"


class AllModelsRejected(EpiwarnError):
    code = "all_models_rejected"


# -- ingest ----------------------------------------------------------------

class ParseError(EpiwarnError):
    code = "parse_error"

    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class UnknownDisease(EpiwarnError):
    code = "unknown_disease"


class DiseaseMismatch(EpiwarnError):
    code = "disease_mismatch"


class GapTooLong(EpiwarnError):
    code = "gap_too_long"

    def __init__(self, week):
        super().__init__(f"gap of two or more weeks starting at {week}")
        self.week = week


class DuplicateWeek(EpiwarnError):
    code = "duplicate_week"


# -- store -----------------------------------------------------------------

class StorageUnavailable(EpiwarnError):
    code = "storage_unavailable"


class ValidationError(EpiwarnError):
    code = "validation_error"


class DuplicateEmail(EpiwarnError):
    code = "duplicate_email"


class InvalidCredentials(EpiwarnError):
    code = "invalid_credentials"


# -- service ---------------------------------------------------------------

class Unauthorized(EpiwarnError):
    code = "unauthorized"


class InsufficientHistory(EpiwarnError):
    code = "insufficient_history"


class ModelNotTrained(EpiwarnError):
    code = "model_not_trained"


class NoRecipients(EpiwarnError):
    code = "no_recipients"


class ProviderUnavailable(EpiwarnError):
    code = "provider_unavailable"


class ProviderError(EpiwarnError):
    code = "provider_error"
