"""Exception hierarchy shared across the package."""


class PeergradeError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(PeergradeError):
    """Invalid input data or configuration (bad weights, shapes, ranges)."""


class DuplicateEntryError(ValidationError):
    """The same edge was supplied more than once."""


class SchemaError(ValidationError):
    """A structured document (JSON config, manifest, CSV) violates its schema."""


class TrainingDivergedError(PeergradeError):
    """Training produced a non-finite loss; carries the offending epoch."""

    def __init__(self, epoch: int, loss: float):
        super().__init__(f"non-finite training loss {loss!r} at epoch {epoch}")
        self.epoch = epoch
        self.loss = loss
