"""Exception types shared across the package."""


class ParseError(ValueError):
    """A data file row could not be parsed; message names the row."""


class ResourceError(RuntimeError):
    """An operation would exceed a configured resource cap."""


class ModelFormatError(ValueError):
    """A model file is corrupt or has an unsupported version."""


class AlignmentUndefinedError(ValueError):
    """Kernel-target alignment is undefined (zero kernel matrix)."""
