class QGVError(Exception):
    """Base class for all errors raised by qgverify."""

    kind = "error"


class ParameterError(QGVError, ValueError):
    """Contradictory or malformed arguments."""

    kind = "parameter_error"


class ResourceError(QGVError, RuntimeError):
    """A configured size budget would be exceeded."""

    kind = "resource_error"
