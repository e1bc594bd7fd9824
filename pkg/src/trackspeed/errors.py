"""Exception types shared across the package."""


class TrackspeedError(Exception):
    """Base class for all package-specific errors."""


class InsufficientData(TrackspeedError):
    """Not enough samples to perform the requested computation."""


class DegenerateClusters(TrackspeedError):
    """Force levels collapse onto each other; calibration has no usable range."""


class MissingProfile(TrackspeedError):
    """A force-responsive session was started without a calibration profile."""


class NonMonotonicTime(TrackspeedError):
    """An input sample's timestamp does not advance past the previous one."""


class NoOperations(TrackspeedError):
    """The trial log contains no pinch cycle."""


class EmptySamples(TrackspeedError):
    """A metric that needs at least one sample received none."""


class DegenerateTrial(TrackspeedError):
    """Trial start and target coincide; progress along the task axis is undefined."""


class OutOfRange(TrackspeedError):
    """An input value lies outside its documented domain."""


class ProtocolError(TrackspeedError):
    """A malformed or out-of-order message on the session service connection."""
