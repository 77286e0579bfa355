"""Exception hierarchy shared across the package."""


class TopoquantError(Exception):
    """Base class for all errors raised by this package."""


class GeometryError(TopoquantError):
    """A phantom specification cannot be realised on the requested grid."""


class VolumeFormatError(TopoquantError):
    """Base class for volume-file format violations."""


class BadMagicError(VolumeFormatError):
    """File does not start with the expected magic bytes."""


class VersionError(VolumeFormatError):
    """File declares an unsupported format version."""


class DtypeError(VolumeFormatError):
    """File declares an unknown payload dtype."""


class TruncatedError(VolumeFormatError):
    """Declared dimensions exceed the available payload."""


class ConfigError(TopoquantError):
    """Experiment configuration is malformed or contains unknown keys."""
