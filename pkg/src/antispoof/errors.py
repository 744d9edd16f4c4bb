"""Exception types raised across the pipeline.

Every error derives from :class:`AntispoofError` so the CLI can report any
pipeline failure uniformly.
"""


class AntispoofError(Exception):
    pass


class IoError(AntispoofError, OSError):
    pass


# audio decoding
class MalformedWav(AntispoofError):
    pass


class UnsupportedFormat(AntispoofError):
    pass


# dataset
class BadLabel(AntispoofError):
    pass


class EmptyManifest(AntispoofError):
    pass


class FileError(AntispoofError):
    def __init__(self, paths):
        self.paths = list(paths)
        super().__init__("unreadable file(s): " + ", ".join(self.paths))


class AllRowsDropped(AntispoofError):
    pass


class DegenerateSplit(AntispoofError):
    pass


class SchemaMismatch(AntispoofError):
    pass


# model
class SingleClass(AntispoofError):
    pass


class NonFiniteInput(AntispoofError):
    pass


class DimensionMismatch(AntispoofError):
    pass


class VersionMismatch(AntispoofError):
    pass


class CorruptModel(AntispoofError):
    pass


# selection
class BadK(AntispoofError):
    pass


class IndexOutOfRange(AntispoofError):
    pass


# metrics
class LengthMismatch(AntispoofError):
    pass


class EmptyInput(AntispoofError):
    pass


class OneClassOnly(AntispoofError):
    pass
