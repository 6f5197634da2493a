"""Exception hierarchy shared by every module in the package.

All raisable conditions are subclasses of :class:`GridcurlError` so callers
(and the CLI) can distinguish data problems from genuine bugs with a single
``except`` clause. Exceptions that describe a specific record or file carry
that context as attributes.
"""


class GridcurlError(Exception):
    """Base class for all errors raised by this package."""


# --- manifest / frame ingestion -------------------------------------------

class MalformedRecord(GridcurlError):
    def __init__(self, line_no: int, detail: str = ""):
        self.line_no = line_no
        msg = f"malformed record at line {line_no}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class MissingField(GridcurlError):
    def __init__(self, name: str, line_no: int):
        self.name = name
        self.line_no = line_no
        super().__init__(f"record at line {line_no} is missing field {name!r}")


class DuplicateId(GridcurlError):
    def __init__(self, sample_id: str):
        self.sample_id = sample_id
        super().__init__(f"duplicate sample id {sample_id!r}")


class TooFewFrames(GridcurlError):
    def __init__(self, where: str, found: int):
        self.where = where
        self.found = found
        super().__init__(f"{where}: need at least 2 frames, found {found}")


class DimensionMismatch(GridcurlError):
    def __init__(self, file: str, expected, got):
        self.file = file
        self.expected = expected
        self.got = got
        super().__init__(f"{file}: frame is {got}, expected {expected}")


class UnsupportedFormat(GridcurlError):
    def __init__(self, file: str, detail: str = ""):
        self.file = file
        msg = f"{file}: unsupported frame format"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


# --- numeric contracts ------------------------------------------------------

class ShapeMismatch(GridcurlError):
    pass


class ConfigInvalid(GridcurlError):
    pass


class OutOfRange(GridcurlError):
    pass


class NonFiniteInput(GridcurlError):
    pass


class IdMismatch(GridcurlError):
    pass


# --- language-model scoring -------------------------------------------------

class EmptyTarget(GridcurlError):
    pass


class ProviderMissingId(GridcurlError):
    def __init__(self, sample_id: str):
        self.sample_id = sample_id
        super().__init__(f"NLL provider has no entry for id {sample_id!r}")


# --- scheduler ----------------------------------------------------------------

class EmptyStartBucket(GridcurlError):
    """The corpus places no samples in the easiest bucket; lower K or merge."""


class InactiveBucket(GridcurlError):
    def __init__(self, bucket):
        self.bucket = bucket
        super().__init__(f"bucket {bucket} is neither active nor mastered")


class Exhausted(GridcurlError):
    """Every bucket is mastered and no revisit target is available."""


class CorruptSnapshot(GridcurlError):
    pass


# --- policy-optimization math -------------------------------------------------

class GroupTooSmall(GridcurlError):
    def __init__(self, size: int):
        self.size = size
        super().__init__(f"reward group needs at least 2 rollouts, got {size}")


class SupportMismatch(GridcurlError):
    pass


class Unnormalized(GridcurlError):
    pass


class LengthMismatch(GridcurlError):
    pass
