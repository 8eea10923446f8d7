"""Exception types raised across the toolkit."""


class MislError(Exception):
    """Base class for all toolkit errors."""


class InvalidRecord(MislError, ValueError):
    pass


class NotFound(MislError, KeyError):
    def __str__(self):
        return f"document not found: {self.args[0]!r}"


class InvalidTransition(MislError):
    pass


class ManifestCorrupt(MislError):
    def __init__(self, path, line, detail=""):
        self.path = path
        self.line = line
        super().__init__(f"{path}:{line}: corrupt manifest line {detail}".rstrip())


class CsvShapeError(MislError, ValueError):
    def __init__(self, row, expected, got, detail=""):
        self.row = row
        msg = detail or f"expected {expected} columns, got {got}"
        super().__init__(f"row {row}: {msg}")


class InvalidUrl(MislError, ValueError):
    pass


class InvalidOverride(MislError, ValueError):
    pass


class InvalidRoster(MislError, ValueError):
    pass


class InvalidLookup(MislError, ValueError):
    pass


class NotAnalyzable(MislError):
    pass


class InvalidDimension(MislError, ValueError):
    pass


class InvalidTable(MislError, ValueError):
    pass


class InvalidSeries(MislError, ValueError):
    pass


class InvalidProfile(MislError, ValueError):
    pass


class StageOrderError(MislError):
    def __init__(self, missing_stage):
        self.missing_stage = missing_stage
        super().__init__(f"stage {missing_stage!r} must run first")


class ConfigError(MislError, ValueError):
    pass


class EmptyIndex(UserWarning):
    """Index page parsed to zero rows."""
