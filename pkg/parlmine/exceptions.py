"""Exceptions raised by parlmine.

All errors derive from :class:`ParlmineError`, and each one also derives from the
closest builtin so that code catching ``ValueError`` keeps working.
"""


class ParlmineError(Exception):
    """Base class for all data errors raised by parlmine."""


class PositionedError(ParlmineError):
    """An error that points at a location inside an input file."""

    def __init__(self, message, position=None, source=None):
        self.message = message
        self.position = position
        self.source = source
        where = ''
        if source is not None:
            where += f'{source}'
        if position is not None:
            where += f'{":" if where else ""}{_format_position(position)}'
        super().__init__(f'{where}: {message}' if where else message)


def _format_position(position):
    if isinstance(position, tuple):
        return ':'.join(str(p) for p in position)
    return str(position)


# ingest

class MalformedXml(PositionedError, ValueError):
    """The export file is not well-formed XML."""


class WrongRootElement(ParlmineError, ValueError):
    """The root element of an export is not ``Export``."""


class ExportStructureWarning(UserWarning):
    """Unknown elements were skipped while reading an export."""


# eventlog

class NoDateFormats(ParlmineError, ValueError):
    """No date pattern was given to the log builder."""


class SinkFailure(ParlmineError, OSError):
    """Writing a serialized log failed."""


class MalformedXes(PositionedError, ValueError):
    """The XES document cannot be read."""


class DuplicateCase(ParlmineError, ValueError):
    """Two traces share a case identifier."""


class BadWindow(ParlmineError, ValueError):
    """A year window whose first year lies after its last year."""


class InvalidPattern(ParlmineError, ValueError):
    """A relabel rule holds a pattern that does not compile."""


# cleaning / metrics

class NoTimestampedEvents(ParlmineError, ValueError):
    """A trace without any timestamped event has no cycle time."""


class EmptyLog(ParlmineError, ValueError):
    """The operation needs at least one trace."""


# stats

class LengthMismatch(ParlmineError, ValueError):
    pass


class DegenerateInput(ParlmineError, ValueError):
    pass


class EmptySample(ParlmineError, ValueError):
    pass


class InsufficientOverlap(ParlmineError, ValueError):
    pass


# enrich

class DuplicateSidecarKey(ParlmineError, ValueError):
    pass


class SidecarColumnClash(ParlmineError, ValueError):
    """A sidecar column would overwrite a computed feature or another sidecar's column."""


class NonPositiveMean(ParlmineError, ValueError):
    pass


class UnknownCase(ParlmineError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ''


# deviance

class EmptyTable(ParlmineError, ValueError):
    pass


class SingleClassTrain(ParlmineError, ValueError):
    pass


class AllFeaturesHidden(ParlmineError, ValueError):
    pass


class UnlabeledTable(ParlmineError, ValueError):
    pass


class RuleSyntaxError(PositionedError, ValueError):
    """A rule text does not follow the rule grammar. ``position`` is a 0-based offset."""


class LastCondition(ParlmineError, ValueError):
    pass


class BadIndex(ParlmineError, IndexError):
    pass


# viz

class EmptySeries(ParlmineError, ValueError):
    pass


# config

class ConfigError(ParlmineError, ValueError):
    """The run configuration is invalid or names an unknown profile."""
