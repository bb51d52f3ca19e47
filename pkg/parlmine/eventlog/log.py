import logging
import re
from dataclasses import dataclass, field, replace
from datetime import date, datetime
from typing import Dict, Optional, Tuple

from .. import __version__
from ..exceptions import BadWindow, DuplicateCase, InvalidPattern, NoDateFormats
from ..ingest.export import DOCUMENT_FIELDS, DOCUMENT_LIST_FIELDS

logger = logging.getLogger(__name__)

DEFAULT_DATE_FORMATS = ('%d.%m.%Y', '%Y-%m-%d')

CASE_ATTRIBUTE_KEYS = {
    'v_typ': 'VTyp',
    'v_typ_l': 'VTypL',
    'v_sys': 'VSys',
    'v_sys_l': 'VSysL',
}
SIDE_ENTRIES_KEY = 'Nebeneintrag'

# RawDocument field -> event attribute key
EVENT_ATTRIBUTE_KEYS = {name: aliases[0] for name, aliases in DOCUMENT_FIELDS.items()}
EVENT_LIST_ATTRIBUTE_KEYS = {name: aliases[0] for name, aliases in DOCUMENT_LIST_FIELDS.items()}


@dataclass(frozen=True)
class Event:
    """A document as event. Attribute values are ``str``, ``tuple`` of ``str``,
    ``float``, :class:`datetime.date` or ``bool``."""

    activity: Optional[str]
    timestamp: Optional[date]
    attributes: Dict[str, object] = field(default_factory=dict)


@dataclass(frozen=True)
class Trace:
    case_id: str
    case_attributes: Dict[str, object] = field(default_factory=dict)
    events: Tuple[Event, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'events', tuple(self.events))

    @property
    def timestamps(self):
        return [e.timestamp for e in self.events if e.timestamp is not None]

    @property
    def start(self):
        """Date of the first timestamped event, ``None`` if there is none."""
        stamps = self.timestamps
        return min(stamps) if stamps else None

    @property
    def end(self):
        stamps = self.timestamps
        return max(stamps) if stamps else None

    @property
    def activities(self):
        return tuple(e.activity for e in self.events)


@dataclass(frozen=True)
class EventLog:
    name: str
    traces: Tuple[Trace, ...] = ()
    provenance: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'traces', tuple(self.traces))

    def __len__(self):
        return len(self.traces)

    def __iter__(self):
        return iter(self.traces)

    @property
    def n_events(self):
        return sum(len(t.events) for t in self.traces)

    def case_ids(self):
        return [t.case_id for t in self.traces]

    def with_traces(self, traces, **provenance):
        """Copy of the log holding ``traces``, provenance extended by keyword arguments."""
        return replace(self, traces=tuple(traces), provenance={**self.provenance, **provenance})


def parse_date(text, date_formats):
    """Parse ``text`` with the first matching ``strptime`` pattern, ``None`` if none matches."""
    if text is None:
        return None
    for fmt in date_formats:
        try:
            return datetime.strptime(text.strip(), fmt).date()
        except ValueError:
            continue
    return None


def _document_to_event(document, date_formats):
    attributes = {}
    for name, key in EVENT_ATTRIBUTE_KEYS.items():
        value = getattr(document, name)
        if value is not None:
            attributes[key] = value
    for name, key in EVENT_LIST_ATTRIBUTE_KEYS.items():
        values = getattr(document, name)
        if values:
            attributes[key] = tuple(values)
    for key, value in document.extra_attributes.items():
        attributes.setdefault(key, value)

    return Event(
        activity=document.dok_typ_l,
        timestamp=parse_date(document.date_text, date_formats),
        attributes=attributes,
    )


def _order_events(events):
    # stable: same-day events keep document order, undated events go last
    return sorted(events, key=lambda e: (e.timestamp is None, e.timestamp or date.min))


def _fallback_id(base, taken):
    candidate, suffix = base, 1
    while candidate in taken:
        candidate = f'{base}.{suffix}'
        suffix += 1
    return candidate


def build_log(raw, date_formats=DEFAULT_DATE_FORMATS):
    """Map a parsed export onto an event log.

    Each ``Vorgang`` becomes one trace and each ``Dokument`` one event. The
    activity is ``DokTypL`` (possibly ``None``, see :func:`parlmine.cleaning.clean`),
    the timestamp is ``DokDat`` parsed with the first matching pattern.
    Processes without an id, or repeating an earlier id, get the id
    ``<source>#<ordinal>`` (with a ``.<n>`` suffix should that be taken).
    ``VSysL`` and the other process properties become case attributes, all
    document properties become event attributes and list values are sorted.

    Args:
        raw (RawExport): A parsed export.
        date_formats (sequence of str): ``strptime`` patterns, tried in order.
            Default covers ``dd.MM.yyyy`` and ``yyyy-MM-dd``.

    Returns:
        EventLog: One trace per process, in file order.

    Raises:
        NoDateFormats: If ``date_formats`` is empty.
    """
    date_formats = tuple(date_formats)
    if not date_formats:
        raise NoDateFormats('At least one date pattern is required')

    traces = []
    # fallback ids must not collide with a real id further down the file
    taken = {p.internal_id for p in raw.processes if p.internal_id is not None}
    seen = set()
    for ordinal, process in enumerate(raw.processes):
        case_id = process.internal_id
        if case_id is None or case_id in seen:
            case_id = _fallback_id(f'{raw.source_name}#{ordinal}', taken)
            taken.add(case_id)
        seen.add(case_id)

        case_attributes = {
            key: getattr(process, name)
            for name, key in CASE_ATTRIBUTE_KEYS.items()
            if getattr(process, name) is not None
        }
        if process.side_entries:
            case_attributes[SIDE_ENTRIES_KEY] = tuple(process.side_entries)

        events = [_document_to_event(d, date_formats) for d in process.documents]
        traces.append(Trace(case_id, case_attributes, _order_events(events)))

    log = EventLog(
        name=raw.source_name,
        traces=traces,
        provenance={
            'source': raw.source_name,
            'date_formats': '|'.join(date_formats),
            'generator': f'parlmine {__version__}',
        },
    )
    logger.info('Built log %s with %d traces and %d events', log.name, len(log), log.n_events)
    return sort_list_attributes(log)


def _sorted_lists(attributes):
    return {
        key: tuple(sorted(value)) if isinstance(value, (tuple, list)) else value
        for key, value in attributes.items()
    }


def sort_list_attributes(log):
    """Sort every list-valued case and event attribute ascending. Idempotent."""
    traces = [
        replace(
            trace,
            case_attributes=_sorted_lists(trace.case_attributes),
            events=[replace(e, attributes=_sorted_lists(e.attributes)) for e in trace.events],
        )
        for trace in log.traces
    ]
    return log.with_traces(traces)


def concat_logs(logs, name, prefix_duplicates=False):
    """Concatenate logs of one parliament, e.g. one per election period.

    Args:
        logs (sequence of EventLog): Logs in period order.
        name (str): Name of the merged log.
        prefix_duplicates (bool): Rename a trace whose case id occurs in an
            earlier log to ``<source>/<case id>``, ``source`` being the
            provenance source of its log. Default is to raise.

    Raises:
        DuplicateCase: If two traces share a case id (after renaming).
    """
    logs = list(logs)
    traces, seen = [], set()
    for log in logs:
        source = log.provenance.get('source', log.name)
        for trace in log.traces:
            if trace.case_id in seen and prefix_duplicates:
                logger.warning('Case id %s repeats in %s, renamed to %s/%s',
                               trace.case_id, source, source, trace.case_id)
                trace = replace(trace, case_id=f'{source}/{trace.case_id}')
            if trace.case_id in seen:
                raise DuplicateCase(f'Case id {trace.case_id!r} occurs in more than one log')
            seen.add(trace.case_id)
            traces.append(trace)
    sources = [log.provenance.get('source', log.name) for log in logs]
    return EventLog(name=name, traces=traces, provenance={'source': ','.join(sources)})


def filter_by_case_attribute(log, key, value):
    """Keep the traces whose case attribute ``key`` is the text ``value``."""
    kept = [
        t for t in log.traces
        if isinstance(t.case_attributes.get(key), str) and t.case_attributes[key] == value
    ]
    logger.debug('Case attribute filter %s=%s kept %d of %d traces', key, value, len(kept), len(log))
    return log.with_traces(kept, case_filter=f'{key}={value}')


def filter_by_time_window(log, first_year, last_year):
    """Keep the traces whose first event falls into ``[first_year, last_year]``.

    Traces without any timestamped event are dropped.

    Raises:
        BadWindow: If ``first_year > last_year``.
    """
    if first_year > last_year:
        raise BadWindow(f'Window start {first_year} lies after window end {last_year}')
    kept = [
        t for t in log.traces
        if t.start is not None and first_year <= t.start.year <= last_year
    ]
    return log.with_traces(kept, time_window=f'{first_year}-{last_year}')


@dataclass(frozen=True)
class RelabelRule:
    """Rewrite the activity of matching events to ``new_label``.

    ``activity_pattern`` must match the whole activity. When ``attribute`` is
    given, the event must also carry that attribute and ``value_pattern`` must
    be found in its value (or in one item of a list value).
    """

    activity_pattern: str
    new_label: str
    attribute: Optional[str] = None
    value_pattern: Optional[str] = None

    def __post_init__(self):
        try:
            object.__setattr__(self, '_activity_re', re.compile(self.activity_pattern))
            object.__setattr__(self, '_value_re',
                               re.compile(self.value_pattern) if self.value_pattern is not None else None)
        except re.error as e:
            raise InvalidPattern(f'Invalid pattern in relabel rule {self}: {e}') from e
        if self.attribute is not None and self.value_pattern is None:
            raise InvalidPattern(f'Attribute {self.attribute!r} given without a value pattern')

    def matches(self, event):
        if event.activity is None or not self._activity_re.fullmatch(event.activity):
            return False
        if self.attribute is None:
            return True
        value = event.attributes.get(self.attribute)
        values = value if isinstance(value, tuple) else (value,)
        return any(isinstance(v, str) and self._value_re.search(v) for v in values)

    def __str__(self):
        condition = f' @{self.attribute}~{self.value_pattern}' if self.attribute else ''
        return f'{self.activity_pattern}{condition} => {self.new_label}'


_RELABEL_CONDITION = re.compile(r'^(?P<activity>.*?)\s+@(?P<attribute>[^~]+)~(?P<value>.*)$')


def parse_relabel_rule(text):
    """Read a rule written as ``<activity regex> [@<attribute>~<value regex>] => <label>``.

    Example::

        Plenarprotokoll @Titel~^1\\. => 1. Lesung
    """
    if '=>' not in text:
        raise InvalidPattern(f'Relabel rule needs "=>": {text!r}')
    left, new_label = (part.strip() for part in text.rsplit('=>', 1))
    if not left or not new_label:
        raise InvalidPattern(f'Relabel rule needs a pattern and a label: {text!r}')
    match = _RELABEL_CONDITION.match(left)
    if match:
        return RelabelRule(match['activity'].strip(), new_label,
                           match['attribute'].strip(), match['value'].strip())
    return RelabelRule(left, new_label)


def relabel_readings(log, relabel_rules):
    """Give every reading type its own activity label.

    The first matching rule rewrites an event's activity, other events are untouched.

    Args:
        log (EventLog): The log to relabel.
        relabel_rules (sequence of RelabelRule or str): Rules in priority order;
            strings are read with :func:`parse_relabel_rule`.

    Returns:
        EventLog: The relabeled log.
    """
    rules = [parse_relabel_rule(r) if isinstance(r, str) else r for r in relabel_rules]
    if not rules:
        return log

    def relabel(event):
        for rule in rules:
            if rule.matches(event):
                return replace(event, activity=rule.new_label)
        return event

    traces = [replace(t, events=[relabel(e) for e in t.events]) for t in log.traces]
    return log.with_traces(traces)
