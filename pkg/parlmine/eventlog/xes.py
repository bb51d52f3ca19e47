"""Reading and writing event logs in IEEE 1849 XES.

The documents are produced and read by pm4py; this module maps parlmine logs
onto pm4py's event log objects and back. Only the attribute types used by
parlmine are kept: ``string``, ``date``, ``float`` (``int`` is read as
float), ``boolean`` and ``list`` of strings.
"""
import logging
import os
import re
from datetime import date, datetime, timezone

from pm4py.objects.log.exporter.xes import exporter as xes_exporter
from pm4py.objects.log.importer.xes import importer as xes_importer
from pm4py.objects.log.obj import EventLog as PMEventLog
from pm4py.objects.log.obj import Event as PMEvent
from pm4py.objects.log.obj import Trace as PMTrace

from ..exceptions import MalformedXes, SinkFailure
from .log import Event, EventLog, Trace

logger = logging.getLogger(__name__)

ACTIVITY_KEY = 'concept:name'
CASE_ID_KEY = 'concept:name'
TIMESTAMP_KEY = 'time:timestamp'
PROVENANCE_PREFIX = 'provenance:'
LIST_ITEM_KEY = 'item'
PM4PY_PARAMETERS = {'show_progress_bar': False}

# offset of a <date> value, dropped before parsing so the calendar date stays local
_DATE_OFFSET = re.compile(
    rb'(<date\b[^>]*?\bvalue="[^"]*?)(?:Z|[+-]\d{2}:?\d{2})(")'
)


def _to_pm4py_value(value):
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, datetime):
        value = value.date()
    if isinstance(value, date):
        return datetime(value.year, value.month, value.day, tzinfo=timezone.utc)
    if isinstance(value, (tuple, list)):
        return {'value': None, 'children': [(LIST_ITEM_KEY, str(item)) for item in value]}
    if isinstance(value, str):
        return value
    raise TypeError(f'Unsupported attribute type: {type(value)}')


def _to_pm4py_attributes(attributes):
    converted = {}
    for key, value in attributes.items():
        try:
            converted[key] = _to_pm4py_value(value)
        except TypeError as e:
            raise TypeError(f'{e} for {key!r}') from None
    return converted


def to_pm4py(log):
    """Convert ``log`` to a pm4py :class:`pm4py.objects.log.obj.EventLog`.

    Dates become midnight UTC, list values become pm4py ``list`` attributes
    holding one ``item`` string per element.
    """
    log_attributes = {'concept:name': log.name}
    log_attributes.update({PROVENANCE_PREFIX + k: str(v) for k, v in log.provenance.items()})

    traces = []
    for trace in log.traces:
        events = []
        for event in trace.events:
            values = {}
            if event.activity is not None:
                values[ACTIVITY_KEY] = event.activity
            if event.timestamp is not None:
                values[TIMESTAMP_KEY] = _to_pm4py_value(event.timestamp)
            values.update(_to_pm4py_attributes(event.attributes))
            events.append(PMEvent(values))
        attributes = {CASE_ID_KEY: trace.case_id}
        attributes.update(_to_pm4py_attributes(trace.case_attributes))
        traces.append(PMTrace(events, attributes=attributes))
    return PMEventLog(traces, attributes=log_attributes)


def write_xes(log, sink):
    """Serialize ``log`` as an XES document.

    Activities go under ``concept:name``, timestamps under ``time:timestamp``
    as midnight UTC, list values as ``<list>`` containers of strings.

    Args:
        log (EventLog): Log with unique case ids.
        sink (str, path or binary file object): Where to write, UTF-8 encoded.

    Raises:
        SinkFailure: If writing fails.
    """
    document = xes_exporter.serialize(to_pm4py(log), parameters=PM4PY_PARAMETERS)
    try:
        if isinstance(sink, (str, os.PathLike)):
            with open(sink, 'wb') as f:
                f.write(document)
        else:
            sink.write(document)
    except OSError as e:
        raise SinkFailure(f'Cannot write XES for log {log.name!r}: {e}') from e
    logger.debug('Wrote %d traces of log %s', len(log), log.name)


def _source_name(source):
    if isinstance(source, (str, os.PathLike)):
        return os.fspath(source)
    return getattr(source, 'name', None)


def _calendar_date(value):
    """Calendar date of a parsed timestamp, in the offset it carries."""
    if isinstance(value, datetime) or hasattr(value, 'to_pydatetime'):
        return value.date()
    if isinstance(value, date):
        return value
    raise MalformedXes(f'Expected a date, got {value!r}')


def _from_pm4py_value(key, value):
    if isinstance(value, dict):
        if value.get('value') is not None:
            raise MalformedXes(f'Nested attribute {key!r} is not supported')
        return tuple(str(v) for _, v in value.get('children', ()))
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, (datetime, date)) or hasattr(value, 'to_pydatetime'):
        return _calendar_date(value)
    if isinstance(value, str):
        return value
    raise MalformedXes(f'Unsupported value {value!r} for attribute {key!r}')


def _from_pm4py_attributes(attributes):
    return {key: _from_pm4py_value(key, value) for key, value in attributes.items()}


def from_pm4py(pm_log):
    """Convert a pm4py event log back to an :class:`EventLog`.

    Raises:
        MalformedXes: If a trace has no ``concept:name`` or an attribute has
            a type parlmine does not use.
    """
    log_attributes = dict(pm_log.attributes)
    name = str(log_attributes.pop('concept:name', ''))
    provenance = {
        key[len(PROVENANCE_PREFIX):]: str(value)
        for key, value in log_attributes.items()
        if key.startswith(PROVENANCE_PREFIX)
    }

    traces = []
    for number, pm_trace in enumerate(pm_log, start=1):
        case_attributes = dict(pm_trace.attributes)
        case_id = case_attributes.pop(CASE_ID_KEY, None)
        if case_id is None:
            raise MalformedXes(f'Trace number {number} has no {CASE_ID_KEY!r}')
        events = []
        for pm_event in pm_trace:
            attributes = dict(pm_event)
            activity = attributes.pop(ACTIVITY_KEY, None)
            timestamp = attributes.pop(TIMESTAMP_KEY, None)
            events.append(Event(
                activity=None if activity is None else str(activity),
                timestamp=None if timestamp is None else _calendar_date(timestamp),
                attributes=_from_pm4py_attributes(attributes),
            ))
        traces.append(Trace(str(case_id), _from_pm4py_attributes(case_attributes), events))

    return EventLog(name=name, traces=traces, provenance=provenance)


def read_xes(source):
    """Read an XES document written by :func:`write_xes` (or a compatible tool).

    Timestamps keep the calendar date they have in their own offset, so
    ``2006-01-01T00:00:00+01:00`` is read as 1 January 2006. Values that
    pm4py cannot parse (e.g. ``<float value="abc">``) are skipped by its
    importer.

    Args:
        source (str, path or binary file object): The XES document.

    Returns:
        EventLog: The log; inverse of :func:`write_xes` up to attribute order.

    Raises:
        MalformedXes: If the document is not well-formed or not an XES log.
    """
    name = _source_name(source)
    if isinstance(source, (str, os.PathLike)):
        with open(source, 'rb') as f:
            document = f.read()
    else:
        document = source.read()
    if isinstance(document, str):
        document = document.encode('utf-8')
    document = _DATE_OFFSET.sub(rb'\1\2', document)

    try:
        pm_log = xes_importer.deserialize(document, parameters=PM4PY_PARAMETERS)
    except SyntaxError as e:
        position = (e.lineno, e.offset) if e.lineno is not None else None
        raise MalformedXes(getattr(e, 'msg', None) or str(e), position=position, source=name) from e
    if pm_log is None:
        raise MalformedXes('Document holds no <log> element', source=name)

    log = from_pm4py(pm_log)
    logger.debug('Read %d traces of log %s', len(log), log.name)
    return log
