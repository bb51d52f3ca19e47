from .log import (
    Event, Trace, EventLog, RelabelRule, DEFAULT_DATE_FORMATS,
    build_log, sort_list_attributes, concat_logs,
    filter_by_case_attribute, filter_by_time_window,
    parse_relabel_rule, relabel_readings, parse_date
)
from .xes import write_xes, read_xes, to_pm4py, from_pm4py

__all__ = [
    'Event', 'Trace', 'EventLog', 'RelabelRule', 'DEFAULT_DATE_FORMATS',
    'build_log', 'sort_list_attributes', 'concat_logs',
    'filter_by_case_attribute', 'filter_by_time_window',
    'parse_relabel_rule', 'relabel_readings', 'parse_date',
    'write_xes', 'read_xes', 'to_pm4py', 'from_pm4py'
]
