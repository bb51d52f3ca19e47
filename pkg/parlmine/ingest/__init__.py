from .export import (
    RawDocument, RawProcess, RawExport, IngestWarning,
    parse_export, parse_export_file, scan_export, count_findings,
    MISSING_DATE, MISSING_ACTIVITY, EMPTY_PROCESS
)

__all__ = [
    'RawDocument', 'RawProcess', 'RawExport', 'IngestWarning',
    'parse_export', 'parse_export_file', 'scan_export', 'count_findings',
    'MISSING_DATE', 'MISSING_ACTIVITY', 'EMPTY_PROCESS'
]
