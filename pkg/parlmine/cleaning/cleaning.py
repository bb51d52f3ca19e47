import json
import logging
from dataclasses import asdict, dataclass, fields, replace
from typing import FrozenSet

import pandas as pd

from ..exceptions import NoTimestampedEvents

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CleaningPolicy:
    """Quality rules applied by :func:`clean`.

    Args:
        min_year (int): Earliest valid timestamp year. Default is 1984.
        max_year (int): Latest valid timestamp year. Default is 2024.
        max_cycle_days (int): Longest valid cycle time, the length of an election
            period. Default is 1826 days (five years including one leap day).
        fallback_attribute (str): Event attribute used as activity when
            ``DokTypL`` is missing. Default is ``'DokArtL'``.
        fallback_excluded_values (frozenset of str): Fallback values carrying too
            little information to become an activity. Default is ``{'Drucksache'}``.
    """

    min_year: int = 1984
    max_year: int = 2024
    max_cycle_days: int = 1826
    fallback_attribute: str = 'DokArtL'
    fallback_excluded_values: FrozenSet[str] = frozenset({'Drucksache'})

    def __post_init__(self):
        if self.min_year > self.max_year:
            raise ValueError(f'min_year={self.min_year} should not be greater than max_year={self.max_year}')
        if self.max_cycle_days <= 0:
            raise ValueError(f'max_cycle_days should be positive. Invalid value: {self.max_cycle_days}')
        object.__setattr__(self, 'fallback_excluded_values', frozenset(self.fallback_excluded_values))


REPORT_LABELS = {
    'original': 'originally',
    'missing_date': 'missing date',
    'invalid_date': 'invalid date',
    'no_activity_before_correction': 'no activity name',
    'no_activity_after_correction': 'no activity name after correction',
    'removed_total': 'removed in total',
    'remaining': 'after processing',
}


@dataclass(frozen=True)
class FilterReport:
    """Number of traces per cleaning rule.

    A trace failing several rules is counted under each of them but removed once,
    so ``removed_total`` can be smaller than the sum of the rule counts.
    """

    original: int = 0
    missing_date: int = 0
    invalid_date: int = 0
    no_activity_before_correction: int = 0
    no_activity_after_correction: int = 0
    removed_total: int = 0
    remaining: int = 0

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    def to_frame(self):
        """Report as a DataFrame with ``field``, ``label`` and ``traces`` columns."""
        return pd.DataFrame({
            'field': [f.name for f in fields(self)],
            'label': [REPORT_LABELS[f.name] for f in fields(self)],
            'traces': [getattr(self, f.name) for f in fields(self)],
        })


def cycle_time_days(trace):
    """Days between the first and the last timestamped event of a trace.

    Raises:
        NoTimestampedEvents: If no event of the trace has a timestamp.
    """
    stamps = trace.timestamps
    if not stamps:
        raise NoTimestampedEvents(f'Trace {trace.case_id!r} has no timestamped event')
    return (max(stamps) - min(stamps)).days


def _is_empty(activity):
    return activity is None or not activity.strip()


def _correct_activity(event, policy):
    if not _is_empty(event.activity):
        return event
    fallback = event.attributes.get(policy.fallback_attribute)
    if isinstance(fallback, str) and not _is_empty(fallback) \
            and fallback not in policy.fallback_excluded_values:
        return replace(event, activity=fallback)
    return event


def _has_invalid_date(trace, policy):
    stamps = trace.timestamps
    if not stamps:
        return False
    if any(not policy.min_year <= s.year <= policy.max_year for s in stamps):
        return True
    return cycle_time_days(trace) > policy.max_cycle_days


def clean(log, policy=None):
    """Remove low-quality traces and fill missing activity names.

    A trace is removed if it holds no event at all or an event without
    timestamp (both counted as missing date), an event dated outside
    ``[min_year, max_year]`` or a cycle time above ``max_cycle_days`` (both
    counted as invalid date), or an event whose activity is still empty
    after the fallback correction.

    Args:
        log (EventLog): Log as built by :func:`parlmine.eventlog.build_log`.
        policy (CleaningPolicy, optional): Rules to apply. Default is ``CleaningPolicy()``.

    Returns:
        tuple (EventLog, FilterReport): The cleaned log and the per-rule counts.
    """
    if policy is None:
        policy = CleaningPolicy()

    kept = []
    counts = dict.fromkeys(
        ['missing_date', 'invalid_date', 'no_activity_before_correction', 'no_activity_after_correction'], 0)

    for trace in log.traces:
        missing_date = not trace.events or any(e.timestamp is None for e in trace.events)
        invalid_date = _has_invalid_date(trace, policy)
        no_activity = any(_is_empty(e.activity) for e in trace.events)

        corrected = trace
        if no_activity:
            corrected = replace(trace, events=[_correct_activity(e, policy) for e in trace.events])
        still_no_activity = any(_is_empty(e.activity) for e in corrected.events)

        counts['missing_date'] += missing_date
        counts['invalid_date'] += invalid_date
        counts['no_activity_before_correction'] += no_activity
        counts['no_activity_after_correction'] += still_no_activity

        if not (missing_date or invalid_date or still_no_activity):
            kept.append(corrected)

    report = FilterReport(
        original=len(log),
        removed_total=len(log) - len(kept),
        remaining=len(kept),
        **counts
    )
    logger.info('Cleaning %s: %d of %d traces remain', log.name, report.remaining, report.original)
    cleaned = log.with_traces(
        kept,
        cleaning=f'years={policy.min_year}-{policy.max_year};max_cycle_days={policy.max_cycle_days};'
                 f'fallback={policy.fallback_attribute}'
    )
    return cleaned, report
