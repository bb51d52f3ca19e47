import json
from dataclasses import asdict, dataclass, field
from typing import Dict

import numpy as np
import pandas as pd

from ..cleaning import cycle_time_days
from ..exceptions import EmptyLog


@dataclass(frozen=True)
class LogSummary:
    """Basic properties and cycle time statistics of a log (days)."""

    n_cases: int
    n_events: int
    mean_events_per_case: float
    n_activities: int
    n_variants: int
    mean_cycle_days: float
    median_cycle_days: float
    std_cycle_days: float

    def to_dict(self):
        return asdict(self)

    def to_frame(self):
        return pd.DataFrame([self.to_dict()])

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


@dataclass(frozen=True)
class YearlySeries:
    """A metric per calendar year, years ascending."""

    metric_name: str
    points: Dict[int, float] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'points', {int(y): float(v) for y, v in sorted(self.points.items())})

    def __len__(self):
        return len(self.points)

    @property
    def years(self):
        return list(self.points)

    @property
    def values(self):
        return list(self.points.values())

    def to_series(self):
        return pd.Series(self.points, name=self.metric_name, dtype=float).rename_axis('year')

    def to_frame(self):
        """``year`` and ``value`` columns."""
        return pd.DataFrame({'year': self.years, 'value': self.values})

    @classmethod
    def from_frame(cls, df, metric_name, year_column='year', value_column='value'):
        rows = df[[year_column, value_column]].dropna()
        return cls(metric_name, dict(zip(rows[year_column].astype(int), rows[value_column].astype(float))))


def cycle_times(log):
    """Cycle time in days of every trace with at least one timestamp.

    Args:
        log (EventLog): An event log.

    Returns:
        pandas.Series: Cycle times indexed by case id.

    See also:
        :func:`parlmine.cleaning.cycle_time_days`: Cycle time of a single trace.
    """
    values = {t.case_id: cycle_time_days(t) for t in log.traces if t.timestamps}
    return pd.Series(values, dtype=float, name='cycle_days').rename_axis('case_id')


def variant_counts(log):
    """Number of traces per variant (sequence of activity labels), most frequent first.

    Ties keep the order in which variants first occur in the log.
    """
    variants = pd.Series([' > '.join(a if a is not None else '' for a in t.activities) for t in log.traces],
                         dtype=object)
    return variants.value_counts(sort=False).sort_values(ascending=False, kind='mergesort') \
        .rename('n_cases').rename_axis('variant')


def summarize(log):
    """Compute the basic properties and cycle time statistics of a log.

    A variant is the sequence of activity labels of a trace. The standard
    deviation is the sample one (``n - 1`` denominator, 0 for a single trace),
    the median averages the two middle values for even counts. Traces without
    a timestamped event count as cases but not in the cycle time statistics.

    Args:
        log (EventLog): A cleaned event log.

    Returns:
        LogSummary: Summary of the log.

    Raises:
        EmptyLog: If the log has no traces.

    See also:
        :func:`.summary_frame`: Table of summaries of several logs.
    """
    if len(log) == 0:
        raise EmptyLog(f'Cannot summarize the empty log {log.name!r}')

    n_cases = len(log)
    n_events = log.n_events
    activities = {e.activity for t in log.traces for e in t.events if e.activity is not None}
    variants = {t.activities for t in log.traces}

    durations = cycle_times(log).to_numpy()
    if durations.size:
        mean, median = float(np.mean(durations)), float(np.median(durations))
        std = float(np.std(durations, ddof=1)) if durations.size > 1 else 0.0
    else:
        mean = median = std = 0.0

    return LogSummary(
        n_cases=n_cases,
        n_events=n_events,
        mean_events_per_case=n_events / n_cases,
        n_activities=len(activities),
        n_variants=len(variants),
        mean_cycle_days=mean,
        median_cycle_days=median,
        std_cycle_days=std,
    )


def summary_frame(summaries):
    """Put the summaries of several logs side by side.

    Args:
        summaries (dict): Log label -> :class:`LogSummary`.

    Returns:
        pandas.DataFrame: One row per summary field, one column per log.
    """
    return pd.DataFrame({label: s.to_dict() for label, s in summaries.items()})


def _starts(log):
    return pd.DataFrame(
        [(t.start.year, cycle_time_days(t)) for t in log.traces if t.start is not None],
        columns=['year', 'cycle_days'],
    )


def yearly_frequencies(log):
    """Number of traces per start year.

    Years without traces inside the observed span are reported with 0.

    Args:
        log (EventLog): An event log.

    Returns:
        YearlySeries: Trace counts per year, empty for an empty log.

    See also:
        :func:`.yearly_mean_cycle_times`: Mean cycle time per start year.
    """
    starts = _starts(log)
    if starts.empty:
        return YearlySeries('frequency')
    counts = starts.groupby('year').size()
    counts = counts.reindex(range(counts.index.min(), counts.index.max() + 1), fill_value=0)
    return YearlySeries('frequency', counts.to_dict())


def yearly_mean_cycle_times(log):
    """Mean cycle time in days per start year.

    Years without traces are absent rather than 0.

    Args:
        log (EventLog): An event log.

    Returns:
        YearlySeries: Mean cycle times per year.

    See also:
        :func:`.yearly_frequencies`: Trace counts per start year.
    """
    starts = _starts(log)
    if starts.empty:
        return YearlySeries('mean_cycle_days')
    return YearlySeries('mean_cycle_days', starts.groupby('year')['cycle_days'].mean().to_dict())


def log_time_span(log):
    """First and last timestamp of the log, ``(None, None)`` if there is none."""
    starts = [t.start for t in log.traces if t.start is not None]
    if not starts:
        return None, None
    return min(starts), max(t.end for t in log.traces if t.end is not None)
