import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from ..cleaning import cycle_time_days
from ..exceptions import DuplicateSidecarKey, NonPositiveMean, SidecarColumnClash, UnknownCase

logger = logging.getLogger(__name__)

YEAR_KEY = 'year'
CASE_KEY = 'case_id'

EVENT_COUNT = 'event_count'
START_MONTH = 'start_month'
START_YEAR = 'start_year'
WORKLOAD = 'workload'
IS_PASSED_BILL = 'is_passed_bill'
DELAY_LABEL = 'is_delayed'

DEFAULT_DELAY_FACTOR = 1.10

# sidecar columns holding flags, also when written as 0/1
BOOLEAN_COLUMNS = frozenset({'is_election_year', IS_PASSED_BILL})


def count_feature(activity):
    return f'{activity}.count'


def delay_feature(first, second):
    return f'{first}:{second}.delay'


@dataclass(frozen=True)
class SidecarTable:
    """Context data joined onto traces by start year or by case id.

    Args:
        name (str): Table name, e.g. the file name.
        key (str): ``'year'`` or ``'case_id'``.
        rows (dict): Key -> (feature name -> value).
    """

    name: str
    key: str
    rows: Dict[object, Dict[str, object]] = field(default_factory=dict)

    def __post_init__(self):
        if self.key not in (YEAR_KEY, CASE_KEY):
            raise ValueError(f'Sidecar key should be one of {[YEAR_KEY, CASE_KEY]}, got {self.key}.')


def _coerce(value):
    if value is None or (isinstance(value, float) and np.isnan(value)):
        return None
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, float, np.integer, np.floating)):
        return float(value)
    text = str(value).strip()
    if text in ('True', 'true'):
        return True
    if text in ('False', 'false'):
        return False
    if not text:
        return None
    try:
        return float(text)
    except ValueError:
        return text


def _coerce_column(column, value, boolean_columns=BOOLEAN_COLUMNS):
    value = _coerce(value)
    if column in boolean_columns and isinstance(value, float) and value in (0.0, 1.0):
        return bool(value)
    return value


def read_sidecar_csv(path_or_buffer, key, name=None, boolean_columns=BOOLEAN_COLUMNS):
    """Read a sidecar CSV such as ``year_features.csv`` or ``doc_features.csv``.

    Args:
        path_or_buffer (str, path or file object): The CSV file.
        key (str): Join column, ``'year'`` or ``'case_id'``.
        name (str, optional): Table name. Default is the file name.
        boolean_columns (set of str): Columns whose 0/1 values are read as
            ``False``/``True``. Default is ``BOOLEAN_COLUMNS``.

    Returns:
        SidecarTable: One row per key, booleans and numbers parsed.

    Raises:
        DuplicateSidecarKey: If a key occurs twice.
    """
    df = pd.read_csv(path_or_buffer, dtype=str, keep_default_na=False)
    if key not in df.columns:
        raise ValueError(f'Sidecar has no column {key!r}, columns are {list(df.columns)}')
    duplicated = df[key][df[key].duplicated()]
    if not duplicated.empty:
        raise DuplicateSidecarKey(f'Sidecar key {key!r} is not unique: {sorted(set(duplicated))[:5]}')

    rows = {}
    for record in df.to_dict(orient='records'):
        row_key = int(record.pop(key)) if key == YEAR_KEY else str(record.pop(key))
        values = {column: _coerce_column(column, value, boolean_columns) for column, value in record.items()}
        rows[row_key] = {column: value for column, value in values.items() if value is not None}
    if name is None:
        name = str(getattr(path_or_buffer, 'name', path_or_buffer)).rsplit('/', 1)[-1]
    return SidecarTable(name=name, key=key, rows=rows)


@dataclass(frozen=True)
class FeatureRow:
    case_id: str
    features: Dict[str, object] = field(default_factory=dict)
    is_delayed: Optional[bool] = None


@dataclass(frozen=True)
class FeatureTable:
    """Features of every trace, plus the delay label once assigned."""

    rows: List[FeatureRow] = field(default_factory=list)
    feature_catalog: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, 'rows', list(self.rows))
        catalog = frozenset(self.feature_catalog) | {k for r in self.rows for k in r.features}
        object.__setattr__(self, 'feature_catalog', catalog)

    def __len__(self):
        return len(self.rows)

    @property
    def is_labeled(self):
        return bool(self.rows) and all(r.is_delayed is not None for r in self.rows)

    def columns(self):
        """Feature names in a stable order: fixed features first, then alphabetical."""
        fixed = [EVENT_COUNT, START_MONTH, START_YEAR, WORKLOAD, IS_PASSED_BILL]
        head = [c for c in fixed if c in self.feature_catalog]
        return head + sorted(self.feature_catalog - set(head))

    def subset(self, case_ids):
        wanted = set(case_ids)
        return replace(self, rows=[r for r in self.rows if r.case_id in wanted])

    def labels(self):
        return np.array([bool(r.is_delayed) for r in self.rows])

    def to_frame(self):
        """One row per trace indexed by case id; absent features are missing values."""
        df = pd.DataFrame(
            [r.features for r in self.rows],
            index=pd.Index([r.case_id for r in self.rows], name=CASE_KEY),
            columns=self.columns(),
        )
        if any(r.is_delayed is not None for r in self.rows):
            df[DELAY_LABEL] = [r.is_delayed for r in self.rows]
        return df

    @classmethod
    def from_frame(cls, df):
        """Inverse of :meth:`to_frame`, also accepts a frame read back from CSV."""
        if CASE_KEY in df.columns:
            df = df.set_index(CASE_KEY)
        feature_columns = [c for c in df.columns if c != DELAY_LABEL]
        rows = []
        for case_id, record in zip(df.index, df.to_dict(orient='records')):
            features = {c: _coerce_column(c, record[c]) for c in feature_columns}
            label = _coerce(record.get(DELAY_LABEL)) if DELAY_LABEL in df.columns else None
            rows.append(FeatureRow(
                case_id=str(case_id),
                features={k: v for k, v in features.items() if v is not None},
                is_delayed=label if isinstance(label, bool) else None,
            ))
        return cls(rows=rows, feature_catalog=frozenset(feature_columns))


def read_feature_csv(path_or_buffer):
    return FeatureTable.from_frame(pd.read_csv(path_or_buffer, dtype=str, keep_default_na=False))


def _first_occurrence_delays(trace):
    first_index = {}
    for i, event in enumerate(trace.events):
        if event.activity is not None and event.activity not in first_index:
            first_index[event.activity] = i

    delays = {}
    for a, i in first_index.items():
        if trace.events[i].timestamp is None:
            continue
        seen = set()
        for event in trace.events[i + 1:]:
            b = event.activity
            if b is None or b == a or b in seen or event.timestamp is None:
                continue
            seen.add(b)
            delays[delay_feature(a, b)] = float((event.timestamp - trace.events[i].timestamp).days)
    return delays


def _workload(log):
    """Number of traces open at each trace's start date, the trace itself included."""
    spans = [(t.start, t.end) for t in log.traces if t.start is not None]
    starts = np.sort(np.array([s.toordinal() for s, _ in spans], dtype=np.int64))
    ends = np.sort(np.array([e.toordinal() for _, e in spans], dtype=np.int64))

    def at(day):
        d = day.toordinal()
        return int(np.searchsorted(starts, d, side='right') - np.searchsorted(ends, d, side='left'))

    return at


def _check_sidecar_columns(sidecars, activities):
    computed = {EVENT_COUNT, START_MONTH, START_YEAR, WORKLOAD, IS_PASSED_BILL}
    computed |= {count_feature(a) for a in activities}
    owner = {}
    for sidecar in sidecars:
        for column in sorted({c for row in sidecar.rows.values() for c in row}):
            if column in computed or column.endswith('.delay'):
                raise SidecarColumnClash(f'Sidecar {sidecar.name!r} column {column!r} is a computed feature')
            if column in owner:
                raise SidecarColumnClash(
                    f'Column {column!r} occurs in sidecars {owner[column]!r} and {sidecar.name!r}')
            owner[column] = sidecar.name


def extract_features(log, sidecars=(), passed_activities=()):
    """Derive one feature row per trace.

    Features:

        * ``event_count``: number of events.
        * ``<A>.count``: occurrences of activity ``A``, for every activity of the log.
        * ``<A>:<B>.delay``: days from the first ``A`` to the first ``B`` after it.
        * ``start_month``, ``start_year``: of the first event.
        * ``workload``: traces of the log whose time span contains this trace's start date.
        * ``is_passed_bill``: the trace contains one of ``passed_activities``.
        * every column of the sidecars, joined by start year or by case id
          (e.g. ``is_election_year``, ``squire_index``, ``pdf_size``, ``word_count``).

    Args:
        log (EventLog): A cleaned event log.
        sidecars (sequence of SidecarTable): Context tables.
        passed_activities (set of str): Activities that mark a passed bill.

    Returns:
        FeatureTable: Unlabeled feature table in log order.

    Raises:
        SidecarColumnClash: If a sidecar column has the name of a computed
            feature or of a column of another sidecar.
    """
    sidecars = list(sidecars)
    activities = sorted({e.activity for t in log.traces for e in t.events if e.activity is not None})
    _check_sidecar_columns(sidecars, activities)
    passed_activities = set(passed_activities)
    workload_at = _workload(log)
    by_year = [s for s in sidecars if s.key == YEAR_KEY]
    by_case = [s for s in sidecars if s.key == CASE_KEY]

    catalog = {EVENT_COUNT, IS_PASSED_BILL} | {count_feature(a) for a in activities}
    rows = []
    for trace in log.traces:
        features = {EVENT_COUNT: float(len(trace.events))}
        counts = pd.Series([e.activity for e in trace.events if e.activity is not None],
                           dtype=object).value_counts()
        for activity in activities:
            features[count_feature(activity)] = float(counts.get(activity, 0))
        features.update(_first_occurrence_delays(trace))
        features[IS_PASSED_BILL] = any(e.activity in passed_activities for e in trace.events)

        start = trace.start
        if start is not None:
            features[START_MONTH] = float(start.month)
            features[START_YEAR] = float(start.year)
            features[WORKLOAD] = float(workload_at(start))
            for sidecar in by_year:
                features.update(sidecar.rows.get(start.year, {}))
        for sidecar in by_case:
            features.update(sidecar.rows.get(trace.case_id, {}))

        catalog.update(features)
        rows.append(FeatureRow(case_id=trace.case_id, features=features))

    logger.info('Extracted %d features for %d traces', len(catalog), len(rows))
    return FeatureTable(rows=rows, feature_catalog=frozenset(catalog))


def compute_delay_threshold(reference, factor=DEFAULT_DELAY_FACTOR):
    """Cycle time above which a trace counts as delayed.

    Args:
        reference (LogSummary): Summary of the fastest parliament's log.
        factor (float): Multiple of the reference mean. Default is 1.10.

    Returns:
        float: ``factor * reference.mean_cycle_days``.

    Raises:
        NonPositiveMean: If the reference mean is not positive.
    """
    if reference.mean_cycle_days <= 0:
        raise NonPositiveMean(f'Reference mean cycle time should be positive, got {reference.mean_cycle_days}')
    return factor * reference.mean_cycle_days


def label_delayed(table, log, threshold_days):
    """Set ``is_delayed`` to whether the trace's cycle time exceeds ``threshold_days``.

    Raises:
        UnknownCase: If a row's case id is not in ``log``.
    """
    durations = {t.case_id: t for t in log.traces}
    rows = []
    for row in table.rows:
        if row.case_id not in durations:
            raise UnknownCase(f'Case {row.case_id!r} is not in log {log.name!r}')
        rows.append(replace(row, is_delayed=cycle_time_days(durations[row.case_id]) > threshold_days))
    labeled = replace(table, rows=rows)
    logger.info('%d of %d traces delayed at threshold %.2f days',
                sum(r.is_delayed for r in rows), len(rows), threshold_days)
    return labeled
