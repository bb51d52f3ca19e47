import logging
import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
import pandas as pd
from sklearn.base import BaseEstimator
from sklearn.model_selection import train_test_split
from sklearn.utils.validation import check_consistent_length

from ..exceptions import AllFeaturesHidden, EmptyTable, SingleClassTrain, UnlabeledTable
from .rules import EQ, GE, LE, Condition, Rule

logger = logging.getLogger(__name__)

HIDE_TIME_RELATED = ('.delay', 'start_', 'workload')
HIDE_LAW = ('Gesetz',)

NUMERIC, BOOLEAN, CATEGORICAL = 'numeric', 'boolean', 'categorical'


@dataclass(frozen=True)
class InductionConfig:
    """Settings of the train/test split and of the rule search.

    Args:
        test_fraction (float): Share of rows held out for testing. Default is 0.33.
        seed (int): Seed of the split. Default is 0.
        hidden_patterns (tuple of str): Features whose name contains one of these
            (case-insensitive) are not used by the search.
        max_conditions (int): Longest conjunction searched. Default is 2.
        beam_width (int): Rules kept per search level. Default is 10.
    """

    test_fraction: float = 0.33
    seed: int = 0
    hidden_patterns: Tuple[str, ...] = field(default_factory=tuple)
    max_conditions: int = 2
    beam_width: int = 10

    def __post_init__(self):
        if not 0 < self.test_fraction < 1:
            raise ValueError(f'test_fraction should be in (0, 1). Invalid value: {self.test_fraction}')
        if self.max_conditions < 1:
            raise ValueError(f'max_conditions should be positive. Invalid value: {self.max_conditions}')
        if self.beam_width < 1:
            raise ValueError(f'beam_width should be positive. Invalid value: {self.beam_width}')
        object.__setattr__(self, 'hidden_patterns', tuple(self.hidden_patterns))


def is_hidden(feature, patterns):
    name = feature.casefold()
    return any(p.casefold() in name for p in patterns)


def split_train_test(table, config=None):
    """Seeded split of a feature table into train and test rows.

    The test part gets ``ceil(test_fraction * n)`` rows, the train part the rest.

    Args:
        table (FeatureTable): Rows to split.
        config (InductionConfig, optional): Default is ``InductionConfig()``.

    Returns:
        tuple (FeatureTable, FeatureTable): Train and test tables, rows in input order.

    Raises:
        EmptyTable: If ``table`` has no rows.
    """
    if config is None:
        config = InductionConfig()
    n = len(table)
    if n == 0:
        raise EmptyTable('Cannot split an empty feature table')

    n_test = math.ceil(round(config.test_fraction * n, 9))
    case_ids = [row.case_id for row in table.rows]
    if n_test >= n:
        test_ids = set(case_ids)
    else:
        _, test_ids = train_test_split(case_ids, test_size=n_test, random_state=config.seed, shuffle=True)
        test_ids = set(test_ids)

    train = table.subset(c for c in case_ids if c not in test_ids)
    test = table.subset(test_ids)
    logger.debug('Split %d rows into %d train and %d test rows', n, len(train), len(test))
    return train, test


def _column_kind(values):
    present = [v for v in values if v is not None and not (isinstance(v, float) and np.isnan(v))]
    if not present:
        return None
    if all(isinstance(v, (bool, np.bool_)) for v in present):
        return BOOLEAN
    if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, (bool, np.bool_))
           for v in present):
        return NUMERIC
    if all(isinstance(v, str) for v in present):
        return CATEGORICAL
    return None


def _f1(tp, matched, n_positive):
    return 2.0 * tp / (matched + n_positive)


class BeamRuleInducer(BaseEstimator):
    """Beam search over conjunctions of threshold conditions explaining a binary label.

    Candidate conditions are ``feature >= t`` and ``feature <= t`` for numeric
    features, with ``t`` the midpoints between consecutive distinct training
    values, and ``feature = value`` for boolean and string features. The first
    search level scores every candidate. Each further level extends the
    ``beam_width`` best rules by one condition on another feature, and keeps an
    extension only if it raises F1. Missing values never match.

    Rules are ranked by training F1, then by fewer conditions, then by feature
    names, then by text, so the result does not depend on column order.

    Args:
        max_conditions (int): Longest conjunction searched. Default is 2.
        beam_width (int): Rules kept per search level. Default is 10.
        hidden_patterns (tuple of str): Features whose name contains one of these
            (case-insensitive) are not used.

    Attributes:
        rules_ (list of Rule): Best rules of every search level, ranked.
        f1_scores_ (numpy.ndarray): Training F1 of ``rules_``.
        features_ (list of str): Features the search used.

    Example::

        from parlmine.deviance import BeamRuleInducer

        inducer = BeamRuleInducer(max_conditions=2, hidden_patterns=('.delay',))
        inducer = inducer.fit(X_train, y_train)  # X_train is a pandas.DataFrame of features
        print(inducer.rules_[0])
        delayed = inducer.predict(X_test)

    See Also:
        :func:`.induce_rules`: Run the search on a labeled feature table.
    """

    def __init__(self, max_conditions=2, beam_width=10, hidden_patterns=()):
        self.max_conditions = max_conditions
        self.beam_width = beam_width
        self.hidden_patterns = hidden_patterns

    def _candidates(self, name, values, kind, base, y, n_positive):
        """Score every condition on one feature, restricted to the rows in ``base``.

        Yields ``(score, (feature, comparator, value))`` so that conditions are only
        built for candidates that can enter the beam.
        """
        if kind == NUMERIC:
            column = np.array([np.nan if v is None else float(v) for v in values])
            distinct = np.unique(column[~np.isnan(column)])
            if distinct.size < 2:
                return
            thresholds = (distinct[:-1] + distinct[1:]) / 2.0

            rows = base & ~np.isnan(column)
            order = np.argsort(column[rows], kind='mergesort')
            sorted_values = column[rows][order]
            positives = np.concatenate([[0], np.cumsum(y[rows][order])])

            below = np.searchsorted(sorted_values, thresholds, side='left')
            upto = np.searchsorted(sorted_values, thresholds, side='right')
            f1_ge = _f1(positives[-1] - positives[below], sorted_values.size - below, n_positive)
            f1_le = _f1(positives[upto], upto, n_positive)
            for t, score_ge, score_le in zip(thresholds.tolist(), f1_ge.tolist(), f1_le.tolist()):
                yield score_ge, (name, GE, t)
                yield score_le, (name, LE, t)
        else:
            for value in sorted({v for v in values if v is not None}):
                condition = Condition(name, EQ, value)
                mask = base & np.array([condition.holds(v) for v in values])
                yield float(_f1(y[mask].sum(), mask.sum(), n_positive)), (name, EQ, value)

    @staticmethod
    def _rank_key(item):
        rule, score = item
        return -score, len(rule), rule.features, str(rule)

    def _best(self, scored, build):
        """The ``beam_width`` best of ``(score, spec)`` pairs as ranked ``(rule, score)`` pairs."""
        if len(scored) > self.beam_width:
            cutoff = sorted((s for s, _ in scored), reverse=True)[self.beam_width - 1]
            scored = [(s, spec) for s, spec in scored if s >= cutoff]
        ranked = {}
        for score, spec in scored:
            rule = build(spec)
            key = frozenset(rule.conditions)
            if key not in ranked or self._rank_key((rule, score)) < self._rank_key(ranked[key]):
                ranked[key] = (rule, score)
        return sorted(ranked.values(), key=self._rank_key)[:self.beam_width]

    def fit(self, X, y):
        """Search rules explaining ``y`` on the training data.

        Args:
            X (pandas.DataFrame): Feature values, one column per feature. Missing values are
                ``None`` or ``NaN``.
            y (array-like, shape (n_samples,)): Binary target, True for delayed rows.

        Returns:
            object: self
        """
        if not isinstance(X, pd.DataFrame):
            raise TypeError(f'Expected pandas.DataFrame in training vector X, got {type(X)}')
        check_consistent_length(X, y)
        y = np.asarray(y).astype(bool)
        if np.unique(y).size != 2:
            raise SingleClassTrain(f'Expected delayed and non-delayed rows, got only {np.unique(y).tolist()}')

        visible = [c for c in X.columns if not is_hidden(str(c), self.hidden_patterns)]
        if not visible:
            raise AllFeaturesHidden(f'Every feature matches a hidden pattern of {list(self.hidden_patterns)}')

        columns = {}
        for column in sorted(visible, key=str):
            values = [None if pd.isna(v) else v for v in X[column].tolist()]
            kind = _column_kind(values)
            if kind is not None:
                columns[str(column)] = (values, kind)
        self.features_ = list(columns)

        n_positive = int(y.sum())
        everything = np.ones(len(y), dtype=bool)

        scored = [candidate for name, (values, kind) in columns.items()
                  for candidate in self._candidates(name, values, kind, everything, y, n_positive)]
        level = self._best(scored, lambda spec: Rule((Condition(*spec),)))
        pool = list(level)

        for depth in range(2, self.max_conditions + 1):
            scored = []
            for index, (rule, score) in enumerate(level):
                mask = np.array([rule.matches({c: columns[c][0][i] for c in rule.features})
                                 for i in range(len(y))], dtype=bool)
                for name, (values, kind) in columns.items():
                    if name in rule.features:
                        continue
                    scored.extend((s, (index, spec))
                                  for s, spec in self._candidates(name, values, kind, mask, y, n_positive)
                                  if s > score)
            extensions = len(scored)
            level = self._best(scored, lambda spec: Rule(level[spec[0]][0].conditions + (Condition(*spec[1]),)))
            logger.debug('Search level %d kept %d of %d extensions', depth, len(level), extensions)
            if not level:
                break
            pool.extend(level)

        pool = sorted(pool, key=self._rank_key)
        self.rules_ = [rule for rule, _ in pool]
        self.f1_scores_ = np.array([score for _, score in pool])
        logger.info('Induced %d rules from %d features, best %s', len(self.rules_), len(self.features_),
                    self.rules_[0] if self.rules_ else None)
        return self

    def predict(self, X):
        """Whether the best rule matches each row of ``X``.

        Args:
            X (pandas.DataFrame): Feature values.

        Returns:
            array (shape (n_samples,)): Boolean predictions.
        """
        if not self.rules_:
            return np.zeros(len(X), dtype=bool)
        best = self.rules_[0]
        records = X.to_dict(orient='records')
        return np.array([best.matches({k: (None if pd.isna(v) else v) for k, v in r.items()})
                         for r in records], dtype=bool)


def induce_rules(train, config=None):
    """Induce ranked rules explaining the delay label of a training table.

    Args:
        train (FeatureTable): Labeled training rows.
        config (InductionConfig, optional): Default is ``InductionConfig()``.

    Returns:
        list of Rule: Rules ranked by training F1, fewer conditions first on ties.

    Raises:
        EmptyTable: If ``train`` has no rows.
        UnlabeledTable: If a row has no delay label.
        SingleClassTrain: If all rows have the same label.
        AllFeaturesHidden: If every feature is hidden.

    See Also:
        :class:`.BeamRuleInducer`: The search behind this function.
    """
    if config is None:
        config = InductionConfig()
    if len(train) == 0:
        raise EmptyTable('Cannot induce rules from an empty feature table')
    if not train.is_labeled:
        raise UnlabeledTable('Rules can only be induced from a labeled feature table')

    X = train.to_frame().drop(columns='is_delayed')
    inducer = BeamRuleInducer(
        max_conditions=config.max_conditions,
        beam_width=config.beam_width,
        hidden_patterns=config.hidden_patterns,
    )
    return inducer.fit(X, train.labels()).rules_
