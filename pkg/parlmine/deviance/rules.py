import json
import math
import re
from dataclasses import asdict, dataclass
from typing import Tuple, Union

import numpy as np
import pandas as pd
from sklearn.metrics import confusion_matrix

from ..exceptions import BadIndex, LastCondition, RuleSyntaxError, UnlabeledTable

GE, LE, EQ = '>=', '<=', '='
COMPARATORS = (GE, LE, EQ)
_COMPARATOR_ALIASES = {'≥': GE, '≤': LE}

_CONDITION = re.compile(r'^(?P<feature>.+?)\s*(?P<op>>=|<=|≥|≤|=)\s*(?P<literal>.*?)\s*$')
_SEPARATOR = re.compile(r'"(?:[^"\\]|\\.)*"|\s+and\s+')


def _is_number(value):
    return isinstance(value, (int, float, np.integer, np.floating)) and not isinstance(value, (bool, np.bool_))


def _is_missing(value):
    return value is None or (isinstance(value, (float, np.floating)) and np.isnan(value))


@dataclass(frozen=True)
class Condition:
    """A single test ``feature comparator value``.

    ``>=`` and ``<=`` compare numbers, ``=`` compares booleans or strings.
    """

    feature: str
    comparator: str
    value: Union[float, bool, str]

    def __post_init__(self):
        comparator = _COMPARATOR_ALIASES.get(self.comparator, self.comparator)
        if comparator not in COMPARATORS:
            raise ValueError(f'Comparator should be one of {list(COMPARATORS)}, got {self.comparator!r}')
        object.__setattr__(self, 'comparator', comparator)

        if comparator == EQ:
            if isinstance(self.value, np.bool_):
                object.__setattr__(self, 'value', bool(self.value))
            if not isinstance(self.value, (bool, str)):
                raise TypeError(f'{EQ!r} compares booleans or strings, got {self.value!r}')
        else:
            if not _is_number(self.value):
                raise TypeError(f'{comparator!r} compares numbers, got {self.value!r}')
            object.__setattr__(self, 'value', float(self.value))

    def holds(self, value):
        """Whether a feature value satisfies the condition. Missing values never do."""
        if _is_missing(value):
            return False
        if self.comparator == EQ:
            if isinstance(self.value, bool):
                return isinstance(value, (bool, np.bool_)) and bool(value) == self.value
            return isinstance(value, str) and value == self.value
        if not _is_number(value):
            return False
        return float(value) >= self.value if self.comparator == GE else float(value) <= self.value

    def __str__(self):
        if isinstance(self.value, bool):
            literal = str(self.value)
        elif isinstance(self.value, str):
            literal = json.dumps(self.value, ensure_ascii=False)
        else:
            literal = repr(self.value)
        return f'{self.feature} {self.comparator} {literal}'


@dataclass(frozen=True)
class Rule:
    """Conjunction of conditions.

    A feature row matches if every referenced feature is present and every
    condition holds.
    """

    conditions: Tuple[Condition, ...]

    def __post_init__(self):
        object.__setattr__(self, 'conditions', tuple(self.conditions))
        if not self.conditions:
            raise ValueError('A rule needs at least one condition')

    def __len__(self):
        return len(self.conditions)

    @property
    def features(self):
        return tuple(c.feature for c in self.conditions)

    def matches(self, features):
        """
        Args:
            features (dict): Feature name -> value of one row.
        """
        return all(c.holds(features.get(c.feature)) for c in self.conditions)

    def __str__(self):
        return ' and '.join(str(c) for c in self.conditions)


def _parse_literal(text, comparator, offset):
    if text in ('True', 'False'):
        value = text == 'True'
    elif text.startswith('"'):
        try:
            value = json.loads(text)
        except json.JSONDecodeError as e:
            raise RuleSyntaxError(f'Invalid string literal {text!r}', position=offset + e.pos) from None
        if not isinstance(value, str):
            raise RuleSyntaxError(f'Invalid string literal {text!r}', position=offset)
    else:
        try:
            value = float(text)
        except ValueError:
            raise RuleSyntaxError(f'Invalid literal {text!r}', position=offset) from None
        if not math.isfinite(value):
            raise RuleSyntaxError(f'Thresholds should be finite, got {text!r}', position=offset)

    if (comparator == EQ) == _is_number(value):
        expected = 'a boolean or a quoted string' if comparator == EQ else 'a number'
        raise RuleSyntaxError(f'{comparator!r} expects {expected}, got {text!r}', position=offset)
    return value


def _parse_condition(text, offset):
    match = _CONDITION.match(text)
    if match is None or not match.group('feature').strip():
        raise RuleSyntaxError(f'Expected "<feature> >=|<=|= <literal>", got {text!r}', position=offset)
    literal = match.group('literal')
    if not literal:
        raise RuleSyntaxError('Missing literal', position=offset + match.end('op'))
    comparator = _COMPARATOR_ALIASES.get(match.group('op'), match.group('op'))
    value = _parse_literal(literal, comparator, offset + match.start('literal'))
    return Condition(match.group('feature').strip(), comparator, value)


def parse_rule(text):
    """Parse the text form of a rule.

    Grammar: ``cond (" and " cond)*`` with ``cond := feature (">=" | "<=" | "=") literal``.
    Feature names may contain spaces, dots, colons and any letters. Literals are
    numbers, ``True``/``False`` or double-quoted strings. ``≥`` and ``≤`` are
    accepted as comparators.

    Args:
        text (str): E.g. ``'1. Lesung:Sitzung.delay >= 24.0 and is_passed_bill = True'``.

    Returns:
        Rule: The parsed rule.

    Raises:
        RuleSyntaxError: With the 0-based offset of the offending text.
    """
    if not text.strip():
        raise RuleSyntaxError('Empty rule', position=0)

    conditions = []
    start = 0
    for token in _SEPARATOR.finditer(text):
        if token.group().startswith('"'):
            continue
        conditions.append(_parse_condition(text[start:token.start()], start))
        start = token.end()
    conditions.append(_parse_condition(text[start:], start))
    return Rule(tuple(conditions))


def read_rules(text, source=None):
    """Parse a rule file: one rule per line, blank lines and ``#`` comment lines skipped.

    Raises:
        RuleSyntaxError: With ``(line, column)`` of the offending text, both 1-based.
    """
    rules = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith('#'):
            continue
        indent = len(line) - len(line.lstrip())
        try:
            rules.append(parse_rule(stripped))
        except RuleSyntaxError as e:
            raise RuleSyntaxError(e.message, position=(lineno, indent + e.position + 1), source=source) from None
    return rules


def format_rules(rules, header=None):
    """Text form of ``rules`` that :func:`read_rules` reads back."""
    lines = [f'# {h}' for h in (header.splitlines() if header else [])]
    lines.extend(str(rule) for rule in rules)
    return '\n'.join(lines) + '\n'


def simplify_rule(rule, drop_index):
    """Remove one condition from a rule.

    Removing a condition can only widen the set of matched rows.

    Args:
        rule (Rule): A rule with at least two conditions.
        drop_index (int): 0-based index of the condition to remove.

    Returns:
        Rule: The rule without the condition.

    Raises:
        LastCondition: If the rule has a single condition.
        BadIndex: If ``drop_index`` is out of range.
    """
    if len(rule) == 1:
        raise LastCondition(f'Cannot drop the only condition of {rule}')
    if not isinstance(drop_index, (int, np.integer)) or not 0 <= drop_index < len(rule):
        raise BadIndex(f'drop_index should be in [0, {len(rule) - 1}], got {drop_index}')
    return Rule(rule.conditions[:drop_index] + rule.conditions[drop_index + 1:])


@dataclass(frozen=True)
class RuleEvaluation:
    """Confusion counts of a rule against the delay label."""

    rule: str
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def precision(self):
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self):
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f1(self):
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    def to_dict(self):
        return {'rule': self.rule, 'precision': self.precision, 'recall': self.recall, **{
            k: v for k, v in asdict(self).items() if k != 'rule'}}


def evaluate_rule(rule, table):
    """Compare the rows a rule matches with the rows labeled delayed.

    Args:
        rule (Rule or str): Rule to evaluate.
        table (FeatureTable): Labeled feature table.

    Returns:
        RuleEvaluation: Confusion counts, precision and recall.

    Raises:
        UnlabeledTable: If a row has no delay label.
    """
    if isinstance(rule, str):
        rule = parse_rule(rule)
    if any(row.is_delayed is None for row in table.rows):
        raise UnlabeledTable('Rules can only be evaluated on a labeled feature table')
    if not table.rows:
        return RuleEvaluation(str(rule), 0, 0, 0, 0)

    y_true = table.labels()
    y_pred = np.array([rule.matches(row.features) for row in table.rows], dtype=bool)
    tn, fp, fn, tp = confusion_matrix(y_true, y_pred, labels=[False, True]).ravel()
    return RuleEvaluation(str(rule), tp=int(tp), fp=int(fp), fn=int(fn), tn=int(tn))


def evaluate_rules(rules, table):
    """Evaluate several rules.

    Returns:
        pandas.DataFrame: Columns ``rule``, ``precision``, ``recall``, ``tp``, ``fp``, ``fn``, ``tn``,
        one row per rule in input order.
    """
    columns = ['rule', 'precision', 'recall', 'tp', 'fp', 'fn', 'tn']
    return pd.DataFrame([evaluate_rule(rule, table).to_dict() for rule in rules], columns=columns)
