import numpy as np
import pandas as pd
import pytest

from ..deviance import (
    HIDE_LAW, HIDE_TIME_RELATED, BeamRuleInducer, Condition, InductionConfig, Rule, evaluate_rule,
    evaluate_rules, format_rules, induce_rules, is_hidden, parse_rule, read_rules, simplify_rule,
    split_train_test
)
from ..enrich import FeatureRow, FeatureTable
from ..exceptions import (
    AllFeaturesHidden, BadIndex, EmptyTable, LastCondition, RuleSyntaxError, SingleClassTrain, UnlabeledTable
)
from .conftest import noisy_planted_table, seeds


def _table(n):
    return FeatureTable([FeatureRow(f'c{i:03d}', {'x': float(i)}, is_delayed=i % 2 == 0) for i in range(n)])


def test_parse_rule():
    rule = parse_rule('1. Lesung:Sitzung.delay >= 24.0 and is_passed_bill = True')
    assert rule == Rule((
        Condition('1. Lesung:Sitzung.delay', '>=', 24.0),
        Condition('is_passed_bill', '=', True),
    ))


def test_parse_rule_literals():
    rule = parse_rule('workload≤12 and party = "SPD and CDU" and Gesetz.count >= 1e2')
    assert rule.conditions == (
        Condition('workload', '<=', 12.0),
        Condition('party', '=', 'SPD and CDU'),
        Condition('Gesetz.count', '>=', 100.0),
    )


def test_rule_text_round_trip():
    text = 'Sitzung.count >= 4.5 and is_election_year = False and party = "Grüne"'
    assert str(parse_rule(text)) == text


@pytest.mark.parametrize('text, position', [
    ('a >= b', 5),
    ('', 0),
    ('x = 3', 4),
    ('x >= True', 5),
    ('x >= 1 and y <= inf', 16),
    ('x >= 1 and y', 11),
    ('is_passed_bill = maybe', 17),
])
def test_parse_rule_errors(text, position):
    with pytest.raises(RuleSyntaxError) as excinfo:
        parse_rule(text)
    assert excinfo.value.position == position


def test_read_rules():
    text = '# induced rules\nx >= 1.5\n\ny = True and z <= -2.0\n'
    assert read_rules(text) == [parse_rule('x >= 1.5'), parse_rule('y = True and z <= -2.0')]


def test_read_rules_error_position():
    with pytest.raises(RuleSyntaxError, match='rules.txt:3:8') as excinfo:
        read_rules('x >= 1\n\n  y >= z\n', source='rules.txt')
    assert excinfo.value.position == (3, 8)


def test_format_rules_round_trip(planted_table):
    rules = induce_rules(planted_table)
    text = format_rules(rules, header='seed: 0\ntrain rows: 300')
    assert text.startswith('# seed: 0\n# train rows: 300\n')
    assert read_rules(text) == rules


@pytest.mark.parametrize('comparator, value', [('=', 1.0), ('>=', True), ('<=', 'a'), ('<', 1.0)])
def test_condition_type_check(comparator, value):
    with pytest.raises((TypeError, ValueError)):
        Condition('x', comparator, value)


def test_condition_missing_value_never_holds():
    rule = parse_rule('x >= 1 and y = True')
    assert not rule.matches({'x': 2.0})
    assert not rule.matches({'x': float('nan'), 'y': True})
    assert rule.matches({'x': 1.0, 'y': True})


def test_simplify_rule():
    rule = parse_rule('a >= 1 and b <= 2 and c = True')
    assert simplify_rule(rule, 1) == parse_rule('a >= 1 and c = True')
    with pytest.raises(BadIndex):
        simplify_rule(rule, 3)
    with pytest.raises(BadIndex):
        simplify_rule(rule, -1)
    with pytest.raises(LastCondition):
        simplify_rule(parse_rule('a >= 1'), 0)


@pytest.mark.parametrize('seed', seeds)
def test_simplify_never_lowers_recall(seed):
    table = noisy_planted_table(seed)
    rule = parse_rule('Sitzung.count >= 4.5 and workload <= 30.5 and start_month >= 3.5')
    for index in range(len(rule)):
        simpler = simplify_rule(rule, index)
        assert evaluate_rule(simpler, table).recall >= evaluate_rule(rule, table).recall


def test_evaluate_rule():
    evaluation = evaluate_rule('x >= 4.5', _table(10))
    assert (evaluation.tp, evaluation.fp, evaluation.fn, evaluation.tn) == (2, 3, 3, 2)
    assert evaluation.precision == pytest.approx(0.4)
    assert evaluation.recall == pytest.approx(0.4)
    assert evaluation.rule == 'x >= 4.5'


def test_evaluate_rule_without_matches():
    evaluation = evaluate_rule('x >= 100', _table(10))
    assert evaluation.precision == 0.0
    assert evaluation.recall == 0.0
    assert evaluation.f1 == 0.0


def test_evaluate_rule_row_order_invariant():
    table = noisy_planted_table(3)
    reversed_table = FeatureTable(table.rows[::-1])
    rule = 'Sitzung.count >= 4.5'
    assert evaluate_rule(rule, table) == evaluate_rule(rule, reversed_table)


def test_evaluate_rule_unlabeled():
    with pytest.raises(UnlabeledTable):
        evaluate_rule('x >= 1', FeatureTable([FeatureRow('a', {'x': 2.0})]))


def test_evaluate_rules_frame():
    df = evaluate_rules([parse_rule('x >= 4.5'), 'x <= 0.5'], _table(10))
    assert list(df.columns) == ['rule', 'precision', 'recall', 'tp', 'fp', 'fn', 'tn']
    assert df['rule'].tolist() == ['x >= 4.5', 'x <= 0.5']
    assert df.loc[1, 'precision'] == 1.0


def test_split_sizes():
    train, test = split_train_test(_table(100))
    assert (len(train), len(test)) == (67, 33)
    train_ids, test_ids = {r.case_id for r in train.rows}, {r.case_id for r in test.rows}
    assert train_ids.isdisjoint(test_ids)
    assert len(train_ids | test_ids) == 100


@pytest.mark.parametrize('n, n_test', [(3, 1), (1, 1), (10, 4)])
def test_split_rounds_test_size_up(n, n_test):
    train, test = split_train_test(_table(n))
    assert len(test) == n_test
    assert len(train) == n - n_test


def test_split_deterministic():
    table = _table(50)
    first = split_train_test(table, InductionConfig(seed=7))
    second = split_train_test(table, InductionConfig(seed=7))
    other = split_train_test(table, InductionConfig(seed=8))
    assert first == second
    assert first[1] != other[1]


def test_split_keeps_input_order():
    train, test = split_train_test(_table(30))
    for part in (train, test):
        ids = [r.case_id for r in part.rows]
        assert ids == sorted(ids)


def test_split_empty_table():
    with pytest.raises(EmptyTable):
        split_train_test(FeatureTable())


@pytest.mark.parametrize('kwargs', [{'test_fraction': 0}, {'test_fraction': 1.2}, {'max_conditions': 0},
                                    {'beam_width': 0}])
def test_induction_config_validation(kwargs):
    with pytest.raises(ValueError):
        InductionConfig(**kwargs)


def test_induce_planted_rule(planted_table):
    rules = induce_rules(planted_table)
    best = rules[0]
    assert len(best) == 1
    condition = best.conditions[0]
    assert (condition.feature, condition.comparator) == ('event_count', '>=')
    assert 7 < condition.value <= 8
    assert evaluate_rule(best, planted_table).f1 == 1.0


@pytest.mark.parametrize('pattern', ['event', 'EVENT'])
def test_hidden_features_are_not_used(planted_table, pattern):
    rules = induce_rules(planted_table, InductionConfig(hidden_patterns=(pattern,)))
    assert all('event_count' not in rule.features for rule in rules)


def test_all_features_hidden(planted_table):
    with pytest.raises(AllFeaturesHidden):
        induce_rules(planted_table, InductionConfig(hidden_patterns=('event', 'noise', 'bill')))


def test_single_class_train():
    table = FeatureTable([FeatureRow(str(i), {'x': float(i)}, is_delayed=True) for i in range(5)])
    with pytest.raises(SingleClassTrain):
        induce_rules(table)


def test_induce_unlabeled_or_empty():
    with pytest.raises(EmptyTable):
        induce_rules(FeatureTable())
    with pytest.raises(UnlabeledTable):
        induce_rules(FeatureTable([FeatureRow('a', {'x': 1.0})]))


@pytest.mark.parametrize('seed', seeds)
def test_induced_rule_generalizes(seed):
    train, test = split_train_test(noisy_planted_table(seed), InductionConfig(seed=seed))
    best = induce_rules(train)[0]
    assert 'Sitzung.count' in best.features
    assert evaluate_rule(best, test).f1 >= 0.85


@pytest.mark.parametrize('seed', seeds)
def test_thresholds_within_observed_range(seed):
    train = noisy_planted_table(seed, n=150)
    df = train.to_frame()
    for rule in induce_rules(train, InductionConfig(max_conditions=3)):
        for condition in rule.conditions:
            if condition.comparator != '=':
                values = df[condition.feature].dropna()
                assert values.min() <= condition.value <= values.max()
            assert 1 <= len(rule) <= 3


def test_hide_profiles():
    assert is_hidden('1. Lesung:Sitzung.delay', HIDE_TIME_RELATED)
    assert is_hidden('start_month', HIDE_TIME_RELATED)
    assert is_hidden('workload', HIDE_TIME_RELATED)
    assert not is_hidden('Sitzung.count', HIDE_TIME_RELATED)
    assert is_hidden('Gesetz- und Verordnungsblatt.count', HIDE_LAW)
    assert is_hidden('gesetzblatt', HIDE_LAW)


def test_inducer_deterministic_and_column_order_free():
    table = noisy_planted_table(1, n=200)
    df = table.to_frame().drop(columns='is_delayed')
    y = table.labels()
    first = BeamRuleInducer().fit(df, y)
    second = BeamRuleInducer().fit(df[df.columns[::-1]], y)
    assert first.rules_ == second.rules_
    np.testing.assert_array_equal(first.f1_scores_, second.f1_scores_)
    assert list(first.f1_scores_) == sorted(first.f1_scores_, reverse=True)


def test_inducer_predict():
    table = noisy_planted_table(2, n=100)
    df = table.to_frame().drop(columns='is_delayed')
    inducer = BeamRuleInducer(max_conditions=1).fit(df, table.labels())
    predictions = inducer.predict(df)
    assert predictions.shape == (100,)
    assert predictions.dtype == bool
    assert all(len(rule) == 1 for rule in inducer.rules_)


def test_inducer_needs_frame():
    with pytest.raises(TypeError):
        BeamRuleInducer().fit(np.zeros((4, 2)), [True, False, True, False])


def test_inducer_categorical_feature():
    df = pd.DataFrame({'party': ['A', 'B', 'A', 'C', 'A', 'B'], 'x': [1.0, 1.0, 1.0, 1.0, 1.0, 1.0]})
    inducer = BeamRuleInducer().fit(df, [True, False, True, False, True, False])
    assert str(inducer.rules_[0]) == 'party = "A"'
