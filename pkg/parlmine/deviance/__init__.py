from .rules import (
    Condition, Rule, RuleEvaluation,
    parse_rule, read_rules, format_rules, simplify_rule, evaluate_rule, evaluate_rules
)
from .models import (
    InductionConfig, BeamRuleInducer, HIDE_TIME_RELATED, HIDE_LAW,
    split_train_test, induce_rules, is_hidden
)

__all__ = [
    'Condition', 'Rule', 'RuleEvaluation',
    'parse_rule', 'read_rules', 'format_rules', 'simplify_rule', 'evaluate_rule', 'evaluate_rules',
    'InductionConfig', 'BeamRuleInducer', 'HIDE_TIME_RELATED', 'HIDE_LAW',
    'split_train_test', 'induce_rules', 'is_hidden'
]
