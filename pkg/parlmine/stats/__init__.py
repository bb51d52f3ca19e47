from .stats import (
    CorrelationResult, MannWhitneyResult, SIGNIFICANCE_LEVEL, MIN_P_VALUE,
    pearson, correlate_series, mann_whitney_u, mann_whitney_exact_p,
    compare_cycle_times, student_t_two_sided_p
)

__all__ = [
    'CorrelationResult', 'MannWhitneyResult', 'SIGNIFICANCE_LEVEL', 'MIN_P_VALUE',
    'pearson', 'correlate_series', 'mann_whitney_u', 'mann_whitney_exact_p',
    'compare_cycle_times', 'student_t_two_sided_p'
]
