from .metrics import (
    LogSummary, YearlySeries,
    summarize, summary_frame, cycle_times, variant_counts,
    yearly_frequencies, yearly_mean_cycle_times, log_time_span
)

__all__ = [
    'LogSummary', 'YearlySeries',
    'summarize', 'summary_frame', 'cycle_times', 'variant_counts',
    'yearly_frequencies', 'yearly_mean_cycle_times', 'log_time_span'
]
