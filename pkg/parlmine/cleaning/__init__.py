from .cleaning import CleaningPolicy, FilterReport, REPORT_LABELS, clean, cycle_time_days

__all__ = ['CleaningPolicy', 'FilterReport', 'REPORT_LABELS', 'clean', 'cycle_time_days']
