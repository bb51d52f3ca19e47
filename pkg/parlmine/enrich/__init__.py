from .features import (
    SidecarTable, FeatureRow, FeatureTable, DEFAULT_DELAY_FACTOR,
    read_sidecar_csv, read_feature_csv, extract_features,
    compute_delay_threshold, label_delayed, count_feature, delay_feature
)

__all__ = [
    'SidecarTable', 'FeatureRow', 'FeatureTable', 'DEFAULT_DELAY_FACTOR',
    'read_sidecar_csv', 'read_feature_csv', 'extract_features',
    'compute_delay_threshold', 'label_delayed', 'count_feature', 'delay_feature'
]
