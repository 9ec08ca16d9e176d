from ._cascade import (
    CascadeError,
    bundle_peak,
    correlate,
    cs_check,
    discontinuity,
    find_peaks,
    g2_equal,
    g2_equal_pair,
    g2_general,
    g2_subset,
    g2_three_level,
    oscillation_condition,
    simulate,
    steady_state,
)

__version__ = "0.1.0"
