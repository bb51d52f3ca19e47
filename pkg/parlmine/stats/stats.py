import itertools
from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import betainc
from scipy.stats import norm, rankdata, tiecorrect

from ..exceptions import DegenerateInput, EmptySample, InsufficientOverlap, LengthMismatch
from ..metrics import cycle_times

SIGNIFICANCE_LEVEL = 0.05
# p-values below this underflow; reported instead of 0
MIN_P_VALUE = float(np.finfo(float).tiny)


@dataclass(frozen=True)
class CorrelationResult:
    """Outcome of :func:`pearson`. ``p_value`` lies in ``(0, 1]``."""

    r: float
    p_value: float
    n: int
    significant: bool

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class MannWhitneyResult:
    u_statistic: float
    p_value: float
    n1: int
    n2: int

    def to_dict(self):
        return asdict(self)


def student_t_two_sided_p(t, df):
    """Two-sided tail probability of Student's t with ``df`` degrees of freedom.

    Uses ``P(|T| > |t|) = I_x(df / 2, 1 / 2)`` with ``x = df / (df + t**2)``,
    the regularized incomplete beta function.
    """
    if np.isinf(t):
        return 0.0
    x = df / (df + t * t)
    return float(betainc(df / 2.0, 0.5, x))


def pearson(x, y, alpha=SIGNIFICANCE_LEVEL):
    """Pearson correlation with a two-sided significance test.

    The p-value compares ``t = r * sqrt((n - 2) / (1 - r**2))`` against
    Student's t with ``n - 2`` degrees of freedom.

    Args:
        x (1d array-like): First sample.
        y (1d array-like): Second sample, paired with ``x``.
        alpha (float): Significance level. Default is 0.05.

    Returns:
        CorrelationResult: ``r``, ``p_value``, number of pairs and whether ``p_value < alpha``.
        A perfect correlation gets ``p_value = MIN_P_VALUE``, the smallest
        positive normal float.

    Raises:
        LengthMismatch: If ``x`` and ``y`` differ in length.
        DegenerateInput: If there are fewer than 3 pairs or a sample is constant.
    """
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise LengthMismatch(f'Samples differ in length: {x.size} and {y.size}')
    n = x.size
    if n < 3:
        raise DegenerateInput(f'Pearson correlation needs at least 3 pairs, got {n}')

    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy = np.dot(dx, dx), np.dot(dy, dy)
    if sxx == 0 or syy == 0:
        raise DegenerateInput('Pearson correlation is undefined for a constant sample')

    r = float(np.clip(np.dot(dx, dy) / np.sqrt(sxx * syy), -1.0, 1.0))
    df = n - 2
    if abs(r) == 1.0:
        p = MIN_P_VALUE
    else:
        p = max(student_t_two_sided_p(r * np.sqrt(df / (1.0 - r * r)), df), MIN_P_VALUE)
    return CorrelationResult(r=r, p_value=p, n=n, significant=p < alpha)


def correlate_series(s1, s2, alpha=SIGNIFICANCE_LEVEL):
    """Correlate two yearly series on the years they share.

    Args:
        s1 (YearlySeries): E.g. yearly trace frequencies.
        s2 (YearlySeries): E.g. yearly Squire Index values.

    Returns:
        CorrelationResult: Result of :func:`pearson` on the paired values, years ascending.

    Raises:
        InsufficientOverlap: If fewer than 3 years are shared.
    """
    years = sorted(set(s1.points) & set(s2.points))
    if len(years) < 3:
        raise InsufficientOverlap(
            f'{s1.metric_name} and {s2.metric_name} share {len(years)} years, at least 3 are needed')
    return pearson([s1.points[y] for y in years], [s2.points[y] for y in years], alpha=alpha)


def mann_whitney_u(a, b):
    """Two-sided Mann-Whitney U test.

    U is computed for sample ``a`` from rank sums with midranks for ties. The
    p-value uses the normal approximation with tie-corrected variance and
    continuity correction.

    Args:
        a (1d array-like): First sample.
        b (1d array-like): Second sample.

    Returns:
        MannWhitneyResult: ``u_statistic`` of ``a``, two-sided ``p_value`` and sample sizes.

    Raises:
        EmptySample: If a sample is empty.
    """
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    n1, n2 = a.size, b.size
    if n1 == 0 or n2 == 0:
        raise EmptySample(f'Both samples need observations, got sizes {n1} and {n2}')

    ranks = rankdata(np.concatenate([a, b]))
    u1 = float(ranks[:n1].sum() - n1 * (n1 + 1) / 2.0)

    n = n1 + n2
    variance = tiecorrect(ranks) * n1 * n2 * (n + 1) / 12.0
    if variance <= 0:
        # all observations tied
        return MannWhitneyResult(u_statistic=u1, p_value=1.0, n1=n1, n2=n2)

    deviation = max(abs(u1 - n1 * n2 / 2.0) - 0.5, 0.0)
    p = float(min(1.0, 2.0 * norm.sf(deviation / np.sqrt(variance))))
    return MannWhitneyResult(u_statistic=u1, p_value=p, n1=n1, n2=n2)


def mann_whitney_exact_p(a, b):
    """Exact two-sided p-value of U by enumerating all rank assignments.

    Only meant for small tie-free samples, the cost grows with ``C(n1 + n2, n1)``.
    """
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    n1, n2 = a.size, b.size
    ranks = rankdata(np.concatenate([a, b]))
    observed = abs(ranks[:n1].sum() - n1 * (n1 + 1) / 2.0 - n1 * n2 / 2.0)

    extreme = total = 0
    for chosen in itertools.combinations(ranks, n1):
        u = sum(chosen) - n1 * (n1 + 1) / 2.0
        extreme += abs(u - n1 * n2 / 2.0) >= observed - 1e-9
        total += 1
    return extreme / total


def compare_cycle_times(logs):
    """Pairwise Mann-Whitney U tests of cycle times.

    Args:
        logs (dict): Label -> :class:`~parlmine.eventlog.EventLog`.

    Returns:
        dict: ``(label_a, label_b)`` -> :class:`MannWhitneyResult` for every pair in input order.
    """
    durations = {label: cycle_times(log).to_numpy() for label, log in logs.items()}
    return {
        (first, second): mann_whitney_u(durations[first], durations[second])
        for first, second in itertools.combinations(durations, 2)
    }
