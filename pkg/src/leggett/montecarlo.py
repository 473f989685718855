"""Finite-sample trials, estimators and statistically toleranced bound checks.

Sampling is reproducible across runs and thread counts: trials are split into
fixed blocks of :data:`BLOCK_SIZE`, and block ``k`` draws its uniforms from a
PCG64 generator seeded with ``numpy.random.SeedSequence(seed, spawn_key=(k,))``.
Each uniform ``x`` in [0, 1) is mapped to an outcome by inverse CDF over the
fixed order ++, +-, -+, --.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import (
    MIXED,
    CorrelatorSummary,
    InequalityReport,
    JointDistribution,
    LeggettError,
    check_summary,
    summarize,
    validate_distribution,
)

BLOCK_SIZE = 1 << 16
DEFAULT_Z = 5.0


class InvalidSampleSize(LeggettError):
    pass


@dataclass(frozen=True)
class TrialCounts:
    n_pp: int
    n_pm: int
    n_mp: int
    n_mm: int
    seed: int = 0

    def __post_init__(self):
        if min(self.counts()) < 0:
            raise InvalidSampleSize(f"negative count in {self.counts()}")
        if self.n_total < 1:
            raise InvalidSampleSize("at least one trial is required")

    def counts(self) -> tuple[int, int, int, int]:
        return (self.n_pp, self.n_pm, self.n_mp, self.n_mm)

    @property
    def n_total(self) -> int:
        return sum(self.counts())


def _cut_points(p: JointDistribution) -> np.ndarray:
    pp, pm, mp, _ = p.probabilities()
    return np.array([float(pp), float(pp + pm), float(pp + pm + mp)])


def _block_counts(cuts: np.ndarray, seed: int, block: int, size: int) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))
    idx = np.searchsorted(cuts, rng.random(size), side="right")
    return np.bincount(idx, minlength=4)


def sample_counts(p: JointDistribution, n: int, seed: int, workers: int = 1) -> TrialCounts:
    """Draw ``n`` independent outcome pairs from ``p``.

    ``workers`` only changes how blocks are scheduled, never the result.
    """
    if n < 1:
        raise InvalidSampleSize(f"n must be >= 1, got {n}")
    seed = int(seed) % 2**64
    cuts = _cut_points(p)
    n_blocks = -(-n // BLOCK_SIZE)
    sizes = [BLOCK_SIZE] * (n_blocks - 1) + [n - BLOCK_SIZE * (n_blocks - 1)]

    def run(k):
        return _block_counts(cuts, seed, k, sizes[k])

    if workers > 1 and n_blocks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(n_blocks)))
    else:
        parts = [run(k) for k in range(n_blocks)]
    total = np.sum(parts, axis=0)
    return TrialCounts(*(int(c) for c in total), seed=seed)


@dataclass(frozen=True)
class Estimate:
    distribution: JointDistribution
    summary: CorrelatorSummary
    se_a: float
    se_b: float
    se_corr: float


def _standard_error(mean, n: int) -> float:
    return math.sqrt(max(0.0, float(1 - mean * mean)) / n)


def estimate(counts: TrialCounts) -> Estimate:
    """Empirical frequencies (exact), their summary and per-mean standard errors."""
    n = counts.n_total
    freqs = validate_distribution([Fraction(c, n) for c in counts.counts()])
    s = summarize(freqs)
    return Estimate(
        freqs, s,
        _standard_error(s.mean_a, n),
        _standard_error(s.mean_b, n),
        _standard_error(s.corr, n),
    )


class Verdict(str, enum.Enum):
    SATISFIED = "satisfied"
    VIOLATED = "violated"
    INCONCLUSIVE = "inconclusive"  # not produced by the symmetric rule below


@dataclass(frozen=True)
class EmpiricalReport:
    report: InequalityReport
    tolerance: float
    verdict: Verdict
    z: float


def _verdict(summary: CorrelatorSummary, se_total: float, z: float) -> EmpiricalReport:
    if not z > 0:
        raise LeggettError(f"z must be positive, got {z}")
    report = check_summary(summary)
    tolerance = z * se_total
    ok = float(report.upper_slack) >= -tolerance and float(report.lower_slack) >= -tolerance
    return EmpiricalReport(report, tolerance, Verdict.SATISFIED if ok else Verdict.VIOLATED, z)


def empirical_check(counts: TrialCounts, z: float = DEFAULT_Z) -> EmpiricalReport:
    """Check the bounds on empirical frequencies.

    A slack counts as a violation only below ``-z * (se_corr + se_a + se_b)``.
    """
    est = estimate(counts)
    return _verdict(est.summary, est.se_a + est.se_b + est.se_corr, z)


def empirical_mixed_check(
    marginal_counts: TrialCounts, correlation_counts: TrialCounts, z: float = DEFAULT_Z
) -> EmpiricalReport:
    """Like :func:`empirical_check`, with marginals and correlator from separate samples."""
    m, c = estimate(marginal_counts), estimate(correlation_counts)
    summary = CorrelatorSummary(m.summary.mean_a, m.summary.mean_b, c.summary.corr, MIXED)
    return _verdict(summary, m.se_a + m.se_b + c.se_corr, z)
