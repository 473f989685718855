"""Joint distributions of two dichotomic observables and the basic Leggett bounds.

Every routine accepts either exact (``fractions.Fraction``) or float-backed
distributions.  Exact inputs are checked with zero tolerance; float inputs use
the fixed budget in :data:`FLOAT_TOL`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Optional, Union

import numpy as np

Number = Union[Fraction, float]

#: Clamp threshold for slightly negative float probabilities.
NEGATIVE_CLAMP = 1e-12
#: Allowed deviation of a float distribution's sum from 1.
SUM_TOL = 1e-9
#: Comparison tolerance for float-mode identities and slacks.
FLOAT_TOL = 1e-12

SINGLE = "single-distribution"
MIXED = "mixed"

OUTCOME_PAIRS = ("++", "+-", "-+", "--")


class LeggettError(ValueError):
    """Base class for all input and consistency errors raised by this package."""


class NegativeProbability(LeggettError):
    pass


class NotNormalized(LeggettError):
    pass


class NonFinite(LeggettError):
    pass


class OutOfRange(LeggettError):
    pass


class InternalInconsistency(LeggettError):
    """Two arithmetic routes to the same quantity disagree; indicates a bug."""


class Outcome(enum.IntEnum):
    PLUS = 1
    MINUS = -1


class Kind(str, enum.Enum):
    """Measurement convention; ``factor`` multiplies angle differences."""

    PHOTON = "photon"
    SPIN = "spin"

    @property
    def factor(self) -> int:
        return 2 if self is Kind.PHOTON else 1

    @property
    def period(self) -> float:
        return 2 * math.pi / self.factor


def canonical_angle(angle: float, kind: Kind = Kind.PHOTON) -> float:
    """Angle reduced to [0, pi) for photons or [0, 2*pi) for spins. Display only."""
    return math.fmod(math.fmod(angle, kind.period) + kind.period, kind.period)


@dataclass(frozen=True)
class SettingPair:
    a: float
    b: float

    def __post_init__(self):
        for name in ("a", "b"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise NonFinite(f"setting {name}={value!r} is not finite")
            object.__setattr__(self, name, float(value))


def _is_exact(x) -> bool:
    return isinstance(x, Rational) and not isinstance(x, bool)


@dataclass(frozen=True)
class JointDistribution:
    """Probabilities of the outcome pairs (A, B) = (+,+), (+,-), (-,+), (-,-).

    Construct through :func:`validate_distribution`; the constructor itself
    does not check anything.
    """

    p_pp: Number
    p_pm: Number
    p_mp: Number
    p_mm: Number
    settings: Optional[SettingPair] = None

    @property
    def exact(self) -> bool:
        return isinstance(self.p_pp, Fraction)

    @property
    def tol(self) -> Number:
        return Fraction(0) if self.exact else FLOAT_TOL

    def probabilities(self) -> tuple:
        return (self.p_pp, self.p_pm, self.p_mp, self.p_mm)

    def __getitem__(self, pair: str) -> Number:
        return self.probabilities()[OUTCOME_PAIRS.index(pair)]

    def as_float(self) -> "JointDistribution":
        return JointDistribution(*(float(p) for p in self.probabilities()), settings=self.settings)


def validate_distribution(p4, settings: Optional[SettingPair] = None) -> JointDistribution:
    """Check four probabilities and wrap them in a :class:`JointDistribution`.

    If all four values are rationals (``int`` or ``Fraction``) the result is
    exact and must be non-negative and sum to exactly 1.  Otherwise the values
    are converted to float: entries in ``[-1e-12, 0)`` are clamped to zero and
    the sum must lie within 1e-9 of 1.  Nothing is renormalized.
    """
    values = list(p4)
    if len(values) != 4:
        raise LeggettError(f"expected 4 probabilities, got {len(values)}")

    if all(_is_exact(v) for v in values):
        probs = [Fraction(v) for v in values]
        for label, p in zip(OUTCOME_PAIRS, probs):
            if p < 0:
                raise NegativeProbability(f"P({label}) = {p} < 0")
        total = sum(probs)
        if total != 1:
            raise NotNormalized(f"probabilities sum to {total}, not 1")
        return JointDistribution(*probs, settings=settings)

    probs = []
    for label, v in zip(OUTCOME_PAIRS, values):
        p = float(v)
        if not math.isfinite(p):
            raise NonFinite(f"P({label}) = {p!r} is not finite")
        if p < -NEGATIVE_CLAMP:
            raise NegativeProbability(f"P({label}) = {p!r} < 0")
        probs.append(max(p, 0.0))
    total = math.fsum(probs)
    if abs(total - 1.0) > SUM_TOL:
        raise NotNormalized(f"probabilities sum to {total!r}, not 1")
    return JointDistribution(*probs, settings=settings)


def pointwise_identity(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(1 - |A-B|, A*B, -1 + |A+B|)``; all three agree for A, B = +-1."""
    a, b = Outcome(a), Outcome(b)
    return 1 - abs(a - b), int(a) * int(b), -1 + abs(a + b)


@dataclass(frozen=True)
class CorrelatorSummary:
    """Marginal averages of A and B and the average of the product AB."""

    mean_a: Number
    mean_b: Number
    corr: Number
    provenance: str = SINGLE

    def __post_init__(self):
        if self.provenance not in (SINGLE, MIXED):
            raise LeggettError(f"unknown provenance {self.provenance!r}")
        for name in ("mean_a", "mean_b", "corr"):
            _check_unit(name, getattr(self, name))

    @property
    def exact(self) -> bool:
        return all(isinstance(x, Fraction) for x in (self.mean_a, self.mean_b, self.corr))


def _check_unit(name: str, x: Number) -> None:
    if isinstance(x, Fraction):
        if abs(x) > 1:
            raise OutOfRange(f"|{name}| = {abs(x)} exceeds 1")
        return
    if not math.isfinite(x):
        raise NonFinite(f"{name} = {x!r} is not finite")
    if abs(x) > 1 + FLOAT_TOL:
        raise OutOfRange(f"|{name}| = {abs(x)!r} exceeds 1")


def _agree(x: Number, y: Number, tol: Number) -> bool:
    return abs(x - y) <= tol


def summarize(p: JointDistribution) -> CorrelatorSummary:
    """Marginals and correlator of ``p``.

    The correlator is computed by the direct signed sum and by both closed
    forms ``1 - 2P(+-) - 2P(-+)`` and ``-1 + 2P(++) + 2P(--)``; any
    disagreement raises :class:`InternalInconsistency`.
    """
    pp, pm, mp, mm = p.probabilities()
    mean_a = pp + pm - mp - mm
    mean_b = pp - pm + mp - mm
    direct = pp - pm - mp + mm
    left = 1 - 2 * pm - 2 * mp
    right = -1 + 2 * pp + 2 * mm
    tol = p.tol
    if not (_agree(direct, left, tol) and _agree(direct, right, tol)):
        raise InternalInconsistency(
            f"correlator paths disagree: direct={direct!r} left={left!r} right={right!r}"
        )
    return CorrelatorSummary(mean_a, mean_b, direct, SINGLE)


def leggett_bounds(mean_a: Number, mean_b: Number) -> tuple[Number, Number]:
    """``(1 - |mean_a - mean_b|, -1 + |mean_a + mean_b|)``, the upper and lower correlator bounds."""
    _check_unit("mean_a", mean_a)
    _check_unit("mean_b", mean_b)
    return 1 - abs(mean_a - mean_b), -1 + abs(mean_a + mean_b)


@dataclass(frozen=True)
class SlackWitness:
    """Records that a slack equals ``4 * P(outcome)``."""

    outcome: str
    probability: Number

    @property
    def value(self) -> Number:
        return 4 * self.probability

    def __str__(self) -> str:
        return f"4*P({self.outcome[0]},{self.outcome[1]})"


@dataclass(frozen=True)
class InequalityReport:
    summary: CorrelatorSummary
    upper_bound: Number
    lower_bound: Number
    upper_slack: Number
    lower_slack: Number
    satisfied: bool
    tol: Number
    witness_upper: Optional[SlackWitness] = None
    witness_lower: Optional[SlackWitness] = None

    @property
    def min_slack(self) -> Number:
        return min(self.upper_slack, self.lower_slack)


def check_summary(s: CorrelatorSummary) -> InequalityReport:
    """Evaluate both bounds on a (possibly mixed) triple. Mixed triples may fail."""
    upper, lower = leggett_bounds(s.mean_a, s.mean_b)
    upper_slack = upper - s.corr
    lower_slack = s.corr - lower
    tol = Fraction(0) if s.exact else FLOAT_TOL
    satisfied = bool(upper_slack >= -tol and lower_slack >= -tol)
    return InequalityReport(s, upper, lower, upper_slack, lower_slack, satisfied, tol)


def slack_witnesses(p: JointDistribution, s: CorrelatorSummary) -> tuple[SlackWitness, SlackWitness]:
    # ties take the ">=" branch; both identities hold there anyway
    upper = SlackWitness("-+", p.p_mp) if s.mean_a >= s.mean_b else SlackWitness("+-", p.p_pm)
    lower = SlackWitness("--", p.p_mm) if s.mean_a + s.mean_b >= 0 else SlackWitness("++", p.p_pp)
    return upper, lower


def check_distribution(p: JointDistribution) -> InequalityReport:
    """Check the bounds on a single distribution and attach exact slack witnesses.

    Raises :class:`InternalInconsistency` if a slack differs from its witness
    ``4 * P(.,.)``; for a valid distribution the report is always satisfied.
    """
    s = summarize(p)
    report = check_summary(s)
    w_upper, w_lower = slack_witnesses(p, s)
    tol = p.tol
    if not (_agree(report.upper_slack, w_upper.value, tol) and _agree(report.lower_slack, w_lower.value, tol)):
        raise InternalInconsistency(
            f"slacks ({report.upper_slack!r}, {report.lower_slack!r}) do not match "
            f"witnesses {w_upper}={w_upper.value!r}, {w_lower}={w_lower.value!r}"
        )
    return InequalityReport(
        s,
        report.upper_bound,
        report.lower_bound,
        report.upper_slack,
        report.lower_slack,
        report.satisfied,
        report.tol,
        w_upper,
        w_lower,
    )


# --------------------------------------------------------------------------
# Step-by-step derivation replay
# --------------------------------------------------------------------------

STEP_LABELS = (
    "eq2-left", "eq2-right",
    "ineq3a", "ineq3b", "ineq4a", "ineq4b", "ineq5a", "ineq5b", "ineq6",
    "ineq7a", "ineq7b", "ineq8a", "ineq8b", "ineq9a", "ineq9b", "ineq10",
    "ineq11",
)
EQUALITY_STEPS = ("eq2-left", "eq2-right")


@dataclass(frozen=True)
class Step:
    """One relation ``lhs >= rhs`` (or ``lhs == rhs`` for equality steps).

    ``slack`` is ``lhs - rhs``.  For the two-sided ``ineq11`` step ``middle``
    holds the correlator and ``slack`` is the smaller of the two gaps.
    """

    label: str
    lhs: Number
    rhs: Number
    slack: Number
    slack_witness: Optional[str] = None
    middle: Optional[Number] = None

    @property
    def is_equality(self) -> bool:
        return self.label in EQUALITY_STEPS


@dataclass(frozen=True)
class Identity:
    """An algebraic rewrite that must hold with zero residual."""

    name: str
    lhs: Number
    rhs: Number

    @property
    def residual(self) -> Number:
        return self.lhs - self.rhs


@dataclass(frozen=True)
class DerivationTrace:
    distribution: JointDistribution
    summary: CorrelatorSummary
    steps: tuple[Step, ...]
    identities: tuple[Identity, ...] = field(default=())

    def __getitem__(self, label: str) -> Step:
        for step in self.steps:
            if step.label == label:
                return step
        raise KeyError(label)

    def inequality_steps(self) -> tuple[Step, ...]:
        return tuple(s for s in self.steps if not s.is_equality)


def derivation_trace(p: JointDistribution) -> DerivationTrace:
    """Replay the chain from the summed pointwise identity to the two-sided bound.

    Each step carries its own slack.  Rewrites of probability combinations in
    terms of the marginals are recorded as :class:`Identity` entries.  In exact
    mode every identity, witness and branch selection is verified with zero
    tolerance (1e-12 in float mode); a failure raises
    :class:`InternalInconsistency`.
    """
    pp, pm, mp, mm = p.probabilities()
    s = summarize(p)
    A, B, E = s.mean_a, s.mean_b, s.corr
    tol = p.tol

    def ge(label, lhs, rhs, witness=None, expected=None):
        slack = lhs - rhs
        if expected is not None and not _agree(slack, expected, tol):
            raise InternalInconsistency(f"{label}: slack {slack!r} != {witness} = {expected!r}")
        return Step(label, lhs, rhs, slack, witness)

    left2 = 1 - 2 * pm - 2 * mp
    right2 = -1 + 2 * pp + 2 * mm
    eq2l = Step("eq2-left", left2, E, left2 - E)
    eq2r = Step("eq2-right", E, right2, E - right2)
    for step in (eq2l, eq2r):
        if not _agree(step.slack, 0, tol):
            raise InternalInconsistency(f"{step.label}: nonzero slack {step.slack!r}")

    lhs4a = 1 - 2 * pm + 2 * mp
    lhs4b = 1 + 2 * pm - 2 * mp
    rhs8a = -1 + 2 * pp - 2 * mm
    rhs8b = -1 - 2 * pp + 2 * mm

    identities = (
        Identity("rewrite-4a", lhs4a, 1 - A + B),
        Identity("rewrite-4b", lhs4b, 1 + A - B),
        Identity("rewrite-8a", rhs8a, -1 + A + B),
        Identity("rewrite-8b", rhs8b, -1 - A - B),
    )
    for ident in identities:
        if not _agree(ident.residual, 0, tol):
            raise InternalInconsistency(f"{ident.name}: residual {ident.residual!r}")

    s3a = ge("ineq3a", lhs4a, left2, "4*P(-,+)", 4 * mp)
    s3b = ge("ineq3b", lhs4b, left2, "4*P(+,-)", 4 * pm)
    s4a = ge("ineq4a", lhs4a, E, "4*P(-,+)", 4 * mp)
    s4b = ge("ineq4b", lhs4b, E, "4*P(+,-)", 4 * pm)
    s5a = ge("ineq5a", 1 - A + B, E, "4*P(-,+)", 4 * mp)
    s5b = ge("ineq5b", 1 + A - B, E, "4*P(+,-)", 4 * pm)
    branch6 = s5a if A - B >= 0 else s5b
    s6 = ge("ineq6", 1 - abs(A - B), E, branch6.slack_witness, branch6.slack)

    s7a = ge("ineq7a", right2, rhs8a, "4*P(-,-)", 4 * mm)
    s7b = ge("ineq7b", right2, rhs8b, "4*P(+,+)", 4 * pp)
    s8a = ge("ineq8a", E, rhs8a, "4*P(-,-)", 4 * mm)
    s8b = ge("ineq8b", E, rhs8b, "4*P(+,+)", 4 * pp)
    s9a = ge("ineq9a", E, -1 + A + B, "4*P(-,-)", 4 * mm)
    s9b = ge("ineq9b", E, -1 - A - B, "4*P(+,+)", 4 * pp)
    branch10 = s9a if A + B >= 0 else s9b
    s10 = ge("ineq10", E, -1 + abs(A + B), branch10.slack_witness, branch10.slack)

    upper, lower = 1 - abs(A - B), -1 + abs(A + B)
    s11 = Step(
        "ineq11", upper, lower, min(upper - E, E - lower),
        f"{s6.slack_witness} / {s10.slack_witness}", middle=E,
    )

    steps = (eq2l, eq2r, s3a, s3b, s4a, s4b, s5a, s5b, s6,
             s7a, s7b, s8a, s8b, s9a, s9b, s10, s11)
    for step in steps:
        if not step.is_equality and step.slack < -tol:
            raise InternalInconsistency(f"{step.label}: negative slack {step.slack!r}")
    return DerivationTrace(p, s, steps, identities)


# --------------------------------------------------------------------------
# Random distributions
# --------------------------------------------------------------------------

def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator for a 64-bit seed (reduced modulo 2**64)."""
    return np.random.Generator(np.random.PCG64(int(seed) % 2**64))


def random_distribution(seed: int, denominator: Optional[int] = None) -> JointDistribution:
    """Seeded random distribution.

    With ``denominator=N`` the result is exact and uniform over the lattice
    points of the simplex with denominator N (stars and bars: three distinct
    bar positions among N + 3 slots).  Without it, four unit exponentials are
    normalized, i.e. a float Dirichlet(1, 1, 1, 1) draw.
    """
    rng = make_rng(seed)
    if denominator is not None:
        n = int(denominator)
        if n < 1:
            raise LeggettError(f"denominator must be >= 1, got {denominator}")
        bars = sorted(int(x) for x in rng.choice(n + 3, size=3, replace=False))
        parts = (bars[0], bars[1] - bars[0] - 1, bars[2] - bars[1] - 1, n + 2 - bars[2])
        return validate_distribution([Fraction(k, n) for k in parts])
    draws = rng.standard_exponential(4)
    return validate_distribution((draws / draws.sum()).tolist())
