import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leggett import (
    CorrelatorSummary,
    InternalInconsistency,
    NegativeProbability,
    NonFinite,
    NotNormalized,
    OutOfRange,
    check_distribution,
    check_summary,
    derivation_trace,
    leggett_bounds,
    pointwise_identity,
    random_distribution,
    summarize,
    validate_distribution,
)
from leggett.core import STEP_LABELS, JointDistribution, Kind, canonical_angle

from conftest import enumerate_summary

F = Fraction


@st.composite
def exact_distributions(draw, max_den=60):
    n = draw(st.integers(1, max_den))
    cuts = sorted(draw(st.lists(st.integers(0, n), min_size=3, max_size=3)))
    parts = [cuts[0], cuts[1] - cuts[0], cuts[2] - cuts[1], n - cuts[2]]
    return validate_distribution([F(k, n) for k in parts])


class TestValidateDistribution:
    def test_uniform(self):
        p = validate_distribution([F(1, 4)] * 4)
        assert p.exact
        assert p.probabilities() == (F(1, 4),) * 4

    def test_float_example(self):
        p = validate_distribution([0.4, 0.1, 0.2, 0.3])
        assert not p.exact
        assert p.probabilities() == (0.4, 0.1, 0.2, 0.3)

    def test_negative_rejected(self):
        with pytest.raises(NegativeProbability):
            validate_distribution([0.5, 0.5, 0.1, -0.1])

    def test_exact_negative_rejected(self):
        with pytest.raises(NegativeProbability):
            validate_distribution([F(1, 2), F(1, 2), F(1, 10), F(-1, 10)])

    def test_tiny_negative_clamped(self):
        p = validate_distribution([0.5, 0.5 + 5e-13, -5e-13, 0.0])
        assert p.p_mp == 0.0

    def test_not_renormalized(self):
        with pytest.raises(NotNormalized):
            validate_distribution([0.25, 0.25, 0.25, 0.26])
        # within 1e-9 passes, unchanged
        p = validate_distribution([0.25, 0.25, 0.25, 0.25 + 1e-10])
        assert p.p_mm == 0.25 + 1e-10

    def test_exact_sum_must_be_one(self):
        with pytest.raises(NotNormalized):
            validate_distribution([F(1, 4), F(1, 4), F(1, 4), F(1, 4) + F(1, 10**30)])

    @pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
    def test_non_finite(self, bad):
        with pytest.raises(NonFinite):
            validate_distribution([bad, 0.5, 0.25, 0.25])

    def test_ints_are_exact(self):
        p = validate_distribution([1, 0, 0, 0])
        assert p.exact and p.p_pp == 1

    def test_wrong_length(self):
        with pytest.raises(ValueError):
            validate_distribution([0.5, 0.5])


class TestPointwiseIdentity:
    @pytest.mark.parametrize("a,b", list(itertools.product([1, -1], repeat=2)))
    def test_components_equal(self, a, b):
        left, middle, right = pointwise_identity(a, b)
        assert left == middle == right == a * b

    def test_paper_cases(self):
        assert pointwise_identity(1, 1) == (1, 1, 1)
        assert pointwise_identity(1, -1) == (-1, -1, -1)
        assert pointwise_identity(-1, -1) == (1, 1, 1)

    @pytest.mark.parametrize("bad", [0, 2, -2])
    def test_rejects_non_dichotomic(self, bad):
        with pytest.raises(ValueError):
            pointwise_identity(bad, 1)


class TestSummarize:
    def test_uniform(self, uniform_exact):
        s = summarize(uniform_exact)
        assert (s.mean_a, s.mean_b, s.corr) == (0, 0, 0)
        assert s.provenance == "single-distribution"

    def test_perfect_correlation(self):
        s = summarize(validate_distribution([F(1, 2), 0, 0, F(1, 2)]))
        assert (s.mean_a, s.mean_b, s.corr) == (0, 0, 1)

    def test_example_against_enumeration(self, example_exact):
        s = summarize(example_exact)
        assert (s.mean_a, s.mean_b, s.corr) == enumerate_summary(example_exact.probabilities())
        assert (s.mean_a, s.mean_b, s.corr) == (0, F(1, 5), F(2, 5))

    def test_float_example(self):
        s = summarize(validate_distribution([0.4, 0.1, 0.2, 0.3]))
        assert s.mean_a == pytest.approx(0.0, abs=1e-12)
        assert s.mean_b == pytest.approx(0.2, abs=1e-12)
        assert s.corr == pytest.approx(0.4, abs=1e-12)

    def test_inconsistent_paths_detected(self):
        # bypasses validation: sum != 1 makes the three correlator forms disagree
        broken = JointDistribution(F(1, 2), F(1, 2), F(1, 2), F(0))
        with pytest.raises(InternalInconsistency):
            summarize(broken)

    @given(exact_distributions())
    def test_matches_enumeration_and_bounded(self, p):
        s = summarize(p)
        assert (s.mean_a, s.mean_b, s.corr) == enumerate_summary(p.probabilities())
        assert max(abs(s.mean_a), abs(s.mean_b), abs(s.corr)) <= 1


class TestBounds:
    def test_examples(self):
        assert leggett_bounds(0, 0) == (1, -1)
        assert leggett_bounds(1, 1) == (1, 1)
        assert leggett_bounds(F(0), F(1, 5)) == (F(4, 5), F(-4, 5))

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            leggett_bounds(1 + 1e-9, 0)
        with pytest.raises(OutOfRange):
            leggett_bounds(F(11, 10), 0)
        leggett_bounds(1 + 1e-13, 0)

    @given(st.fractions(-1, 1), st.fractions(-1, 1))
    def test_lower_never_exceeds_upper(self, a, b):
        upper, lower = leggett_bounds(a, b)
        assert lower <= upper


class TestCheckSummary:
    def test_satisfied_example(self):
        r = check_summary(CorrelatorSummary(F(0), F(1, 5), F(2, 5)))
        assert r.satisfied
        assert (r.upper_slack, r.lower_slack) == (F(2, 5), F(6, 5))
        assert r.witness_upper is None and r.witness_lower is None

    def test_mixed_violation(self):
        r = check_summary(CorrelatorSummary(1, 1, -1, "mixed"))
        assert not r.satisfied
        assert r.lower_slack == -2

    def test_upper_tight(self):
        r = check_summary(CorrelatorSummary(0, 0, 1))
        assert r.satisfied and r.upper_slack == 0

    def test_float_tolerance(self):
        assert check_summary(CorrelatorSummary(0.0, 0.0, 1.0 + 5e-13)).satisfied
        with pytest.raises(OutOfRange):
            CorrelatorSummary(0.0, 0.0, 1.0 + 1e-9)


class TestCheckDistribution:
    def test_uniform(self, uniform_exact):
        r = check_distribution(uniform_exact)
        assert r.upper_slack == 1 == r.witness_upper.value
        assert r.lower_slack == 1 == r.witness_lower.value
        assert str(r.witness_upper) == "4*P(-,+)" and str(r.witness_lower) == "4*P(-,-)"

    def test_point_mass(self):
        r = check_distribution(validate_distribution([1, 0, 0, 0]))
        assert r.upper_slack == 0 and r.lower_slack == 0 and r.satisfied

    def test_example(self, example_exact):
        r = check_distribution(example_exact)
        assert r.upper_slack == F(2, 5)
        assert str(r.witness_upper) == "4*P(+,-)"
        assert r.lower_slack == F(6, 5)
        assert str(r.witness_lower) == "4*P(-,-)"

    def test_lower_plus_plus_branch(self):
        # mean_a + mean_b < 0 selects 4*P(+,+)
        p = validate_distribution([F(1, 10), F(1, 10), F(1, 10), F(7, 10)])
        r = check_distribution(p)
        assert str(r.witness_lower) == "4*P(+,+)"
        assert r.lower_slack == F(2, 5)

    @given(exact_distributions())
    @settings(max_examples=300)
    def test_witness_identities(self, p):
        r = check_distribution(p)
        a, b, _ = enumerate_summary(p.probabilities())
        assert r.upper_slack == 4 * (p.p_mp if a >= b else p.p_pm)
        assert r.lower_slack == 4 * (p.p_mm if a + b >= 0 else p.p_pp)
        assert r.satisfied


class TestDerivationTrace:
    def test_labels_in_order(self, uniform_exact):
        assert tuple(s.label for s in derivation_trace(uniform_exact).steps) == STEP_LABELS

    def test_example(self, example_exact):
        t = derivation_trace(example_exact)
        assert t["ineq3a"].slack == F(4, 5)
        assert t["eq2-left"].lhs == t["eq2-right"].rhs == F(2, 5)
        assert t["eq2-left"].slack == t["eq2-right"].slack == 0

    def test_point_mass_tight(self):
        t = derivation_trace(validate_distribution([1, 0, 0, 0]))
        assert t["ineq3a"].slack == 0 and t["ineq7a"].slack == 0
        s11 = t["ineq11"]
        assert s11.lhs - s11.middle == 0 and s11.middle - s11.rhs == 0

    def test_uniform_all_slacks_one(self, uniform_exact):
        t = derivation_trace(uniform_exact)
        assert all(s.slack == 1 for s in t.inequality_steps())

    def test_branch_selection(self, example_exact):
        t = derivation_trace(example_exact)
        # mean_a < mean_b picks the (5b) branch, mean_a + mean_b >= 0 picks (9a)
        assert t["ineq6"].slack == t["ineq5b"].slack
        assert t["ineq10"].slack == t["ineq9a"].slack

    @given(exact_distributions())
    @settings(max_examples=300)
    def test_slacks(self, p):
        t = derivation_trace(p)
        assert all(i.residual == 0 for i in t.identities)
        assert all(s.slack == 0 for s in t.steps if s.is_equality)
        assert all(s.slack >= 0 for s in t.inequality_steps())
        assert t["ineq3a"].slack == 4 * p.p_mp
        assert t["ineq3b"].slack == 4 * p.p_pm
        assert t["ineq7a"].slack == 4 * p.p_mm
        assert t["ineq7b"].slack == 4 * p.p_pp

    def test_float_mode(self):
        t = derivation_trace(validate_distribution([0.4, 0.1, 0.2, 0.3]))
        assert t["ineq3a"].slack == pytest.approx(0.8, abs=1e-12)


class TestRandomDistribution:
    def test_exact_lattice(self):
        p = random_distribution(42, denominator=100)
        assert p.exact
        assert sum(p.probabilities()) == 1
        assert all(x.denominator in (1, 2, 4, 5, 10, 20, 25, 50, 100) for x in p.probabilities())

    def test_deterministic(self):
        assert random_distribution(7, denominator=13) == random_distribution(7, denominator=13)
        assert random_distribution(7) == random_distribution(7)

    def test_float_mode(self):
        p = random_distribution(3)
        assert not p.exact
        assert abs(sum(p.probabilities()) - 1) <= 1e-9

    def test_exact_uniform_over_lattice(self):
        # N = 2 has C(5, 3) = 10 lattice points; each should appear ~1/10 of the time
        counts = {}
        for seed in range(5000):
            key = random_distribution(seed, denominator=2).probabilities()
            counts[key] = counts.get(key, 0) + 1
        assert len(counts) == 10
        assert all(abs(c - 500) < 5 * math.sqrt(5000 * 0.1 * 0.9) for c in counts.values())

    def test_rejects_bad_denominator(self):
        with pytest.raises(ValueError):
            random_distribution(1, denominator=0)

    def test_every_sample_satisfied(self):
        for seed in range(2000):
            assert check_distribution(random_distribution(seed, denominator=1 + seed % 50)).satisfied
            assert check_distribution(random_distribution(seed)).satisfied


def test_canonical_angle():
    assert canonical_angle(math.pi + 0.1, Kind.PHOTON) == pytest.approx(0.1)
    assert canonical_angle(-0.1, Kind.SPIN) == pytest.approx(2 * math.pi - 0.1)
