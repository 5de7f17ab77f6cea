"""Analytic success probabilities against independent numeric oracles."""

import math
from fractions import Fraction

import mpmath
import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

import wcauth
from wcauth import BoundParams, Log2Prob
from wcauth.bounds import (
    REPORT_COLUMNS,
    SECONDS_PER_YEAR,
    average_success_before_tag,
    build_bound_report,
    chebyshev_bound,
    conditional_success,
    engineered_attack_prob,
    expected_break_time,
    guess_prob_after_pair,
    guess_prob_partial,
    guess_prob_uniform,
    hypergeom_pmf,
    hypergeom_pmf_log2,
    intersection_moments,
    min_entropy_of_elimination,
    weak_pair_prob_exact,
)
from wcauth.errors import DomainError


def desk(num_keys, num_tags, epsilon, r):
    return BoundParams.desk(num_keys, num_tags, epsilon, r)


P5 = desk(25, 5, Fraction(1, 5), Fraction(3, 5))

SWEEP = [
    desk(25, 5, Fraction(1, 5), Fraction(3, 5)),
    desk(25, 5, Fraction(1, 5), Fraction(1, 5)),
    desk(49, 7, Fraction(1, 7), Fraction(2, 7)),
    desk(121, 11, Fraction(1, 11), Fraction(24, 121)),
    desk(1024, 16, Fraction(1, 16), Fraction(1, 8)),
    desk(1024, 16, Fraction(2, 16), Fraction(3, 4)),
    desk(2048, 32, Fraction(2, 32), Fraction(5, 64)),
    desk(512, 8, Fraction(1, 8), Fraction(7, 64)),
]


class TestHypergeomPmf:
    @pytest.mark.parametrize("params", SWEEP)
    def test_matches_scipy(self, params):
        num_keys, num_tags = params.num_keys, params.num_tags
        surviving = int(params.r * num_keys)
        class_size = num_keys // num_tags
        ref = scipy.stats.hypergeom(num_keys - 1, surviving - 1, class_size - 1)
        for i in range(0, min(class_size, surviving) + 2):
            ours = float(hypergeom_pmf(params, i))
            theirs = float(ref.pmf(i - 1)) if i >= 1 else 0.0
            assert ours == pytest.approx(theirs, rel=1e-10, abs=1e-15)

    @pytest.mark.parametrize("params", SWEEP)
    def test_sums_to_one_exactly(self, params):
        class_size = params.num_keys // params.num_tags
        total = sum(
            hypergeom_pmf(params, i) for i in range(1, class_size + 1)
        )
        assert total == 1

    @pytest.mark.parametrize("params", SWEEP)
    def test_log2_variant_agrees(self, params):
        class_size = params.num_keys // params.num_tags
        for i in (1, 2, class_size // 2 + 1, class_size):
            exact = hypergeom_pmf(params, i)
            logged = hypergeom_pmf_log2(params, i)
            if exact == 0:
                assert logged.log2 == -math.inf
            else:
                assert logged.log2 == pytest.approx(
                    math.log2(exact.numerator) - math.log2(exact.denominator),
                    rel=1e-9,
                )

    def test_support_edges_are_zero(self):
        assert hypergeom_pmf(P5, 0) == 0
        assert hypergeom_pmf(P5, 6) == 0  # class only holds 5 keys
        assert hypergeom_pmf(P5, 16) == 0  # only 15 survivors exist


class TestMoments:
    def test_worked_example(self):
        mean, var = intersection_moments(P5)
        assert mean == Fraction(10, 3)
        assert var == Fraction(175, 207)

    @pytest.mark.parametrize("params", SWEEP)
    def test_match_pmf_weighted_sums(self, params):
        class_size = params.num_keys // params.num_tags
        mean, var = intersection_moments(params)
        wsum = sum(
            hypergeom_pmf(params, i) * i for i in range(1, class_size + 1)
        )
        wsq = sum(
            hypergeom_pmf(params, i) * i * i
            for i in range(1, class_size + 1)
        )
        assert wsum == mean
        assert wsq - mean * mean == var


class TestWeakPair:
    def test_worked_example(self):
        assert weak_pair_prob_exact(P5) == Fraction(210, 10626)

    def test_r_one_gives_zero(self):
        params = desk(25, 5, Fraction(1, 5), 1)
        assert weak_pair_prob_exact(params) == 0

    @pytest.mark.parametrize("params", SWEEP)
    def test_equals_scipy_tail(self, params):
        num_keys, num_tags = params.num_keys, params.num_tags
        surviving = int(params.r * num_keys)
        class_size = num_keys // num_tags
        cap = (params.epsilon * num_keys / num_tags).__floor__()
        ref = scipy.stats.hypergeom(num_keys - 1, surviving - 1, class_size - 1)
        tail = float(ref.cdf(cap - 1))  # X <= cap means X-1 <= cap-1
        assert float(weak_pair_prob_exact(params)) == pytest.approx(
            tail, rel=1e-10
        )


class TestChebyshev:
    def test_worked_example(self):
        bound = chebyshev_bound(P5, mode="exact-moments")
        assert bound == Fraction(25, 161)

    @pytest.mark.parametrize("params", SWEEP)
    def test_dominates_exact_probability(self, params):
        try:
            bound = chebyshev_bound(params, mode="exact-moments")
        except DomainError:
            return  # bound undefined when the mean sits at or below the cap
        assert weak_pair_prob_exact(params) <= bound

    def test_asymptotic_matches_published_scale(self):
        params = BoundParams.deployment(
            log2_keys=2176.0, log2_tags=32.0,
            epsilon=Fraction(1, 2**31), r=2.0**-0.125,
        )
        got = chebyshev_bound(params, mode="asymptotic")
        with mpmath.workdps(50):
            expected = mpmath.log(mpmath.mpf(2) ** mpmath.mpf("0.125") - 1, 2)
        assert got.log2 == pytest.approx(float(expected) + 32 - 2176, abs=1e-9)
        assert got.decimal_str() == "3.53e-647"

    def test_asymptotic_r_one_is_zero(self):
        params = desk(25, 5, Fraction(1, 5), 1)
        got = chebyshev_bound(params, mode="asymptotic")
        assert got.value == 0.0

    def test_unknown_mode_rejected(self):
        with pytest.raises(DomainError):
            chebyshev_bound(P5, mode="bogus")


class TestGuessingProbabilities:
    def test_uniform(self):
        assert guess_prob_uniform(P5).log2 == pytest.approx(-math.log2(5))

    def test_after_pair_equals_epsilon(self):
        assert guess_prob_after_pair(P5).log2 == pytest.approx(math.log2(1 / 5))

    def test_partial_knowledge(self):
        assert guess_prob_partial(P5).value == pytest.approx(1 / (0.6 * 5))
        assert not guess_prob_partial(P5).clamped

    def test_partial_clamps_at_one(self):
        params = desk(25, 5, Fraction(1, 5), Fraction(1, 25))
        got = guess_prob_partial(params)
        assert got.value == 1.0 and got.clamped

    def test_conditional_success_is_cap_over_size(self):
        # eps*H/T = 1 here, so success given i candidates is 1/i
        for i in (1, 2, 5):
            assert conditional_success(P5, i).value == pytest.approx(1 / i)
        assert conditional_success(P5, 1).value == 1.0

    def test_average_before_tag(self):
        assert average_success_before_tag(P5).value == pytest.approx(1 / 3)

    def test_average_clamps_when_r_below_epsilon(self):
        params = desk(25, 5, Fraction(1, 5), Fraction(3, 25))
        got = average_success_before_tag(params)
        assert got.value == 1.0 and got.clamped

    def test_min_entropy(self):
        assert min_entropy_of_elimination(P5) == pytest.approx(math.log2(15))


class TestEngineered:
    def test_desk_value_is_exact(self):
        params = desk(1792, 16, Fraction(2, 16), Fraction(3, 4))
        attack = engineered_attack_prob(params)
        assert attack.exact == Fraction(1, 21)
        assert attack.success.log2 == pytest.approx(-math.log2(21))

    def test_published_scale(self):
        params = BoundParams.deployment(
            log2_keys=2176.0, log2_tags=32.0,
            epsilon=Fraction(1, 2**31), r=2.0**-0.125,
        )
        attack = engineered_attack_prob(params)
        assert attack.success.log10 == pytest.approx(
            math.log10(4.2147e-11), abs=1e-3
        )

    def test_epsilon_one_rejected(self):
        params = desk(25, 5, 1, Fraction(3, 5))
        with pytest.raises(DomainError):
            engineered_attack_prob(params)

    def test_clamps_when_r_tiny(self):
        params = desk(1024, 16, Fraction(1, 16), Fraction(1, 1024))
        attack = engineered_attack_prob(params)
        assert attack.exact == 1
        assert attack.success.value == 1.0


class TestBreakTime:
    def test_blind_published_value(self):
        bt = expected_break_time(Fraction(1, 2**31), rounds_per_second=0.1)
        expected_years = Fraction(2**31 * 10) / Fraction(31557600)
        assert bt.years == pytest.approx(float(expected_years), rel=1e-12)
        assert abs(bt.years - 680.5) < 1

    def test_engineered_published_value(self):
        params = BoundParams.deployment(
            log2_keys=2176.0, log2_tags=32.0,
            epsilon=Fraction(1, 2**31), r=2.0**-0.125,
        )
        attack = engineered_attack_prob(params)
        bt = expected_break_time(attack.success, rounds_per_second=1000.0)
        assert bt.months == pytest.approx(9.02, abs=0.05)

    def test_weak_pair_published_value(self):
        params = BoundParams.deployment(
            log2_keys=2176.0, log2_tags=32.0,
            epsilon=Fraction(1, 2**31), r=2.0**-0.125,
        )
        weak = chebyshev_bound(params, mode="asymptotic")
        bt = expected_break_time(weak, rounds_per_second=1000.0)
        assert bt.log10_years == pytest.approx(635.96, abs=0.02)
        assert bt.years == math.inf  # too large for a float

    def test_overhead_adds_per_round(self):
        bt = expected_break_time(
            Fraction(1, 2), rounds_per_second=1.0, overhead_seconds=1.0
        )
        assert bt.seconds == pytest.approx(4.0)

    def test_zero_probability_never_breaks(self):
        bt = expected_break_time(Fraction(0), rounds_per_second=1000.0)
        assert bt.log2_seconds == math.inf

    def test_seconds_years_consistency(self):
        bt = expected_break_time(Fraction(1, 1024), rounds_per_second=1.0)
        assert bt.seconds == pytest.approx(1024.0)
        assert bt.years == pytest.approx(1024.0 / SECONDS_PER_YEAR)

    def test_describe_mentions_a_unit(self):
        text = expected_break_time(Fraction(1, 2**31), 0.1).describe()
        assert "year" in text


class TestLog2Prob:
    def test_from_fraction(self):
        assert Log2Prob.from_fraction(Fraction(1, 8)).log2 == -3.0

    def test_value_and_ordering(self):
        a, b = Log2Prob(-3.0), Log2Prob(-2.0)
        assert a < b
        assert a.value == pytest.approx(0.125)

    def test_decimal_str(self):
        assert Log2Prob(-3.0).decimal_str() == "1.25e-01"
        assert Log2Prob(-2147.4658143).decimal_str() == "3.53e-647"

    def test_zero(self):
        zero = Log2Prob(-math.inf)
        assert zero.value == 0.0


class TestParamsValidation:
    def test_tags_cannot_exceed_keys(self):
        with pytest.raises(DomainError):
            BoundParams.deployment(4.0, 8.0, Fraction(1, 4), 0.5)

    def test_epsilon_below_reciprocal_tags(self):
        with pytest.raises(DomainError):
            desk(25, 5, Fraction(1, 6), Fraction(3, 5))

    def test_r_range(self):
        with pytest.raises(DomainError):
            desk(25, 5, Fraction(1, 5), Fraction(26, 25))
        with pytest.raises(DomainError):
            desk(25, 5, Fraction(1, 5), 0)

    def test_desk_requires_divisibility(self):
        with pytest.raises(DomainError):
            BoundParams.desk(10, 4, Fraction(1, 4), Fraction(1, 2))

    def test_desk_snaps_float_r(self):
        params = BoundParams.desk(25, 5, Fraction(1, 5), 0.6)
        assert params.r == Fraction(3, 5)


class TestReport:
    def test_column_order_is_stable(self):
        report = build_bound_report(P5, rounds_per_second=10.0)
        assert list(report.as_dict().keys()) == REPORT_COLUMNS

    def test_desk_extras_present(self):
        flat = build_bound_report(P5).as_dict()
        assert flat["weak_pair_exact"] == "5/253"
        assert flat["chebyshev_exact"] == "25/161"
        assert flat["mean_intersection"] == "10/3"

    def test_deployment_extras_absent(self):
        params = BoundParams.deployment(2176.0, 32.0, Fraction(1, 2**31), 0.9)
        flat = build_bound_report(params).as_dict()
        assert flat["weak_pair_exact"] is None
        assert flat["break_blind_log10_years"] is None  # no rate given

    def test_break_columns_need_rate(self):
        flat = build_bound_report(P5, rounds_per_second=100.0).as_dict()
        assert flat["break_blind_log10_years"] is not None


@st.composite
def desk_params(draw):
    num_tags = draw(st.sampled_from([2, 4, 5, 8, 16]))
    blocks = draw(st.integers(2, 40))
    num_keys = num_tags * blocks
    cap_mult = draw(st.integers(1, min(4, blocks, num_tags)))
    epsilon = Fraction(cap_mult, num_tags)
    surviving = draw(st.integers(1, num_keys))
    return desk(num_keys, num_tags, epsilon, Fraction(surviving, num_keys))


class TestProperties:
    @given(desk_params())
    @settings(max_examples=80, deadline=None)
    def test_weak_pair_is_a_probability(self, params):
        value = weak_pair_prob_exact(params)
        assert 0 <= value <= 1

    @given(desk_params())
    @settings(max_examples=80, deadline=None)
    def test_pmf_sums_to_one(self, params):
        class_size = params.num_keys // params.num_tags
        assert sum(
            hypergeom_pmf(params, i) for i in range(1, class_size + 1)
        ) == 1

    @given(desk_params())
    @settings(max_examples=80, deadline=None)
    def test_chebyshev_dominates_when_defined(self, params):
        try:
            bound = chebyshev_bound(params, mode="exact-moments")
        except DomainError:
            return
        assert weak_pair_prob_exact(params) <= bound

    @given(desk_params())
    @settings(max_examples=60, deadline=None)
    def test_moments_match_pmf(self, params):
        class_size = params.num_keys // params.num_tags
        mean, var = intersection_moments(params)
        wsum = sum(hypergeom_pmf(params, i) * i for i in range(1, class_size + 1))
        assert wsum == mean
        assert var >= 0
