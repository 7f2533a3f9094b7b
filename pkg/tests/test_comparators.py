import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from probdom.comparators import (
    CSV_HEADER,
    ComparisonReport,
    Decision,
    OperatorConfig,
    Sense,
    build_histogram,
    compare_empirical,
    compare_gauss,
    compare_histogram,
    compare_mean,
    compare_pairwise,
    compare_reduced,
    compare_three_stage,
    compare_uniform_bounds,
    compare_uniform_moments,
    count_greater_pairs,
    decide,
    gauss_probability,
    get_operator,
    histogram_error_bound,
    oracle_dominance,
    uniform_interval_probability,
)
from probdom.errors import (
    ConfigError,
    DegenerateVariance,
    IncompatibleHistograms,
    PairingError,
    UnboundedSupport,
    UnknownOperator,
)
from probdom.uncertain import DistributionSpec, UncertainValue, from_samples

U = DistributionSpec.uniform
G = DistributionSpec.gaussian


def closed(spec):
    return UncertainValue.from_spec(spec)


def brute_pairs(a, b):
    return sum(1 for x in a for y in b if x > y)


def uniform_reference(a_lo, a_hi, b_lo, b_hi):
    """P(A > B) for independent uniforms by adaptive quadrature of F_B over A."""
    f = lambda t: min(max((t - b_lo) / (b_hi - b_lo), 0.0), 1.0) / (a_hi - a_lo)
    pts = [p for p in (b_lo, b_hi) if a_lo < p < a_hi]
    return integrate.quad(f, a_lo, a_hi, points=pts or None, epsabs=1e-13, epsrel=1e-13)[0]


class TestPairwise:
    def test_hand_example(self):
        assert compare_pairwise([0.9, 0.2, 0.7], [0.1, 0.3, 0.5]) == pytest.approx(2 / 3)

    def test_equal(self):
        assert compare_pairwise([1, 2, 3], [1, 2, 3]) == 0.0

    def test_all_greater(self):
        assert compare_pairwise([2, 3, 4], [1, 2, 3]) == 1.0

    def test_length_mismatch(self):
        with pytest.raises(PairingError):
            compare_pairwise([1, 2], [1])

    def test_operator_needs_draw_order(self):
        op = get_operator("pw")
        with pytest.raises(PairingError):
            op.p_greater(from_samples([1, 2]), from_samples([0, 1]))

    def test_operator_uses_draw_order(self):
        op = get_operator("pw")
        a = UncertainValue.from_samples([0.9, 0.2, 0.7], keep_order=True)
        b = UncertainValue.from_samples([0.1, 0.3, 0.5], keep_order=True)
        assert op.p_greater(a, b) == pytest.approx(2 / 3)

    def test_closed_form_is_sampled_reproducibly(self):
        cfg = OperatorConfig(pairwise_samples=5000, seed=4)
        p1 = get_operator("pw", cfg).p_greater(closed(G(1, 1)), closed(G(0, 1)))
        p2 = get_operator("pw", cfg).p_greater(closed(G(1, 1)), closed(G(0, 1)))
        assert p1 == p2
        assert p1 == pytest.approx(0.7602, abs=0.03)


class TestUniform:
    def test_symmetric(self):
        assert compare_uniform_bounds(closed(U(0, 1)), closed(U(0, 1))) == 0.5

    def test_disjoint(self):
        assert compare_uniform_bounds(closed(U(2, 3)), closed(U(0, 1))) == 1.0
        assert compare_uniform_bounds(closed(U(0, 1)), closed(U(2, 3))) == 0.0

    def test_overlap(self):
        assert compare_uniform_bounds(closed(U(0, 2)), closed(U(1, 3))) == pytest.approx(0.125, abs=1e-15)

    def test_overlap_monte_carlo(self):
        rng = np.random.default_rng(0)
        a, b = rng.uniform(0, 2, 400_000), rng.uniform(1, 3, 400_000)
        assert np.mean(a > b) == pytest.approx(0.125, abs=0.003)

    def test_from_samples_uses_extremes(self):
        a, b = from_samples([0, 0.5, 2]), from_samples([1, 3])
        assert compare_uniform_bounds(a, b) == pytest.approx(0.125)

    def test_point_masses(self):
        assert uniform_interval_probability(1, 1, 1, 1) == 0.5
        assert uniform_interval_probability(2, 2, 1, 1) == 1.0
        assert uniform_interval_probability(1, 1, 2, 2) == 0.0
        assert uniform_interval_probability(0.5, 0.5, 0, 1) == pytest.approx(0.5)
        assert uniform_interval_probability(0, 1, 0.25, 0.25) == pytest.approx(0.75)

    def test_constant_populations(self):
        a, b = from_samples([0.4, 0.4]), from_samples([0.4, 0.4])
        assert compare_uniform_bounds(a, b) == 0.5

    @settings(max_examples=300)
    @given(st.floats(-5, 5), st.floats(0.01, 5), st.floats(-5, 5), st.floats(0.01, 5))
    def test_quadrature_reference(self, a_lo, a_w, b_lo, b_w):
        got = uniform_interval_probability(a_lo, a_lo + a_w, b_lo, b_lo + b_w)
        assert got == pytest.approx(uniform_reference(a_lo, a_lo + a_w, b_lo, b_lo + b_w), abs=1e-9)

    @settings(max_examples=200)
    @given(st.floats(-5, 5), st.floats(0.01, 5), st.floats(-5, 5), st.floats(0.01, 5))
    def test_complement(self, a_lo, a_w, b_lo, b_w):
        p = uniform_interval_probability(a_lo, a_lo + a_w, b_lo, b_lo + b_w)
        q = uniform_interval_probability(b_lo, b_lo + b_w, a_lo, a_lo + a_w)
        assert p + q == pytest.approx(1.0, abs=1e-12)

    def test_oracle_agreement(self):
        rng = np.random.default_rng(11)
        for _ in range(5):
            lo = rng.uniform(-1, 1, 2)
            hi = lo + rng.uniform(0.1, 2, 2)
            a, b = U(lo[0], hi[0]), U(lo[1], hi[1])
            assert compare_uniform_bounds(closed(a), closed(b)) == pytest.approx(oracle_dominance(a, b), abs=1e-9)


class TestUniformMoments:
    def test_symmetric(self):
        assert compare_uniform_moments(closed(U(0, 1)), closed(U(0, 1))) == pytest.approx(0.5)

    def test_shifted(self):
        a, b = closed(U(0.5, 1.5)), closed(U(0, 1))
        assert compare_uniform_moments(a, b) == pytest.approx(0.875, abs=1e-12)

    def test_disjoint(self):
        a, b = closed(U(9.5, 10.5)), closed(U(-0.5, 0.5))
        assert compare_uniform_moments(a, b) == 1.0

    def test_synthetic_interval_from_gaussian(self):
        # only the first two moments matter: a gaussian with variance 1/12 maps to U(m-1/2, m+1/2)
        p = compare_uniform_moments(closed(G(1.0, 1 / 12)), closed(G(0.5, 1 / 12)))
        assert p == pytest.approx(0.875, abs=1e-12)

    def test_single_sample(self):
        with pytest.raises(DegenerateVariance):
            compare_uniform_moments(from_samples([1.0]), from_samples([0.0, 1.0]))


class TestGauss:
    def test_symmetric(self):
        assert compare_gauss(closed(G(0, 1)), closed(G(0, 1))) == 0.5

    def test_examples(self):
        assert compare_gauss(closed(G(1, 1)), closed(G(0, 1))) == pytest.approx(0.7602, abs=1e-4)
        assert compare_gauss(closed(G(0, 1)), closed(G(3, 1))) == pytest.approx(0.0170, abs=1e-4)

    @settings(max_examples=300)
    @given(st.floats(-10, 10), st.floats(1e-4, 10), st.floats(-10, 10), st.floats(1e-4, 10))
    def test_scipy_reference(self, ma, va, mb, vb):
        ref = stats.norm.cdf((ma - mb) / math.sqrt(va + vb))
        assert gauss_probability(ma, va, mb, vb) == pytest.approx(ref, abs=1e-7)

    def test_zero_variance(self):
        assert gauss_probability(1.0, 0.0, 0.0, 0.0) == 1.0
        assert gauss_probability(0.0, 0.0, 0.0, 0.0) == 0.5

    def test_exact_on_gaussian_pairs(self):
        a, b = G(0.6, 0.02), G(0.5, 0.03)
        assert compare_gauss(closed(a), closed(b)) == pytest.approx(oracle_dominance(a, b), abs=1e-6)


class TestHistogram:
    def test_binning_example(self):
        h = build_histogram(from_samples([0.05, 0.15, 0.15, 0.95]), 0.1)
        masses = dict(zip(h.indices.tolist(), h.masses.tolist()))
        assert {k: v for k, v in masses.items() if v} == {0: 0.25, 1: 0.5, 9: 0.25}

    def test_single_sample(self):
        h = build_histogram(from_samples([0.37]), 0.05)
        assert h.masses.tolist() == [1.0]

    @pytest.mark.parametrize("k", [0, 1, 3, 7, 10, 29, -4])
    def test_boundary_goes_up(self, k):
        omega = 0.1
        h = build_histogram(from_samples([k * omega]), omega)
        assert h.first == k

    def test_same_bin(self):
        ha = build_histogram(from_samples([0.01, 0.02]), 0.1)
        hb = build_histogram(from_samples([0.05]), 0.1)
        assert compare_histogram(ha, hb) == 0.5

    def test_above(self):
        ha = build_histogram(from_samples([0.15]), 0.1)
        hb = build_histogram(from_samples([0.05]), 0.1)
        assert compare_histogram(ha, hb) == 1.0
        assert compare_histogram(hb, ha) == 0.0

    def test_half_split(self):
        ha = build_histogram(from_samples([0.05, 0.15]), 0.1)
        hb = build_histogram(from_samples([0.05]), 0.1)
        assert compare_histogram(ha, hb) == pytest.approx(0.75)

    def test_width_mismatch(self):
        with pytest.raises(IncompatibleHistograms):
            compare_histogram(build_histogram(from_samples([0.1]), 0.1), build_histogram(from_samples([0.1]), 0.2))

    def test_gaussian_rejected(self):
        with pytest.raises(UnboundedSupport):
            build_histogram(closed(G(0, 1)), 0.1)

    @settings(max_examples=150)
    @given(
        st.lists(st.floats(-2, 2), min_size=1, max_size=30),
        st.lists(st.floats(-2, 2), min_size=1, max_size=30),
        st.sampled_from([0.01, 0.05, 0.1, 0.3]),
    )
    def test_brute_force(self, a, b, omega):
        def binned(xs):
            out = {}
            for x in xs:
                k = math.floor(x / omega)
                if k * omega > x:
                    k -= 1
                if (k + 1) * omega <= x:
                    k += 1
                out[k] = out.get(k, 0) + 1 / len(xs)
            return out

        ma, mb = binned(a), binned(b)
        ref = sum(pa * pb * (1.0 if ka > kb else 0.5 if ka == kb else 0.0)
                  for ka, pa in ma.items() for kb, pb in mb.items())
        got = compare_histogram(build_histogram(from_samples(a), omega), build_histogram(from_samples(b), omega))
        assert got == pytest.approx(ref, abs=1e-12)

    @pytest.mark.parametrize("omega", [0.01, 0.05, 0.1])
    def test_error_bound_uniform(self, omega):
        rng = np.random.default_rng(int(omega * 1000))
        for _ in range(10):
            lo = rng.uniform(0, 1, 2)
            hi = lo + rng.uniform(0.05, 1, 2)
            a, b = U(lo[0], hi[0]), U(lo[1], hi[1])
            ha, hb = build_histogram(closed(a), omega), build_histogram(closed(b), omega)
            err = abs(compare_histogram(ha, hb) - oracle_dominance(a, b))
            assert err <= histogram_error_bound(ha, hb) + 1e-9

    def test_closed_masses_sum_to_one(self):
        h = build_histogram(closed(DistributionSpec.beta(2, 5, 0.06, 0.4)), 0.01)
        assert h.masses.sum() == pytest.approx(1.0, abs=1e-12)


class TestEmpirical:
    def test_examples(self):
        assert compare_empirical([1, 3, 5], [2, 4]) == 0.5
        assert compare_empirical([1, 1], [1, 1]) == 0.0
        assert compare_empirical([1, 2, 3], [1, 2, 3]) == pytest.approx(1 / 3)

    @settings(max_examples=300)
    @given(
        st.lists(st.integers(0, 8), min_size=1, max_size=60),
        st.lists(st.integers(0, 8), min_size=1, max_size=60),
    )
    def test_brute_force_with_ties(self, a, b):
        a, b = sorted(a), sorted(b)
        assert count_greater_pairs(a, b) == brute_pairs(a, b)

    @settings(max_examples=200)
    @given(
        st.lists(st.integers(-20, 20), min_size=1, max_size=40),
        st.lists(st.integers(-20, 20), min_size=1, max_size=40),
    )
    def test_complement(self, a, b):
        a, b = sorted(a), sorted(b)
        ties = sum(1 for x in a for y in b if x == y)
        total = len(a) * len(b)
        p = Fraction(count_greater_pairs(a, b), total)
        q = Fraction(count_greater_pairs(b, a), total)
        assert p + q == 1 - Fraction(ties, total)

    def test_closed_forms_use_quantile_points(self):
        op = get_operator("emp", OperatorConfig(quantile_steps=2))
        # points (0.25, 0.75) against (0.5, 1.5): one winning pair of four
        assert op.p_greater(closed(U(0, 1)), closed(U(0, 2))) == 0.25


class TestReduced:
    def test_single(self):
        assert compare_reduced([0.3], [0.2]) == compare_empirical([0.3], [0.2])

    def test_disjoint(self):
        rng = np.random.default_rng(0)
        a, b = np.sort(rng.uniform(2, 3, 500)), np.sort(rng.uniform(0, 1, 700))
        assert compare_reduced(a, b) == 1.0

    def test_close_to_full(self):
        rng = np.random.default_rng(1)
        a, b = np.sort(rng.uniform(0, 1, 10_000)), np.sort(rng.uniform(0, 1, 10_000))
        assert abs(compare_reduced(a, b) - compare_empirical(a.tolist(), b.tolist())) <= 0.05


class TestMeanAndThreeStage:
    def test_mean(self):
        a, b = from_samples([0.5]), from_samples([0.4])
        assert compare_mean(a, b, Sense.MAXIMIZE) is Decision.BETTER
        assert compare_mean(a, b, Sense.MINIMIZE) is Decision.WORSE
        assert compare_mean(a, a, Sense.MAXIMIZE) is Decision.INDIFFERENT

    def test_stage_one(self):
        a, b = from_samples([2, 2.5, 3]), from_samples([0, 0.5, 1])
        assert compare_three_stage(a, b) is Decision.BETTER
        assert compare_three_stage(a, b, sense=Sense.MINIMIZE) is Decision.WORSE

    def test_identical(self):
        a = from_samples([0.1, 0.4, 0.9])
        assert compare_three_stage(a, a) is Decision.INDIFFERENT

    def test_stage_two(self):
        # union of bounds is [0, 1], mean gap 0.16 > 0.1 * 1.0
        a = from_samples([0.2, 0.7, 0.7, 0.7, 1.0])
        b = from_samples([0.0, 0.5, 0.5, 0.5, 1.0])
        assert a.mean == pytest.approx(0.66)
        assert compare_three_stage(a, b, OperatorConfig(mean_threshold=0.1)) is Decision.BETTER

    def test_stage_three_prefers_narrow(self):
        wide = from_samples(np.linspace(0, 1, 101))
        narrow = from_samples(np.concatenate([[0.0, 1.0], np.linspace(0.45, 0.55, 99)]))
        cfg = OperatorConfig(mean_threshold=0.1)
        assert compare_three_stage(narrow, wide, cfg) is Decision.BETTER
        assert compare_three_stage(wide, narrow, cfg) is Decision.WORSE

    def test_single_samples_point_comparison(self):
        assert compare_three_stage(from_samples([1.0]), from_samples([0.0])) is Decision.BETTER

    def test_reports_have_no_probabilities(self):
        r = get_operator("mean").report(from_samples([1.0]), from_samples([0.0]))
        assert r.p_greater is None and r.csv_row() == "mean,,,better"


class TestDecide:
    def test_examples(self):
        assert decide(0.8, 0.2, 0.7) is Decision.BETTER
        assert decide(0.5, 0.5, 0.7) is Decision.INDIFFERENT
        assert decide(0.25, 0.75, 0.7) is Decision.WORSE

    def test_gamma_below_half(self):
        with pytest.raises(ConfigError):
            decide(0.9, 0.1, 0.4)

    probs = st.floats(0, 1)

    @given(probs, probs, st.floats(0.5, 1), st.floats(0.5, 1))
    def test_threshold_monotone(self, p, q, g1, g2):
        assume(p + q <= 1)
        lo, hi = sorted((g1, g2))
        if decide(p, q, lo) is Decision.INDIFFERENT:
            assert decide(p, q, hi) is Decision.INDIFFERENT

    @given(probs, probs, st.floats(0.5, 1))
    def test_sense_antisymmetry(self, p, q, g):
        # P(A > B) and P(B > A) are probabilities of disjoint events
        assume(p + q <= 1)
        assert (decide(p, q, g, Sense.MAXIMIZE) is Decision.BETTER) == (decide(p, q, g, Sense.MINIMIZE) is Decision.WORSE)


class TestOracle:
    def test_examples(self):
        assert oracle_dominance(U(0, 1), U(0, 1)) == pytest.approx(0.5, abs=1e-4)
        assert oracle_dominance(U(0, 2), U(1, 3)) == pytest.approx(0.125, abs=1e-4)
        assert oracle_dominance(G(1, 1), G(0, 1)) == pytest.approx(0.7602, abs=1e-4)

    def test_beta_against_quadrature(self):
        a, b = DistributionSpec.beta(0.5, 2.0), U(0.0, 0.2)
        ref = integrate.quad(lambda t: a._base.pdf(t) * min(t / 0.2, 1.0), 0, 1, points=[0.2], limit=200)[0]
        assert oracle_dominance(a, b) == pytest.approx(ref, abs=1e-6)


class TestOperators:
    def test_ids(self):
        assert get_operator("hist:0.05").name == "hist:0.05"
        with pytest.raises(UnknownOperator):
            get_operator("bogus")
        with pytest.raises(UnknownOperator):
            get_operator("emp:3")
        with pytest.raises(ConfigError):
            get_operator("hist:abc")

    def test_report_uses_swapped_call(self):
        a, b = from_samples([1, 2, 3]), from_samples([1, 2, 3])
        r = get_operator("emp").report(a, b)
        assert (r.p_greater, r.p_less) == (pytest.approx(1 / 3), pytest.approx(1 / 3))
        assert r.decision is Decision.INDIFFERENT

    def test_csv_row(self):
        r = ComparisonReport("uni1", 0.5, 0.5, Decision.INDIFFERENT)
        assert r.csv_row() == "uni1,0.5,0.5,indifferent"
        assert CSV_HEADER == "op,p_greater,p_less,decision"

    def test_uni1_on_gaussian(self):
        with pytest.raises(UnboundedSupport):
            get_operator("uni1").report(closed(G(0, 1)), closed(G(1, 1)))

    @pytest.mark.parametrize("op_id", ["uni1", "uni2", "gauss", "emp", "reduce", "hist:0.1", "mean", "threestage"])
    def test_self_comparison_indifferent(self, op_id):
        rng = np.random.default_rng(3)
        v = from_samples(rng.uniform(size=50))
        assert get_operator(op_id).decision(v, v) is Decision.INDIFFERENT

    @settings(max_examples=100)
    @given(st.integers(-40, 40), st.integers(-40, 40), st.sampled_from(["uni1", "gauss", "emp", "reduce", "hist:0.1", "mean", "threestage"]))
    def test_point_masses_follow_crisp_order(self, i, j, op_id):
        # bin centres keep the histogram operator exact on point masses
        x, y = (i + 0.5) * 0.1, (j + 0.5) * 0.1
        a, b = from_samples([x, x]), from_samples([y, y])
        got = get_operator(op_id).decision(a, b, Sense.MAXIMIZE)
        want = Decision.BETTER if x > y else Decision.WORSE if x < y else Decision.INDIFFERENT
        assert got is want
