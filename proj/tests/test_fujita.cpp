#include "heatlab/errors.hpp"
#include "heatlab/fujita_lab.hpp"
#include "heatlab/radial_engine.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace heatlab;

namespace {

constexpr double kPi = std::numbers::pi;

double norm_sq(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

}  // namespace

TEST(Envelope, LightTailBounds) {
    EXPECT_DOUBLE_EQ(envelope_bound(envelope::LightTailMinus{0.5, 1.0}, 1, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(envelope_bound(envelope::LightTailMinus{0.5, 1.0}, 1, 2.0), std::exp(-2.0));
    for (double t : {0.0, 1.0, 10.0}) EXPECT_EQ(envelope_bound(envelope::LightTailMinus{1.0, 2.0}, 1, t), 1.0);
    // f(t) = (1 - C^p (1 - e^{-pt}))^{-1/p} rises from 1 to (1 - C^p)^{-1/p}
    const envelope::LightTailMinus e{0.5, 2.0};
    EXPECT_DOUBLE_EQ(supersolution_factor(e, 1, 0.0), 1.0);
    EXPECT_NEAR(supersolution_factor(e, 1, 50.0), std::pow(1 - 0.25, -0.5), 1e-14);
}

TEST(Envelope, GaussianFactorIsMonotoneAndBounded) {
    const int k = 1;
    const double a = 1.0, p = 3.0;
    const double C = 0.5 * gaussian_smallness_limit(a, p, k);
    const envelope::GaussianPlus e{C, a, p};
    const double q = p * k / 2;
    const double cap = std::pow(1 - p * std::pow(C, p) / (std::pow(4 * kPi, q) * (q - 1) * std::pow(a, q - 1)), -1 / p);
    double prev = 1.0;
    for (double t = 0.0; t <= 1000.0; t = t * 1.5 + 0.01) {
        const double f = supersolution_factor(e, k, t);
        EXPECT_GE(f, prev);
        EXPECT_LE(f, cap + 1e-15);
        prev = f;
    }
    EXPECT_NEAR(gaussian_smallness(gaussian_smallness_limit(a, p, k), a, p, k), 0.0, 1e-12);
    EXPECT_NEAR(envelope_bound(e, k, 3.0), C * std::pow(4 * kPi, -0.5) * cap * std::pow(a + 3.0, -0.5), 1e-14);
}

TEST(Envelope, HeavyTailBounds) {
    const int k = 1;
    // ratio p C^p eps^{1 - p beta} / (2k (p beta - 1)) = 3/4: strict case, decay like t^{-beta}
    const envelope::HeavyTailMinus strict{1.0, 1.0, 1.0, 3.0};
    EXPECT_NEAR(envelope_bound(strict, k, 0.0), std::pow(0.25, -1.0 / 3.0), 1e-14);
    EXPECT_NEAR(envelope_bound(strict, k, 4.5) / envelope_bound(strict, k, 0.0), 0.1, 1e-14);
    // ratio 1: equality case, decay like t^{-1/p}
    const envelope::HeavyTailMinus edge{1.0, 1.0, 1.0, 2.0};
    EXPECT_NEAR(envelope_bound(edge, k, 0.0), 1.0, 1e-14);
    EXPECT_NEAR(envelope_bound(edge, k, 4.5), std::pow(10.0, -0.5), 1e-14);
    EXPECT_THROW(validate_envelope(envelope::HeavyTailMinus{2.0, 1.0, 1.0, 2.0}, k), ParamError);
}

TEST(Envelope, ParameterChecks) {
    EXPECT_THROW(validate_envelope(envelope::LightTailMinus{1.5, 1.0}, 1), ParamError);
    EXPECT_THROW(validate_envelope(envelope::LightTailMinus{0.5, 0.0}, 1), ParamError);
    EXPECT_THROW(validate_envelope(envelope::HeavyTailMinus{1.0, 1.0, 0.4, 2.0}, 1), ParamError);
    EXPECT_THROW(validate_envelope(envelope::GaussianPlus{0.1, 1.0, 2.0}, 1), ParamError);
    EXPECT_THROW(validate_envelope(envelope::GaussianPlus{1e6, 1.0, 3.0}, 1), ParamError);
    EXPECT_THROW(envelope_bound(envelope::LightTailMinus{2.0, 1.0}, 1, 0.0), ParamError);
}

TEST(Envelope, LightTailRunStaysBelowBoundAndDecays) {
    SchemeConfig cfg;
    const EnvelopeReport r = verify_envelope(envelope::LightTailMinus{0.5, 1.0}, 2, 1, 8.0, 65, cfg, 3.0);
    EXPECT_EQ(r.violations, 0u);
    EXPECT_FALSE(r.blown_up);
    EXPECT_LE(r.worst_ratio, 1.0);
    // exponential rate fitted over [1, 3] within 10% of e^{-t}
    std::size_t i1 = 0;
    while (r.times[i1] < 1.0) ++i1;
    const double rate = std::log(r.sup.back() / r.sup[i1]) / (r.times.back() - r.times[i1]);
    EXPECT_NEAR(rate, -1.0, 0.1);
}

TEST(Envelope, GaussianPlusRunKeepsSqrtScaling) {
    const double C = 0.5 * gaussian_smallness_limit(1.0, 3.0, 1);
    const envelope::GaussianPlus e{C, 1.0, 3.0};
    const EnvelopeReport r = verify_envelope(e, 2, 1, 16.0, 65, SchemeConfig{}, 5.0);
    EXPECT_EQ(r.violations, 0u);
    double worst = 0.0;
    for (std::size_t i = 0; i < r.times.size(); ++i) worst = std::max(worst, r.sup[i] * std::sqrt(1.0 + r.times[i]));
    EXPECT_LE(worst, envelope_bound(e, 1, 0.0) * 1.1);
}

TEST(Envelope, StationarySolutionDriftsWithinSchemeTolerance) {
    const auto sol = ClosedFormSolution::stationary_minus(2, 1, 1.0, 1.0);
    SchemeConfig cfg;
    cfg.boundary = DirichletOracle{sol};
    const GridField u0 = GridField::from_solution(sol, 8.0, 65, 0.0);
    const Trajectory tr = solve(u0, sol.spec(), cfg, 1.0);
    double drift = 0.0;
    for (std::size_t c = 0; c < u0.size(); ++c) drift = std::max(drift, std::abs(tr.final_state.values[c] - u0.values[c]));
    EXPECT_LE(drift, scheme_tolerance(u0, 1.0));
}

TEST(Jensen, BlowupTimes) {
    EXPECT_DOUBLE_EQ(jensen_blowup_time(1.0, 1.0, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(jensen_blowup_time(2.0, 1.0, 1.0), 0.5);
    EXPECT_NEAR(jensen_constant(profiles::cap(1.0), 1, 1.0), 4.0 / 3.0, 1e-12);
    EXPECT_NEAR(jensen_constant(profiles::cap(1.0), 1, 2.0), 16.0 / 9.0, 1e-12);
    EXPECT_THROW(jensen_blowup_time(0.0, 1.0, 1.0), ParamError);
    EXPECT_THROW(jensen_blowup_time(1.0, -1.0, 1.0), ParamError);
    EXPECT_THROW(jensen_blowup_time(1.0, 1.0, 0.0), ParamError);
    for (double g0 : {1.0, 1.5, 3.0}) {
        EXPECT_GT(jensen_blowup_time(g0, 1.0, 1.0), jensen_blowup_time(g0 * 1.1, 1.0, 1.0));
        EXPECT_GT(jensen_blowup_time(g0, 1.0, 1.0), jensen_blowup_time(g0, 1.1, 1.0));
        EXPECT_GT(jensen_blowup_time(g0, 1.0, 1.0), jensen_blowup_time(g0, 1.0, 1.1));
    }
}

TEST(Classify, SlopesOfSyntheticSeries) {
    std::vector<double> t, s1, s2, s3;
    for (int i = 0; i <= 2000; ++i) {
        t.push_back(0.01 * i);
        s1.push_back(std::pow(1.0 + t.back(), -0.5));
        s2.push_back(1.0 / (0.5 + t.back()));
        s3.push_back(2.0);
    }
    EXPECT_NEAR(last_decade_slope(t, s1, 1.0), -0.5, 1e-12);
    EXPECT_NEAR(last_decade_slope(t, s2, 0.5), -1.0, 1e-12);
    Trajectory tr;
    tr.times = t;
    tr.sup = s1;
    EXPECT_EQ(classify(tr, 1.0).kind, BlowupVerdict::Kind::global_decay);
    EXPECT_NEAR(classify(tr, 1.0).rate, -0.5, 1e-12);
    tr.sup = s3;
    EXPECT_EQ(classify(tr, 0.0).kind, BlowupVerdict::Kind::undecided);
    tr.final_state = GridField::zeros(2, 1.0, 9);
    tr.final_state.blown_up = true;
    tr.final_state.blowup_time = 3.25;
    const BlowupVerdict b = classify(tr, 0.0);
    EXPECT_EQ(b.kind, BlowupVerdict::Kind::blow_up);
    EXPECT_EQ(b.t_star, 3.25);
    EXPECT_EQ(to_string(BlowupVerdict::Kind::global_decay), "GlobalDecay");
}

TEST(Sweep, PlusOperatorSeparatesAroundCriticalExponent) {
    SweepConfig cfg;
    cfg.p_list = {1.0, 2.0, 3.0};
    cfg.cap_amplitudes = {1.0};
    cfg.m = 65;
    cfg.threads = 3;
    const VerdictTable t = exponent_sweep(cfg);
    ASSERT_EQ(t.entries.size(), 3u);
    EXPECT_EQ(t.entries[0].verdict.kind, BlowupVerdict::Kind::blow_up);
    EXPECT_EQ(t.entries[0].data, "cap");
    EXPECT_EQ(t.entries[1].verdict.kind, BlowupVerdict::Kind::undecided);
    EXPECT_EQ(t.entries[2].verdict.kind, BlowupVerdict::Kind::global_decay);
    EXPECT_EQ(t.entries[2].data, "small_gaussian");
    EXPECT_NEAR(t.entries[2].verdict.rate, -0.5, 0.1);
    EXPECT_TRUE(t.bracket_contains(2.0));
    EXPECT_DOUBLE_EQ(t.p_lo, 1.0);
    EXPECT_DOUBLE_EQ(*t.p_hi, 3.0);

    std::ostringstream csv;
    write_verdict_csv(csv, t);
    const std::string s = csv.str();
    EXPECT_EQ(s.substr(0, s.find('\n')), "sign,k,N,p,scale,verdict,t_star_or_rate");
    EXPECT_NE(s.find("plus,1,2,2,"), std::string::npos);

    // identical config, identical table
    const VerdictTable again = exponent_sweep(cfg);
    std::ostringstream csv2;
    write_verdict_csv(csv2, again);
    EXPECT_EQ(csv2.str(), s);
}

TEST(Sweep, MinusOperatorDecaysForSmallExponent) {
    SweepConfig cfg;
    cfg.sign = Sign::minus;
    cfg.p_list = {0.5};
    cfg.L = 8.0;
    cfg.m = 65;
    cfg.T_max = 3.0;
    const VerdictTable t = exponent_sweep(cfg);
    ASSERT_EQ(t.entries.size(), 1u);
    EXPECT_EQ(t.entries[0].data, "light_gaussian");
    EXPECT_DOUBLE_EQ(t.entries[0].scale, 0.5);
    EXPECT_EQ(t.entries[0].verdict.kind, BlowupVerdict::Kind::global_decay);
    EXPECT_TRUE(t.bracket_contains(0.0));
}

TEST(Sweep, LargerDataBlowsUpNoLater) {
    SweepConfig cfg;
    cfg.p_list = {1.0};
    cfg.data = SweepData::cap;
    cfg.cap_amplitudes = {1.0, 2.0};
    cfg.m = 65;
    cfg.threads = 2;
    const VerdictTable t = exponent_sweep(cfg);
    ASSERT_EQ(t.entries.size(), 2u);
    ASSERT_EQ(t.entries[0].verdict.kind, BlowupVerdict::Kind::blow_up);
    ASSERT_EQ(t.entries[1].verdict.kind, BlowupVerdict::Kind::blow_up);
    EXPECT_LE(t.entries[1].verdict.t_star, t.entries[0].verdict.t_star + 1e-12);
}

TEST(LowerDimensional, TruncatedOperatorDominatesKDimensionalLaplacian) {
    const double radii[] = {0.3, 0.6, 1.0, 1.5, 2.0, 3.0};
    for (int k : {1, 2}) {
        EXPECT_GE(lower_dimensional_gap(profiles::heat_gaussian(1.0, k), 3, k, 1e-2, radii), -1e-3);
        EXPECT_GE(lower_dimensional_gap(profiles::exp_decay(1.0), 3, k, 1e-2, radii), -1e-3);
    }
    EXPECT_GE(lower_dimensional_gap(profiles::algebraic(1.0, 1.0, 1.0), 2, 1, 1e-2, radii), -1e-3);
}

TEST(EnvelopeData, ExtremalDataMatchesEnvelopeShape) {
    const GridField f = envelope_data(envelope::LightTailMinus{0.5, 1.0}, 2, 1, 4.0, 17);
    for (std::size_t c = 0; c < f.size(); ++c) {
        const auto x = f.point(c);
        EXPECT_NEAR(f.values[c], 0.5 * std::exp(-norm_sq(std::span<const double>(x.data(), 2)) / 2), 1e-15);
    }
    const ProblemSpec s = envelope_problem(envelope::GaussianPlus{0.1, 1.0, 3.0}, 2, 1);
    EXPECT_EQ(s.sign, Sign::plus);
    EXPECT_EQ(*s.reaction_p, 3.0);
}
