#include "heatlab/analytic_catalog.hpp"
#include "heatlab/errors.hpp"
#include "heatlab/quadrature.hpp"
#include "heatlab/random.hpp"
#include "heatlab/radial_engine.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace heatlab;

namespace {

constexpr double kPi = std::numbers::pi;

double at(const ClosedFormSolution& s, double t, std::vector<double> x) { return eval(s, t, x); }

std::vector<double> grid_open(double a, double b, int n) {
    std::vector<double> r;
    for (int i = 1; i <= n; ++i) r.push_back(a + (b - a) * i / n);
    return r;
}

}  // namespace

TEST(CatalogEval, SelfSimilarAtOrigin) {
    const auto s = ClosedFormSolution::self_similar_minus(2, 1, 1.0, 1.0, 0.0);
    EXPECT_DOUBLE_EQ(at(s, 1.0, {0.0, 0.0}), 0.5);
}

TEST(CatalogEval, GaussianPlusAtOrigin) {
    const auto s = ClosedFormSolution::gaussian_plus(3, 2, 1.0);
    EXPECT_DOUBLE_EQ(at(s, 1.0, {0.0, 0.0, 0.0}), 1.0);
    EXPECT_THROW(at(s, 0.0, {0.0, 0.0, 0.0}), DomainError);
    EXPECT_THROW(at(s, -1.0, {0.0, 0.0, 0.0}), DomainError);
}

TEST(CatalogEval, QuenchingVanishesAfterQuenchTime) {
    const auto s = ClosedFormSolution::radial_transport_minus(2, 1, profiles::quenching_bump());
    const auto q = ClosedFormSolution::quenching_profile_minus(2, 1);
    std::mt19937_64 rng(9);
    for (int i = 0; i < 200; ++i) {
        const std::vector<double> x{uniform_in(rng, -3, 3), uniform_in(rng, -3, 3)};
        EXPECT_EQ(eval(s, 0.6, x), 0.0);
        EXPECT_EQ(eval(q, 0.6, x), 0.0);
    }
    EXPECT_GT(at(q, 0.4, {0.0, 0.0}), 0.0);
}

TEST(CatalogEval, HandFormulas) {
    const double t = 0.7;
    const std::vector<double> x{0.3, -0.4};
    const double r2 = 0.25;
    EXPECT_NEAR(at(ClosedFormSolution::self_similar_minus(2, 1, 0.75, 2.0, 0.5), t, x),
                2.0 * std::pow(r2 + 2 * t + 0.5, -0.75), 1e-15);
    EXPECT_NEAR(at(ClosedFormSolution::gaussian_plus(2, 1, 1.5), t, x), 1.5 / std::sqrt(t) * std::exp(-r2 / (4 * t)),
                1e-15);
    EXPECT_NEAR(at(ClosedFormSolution::shifted_gaussian_plus(2, 1, 1.0), t, x),
                std::exp(-r2 / (4 * 1.7)) / std::sqrt(4 * kPi * 1.7), 1e-15);
    EXPECT_NEAR(at(ClosedFormSolution::separated_exponential_minus(2, 1, 1.0), t, x), std::exp(-t - r2 / 2), 1e-15);
    EXPECT_NEAR(at(ClosedFormSolution::stationary_minus(2, 1, 1.0, 1.0), t, x), 2.0 / (1.0 + r2), 1e-15);
    EXPECT_NEAR(at(ClosedFormSolution::travelling_wave(2, 1, Sign::minus, 0, 0.0, 1.0, 1.0), t, x),
                -std::exp(-(0.3 - t)), 1e-15);
    EXPECT_NEAR(at(ClosedFormSolution::travelling_wave(2, 1, Sign::plus, 1, 0.5, 1.0, -0.7), t, x),
                0.5 + std::exp(0.7 * (-0.4 + 0.7 * t)), 1e-15);
    const double s2 = 2 * t + r2;
    EXPECT_NEAR(at(ClosedFormSolution::quenching_profile_minus(2, 1), 0.1, x), std::exp(1.0 / (std::sqrt(0.2 + r2) - 1)),
                1e-15);
    EXPECT_NEAR(at(ClosedFormSolution::radial_transport_minus(2, 1, profiles::exp_decay(1.0)), t, x),
                std::exp(-std::sqrt(s2)), 1e-15);
}

TEST(CatalogEval, PolynomialIsQuadraticPlusLinearInTime) {
    const double e[] = {1.0, 0.5, 0.5, -2.0};
    const SymMatrix A = SymMatrix::from_row_major(2, e);
    const auto s = ClosedFormSolution::polynomial(2, 1, Sign::plus, A, {0.1, 0.2}, {1.0, -1.0}, 3.0);
    const double lmax = -0.5 + std::sqrt(2.25 + 0.25);
    const std::vector<double> x{1.1, -0.8};
    const double d0 = 1.0, d1 = -1.0;
    const double expect = lmax * 2.0 + 0.5 * (d0 * d0 + 2 * 0.5 * d0 * d1 - 2.0 * d1 * d1) + d0 - d1 + 3.0;
    EXPECT_NEAR(eval(s, 2.0, x), expect, 1e-13);
}

TEST(CatalogConstruction, RejectsBadParameters) {
    EXPECT_THROW(ClosedFormSolution::self_similar_minus(2, 1, 0.0, 1.0, 0.0), ParamError);
    EXPECT_THROW(ClosedFormSolution::self_similar_minus(2, 1, 1.0, -1.0, 0.0), ParamError);
    EXPECT_THROW(ClosedFormSolution::self_similar_minus(2, 1, 1.0, 1.0, -0.1), ParamError);
    EXPECT_THROW(ClosedFormSolution::self_similar_minus(2, 2, 1.0, 1.0, 0.0), ParamError);
    EXPECT_THROW(ClosedFormSolution::travelling_wave(2, 1, Sign::minus, 0, 0.0, 0.0, 1.0), ParamError);
    EXPECT_THROW(ClosedFormSolution::travelling_wave(2, 1, Sign::minus, 0, 0.0, 1.0, 0.0), ParamError);
    EXPECT_THROW(ClosedFormSolution::travelling_wave(2, 1, Sign::minus, 2, 0.0, 1.0, 1.0), ParamError);
    EXPECT_THROW(ClosedFormSolution::gaussian_plus(2, 1, 0.0), ParamError);
    EXPECT_THROW(ClosedFormSolution::shifted_gaussian_plus(2, 1, -1.0), ParamError);
    EXPECT_THROW(ClosedFormSolution::stationary_minus(2, 1, 0.0, 1.0), ParamError);
    EXPECT_THROW(ClosedFormSolution::gaussian_plus(2, 3, 1.0), ParamError);
    // -s^4: g'' - g'/s = -8 s^2 < 0
    const RadialProfile quartic = RadialProfile::closed_form(
        "neg_quartic", {[](double r) { return -r * r * r * r; }, [](double r) { return -4 * r * r * r; },
                        [](double r) { return -12 * r * r; }});
    EXPECT_THROW(ClosedFormSolution::radial_transport_minus(2, 1, quartic), ParamError);
}

TEST(CatalogEval, SelfSimilarEpsZeroSingularOnlyAtOrigin) {
    const auto s = ClosedFormSolution::self_similar_minus(2, 1, 1.0, 1.0, 0.0);
    EXPECT_THROW(at(s, 0.0, {0.0, 0.0}), DomainError);
    EXPECT_NO_THROW(at(s, 0.0, {0.5, 0.0}));
}

TEST(PdeResidual, PolynomialIsExact) {
    std::mt19937_64 rng(6);
    for (Sign sg : {Sign::minus, Sign::plus}) {
        for (int trial = 0; trial < 20; ++trial) {
            SymMatrix A(3);
            for (int i = 0; i < 3; ++i) {
                for (int j = i; j < 3; ++j) A.set(i, j, uniform_in(rng, -1, 1));
            }
            const auto s = ClosedFormSolution::polynomial(3, 2, sg, A, {0.1, 0.2, 0.3}, {1.0, 0.0, -1.0}, 0.5);
            const std::vector<double> x{uniform_in(rng, -1, 1), uniform_in(rng, -1, 1), uniform_in(rng, -1, 1)};
            EXPECT_LE(std::abs(pde_residual(s, uniform_in(rng, 0.1, 2.0), x, 1e-3)), 1e-8);
        }
    }
}

TEST(PdeResidual, TravellingWave) {
    const auto s = ClosedFormSolution::travelling_wave(2, 1, Sign::minus, 0, 0.0, 1.0, 1.0);
    EXPECT_LE(std::abs(pde_residual(s, 1.0, std::vector<double>{1.0, 0.0}, 1e-3)), 1e-5);
}

TEST(PdeResidual, StationaryWithReaction) {
    for (int N : {2, 3}) {
        const auto s = ClosedFormSolution::stationary_minus(N, 1, 1.0, 1.0);
        std::vector<double> x(static_cast<std::size_t>(N), 0.0);
        x[0] = 1.0;
        EXPECT_LE(std::abs(pde_residual(s, 0.5, x, 1e-3)), 1e-5);
        // without the source term the same function is far from a solution
        EXPECT_TRUE(s.spec().has_reaction());
    }
}

TEST(PdeResidual, GuardsNonSmoothSetAndSmallTimes) {
    const auto q = ClosedFormSolution::quenching_profile_minus(2, 1);
    // |x|^2 + 2t = 1 exactly at x = (sqrt(0.8), 0), t = 0.1
    EXPECT_THROW(pde_residual(q, 0.1, std::vector<double>{std::sqrt(0.8), 0.0}, 1e-3), DomainError);
    const auto g = ClosedFormSolution::gaussian_plus(2, 1, 1.0);
    EXPECT_THROW(pde_residual(g, 1e-3, std::vector<double>{0.0, 0.0}, 1e-3), DomainError);
    EXPECT_THROW(pde_residual(g, 1.0, std::vector<double>{0.0, 0.0}, 0.0), ParamError);
}

TEST(PdeResidual, SecondOrderForEveryDefaultVariant) {
    for (const auto& id : default_catalog_ids()) {
        const auto s = parse_catalog_id(id, 3, 1);
        std::mt19937_64 rng(77);
        double ss1 = 0.0, ss2 = 0.0;
        int used = 0;
        while (used < 20) {
            const double t = uniform_in(rng, 0.1, 0.4);
            const std::vector<double> x{uniform_in(rng, -1, 1), uniform_in(rng, -1, 1), uniform_in(rng, -1, 1)};
            const auto d = s.distance_to_nonsmooth(t, x);
            if (d && *d < 0.2) continue;
            const double a = pde_residual(s, t, x, 0.01), b = pde_residual(s, t, x, 0.005);
            ss1 += a * a;
            ss2 += b * b;
            ++used;
        }
        const double floor = 1e-7;
        if (std::sqrt(ss2 / used) < floor) continue;
        EXPECT_GE(std::log2(std::sqrt(ss1 / ss2)), 1.8) << id;
    }
}

TEST(CatalogProperties, SelfSimilarScaling) {
    std::mt19937_64 rng(12);
    for (double beta : {0.5, 1.0, 1.7}) {
        const auto s = ClosedFormSolution::self_similar_minus(3, 2, beta, 1.3, 0.0);
        for (int i = 0; i < 50; ++i) {
            const double lam = uniform_in(rng, 0.2, 5.0);
            const double t = uniform_in(rng, 0.1, 3.0);
            const std::vector<double> x{uniform_in(rng, -2, 2), uniform_in(rng, -2, 2), uniform_in(rng, -2, 2)};
            const std::vector<double> lx{lam * x[0], lam * x[1], lam * x[2]};
            const double base = eval(s, t, x);
            EXPECT_NEAR(eval(s, lam * lam * t, lx), std::pow(lam, -2 * beta) * base, 1e-12 * std::abs(base));
        }
    }
}

TEST(CatalogProperties, SelfSimilarSupDecaysLikePower) {
    const double beta = 0.8, mu = 1.0;
    const auto s = ClosedFormSolution::self_similar_minus(2, 1, beta, mu, 0.0);
    std::vector<double> ratios;
    for (double t : {1.0, 10.0, 100.0}) {
        double sup = 0.0;
        for (int i = -20; i <= 20; ++i) {
            for (int j = -20; j <= 20; ++j) sup = std::max(sup, at(s, t, {0.25 * i, 0.25 * j}));
        }
        ratios.push_back(sup * std::pow(t, beta));
    }
    for (double r : ratios) EXPECT_NEAR(r, mu * std::pow(2.0, -beta), 1e-6);
}

TEST(CatalogProperties, GaussianPlusMassGrowth) {
    const int N = 2, k = 1;
    const auto s = ClosedFormSolution::gaussian_plus(N, k, 1.0 / (4 * kPi));
    for (double t : {1.0, 4.0}) {
        const double R = 12 * std::sqrt(t);
        const double mass = quad::integrate(
            [&](double x) { return quad::integrate([&](double y) { return at(s, t, {x, y}); }, -R, R, 256); }, -R, R,
            256);
        EXPECT_NEAR(mass, std::sqrt(t), 1e-6 * std::sqrt(t));
    }
}

TEST(ProfileCondition, LightGaussianSatisfiesTransportCondition) {
    EXPECT_TRUE(check_profile_condition(profiles::light_gaussian(1.0, 1), grid_open(0, 5, 500), ProfileCondition::hyp_CI)
                    .empty());
}

TEST(ProfileCondition, HeatGaussianOrientation) {
    // g'' - g'/s = (s^2/4) g for g = e^{-s^2/4}: nonnegative, zero only at s = 0
    const RadialProfile g = RadialProfile::closed_form(
        "gauss", {[](double s) { return std::exp(-s * s / 4); }, [](double s) { return -s / 2 * std::exp(-s * s / 4); },
                  [](double s) { return (s * s / 4 - 0.5) * std::exp(-s * s / 4); }});
    const auto r = grid_open(0, 5, 100);
    EXPECT_TRUE(check_profile_condition(g, r, ProfileCondition::hyp_self).empty());
    const auto rev = check_profile_condition(g, r, ProfileCondition::reverse);
    EXPECT_GE(rev.size(), 95u);
    for (const auto& v : rev) EXPECT_LT(v.margin, 0.0);
}

TEST(ProfileCondition, CapIsEqualityCase) {
    const auto r = grid_open(0, 0.999, 200);
    EXPECT_TRUE(check_profile_condition(profiles::cap(1.0), r, ProfileCondition::hyp_CI).empty());
    EXPECT_TRUE(check_profile_condition(profiles::cap(1.0), r, ProfileCondition::reverse).empty());
}

TEST(ProfileCondition, TableProfileUsesFiniteDifferences) {
    std::vector<double> r, v;
    for (int i = 0; i <= 400; ++i) {
        r.push_back(0.01 * i);
        v.push_back(std::exp(-r.back() * r.back() / 2));
    }
    const RadialProfile t = RadialProfile::table("sampled", r, v);
    EXPECT_EQ(t.d1(0.0), 0.0);
    EXPECT_NEAR(t.d2(0.0), -1.0, 1e-4);
    EXPECT_NEAR(t.d1(1.0), -std::exp(-0.5), 1e-4);
    EXPECT_NEAR(t.d2(1.5), (1.5 * 1.5 - 1) * std::exp(-1.125), 1e-3);
    EXPECT_TRUE(check_profile_condition(t, grid_open(0, 3.9, 50), ProfileCondition::hyp_CI).empty());
    EXPECT_THROW(RadialProfile::table("bad", {0.0, 1.0}, {1.0, 2.0}), ParamError);
    EXPECT_THROW(RadialProfile::table("bad", {0.1, 1.0, 2.0}, {1.0, 2.0, 3.0}), ParamError);
}

TEST(CatalogIds, DefaultsResolveAndNamesAreStable) {
    for (const auto& id : default_catalog_ids()) {
        const auto s = parse_catalog_id(id, 3, 1);
        EXPECT_EQ(id.substr(0, s.name().size()), s.name()) << id;
    }
    EXPECT_THROW(parse_catalog_id("no_such_family", 2, 1), ParamError);
    EXPECT_THROW(parse_catalog_id("gaussian_plus{mu=1,nu=2}", 2, 1), ParamError);
    EXPECT_THROW(parse_catalog_id("gaussian_plus{mu=abc}", 2, 1), ParamError);
    EXPECT_THROW(parse_profile_id("cap{eps=1", 1), ParamError);
}

TEST(CatalogIds, ParsedIdSplitsParameters) {
    const ParsedId p = parse_id("self_similar_minus{beta=1, mu=2,eps=0}");
    EXPECT_EQ(p.name, "self_similar_minus");
    ASSERT_EQ(p.params.size(), 3u);
    EXPECT_EQ(p.params[1].first, "mu");
    EXPECT_EQ(p.params[1].second, "2");
    const auto s = parse_catalog_id("self_similar_minus{beta=1,mu=2,eps=0}", 2, 1);
    EXPECT_DOUBLE_EQ(at(s, 1.0, {0.0, 0.0}), 1.0);
    const auto nested = parse_catalog_id("radial_transport_minus{profile=algebraic,mu=1,eps=1,beta=1}", 2, 1);
    EXPECT_DOUBLE_EQ(at(nested, 0.0, {1.0, 0.0}), 0.5);
}

TEST(CatalogIds, PolynomialSeedIsDeterministic) {
    const auto a = parse_catalog_id("polynomial{sign=plus,seed=5}", 2, 1);
    const auto b = parse_catalog_id("polynomial{sign=plus,seed=5}", 2, 1);
    const auto c = parse_catalog_id("polynomial{sign=plus,seed=6}", 2, 1);
    EXPECT_EQ(at(a, 0.3, {0.1, 0.2}), at(b, 0.3, {0.1, 0.2}));
    EXPECT_NE(at(a, 0.3, {0.1, 0.2}), at(c, 0.3, {0.1, 0.2}));
}
