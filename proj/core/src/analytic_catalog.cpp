#include "heatlab/analytic_catalog.hpp"

#include "heatlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace heatlab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

ProblemSpec make_spec(int N, int k, Sign sign, std::optional<double> p = std::nullopt) {
    ProblemSpec s{N, k, sign, p};
    s.validate();
    return s;
}

void require_truncated(const ProblemSpec& s, const char* family_name) {
    if (s.k >= s.N) {
        throw ParamError(std::string(family_name) + " solves the truncated flow only (requires k < N)");
    }
}

void require_axis(int axis, int N) {
    if (axis < 0 || axis >= N) throw ParamError("axis out of range [0, N)");
}

void require(bool ok, const std::string& what) {
    if (!ok) throw ParamError(what);
}

// Convexity (sign = +1) or concavity (sign = -1) of phi, sampled on [-10, 10].
void require_curvature(const ScalarFunction& phi, double sign, const char* what) {
    if (!phi.value || !phi.d1 || !phi.d2) throw ParamError("one-variable profile needs value, d1, d2");
    for (int i = 0; i <= 400; ++i) {
        const double z = -10.0 + 0.05 * i;
        const double c = phi.d2(z);
        if (sign * c < -1e-12 * (1.0 + std::abs(c))) throw ParamError(what);
    }
}

double norm_sq(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

double quenching_value(double s) { return s < 1.0 ? std::exp(1.0 / (s - 1.0)) : 0.0; }

}  // namespace

ClosedFormSolution ClosedFormSolution::one_var_convex(int N, int k, int axis, std::string phi_name, ScalarFunction phi) {
    auto spec = make_spec(N, k, Sign::minus);
    require_truncated(spec, "one_var_convex");
    require_axis(axis, N);
    require_curvature(phi, 1.0, "one_var_convex: phi must be convex");
    return {spec, family::OneVarConvex{axis, std::move(phi_name), std::move(phi)}};
}

ClosedFormSolution ClosedFormSolution::one_var_concave(int N, int k, int axis, std::string phi_name, ScalarFunction phi) {
    auto spec = make_spec(N, k, Sign::plus);
    require_truncated(spec, "one_var_concave");
    require_axis(axis, N);
    require_curvature(phi, -1.0, "one_var_concave: phi must be concave");
    return {spec, family::OneVarConcave{axis, std::move(phi_name), std::move(phi)}};
}

ClosedFormSolution ClosedFormSolution::travelling_wave(int N, int k, Sign sign, int axis, double alpha, double beta,
                                                       double c) {
    auto spec = make_spec(N, k, sign);
    require_axis(axis, N);
    require(beta > 0.0 && std::isfinite(beta), "travelling_wave: beta must be positive");
    require(c != 0.0 && std::isfinite(c), "travelling_wave: c must be nonzero");
    require(std::isfinite(alpha), "travelling_wave: alpha must be finite");
    return {spec, family::TravellingWave{axis, alpha, beta, c}};
}

ClosedFormSolution ClosedFormSolution::polynomial(int N, int k, Sign sign, const SymMatrix& A, std::vector<double> x0,
                                                  std::vector<double> y, double C) {
    auto spec = make_spec(N, k, sign);
    require(A.size() == N, "polynomial: A must be N x N");
    require(x0.size() == static_cast<std::size_t>(N) && y.size() == static_cast<std::size_t>(N),
            "polynomial: x0 and y must have N components");
    family::Polynomial f{A, std::move(x0), std::move(y), C, truncated_laplacian(A, spec)};
    return {spec, std::move(f)};
}

ClosedFormSolution ClosedFormSolution::self_similar_minus(int N, int k, double beta, double mu, double eps) {
    auto spec = make_spec(N, k, Sign::minus);
    require_truncated(spec, "self_similar_minus");
    require(beta > 0.0, "self_similar_minus: beta must be positive");
    require(mu > 0.0, "self_similar_minus: mu must be positive");
    require(eps >= 0.0, "self_similar_minus: eps must be nonnegative");
    return {spec, family::SelfSimilarMinus{beta, mu, eps}};
}

ClosedFormSolution ClosedFormSolution::gaussian_plus(int N, int k, double mu) {
    auto spec = make_spec(N, k, Sign::plus);
    require(mu > 0.0, "gaussian_plus: mu must be positive");
    return {spec, family::GaussianPlus{mu}};
}

ClosedFormSolution ClosedFormSolution::shifted_gaussian_plus(int N, int k, double a) {
    auto spec = make_spec(N, k, Sign::plus);
    require(a > 0.0, "shifted_gaussian_plus: a must be positive");
    return {spec, family::ShiftedGaussianPlus{a}};
}

ClosedFormSolution ClosedFormSolution::radial_transport_minus(int N, int k, RadialProfile g) {
    auto spec = make_spec(N, k, Sign::minus);
    require_truncated(spec, "radial_transport_minus");
    const double r_max = g.support_radius().value_or(20.0);
    std::vector<double> grid(400);
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = r_max * static_cast<double>(i + 1) / 400.0;
    if (!check_profile_condition(g, grid, ProfileCondition::hyp_CI).empty()) {
        throw ParamError("radial_transport_minus: profile '" + g.name() + "' violates g'' >= g'/s");
    }
    return {spec, family::RadialTransportMinus{std::move(g)}};
}

ClosedFormSolution ClosedFormSolution::separated_exponential_minus(int N, int k, double mu) {
    auto spec = make_spec(N, k, Sign::minus);
    require_truncated(spec, "separated_exponential_minus");
    require(mu > 0.0, "separated_exponential_minus: mu must be positive");
    return {spec, family::SeparatedExponentialMinus{mu}};
}

ClosedFormSolution ClosedFormSolution::quenching_profile_minus(int N, int k) {
    auto spec = make_spec(N, k, Sign::minus);
    require_truncated(spec, "quenching_profile_minus");
    return {spec, family::QuenchingProfileMinus{}};
}

ClosedFormSolution ClosedFormSolution::stationary_minus(int N, int k, double p, double mu) {
    require(p > 0.0, "stationary_minus: p must be positive");
    require(mu > 0.0, "stationary_minus: mu must be positive");
    auto spec = make_spec(N, k, Sign::minus, p);
    require_truncated(spec, "stationary_minus");
    return {spec, family::StationaryMinus{p, mu}};
}

std::string ClosedFormSolution::name() const {
    return std::visit(overloaded{
                          [](const family::OneVarConvex&) -> std::string { return "one_var_convex"; },
                          [](const family::OneVarConcave&) -> std::string { return "one_var_concave"; },
                          [](const family::TravellingWave&) -> std::string { return "travelling_wave"; },
                          [](const family::Polynomial&) -> std::string { return "polynomial"; },
                          [](const family::SelfSimilarMinus&) -> std::string { return "self_similar_minus"; },
                          [](const family::GaussianPlus&) -> std::string { return "gaussian_plus"; },
                          [](const family::ShiftedGaussianPlus&) -> std::string { return "shifted_gaussian_plus"; },
                          [](const family::RadialTransportMinus&) -> std::string { return "radial_transport_minus"; },
                          [](const family::SeparatedExponentialMinus&) -> std::string {
                              return "separated_exponential_minus";
                          },
                          [](const family::QuenchingProfileMinus&) -> std::string { return "quenching_profile_minus"; },
                          [](const family::StationaryMinus&) -> std::string { return "stationary_minus"; },
                      },
                      family_);
}

bool ClosedFormSolution::in_domain(double t, std::span<const double> x) const {
    if (x.size() != static_cast<std::size_t>(spec_.N)) return false;
    if (!std::isfinite(t)) return false;
    for (double v : x) {
        if (!std::isfinite(v)) return false;
    }
    if (std::holds_alternative<family::GaussianPlus>(family_)) return t > 0.0;
    if (t < 0.0) return false;
    if (const auto* ss = std::get_if<family::SelfSimilarMinus>(&family_)) {
        return ss->eps > 0.0 || t > 0.0 || norm_sq(x) > 0.0;
    }
    return true;
}

double ClosedFormSolution::operator()(double t, std::span<const double> x) const {
    if (!in_domain(t, x)) {
        throw DomainError(name() + ": (t, x) outside the validity domain");
    }
    const double k = spec_.k;
    return std::visit(
        overloaded{
            [&](const family::OneVarConvex& f) { return f.phi.value(x[static_cast<std::size_t>(f.axis)]); },
            [&](const family::OneVarConcave& f) { return f.phi.value(x[static_cast<std::size_t>(f.axis)]); },
            [&](const family::TravellingWave& f) {
                const double z = x[static_cast<std::size_t>(f.axis)] - f.c * t;
                const double wave = f.beta * std::exp(-f.c * z);
                return spec_.sign == Sign::minus ? f.alpha - wave : f.alpha + wave;
            },
            [&](const family::Polynomial& f) {
                const int n = spec_.N;
                double quad = 0.0;
                double lin = 0.0;
                for (int i = 0; i < n; ++i) {
                    const double di = x[static_cast<std::size_t>(i)] - f.x0[static_cast<std::size_t>(i)];
                    lin += di * f.y[static_cast<std::size_t>(i)];
                    for (int j = 0; j < n; ++j) {
                        quad += f.A(i, j) * di * (x[static_cast<std::size_t>(j)] - f.x0[static_cast<std::size_t>(j)]);
                    }
                }
                return f.rate * t + 0.5 * quad + lin + f.C;
            },
            [&](const family::SelfSimilarMinus& f) {
                return f.mu * std::pow(norm_sq(x) + 2.0 * k * t + f.eps, -f.beta);
            },
            [&](const family::GaussianPlus& f) {
                return f.mu * std::pow(t, -0.5 * k) * std::exp(-norm_sq(x) / (4.0 * t));
            },
            [&](const family::ShiftedGaussianPlus& f) {
                const double s = f.a + t;
                return std::pow(4.0 * std::numbers::pi * s, -0.5 * k) * std::exp(-norm_sq(x) / (4.0 * s));
            },
            [&](const family::RadialTransportMinus& f) { return f.g.value(std::sqrt(2.0 * k * t + norm_sq(x))); },
            [&](const family::SeparatedExponentialMinus& f) {
                return f.mu * std::exp(-t) * std::exp(-norm_sq(x) / (2.0 * k));
            },
            [&](const family::QuenchingProfileMinus&) { return quenching_value(std::sqrt(2.0 * k * t + norm_sq(x))); },
            [&](const family::StationaryMinus& f) {
                return std::pow(2.0 * k / (f.p * (f.mu + norm_sq(x))), 1.0 / f.p);
            },
        },
        family_);
}

std::optional<double> ClosedFormSolution::distance_to_nonsmooth(double t, std::span<const double> x) const {
    const double s = std::sqrt(2.0 * spec_.k * std::max(t, 0.0) + norm_sq(x));
    if (std::holds_alternative<family::QuenchingProfileMinus>(family_)) return std::abs(s - 1.0);
    if (const auto* f = std::get_if<family::RadialTransportMinus>(&family_)) {
        if (f->g.breakpoints().empty()) return std::nullopt;
        double d = std::numeric_limits<double>::infinity();
        for (double b : f->g.breakpoints()) d = std::min(d, std::abs(s - b));
        return d;
    }
    return std::nullopt;
}

double eval(const ClosedFormSolution& sol, double t, std::span<const double> x) { return sol(t, x); }

double pde_residual(const ClosedFormSolution& sol, double t, std::span<const double> x, double h) {
    const ProblemSpec& spec = sol.spec();
    const int n = spec.N;
    if (!(h > 0.0)) throw ParamError("pde_residual: step must be positive");
    if (!(t > h)) throw DomainError("pde_residual: requires t > h");
    if (x.size() != static_cast<std::size_t>(n)) throw ParamError("pde_residual: point has wrong dimension");
    if (const auto d = sol.distance_to_nonsmooth(t, x); d && *d < 10.0 * h) {
        throw DomainError(sol.name() + ": point lies within 10h of a non-smooth set");
    }

    std::array<double, kMaxMatrixDim> xs{};
    std::copy(x.begin(), x.end(), xs.begin());
    const std::span<const double> pt(xs.data(), static_cast<std::size_t>(n));
    auto at = [&](int i, double di, int j, double dj) {
        std::array<double, kMaxMatrixDim> y = xs;
        if (i >= 0) y[static_cast<std::size_t>(i)] += di;
        if (j >= 0) y[static_cast<std::size_t>(j)] += dj;
        return sol(t, std::span<const double>(y.data(), static_cast<std::size_t>(n)));
    };

    const double u = sol(t, pt);
    const double dudt = (sol(t + h, pt) - sol(t - h, pt)) / (2.0 * h);

    SymMatrix H(n);
    const double h2 = h * h;
    for (int i = 0; i < n; ++i) {
        H.set(i, i, (at(i, h, -1, 0.0) - 2.0 * u + at(i, -h, -1, 0.0)) / h2);
        for (int j = i + 1; j < n; ++j) {
            const double v = (at(i, h, j, h) + at(i, -h, j, -h) - at(i, h, j, -h) - at(i, -h, j, h)) / (4.0 * h2);
            H.set(i, j, v);
        }
    }
    double source = 0.0;
    if (spec.reaction_p) source = std::pow(std::max(u, 0.0), 1.0 + *spec.reaction_p);
    return dudt - truncated_laplacian(H, spec) - source;
}

std::vector<ProfileViolation> check_profile_condition(const RadialProfile& g, std::span<const double> r_grid,
                                                      ProfileCondition which) {
    std::vector<ProfileViolation> out;
    for (double r : r_grid) {
        if (!(r > 0.0)) continue;
        const double g2 = g.d2(r);
        const double m = g2 - g.d1(r) / r;
        const double tol = 1e-9 * (1.0 + std::abs(g2));
        if (!std::isfinite(m)) {
            out.push_back({r, m});
            continue;
        }
        if (which == ProfileCondition::reverse) {
            if (m > tol) out.push_back({r, -m});
        } else if (m < -tol) {
            out.push_back({r, m});
        }
    }
    return out;
}

}  // namespace heatlab
