#include "heatlab/quadrature.hpp"

#include "heatlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

namespace heatlab::quad {

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
    double p0 = 1.0;
    double p1 = x;
    for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
    }
    if (n == 0) return {1.0, 0.0};
    return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

Rule gauss_legendre(int n) {
    if (n < 1) throw ParamError("gauss_legendre: n must be positive");
    Rule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            const auto [p, dp] = legendre(n, x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double dp = legendre(n, x).second;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[static_cast<std::size_t>(i)] = -x;
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = w;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
    return rule;
}

namespace {

const Rule& panel_rule() {
    static const Rule rule = gauss_legendre(kPanelOrder);
    return rule;
}

double integrate_panels(const std::function<double(double)>& f, double a, double b, int panels) {
    const Rule& rule = panel_rule();
    const double width = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * width;
        const double mid = lo + 0.5 * width;
        double s = 0.0;
        for (int i = 0; i < kPanelOrder; ++i) {
            s += rule.weights[static_cast<std::size_t>(i)] * f(mid + 0.5 * width * rule.nodes[static_cast<std::size_t>(i)]);
        }
        total += 0.5 * width * s;
    }
    return total;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, int nodes) {
    if (!(b > a)) return 0.0;
    const int panels = std::max(1, nodes / kPanelOrder);
    return integrate_panels(f, a, b, panels);
}

double integrate_pieces(const std::function<double(double)>& f, double a, double b,
                        std::span<const double> breakpoints, int nodes) {
    if (!(b > a)) return 0.0;
    std::vector<double> cuts{a};
    for (double c : breakpoints) {
        if (c > a && c < b) cuts.push_back(c);
    }
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    const int total_panels = std::max(1, nodes / kPanelOrder);
    const double length = b - a;
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i];
        const double hi = cuts[i + 1];
        const int panels = std::max(1, static_cast<int>(std::lround(total_panels * (hi - lo) / length)));
        sum += integrate_panels(f, lo, hi, panels);
    }
    return sum;
}

double sphere_area(int d) {
    if (d < 1) throw ParamError("sphere_area: dimension must be >= 1");
    return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

double bessel_i0_scaled(double x) {
    if (x < 0.0) x = -x;
    if (x < 30.0) {
        return std::cyl_bessel_i(0.0, x) * std::exp(-x);
    }
    // Asymptotic expansion e^{-x} I_0(x) ~ (2 pi x)^{-1/2} sum_j ((2j-1)!!)^2 / (j! (8x)^j);
    // at x >= 30 the terms shrink below 1e-17 long before the series diverges.
    double term = 1.0;
    double sum = 1.0;
    for (int j = 1; j < 40; ++j) {
        const double odd = 2.0 * j - 1.0;
        term *= odd * odd / (j * 8.0 * x);
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

}  // namespace heatlab::quad
