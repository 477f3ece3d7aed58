#include "heatlab/fujita_lab.hpp"

#include "heatlab/errors.hpp"
#include "heatlab/format.hpp"
#include "heatlab/parallel.hpp"
#include "heatlab/radial_engine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>

namespace heatlab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kFourPi = 4.0 * std::numbers::pi;

// p C^p eps^{1 - p beta} / (2k (p beta - 1)); <= 1 is the heavy-tail hypothesis.
double heavy_ratio(const envelope::HeavyTailMinus& e, int k) {
    return e.p * std::pow(e.C, e.p) * std::pow(e.eps, 1.0 - e.p * e.beta) / (2.0 * k * (e.p * e.beta - 1.0));
}

// p C^p / ((4 pi)^{pk/2} (pk/2 - 1)) without the a-dependence.
double gaussian_coefficient(double C, double p, int k) {
    const double q = 0.5 * p * k;
    return p * std::pow(C, p) / (std::pow(kFourPi, q) * (q - 1.0));
}

}  // namespace

double gaussian_smallness(double C, double a, double p, int k) {
    const double q = 0.5 * p * k;
    if (!(q > 1.0)) throw ParamError("gaussian envelope requires p k > 2");
    return 1.0 - gaussian_coefficient(C, p, k) / std::pow(a, q - 1.0);
}

double gaussian_smallness_limit(double a, double p, int k) {
    const double q = 0.5 * p * k;
    if (!(q > 1.0)) throw ParamError("gaussian envelope requires p k > 2");
    if (!(a > 0.0)) throw ParamError("gaussian envelope requires a > 0");
    // solve p C^p = (4 pi)^q (q - 1) a^{q-1}
    return std::pow(std::pow(kFourPi, q) * (q - 1.0) * std::pow(a, q - 1.0) / p, 1.0 / p);
}

void validate_envelope(const Envelope& e, int k) {
    if (k < 1) throw ParamError("envelope: k must be >= 1");
    std::visit(overloaded{
                   [&](const envelope::LightTailMinus& l) {
                       if (!(l.C > 0.0 && l.C <= 1.0)) throw ParamError("LightTailMinus: requires 0 < C <= 1");
                       if (!(l.p > 0.0)) throw ParamError("LightTailMinus: requires p > 0");
                   },
                   [&](const envelope::HeavyTailMinus& h) {
                       if (!(h.C > 0.0 && h.eps > 0.0 && h.beta > 0.0 && h.p > 0.0)) {
                           throw ParamError("HeavyTailMinus: C, eps, beta, p must be positive");
                       }
                       if (!(h.p * h.beta > 1.0)) throw ParamError("HeavyTailMinus: requires p beta > 1");
                       if (heavy_ratio(h, k) > 1.0 + 1e-12) {
                           throw ParamError("HeavyTailMinus: requires C^p / eps^{p beta - 1} <= 2k (p beta - 1) / p");
                       }
                   },
                   [&](const envelope::GaussianPlus& g) {
                       if (!(g.C > 0.0 && g.a > 0.0 && g.p > 0.0)) {
                           throw ParamError("GaussianPlus envelope: C, a, p must be positive");
                       }
                       if (!(gaussian_smallness(g.C, g.a, g.p, k) > 0.0)) {
                           throw ParamError("GaussianPlus envelope: C is above the smallness limit " +
                                            format_double(gaussian_smallness_limit(g.a, g.p, k)));
                       }
                   },
               },
               e);
}

double supersolution_factor(const Envelope& e, int k, double t) {
    validate_envelope(e, k);
    return std::visit(
        overloaded{
            [&](const envelope::LightTailMinus& l) {
                return std::pow(1.0 + std::pow(l.C, l.p) * std::expm1(-l.p * t), -1.0 / l.p);
            },
            [&](const envelope::HeavyTailMinus& h) {
                const double s = 1.0 - h.p * h.beta;
                const double integral = std::pow(h.C, h.p) * (std::pow(h.eps, s) - std::pow(2.0 * k * t + h.eps, s)) /
                                        (2.0 * k * (h.p * h.beta - 1.0));
                return std::pow(1.0 - h.p * integral, -1.0 / h.p);
            },
            [&](const envelope::GaussianPlus& g) {
                const double q = 0.5 * g.p * k;
                const double bracket = std::pow(g.a + t, 1.0 - q) - std::pow(g.a, 1.0 - q);
                return std::pow(1.0 + gaussian_coefficient(g.C, g.p, k) * bracket, -1.0 / g.p);
            },
        },
        e);
}

double envelope_bound(const Envelope& e, int k, double t) {
    validate_envelope(e, k);
    return std::visit(overloaded{
                          [&](const envelope::LightTailMinus& l) {
                              if (l.C == 1.0) return l.C;
                              return l.C * std::pow(1.0 - std::pow(l.C, l.p), -1.0 / l.p) * std::exp(-t);
                          },
                          [&](const envelope::HeavyTailMinus& h) {
                              const double q = heavy_ratio(h, k);
                              const double s = 2.0 * k * t + h.eps;
                              if (q < 1.0 - 1e-12) return h.C * std::pow(1.0 - q, -1.0 / h.p) * std::pow(s, -h.beta);
                              return h.C * std::pow(h.eps, h.beta - 1.0 / h.p) * std::pow(s, -1.0 / h.p);
                          },
                          [&](const envelope::GaussianPlus& g) {
                              const double f_max = std::pow(gaussian_smallness(g.C, g.a, g.p, k), -1.0 / g.p);
                              return f_max * g.C * std::pow(kFourPi * (g.a + t), -0.5 * k);
                          },
                      },
                      e);
}

GridField envelope_data(const Envelope& e, int N, int k, double L, int m) {
    validate_envelope(e, k);
    auto r2 = [](std::span<const double> x) {
        double s = 0.0;
        for (double v : x) s += v * v;
        return s;
    };
    return std::visit(overloaded{
                          [&](const envelope::LightTailMinus& l) {
                              return GridField::sample(N, L, m, 0.0, [&](std::span<const double> x) {
                                  return l.C * std::exp(-r2(x) / (2.0 * k));
                              });
                          },
                          [&](const envelope::HeavyTailMinus& h) {
                              return GridField::sample(N, L, m, 0.0, [&](std::span<const double> x) {
                                  return h.C * std::pow(r2(x) + h.eps, -h.beta);
                              });
                          },
                          [&](const envelope::GaussianPlus& g) {
                              const double amp = g.C * std::pow(kFourPi * g.a, -0.5 * k);
                              return GridField::sample(N, L, m, 0.0, [&](std::span<const double> x) {
                                  return amp * std::exp(-r2(x) / (4.0 * g.a));
                              });
                          },
                      },
                      e);
}

ProblemSpec envelope_problem(const Envelope& e, int N, int k) {
    return std::visit(overloaded{
                          [&](const envelope::LightTailMinus& l) { return ProblemSpec{N, k, Sign::minus, l.p}; },
                          [&](const envelope::HeavyTailMinus& h) { return ProblemSpec{N, k, Sign::minus, h.p}; },
                          [&](const envelope::GaussianPlus& g) { return ProblemSpec{N, k, Sign::plus, g.p}; },
                      },
                      e);
}

EnvelopeReport verify_envelope(const Envelope& e, int N, int k, double L, int m, const SchemeConfig& cfg, double T) {
    const ProblemSpec spec = envelope_problem(e, N, k);
    spec.validate();
    GridField u0 = envelope_data(e, N, k, L, m);
    EnvelopeReport rep;
    rep.tolerance = scheme_tolerance(u0, T) / u0.sup_norm();
    const Trajectory tr = solve(std::move(u0), spec, cfg, T);
    rep.blown_up = tr.blown_up();
    rep.times = tr.times;
    rep.sup = tr.sup;
    rep.bound.reserve(tr.times.size());
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        const double b = envelope_bound(e, k, tr.times[i]);
        rep.bound.push_back(b);
        rep.worst_ratio = std::max(rep.worst_ratio, tr.sup[i] / b);
        if (!(tr.sup[i] <= b * (1.0 + rep.tolerance))) ++rep.violations;
    }
    return rep;
}

double jensen_blowup_time(double g0, double C, double p) {
    if (!(g0 > 0.0) || !(C > 0.0) || !(p > 0.0)) throw ParamError("jensen_blowup_time: arguments must be positive");
    return 1.0 / (p * C * std::pow(g0, p));
}

double jensen_constant(const RadialProfile& g, int k, double p) {
    if (!(p > 0.0)) throw ParamError("jensen_constant: p must be positive");
    return std::pow(radial_mass(g, k), p);
}

std::string to_string(BlowupVerdict::Kind k) {
    switch (k) {
        case BlowupVerdict::Kind::blow_up: return "BlowUp";
        case BlowupVerdict::Kind::global_decay: return "GlobalDecay";
        case BlowupVerdict::Kind::undecided: return "Undecided";
    }
    return "Undecided";
}

double last_decade_slope(std::span<const double> times, std::span<const double> sup, double shift) {
    if (times.size() != sup.size() || times.empty()) return std::numeric_limits<double>::quiet_NaN();
    const double s_end = times.back() + shift;
    double n = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double s = times[i] + shift;
        if (s < 0.1 * s_end || !(s > 0.0) || !(sup[i] > 0.0)) continue;
        const double x = std::log(s);
        const double y = std::log(sup[i]);
        n += 1.0;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double den = n * sxx - sx * sx;
    if (n < 2.0 || !(den > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return (n * sxy - sx * sy) / den;
}

BlowupVerdict classify(const Trajectory& tr, double shift, double decay_slope) {
    BlowupVerdict v;
    v.times = tr.times;
    v.sup = tr.sup;
    if (tr.blown_up()) {
        v.kind = BlowupVerdict::Kind::blow_up;
        v.t_star = tr.t_star();
        return v;
    }
    const double slope = last_decade_slope(tr.times, tr.sup, shift);
    if (std::isfinite(slope) && slope <= decay_slope) {
        v.kind = BlowupVerdict::Kind::global_decay;
        v.rate = slope;
    } else {
        v.kind = BlowupVerdict::Kind::undecided;
        v.rate = slope;
    }
    return v;
}

VerdictTable exponent_sweep(const SweepConfig& cfg) {
    struct Job {
        double p;
        double scale;
        std::string data;
        double shift;
    };
    const double critical = 2.0 / cfg.k;
    std::vector<Job> jobs;
    VerdictTable table;
    table.sign = cfg.sign;
    table.k = cfg.k;
    table.N = cfg.N;
    ProblemSpec{cfg.N, cfg.k, cfg.sign, std::nullopt}.validate();

    for (double p : cfg.p_list) {
        if (!(p > 0.0)) throw ParamError("exponent_sweep: exponents must be positive");
        if (cfg.sign == Sign::plus && std::abs(p - critical) <= 1e-12 * critical) {
            jobs.push_back({p, 0.0, "none", 0.0});
            continue;
        }
        SweepData kind = cfg.data;
        if (kind == SweepData::automatic) {
            if (cfg.sign == Sign::minus) kind = SweepData::light_gaussian;
            else kind = p < critical ? SweepData::cap : SweepData::small_gaussian;
        }
        switch (kind) {
            case SweepData::cap:
                for (double A : cfg.cap_amplitudes) jobs.push_back({p, A, "cap", 0.0});
                break;
            case SweepData::small_gaussian: {
                const double limit = gaussian_smallness_limit(cfg.gaussian_a, p, cfg.k);
                for (double f : cfg.fractions) jobs.push_back({p, f * limit, "small_gaussian", cfg.gaussian_a});
                break;
            }
            case SweepData::light_gaussian:
                for (double f : cfg.fractions) jobs.push_back({p, f, "light_gaussian", 0.0});
                break;
            case SweepData::automatic:
                break;
        }
    }
    std::sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) {
        return a.p < b.p || (a.p == b.p && a.scale < b.scale);
    });

    table.entries.resize(jobs.size());
    SchemeConfig scheme = cfg.scheme;
    scheme.threads = 1;
    parallel_for(jobs.size(), resolve_threads(cfg.threads), [&](std::size_t i) {
        const Job& job = jobs[i];
        SweepEntry& entry = table.entries[i];
        entry.p = job.p;
        entry.scale = job.scale;
        entry.data = job.data;
        if (job.data == "none") return;  // critical exponent: undecided by design

        const ProblemSpec spec{cfg.N, cfg.k, cfg.sign, job.p};
        const double k = cfg.k;
        std::function<double(std::span<const double>)> u0;
        if (job.data == "cap") {
            const double eps2 = cfg.cap_eps * cfg.cap_eps;
            u0 = [=](std::span<const double> x) {
                double r2 = 0.0;
                for (double v : x) r2 += v * v;
                return job.scale * std::max(eps2 - r2, 0.0);
            };
        } else if (job.data == "small_gaussian") {
            const double a = cfg.gaussian_a;
            const double amp = job.scale * std::pow(kFourPi * a, -0.5 * k);
            u0 = [=](std::span<const double> x) {
                double r2 = 0.0;
                for (double v : x) r2 += v * v;
                return amp * std::exp(-r2 / (4.0 * a));
            };
        } else {
            u0 = [=](std::span<const double> x) {
                double r2 = 0.0;
                for (double v : x) r2 += v * v;
                return job.scale * std::exp(-r2 / (2.0 * k));
            };
        }
        const Trajectory tr = solve(GridField::sample(cfg.N, cfg.L, cfg.m, 0.0, u0), spec, scheme, cfg.T_max);
        entry.verdict = classify(tr, job.shift);
    });

    // bracket
    std::vector<double> ps;
    for (const auto& e : table.entries) {
        if (e.data != "none") ps.push_back(e.p);
    }
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    for (double p : ps) {
        for (const auto& e : table.entries) {
            if (e.p == p && e.verdict.kind == BlowupVerdict::Kind::global_decay) {
                if (!table.p_hi || p < *table.p_hi) table.p_hi = p;
            }
        }
    }
    for (double p : ps) {
        if (table.p_hi && p >= *table.p_hi) break;
        bool all = true;
        for (const auto& e : table.entries) {
            if (e.p == p && e.data != "none") all = all && e.verdict.kind == BlowupVerdict::Kind::blow_up;
        }
        if (all) table.p_lo = p;
    }
    return table;
}

void write_verdict_csv(std::ostream& out, const VerdictTable& table) {
    out << "sign,k,N,p,scale,verdict,t_star_or_rate\n";
    for (const auto& e : table.entries) {
        out << to_string(table.sign) << ',' << table.k << ',' << table.N << ',' << format_double(e.p) << ','
            << format_double(e.scale) << ',' << to_string(e.verdict.kind) << ',';
        if (e.verdict.kind == BlowupVerdict::Kind::blow_up) out << format_double(e.verdict.t_star);
        else if (e.verdict.kind == BlowupVerdict::Kind::global_decay) out << format_double(e.verdict.rate);
        out << '\n';
    }
}

double lower_dimensional_gap(const RadialProfile& phi, int N, int k, double h, std::span<const double> radii) {
    if (k < 1 || k > N) throw ParamError("lower_dimensional_gap: requires 1 <= k <= N");
    if (!(h > 0.0)) throw ParamError("lower_dimensional_gap: h must be positive");
    const double theta = 0.3;
    double worst = std::numeric_limits<double>::infinity();
    for (double r : radii) {
        if (!(r > 2.0 * h)) continue;
        std::array<double, kMaxMatrixDim> x{};
        x[0] = r * std::cos(theta);
        x[1] = r * std::sin(theta);
        auto u = [&](int a, double da, int b, double db) {
            std::array<double, kMaxMatrixDim> y = x;
            if (a >= 0) y[static_cast<std::size_t>(a)] += da;
            if (b >= 0) y[static_cast<std::size_t>(b)] += db;
            double s = 0.0;
            for (int i = 0; i < N; ++i) s += y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
            return phi.value(std::sqrt(s));
        };
        const double u0 = u(-1, 0.0, -1, 0.0);
        SymMatrix H(N);
        for (int a = 0; a < N; ++a) {
            H.set(a, a, (u(a, h, -1, 0.0) - 2.0 * u0 + u(a, -h, -1, 0.0)) / (h * h));
            for (int b = a + 1; b < N; ++b) {
                H.set(a, b, (u(a, h, b, h) + u(a, -h, b, -h) - u(a, h, b, -h) - u(a, -h, b, h)) / (4.0 * h * h));
            }
        }
        const double lap_k = phi.d2(r) + (k - 1) / r * phi.d1(r);
        worst = std::min(worst, truncated_laplacian(H, k, Sign::plus) - lap_k);
    }
    return worst;
}

}  // namespace heatlab
