#include "heatlab/grid_solver.hpp"

#include "heatlab/errors.hpp"
#include "heatlab/format.hpp"
#include "heatlab/parallel.hpp"
#include "heatlab/random.hpp"

#include <algorithm>
#include <cmath>

namespace heatlab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

struct Strides {
    int n;
    std::array<std::ptrdiff_t, 3> s;
};

Strides strides_of(const GridField& f) {
    Strides st{f.N, {0, 0, 0}};
    for (int a = 0; a < f.N; ++a) st.s[static_cast<std::size_t>(a)] = static_cast<std::ptrdiff_t>(f.stride(a));
    return st;
}

SymMatrix hessian_at(const double* v, std::ptrdiff_t c, const Strides& st, double h) {
    SymMatrix H(st.n);
    const double inv_h2 = 1.0 / (h * h);
    const double u = v[c];
    for (int a = 0; a < st.n; ++a) {
        const std::ptrdiff_t sa = st.s[static_cast<std::size_t>(a)];
        H.set(a, a, (v[c + sa] - 2.0 * u + v[c - sa]) * inv_h2);
        for (int b = a + 1; b < st.n; ++b) {
            const std::ptrdiff_t sb = st.s[static_cast<std::size_t>(b)];
            const double mixed = v[c + sa + sb] + v[c - sa - sb] - v[c + sa - sb] - v[c - sa + sb];
            H.set(a, b, 0.25 * mixed * inv_h2);
        }
    }
    return H;
}

bool on_boundary(const std::array<int, 3>& idx, int N, int m) {
    for (int a = 0; a < N; ++a) {
        const int i = idx[static_cast<std::size_t>(a)];
        if (i == 0 || i == m - 1) return true;
    }
    return false;
}

std::size_t ipow(int m, int N) {
    std::size_t s = 1;
    for (int a = 0; a < N; ++a) s *= static_cast<std::size_t>(m);
    return s;
}

}  // namespace

GridField GridField::zeros(int N, double L, int m, double t) {
    GridField f;
    f.N = N;
    f.L = L;
    f.m = m;
    f.t = t;
    if (N < 2 || N > 3) throw ParamError("GridField: N must be 2 or 3");
    if (m < 9) throw ParamError("GridField: need m >= 9 points per axis");
    if (!(L > 0.0)) throw ParamError("GridField: half-width L must be positive");
    f.values.assign(ipow(m, N), 0.0);
    return f;
}

GridField GridField::sample(int N, double L, int m, double t, const std::function<double(std::span<const double>)>& fn) {
    GridField f = zeros(N, L, m, t);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        const Point x = f.point(i);
        f.values[i] = fn(std::span<const double>(x.data(), static_cast<std::size_t>(N)));
    }
    return f;
}

GridField GridField::from_solution(const ClosedFormSolution& sol, double L, int m, double t) {
    return sample(sol.spec().N, L, m, t, [&](std::span<const double> x) { return sol(t, x); });
}

std::size_t GridField::stride(int axis) const noexcept { return ipow(m, N - 1 - axis); }

std::size_t GridField::flat(std::span<const int> idx) const {
    if (idx.size() != static_cast<std::size_t>(N)) throw ParamError("GridField: index has wrong dimension");
    std::size_t c = 0;
    for (int a = 0; a < N; ++a) {
        const int i = idx[static_cast<std::size_t>(a)];
        if (i < 0 || i >= m) throw BoundaryIndex("GridField: index outside the grid");
        c = c * static_cast<std::size_t>(m) + static_cast<std::size_t>(i);
    }
    return c;
}

std::array<int, 3> GridField::multi(std::size_t c) const noexcept {
    std::array<int, 3> idx{0, 0, 0};
    for (int a = N - 1; a >= 0; --a) {
        idx[static_cast<std::size_t>(a)] = static_cast<int>(c % static_cast<std::size_t>(m));
        c /= static_cast<std::size_t>(m);
    }
    return idx;
}

GridField::Point GridField::point(std::size_t c) const noexcept {
    const auto idx = multi(c);
    Point x{0.0, 0.0, 0.0};
    for (int a = 0; a < N; ++a) x[static_cast<std::size_t>(a)] = coord(idx[static_cast<std::size_t>(a)]);
    return x;
}

double GridField::sup_norm() const {
    double s = 0.0;
    for (double v : values) s = std::max(s, std::abs(v));
    return s;
}

double GridField::max_value() const { return *std::max_element(values.begin(), values.end()); }
double GridField::min_value() const { return *std::min_element(values.begin(), values.end()); }

void GridField::validate() const {
    if (N < 2 || N > 3) throw ParamError("GridField: N must be 2 or 3");
    if (m < 9) throw ParamError("GridField: need m >= 9 points per axis");
    if (!(L > 0.0)) throw ParamError("GridField: half-width L must be positive");
    if (values.size() != ipow(m, N)) throw ParamError("GridField: value count must be m^N");
    if (blown_up) return;
    for (double v : values) {
        if (!std::isfinite(v)) throw NonFinite("GridField: non-finite value");
    }
}

double SchemeConfig::resolve_dt(const GridField& f, const ProblemSpec& spec) const {
    if (!(cfl > 0.0)) throw ConfigError("scheme: cfl must be positive");
    const double h = f.h();
    const double bound = cfl * h * h / (2.0 * spec.k);
    if (!dt) return bound;
    if (!(*dt > 0.0)) throw ConfigError("scheme: dt must be positive");
    if (*dt > bound * (1.0 + 1e-12)) {
        throw ConfigError("scheme: dt=" + format_double(*dt) + " violates the CFL bound cfl*h^2/(2k)=" +
                          format_double(bound));
    }
    return *dt;
}

SymMatrix discrete_hessian(const GridField& f, std::span<const int> idx) {
    if (idx.size() != static_cast<std::size_t>(f.N)) throw ParamError("discrete_hessian: index has wrong dimension");
    for (int i : idx) {
        if (i < 1 || i > f.m - 2) throw BoundaryIndex("discrete_hessian: index must be at least one cell from the boundary");
    }
    const auto c = static_cast<std::ptrdiff_t>(f.flat(idx));
    return hessian_at(f.values.data(), c, strides_of(f), f.h());
}

GridField step(const GridField& f, const ProblemSpec& spec, const SchemeConfig& cfg, double dt) {
    if (f.blown_up) throw ParamError("step: field has already blown up");
    if (spec.N != f.N) throw ParamError("step: spec dimension does not match the field");
    GridField out = f;
    out.t = f.t + dt;
    const int m = f.m;
    const int N = f.N;
    const double h = f.h();
    const Strides st = strides_of(f);
    const double* v = f.values.data();
    double* w = out.values.data();
    const std::optional<double> p = spec.reaction_p;

    auto update = [&](std::ptrdiff_t c) {
        const SymMatrix H = hessian_at(v, c, st, h);
        double rhs = truncated_laplacian(H, spec.k, spec.sign);
        if (p) rhs += std::pow(std::max(v[c], 0.0), 1.0 + *p);
        w[c] = v[c] + dt * rhs;
    };

    const std::size_t rows = static_cast<std::size_t>(m - 2);
    parallel_for(rows, resolve_threads(cfg.threads), [&](std::size_t r) {
        const std::ptrdiff_t i0 = static_cast<std::ptrdiff_t>(r) + 1;
        if (N == 2) {
            for (std::ptrdiff_t i1 = 1; i1 < m - 1; ++i1) update(i0 * st.s[0] + i1);
        } else {
            for (std::ptrdiff_t i1 = 1; i1 < m - 1; ++i1) {
                for (std::ptrdiff_t i2 = 1; i2 < m - 1; ++i2) update(i0 * st.s[0] + i1 * st.s[1] + i2);
            }
        }
    });

    // boundary nodes
    std::visit(overloaded{
                   [&](const DirichletOracle& d) {
                       for (std::size_t c = 0; c < out.values.size(); ++c) {
                           const auto idx = out.multi(c);
                           if (!on_boundary(idx, N, m)) continue;
                           const auto x = out.point(c);
                           w[c] = d.solution(out.t, std::span<const double>(x.data(), static_cast<std::size_t>(N)));
                       }
                   },
                   [&](const ExtrapolateConstant&) {
                       for (std::size_t c = 0; c < out.values.size(); ++c) {
                           auto idx = out.multi(c);
                           if (!on_boundary(idx, N, m)) continue;
                           for (int a = 0; a < N; ++a) {
                               int& i = idx[static_cast<std::size_t>(a)];
                               i = std::clamp(i, 1, m - 2);
                           }
                           w[c] = w[out.flat(std::span<const int>(idx.data(), static_cast<std::size_t>(N)))];
                       }
                   },
               },
               cfg.boundary);

    for (double x : out.values) {
        if (!std::isfinite(x) || std::abs(x) > cfg.blowup_threshold) {
            out.blown_up = true;
            out.blowup_time = f.t + 0.5 * dt;
            break;
        }
    }
    return out;
}

GridField solve_observed(GridField u0, const ProblemSpec& spec, const SchemeConfig& cfg, double T,
                         const std::function<void(const GridField&)>& observe) {
    spec.validate();
    u0.validate();
    if (!(T > u0.t)) throw ConfigError("solve: final time must exceed the initial time");
    if (!(cfg.blowup_threshold > u0.sup_norm())) {
        throw ConfigError("solve: blow-up threshold must exceed the initial sup-norm");
    }
    const double dt_max = cfg.resolve_dt(u0, spec);
    const double t0 = u0.t;
    const auto n = static_cast<std::size_t>(std::ceil((T - t0) / dt_max - 1e-9));
    const double dt = (T - t0) / static_cast<double>(n);

    if (observe) observe(u0);
    GridField u = std::move(u0);
    for (std::size_t i = 0; i < n; ++i) {
        GridField next = step(u, spec, cfg, dt);
        next.t = t0 + static_cast<double>(i + 1) * dt;
        u = std::move(next);
        if (observe) observe(u);
        if (u.blown_up) break;
    }
    return u;
}

Trajectory solve(GridField u0, const ProblemSpec& spec, const SchemeConfig& cfg, double T) {
    Trajectory tr;
    std::size_t count = 0;
    const double t0 = u0.t;
    tr.final_state = solve_observed(std::move(u0), spec, cfg, T, [&](const GridField& u) {
        tr.times.push_back(u.t);
        tr.sup.push_back(u.blown_up ? std::numeric_limits<double>::infinity() : u.sup_norm());
        if (count == 0 || (cfg.snapshot_stride > 0 && count % static_cast<std::size_t>(cfg.snapshot_stride) == 0)) {
            tr.snapshots.push_back(u);
        }
        ++count;
    });
    tr.steps = count - 1;
    tr.dt = tr.steps > 0 ? (tr.times[1] - t0) : 0.0;
    if (tr.snapshots.empty() || tr.snapshots.back().t != tr.final_state.t) tr.snapshots.push_back(tr.final_state);
    return tr;
}

double sup_error(const GridField& f, const std::function<double(std::span<const double>)>& ref, double window) {
    double e = 0.0;
    for (std::size_t c = 0; c < f.values.size(); ++c) {
        const auto x = f.point(c);
        bool inside = true;
        for (int a = 0; a < f.N; ++a) inside = inside && std::abs(x[static_cast<std::size_t>(a)]) <= window + 1e-12;
        if (!inside) continue;
        e = std::max(e, std::abs(f.values[c] - ref(std::span<const double>(x.data(), static_cast<std::size_t>(f.N)))));
    }
    return e;
}

double sup_error(const GridField& f, const ClosedFormSolution& sol, double window) {
    return sup_error(f, [&](std::span<const double> x) { return sol(f.t, x); }, window);
}

double scheme_tolerance(const GridField& u0, double T) {
    const double h = u0.h();
    const Strides st = strides_of(u0);
    const double* v = u0.values.data();
    double tau = 0.0;
    for (int a = 0; a < u0.N; ++a) {
        const std::ptrdiff_t s = st.s[static_cast<std::size_t>(a)];
        double d4 = 0.0;
        for (std::size_t c = 0; c < u0.values.size(); ++c) {
            const int i = u0.multi(c)[static_cast<std::size_t>(a)];
            if (i < 2 || i > u0.m - 3) continue;
            const auto cc = static_cast<std::ptrdiff_t>(c);
            const double q = v[cc + 2 * s] - 4.0 * v[cc + s] + 6.0 * v[cc] - 4.0 * v[cc - s] + v[cc - 2 * s];
            d4 = std::max(d4, std::abs(q));
        }
        tau += d4 / (12.0 * h * h);  // (h^2/12) * |q| / h^4
    }
    return (T - u0.t) * tau + 1e-12 * (1.0 + u0.sup_norm());
}

PairGenerator random_bump_pairs(int N, double L, int m) {
    return [=](std::uint64_t trial_seed) {
        std::mt19937_64 rng(trial_seed);
        struct Bump {
            double amp;
            std::array<double, 3> c;
            double w;
        };
        auto draw = [&](double amp_lo, double amp_hi) {
            Bump b{uniform_in(rng, amp_lo, amp_hi), {0.0, 0.0, 0.0}, uniform_in(rng, 0.5, 1.5)};
            for (int a = 0; a < N; ++a) b.c[static_cast<std::size_t>(a)] = uniform_in(rng, -0.5 * L, 0.5 * L);
            return b;
        };
        std::vector<Bump> base;
        for (int j = 0; j < 3; ++j) base.push_back(draw(-1.0, 1.0));
        std::vector<Bump> extra;
        for (int j = 0; j < 2; ++j) extra.push_back(draw(0.0, 0.5));
        const double lift = uniform_in(rng, 0.0, 0.1);

        auto eval = [N](const std::vector<Bump>& bumps, std::span<const double> x) {
            double s = 0.0;
            for (const Bump& b : bumps) {
                double d2 = 0.0;
                for (int a = 0; a < N; ++a) {
                    const double d = x[static_cast<std::size_t>(a)] - b.c[static_cast<std::size_t>(a)];
                    d2 += d * d;
                }
                s += b.amp * std::exp(-d2 / (2.0 * b.w * b.w));
            }
            return s;
        };
        GridField u = GridField::sample(N, L, m, 0.0, [&](std::span<const double> x) { return eval(base, x); });
        GridField v = GridField::sample(N, L, m, 0.0,
                                        [&](std::span<const double> x) { return eval(base, x) + eval(extra, x) + lift; });
        return std::make_pair(std::move(u), std::move(v));
    };
}

ComparisonReport comparison_fuzz(const PairGenerator& gen, const ProblemSpec& spec, const SchemeConfig& cfg, double T,
                                 int trials, std::uint64_t seed) {
    ComparisonReport rep;
    rep.trials.resize(static_cast<std::size_t>(std::max(trials, 0)));
    SchemeConfig inner = cfg;
    inner.threads = 1;

    parallel_for(rep.trials.size(), resolve_threads(cfg.threads), [&](std::size_t i) {
        ComparisonTrial& trial = rep.trials[i];
        trial.seed = seed + i;
        auto [u, v] = gen(trial.seed);
        trial.tolerance = 10.0 * std::max(scheme_tolerance(u, T), scheme_tolerance(v, T));
        const double window = u.L - std::sqrt(2.0 * spec.k * (T - u.t));

        auto margin_of = [&](const GridField& a, const GridField& b) {
            double mn = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < a.values.size(); ++c) {
                const auto x = a.point(c);
                bool inside = true;
                for (int ax = 0; ax < a.N; ++ax) inside = inside && std::abs(x[static_cast<std::size_t>(ax)]) <= window;
                if (inside) mn = std::min(mn, b.values[c] - a.values[c]);
            }
            return mn;
        };

        const double dt_max = inner.resolve_dt(u, spec);
        const auto n = static_cast<std::size_t>(std::ceil((T - u.t) / dt_max - 1e-9));
        const double dt = (T - u.t) / static_cast<double>(n);
        double margin = margin_of(u, v);
        for (std::size_t s = 0; s < n && !u.blown_up && !v.blown_up; ++s) {
            u = step(u, spec, inner, dt);
            v = step(v, spec, inner, dt);
            margin = std::min(margin, margin_of(u, v));
        }
        trial.margin = margin;
        trial.violated = margin < -trial.tolerance;
    });

    rep.worst_margin = std::numeric_limits<double>::infinity();
    for (const auto& t : rep.trials) {
        rep.worst_margin = std::min(rep.worst_margin, t.margin);
        if (t.violated) ++rep.violations;
    }
    if (rep.trials.empty()) rep.worst_margin = 0.0;
    return rep;
}

}  // namespace heatlab
