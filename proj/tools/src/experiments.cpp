#include "experiments.hpp"

#include "heatlab/analytic_catalog.hpp"
#include "heatlab/errors.hpp"
#include "heatlab/format.hpp"
#include "heatlab/fujita_lab.hpp"
#include "heatlab/grid_solver.hpp"
#include "heatlab/parallel.hpp"
#include "heatlab/quadrature.hpp"
#include "heatlab/radial_engine.hpp"
#include "heatlab/random.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

namespace heatlab::cli {

namespace {

using Runner = std::function<void(RunReport&)>;

struct Context {
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out_dir;
};

void write_artifact(const Context& ctx, RunReport& rep, const std::string& name, const std::string& content) {
    write_file_atomic((std::filesystem::path(ctx.out_dir) / name).string(), content);
    rep.artifacts.push_back(name);
}

std::string fmt(double v) { return format_double(v); }

ProblemSpec read_problem(const Config& cfg, bool with_sign, bool with_p) {
    ProblemSpec spec;
    spec.N = cfg.integer("problem", "N", 2);
    spec.k = cfg.integer("problem", "k", 1);
    if (with_sign) spec.sign = parse_sign(cfg.text("problem", "sign", "minus"));
    if (with_p && cfg.has("problem", "p")) spec.reaction_p = cfg.number("problem", "p");
    spec.validate();
    return spec;
}

SchemeConfig read_scheme(const Config& cfg, int threads) {
    SchemeConfig s;
    s.cfl = cfg.number("scheme", "cfl", 0.2);
    if (cfg.has("scheme", "dt")) s.dt = cfg.number("scheme", "dt");
    s.blowup_threshold = cfg.number("scheme", "blowup_threshold", 1e6);
    s.snapshot_stride = cfg.integer("scheme", "snapshot_stride", 0);
    s.threads = threads;
    if (!(s.cfl > 0.0)) throw ConfigError("[scheme] cfl must be positive");
    return s;
}

KernelConfig read_kernel(const Config& cfg, int threads) {
    KernelConfig k;
    k.nodes = cfg.integer("kernel", "nodes", 2048);
    k.angular_nodes = cfg.integer("kernel", "angular_nodes", 256);
    if (cfg.has("kernel", "r_quad")) k.r_quad = cfg.number("kernel", "r_quad");
    k.threads = threads;
    k.validate();
    return k;
}

std::vector<std::string> split_ids(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ';')) {
        const auto a = item.find_first_not_of(" \t");
        if (a == std::string::npos) continue;
        out.push_back(item.substr(a, item.find_last_not_of(" \t") - a + 1));
    }
    return out;
}

double r_of(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

std::string grid_csv(std::span<const GridField> fields) {
    std::ostringstream out;
    write_grid_csv(out, fields);
    return out.str();
}

std::string grid_binary(const GridField& f) {
    std::ostringstream out(std::ios::binary);
    write_grid_binary(out, f);
    return out.str();
}

std::string radial_csv(std::span<const RadialField> series) {
    std::ostringstream out;
    write_radial_csv(out, series);
    return out.str();
}

std::string label(const std::string& base, const std::string& key, double v) {
    return base + "[" + key + "=" + fmt(v) + "]";
}

// ---------------------------------------------------------------- verify_catalog

Runner prepare_verify_catalog(const Config& cfg, const Context& ctx) {
    const auto Ns = cfg.numbers("problem", "N", {2});
    const auto ks = cfg.numbers("problem", "k", {1});
    const std::string ids_text = cfg.text("data", "ids", "all");
    const int points = cfg.integer("check", "points", 100);
    const double h = cfg.number("check", "h", 0.01);
    const double min_slope = cfg.number("check", "min_slope", 1.8);
    const double t_min = cfg.number("check", "t_min", 0.1);
    const double t_max = cfg.number("check", "t_max", 0.4);
    const double box = cfg.number("check", "box", 1.5);
    const double collar = cfg.number("check", "singular_margin", 0.2);
    if (points < 2 || !(h > 0.0) || !(t_min > 2.0 * h) || !(t_max > t_min) || !(box > 0.0)) {
        throw ConfigError("[check] needs points >= 2, h > 0, 2h < t_min < t_max, box > 0");
    }
    const std::vector<std::string> ids = ids_text == "all" ? default_catalog_ids() : split_ids(ids_text);

    struct Case {
        int N, k;
        std::string id;
    };
    std::vector<Case> cases;
    for (double Nd : Ns) {
        for (double kd : ks) {
            const int N = static_cast<int>(Nd);
            const int k = static_cast<int>(kd);
            if (k >= N) continue;
            ProblemSpec{N, k, Sign::minus, std::nullopt}.validate();
            for (const auto& id : ids) {
                (void)parse_catalog_id(id, N, k);  // resolvable before any work
                cases.push_back({N, k, id});
            }
        }
    }
    if (cases.empty()) throw ConfigError("verify_catalog: no (N, k) pair with k < N");

    return [=](RunReport& rep) {
        std::ostringstream csv;
        csv << "N,k,id,h,rms_residual\n";
        auto& table = rep.values["variants"];
        table = nlohmann::ordered_json::array();
        for (std::size_t ci = 0; ci < cases.size(); ++ci) {
            const Case& c = cases[ci];
            const ClosedFormSolution sol = parse_catalog_id(c.id, c.N, c.k);
            std::mt19937_64 rng(ctx.seed + ci);
            double ss_h = 0.0, ss_h2 = 0.0, max_u = 0.0;
            int accepted = 0;
            for (int attempt = 0; attempt < 200 * points && accepted < points; ++attempt) {
                const double t = uniform_in(rng, t_min, t_max);
                std::array<double, kMaxMatrixDim> xs{};
                for (int a = 0; a < c.N; ++a) xs[static_cast<std::size_t>(a)] = uniform_in(rng, -box, box);
                const std::span<const double> x(xs.data(), static_cast<std::size_t>(c.N));
                const auto d = sol.distance_to_nonsmooth(t, x);
                if (d && *d < std::max(10.0 * h, collar)) continue;
                try {
                    const double r1 = pde_residual(sol, t, x, h);
                    const double r2 = pde_residual(sol, t, x, 0.5 * h);
                    ss_h += r1 * r1;
                    ss_h2 += r2 * r2;
                    max_u = std::max(max_u, std::abs(sol(t, x)));
                    ++accepted;
                } catch (const DomainError&) {
                }
            }
            const std::string name = "slope[N=" + std::to_string(c.N) + ",k=" + std::to_string(c.k) + "] " + c.id;
            if (accepted < points) {
                rep.add(Check{name, false, static_cast<double>(accepted), static_cast<double>(points), ">=",
                              "could not place enough smooth sample points"});
                continue;
            }
            const double rms_h = std::sqrt(ss_h / points);
            const double rms_h2 = std::sqrt(ss_h2 / points);
            const double hh = 0.5 * h;
            const double floor = 1e3 * 2.220446049250313e-16 * (1.0 + max_u) / (hh * hh);
            csv << c.N << ',' << c.k << ",\"" << c.id << "\"," << fmt(h) << ',' << fmt(rms_h) << '\n';
            csv << c.N << ',' << c.k << ",\"" << c.id << "\"," << fmt(hh) << ',' << fmt(rms_h2) << '\n';
            nlohmann::ordered_json row;
            row["N"] = c.N;
            row["k"] = c.k;
            row["id"] = c.id;
            row["rms_residual_h"] = rms_h;
            row["rms_residual_h2"] = rms_h2;
            row["roundoff_floor"] = floor;
            if (rms_h2 <= floor) {
                row["slope"] = nullptr;
                rep.add(Check{name, true, rms_h2, floor, "<=", "residual at roundoff level (exact solution of the scheme)"});
            } else {
                const double slope = std::log2(rms_h / rms_h2);
                row["slope"] = slope;
                rep.add(name, slope, ">=", min_slope);
            }
            table.push_back(std::move(row));
        }
        write_artifact(ctx, rep, "residuals.csv", csv.str());
    };
}

// ---------------------------------------------------------------- grid_convergence

Runner prepare_grid_convergence(const Config& cfg, const Context& ctx) {
    const int N = cfg.integer("problem", "N", 2);
    const int k = cfg.integer("problem", "k", 1);
    const std::string id = cfg.text("data", "id");
    const ClosedFormSolution sol = parse_catalog_id(id, N, k);
    SchemeConfig scheme = read_scheme(cfg, ctx.threads);
    const double L = cfg.number("scheme", "L", 8.0);
    const int m = cfg.integer("scheme", "m", 129);
    const double t0 = cfg.number("scheme", "t0", 0.0);
    const double T = cfg.number("scheme", "T", 1.0);
    const int levels = cfg.integer("scheme", "levels", 2);
    const std::string boundary = cfg.text("scheme", "boundary", "oracle");
    const double window = cfg.number("check", "window", std::numeric_limits<double>::infinity());
    const std::optional<double> max_error =
        cfg.has("check", "max_error") ? std::optional<double>(cfg.number("check", "max_error")) : std::nullopt;
    const std::optional<double> min_ratio =
        cfg.has("check", "min_ratio") ? std::optional<double>(cfg.number("check", "min_ratio")) : std::nullopt;
    if (boundary == "oracle") scheme.boundary = DirichletOracle{sol};
    else if (boundary == "extrapolate") scheme.boundary = ExtrapolateConstant{};
    else throw ConfigError("[scheme] boundary must be oracle or extrapolate");
    if (levels < 1 || levels > 4) throw ConfigError("[scheme] levels must lie in [1, 4]");
    if (!(T > t0)) throw ConfigError("[scheme] T must exceed t0");
    (void)GridField::zeros(N, L, m);  // validates N, L, m
    if (scheme.dt && levels > 1) throw ConfigError("[scheme] dt must be left automatic when levels > 1");

    return [=](RunReport& rep) {
        std::vector<double> errors;
        auto& lv = rep.values["levels"];
        lv = nlohmann::ordered_json::array();
        std::ostringstream csv;
        csv << "m,h,dt,error\n";
        int mm = m;
        for (int level = 0; level < levels; ++level) {
            const GridField u0 = GridField::from_solution(sol, L, mm, t0);
            const Trajectory tr = solve(u0, sol.spec(), scheme, T);
            if (tr.blown_up()) throw std::runtime_error("grid_convergence: run blew up");
            const double err = sup_error(tr.final_state, sol, window);
            errors.push_back(err);
            nlohmann::ordered_json e;
            e["m"] = mm;
            e["h"] = u0.h();
            e["dt"] = tr.dt;
            e["error"] = err;
            lv.push_back(e);
            csv << mm << ',' << fmt(u0.h()) << ',' << fmt(tr.dt) << ',' << fmt(err) << '\n';
            if (level == 0) {
                const GridField fields[] = {tr.snapshots.front(), tr.final_state};
                write_artifact(ctx, rep, "grid_final.csv", grid_csv(fields));
                write_artifact(ctx, rep, "grid_final.bin", grid_binary(tr.final_state));
            }
            mm = 2 * mm - 1;
        }
        write_artifact(ctx, rep, "convergence.csv", csv.str());
        if (max_error) rep.add("sup_error[h=" + fmt(lv[0]["h"].get<double>()) + "]", errors[0], "<=", *max_error);
        if (min_ratio) {
            for (std::size_t i = 1; i < errors.size(); ++i) {
                rep.add("error_ratio[level " + std::to_string(i - 1) + "->" + std::to_string(i) + "]",
                        errors[i - 1] / errors[i], ">=", *min_ratio);
            }
        }
    };
}

// ---------------------------------------------------------------- radial_reduce

Runner prepare_radial_reduce(const Config& cfg, const Context& ctx) {
    const ProblemSpec spec = read_problem(cfg, true, false);
    const std::string profile_id = cfg.text("data", "profile");
    const RadialProfile g = parse_profile_id(profile_id, spec.k);
    SchemeConfig scheme = read_scheme(cfg, ctx.threads);
    const KernelConfig kernel = read_kernel(cfg, ctx.threads);
    const double L = cfg.number("scheme", "L", 10.0);
    const int m = cfg.integer("scheme", "m", 129);
    const double T = cfg.number("scheme", "T", 1.0);
    const double T_decay = cfg.number("scheme", "T_decay", T);
    const double window = cfg.number("check", "window", L - std::sqrt(2.0 * spec.k * T));
    const double max_error = cfg.number("check", "max_error", 1e-2);
    const bool fit = cfg.has("check", "decay_exponent");
    const double decay_exponent = cfg.number("check", "decay_exponent", -0.5 * spec.k);
    const double decay_tol = cfg.number("check", "decay_tolerance", 0.05);
    const double fit_from = cfg.number("check", "fit_from", T);
    const double shift = cfg.number("check", "fit_time_shift", 0.0);
    (void)GridField::zeros(spec.N, L, m);
    if (!(T > 0.0) || T_decay < T) throw ConfigError("[scheme] needs 0 < T <= T_decay");
    if (fit && !(T_decay > fit_from)) throw ConfigError("[check] fit_from must be below [scheme] T_decay");

    return [=](RunReport& rep) {
        auto lift = [&](double t, double r) {
            return spec.sign == Sign::minus ? transport_solve(g, spec, t, r) : heat_convolve_k(g, spec.k, t, r, kernel);
        };
        const GridField u0 = GridField::sample(spec.N, L, m, 0.0, [&](std::span<const double> x) { return g.value(r_of(x)); });
        const Trajectory tr = solve(u0, spec, scheme, T);
        if (tr.blown_up()) throw std::runtime_error("radial_reduce: run blew up");

        // the lift at every node, evaluated once per distinct radius
        const GridField& uT = tr.final_state;
        std::map<double, double> by_radius;
        for (std::size_t c = 0; c < uT.size(); ++c) {
            const auto x = uT.point(c);
            by_radius.emplace(r_of(std::span<const double>(x.data(), static_cast<std::size_t>(spec.N))), 0.0);
        }
        std::vector<double> radii;
        for (const auto& kv : by_radius) radii.push_back(kv.first);
        std::vector<double> lifted(radii.size());
        parallel_for(radii.size(), resolve_threads(ctx.threads), [&](std::size_t i) { lifted[i] = lift(T, radii[i]); });
        for (std::size_t i = 0; i < radii.size(); ++i) by_radius[radii[i]] = lifted[i];
        const double err = sup_error(uT, [&](std::span<const double> x) { return by_radius.at(r_of(x)); }, window);
        rep.values["sup_error"] = err;
        rep.values["window"] = window;
        rep.add("lift_sup_error[T=" + fmt(T) + "]", err, "<=", max_error);

        const std::vector<double> rgrid = uniform_r_grid(L, (m + 1) / 2);
        RadialField rf{T, rgrid, {}, spec};
        for (double r : rgrid) rf.values.push_back(lift(T, r));
        const RadialField series[] = {rf};
        write_artifact(ctx, rep, "radial_lift.csv", radial_csv(series));
        const GridField fields[] = {u0, uT};
        write_artifact(ctx, rep, "grid.csv", grid_csv(fields));

        std::vector<double> times = tr.times;
        std::vector<double> sup = tr.sup;
        if (T_decay > T) {
            const Trajectory more = solve(uT, spec, scheme, T_decay);
            times.insert(times.end(), more.times.begin() + 1, more.times.end());
            sup.insert(sup.end(), more.sup.begin() + 1, more.sup.end());
        }
        std::ostringstream csv;
        csv << "t,sup\n";
        for (std::size_t i = 0; i < times.size(); ++i) csv << fmt(times[i]) << ',' << fmt(sup[i]) << '\n';
        write_artifact(ctx, rep, "sup_history.csv", csv.str());

        if (fit) {
            double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (std::size_t i = 0; i < times.size(); ++i) {
                if (times[i] < fit_from - 1e-12) continue;
                const double x = std::log(times[i] + shift);
                const double y = std::log(sup[i]);
                n += 1;
                sx += x;
                sy += y;
                sxx += x * x;
                sxy += x * y;
            }
            const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
            rep.values["decay_exponent"] = slope;
            rep.add("decay_exponent_deviation[t in " + fmt(fit_from) + ".." + fmt(T_decay) + "]",
                    std::abs(slope - decay_exponent), "<=", decay_tol,
                    "fitted " + fmt(slope) + " against log(t + " + fmt(shift) + "), expected " + fmt(decay_exponent));
        }
    };
}

// ---------------------------------------------------------------- quenching

Runner prepare_quenching(const Config& cfg, const Context& ctx) {
    const int N = cfg.integer("problem", "N", 2);
    const int k = cfg.integer("problem", "k", 1);
    const ProblemSpec spec{N, k, Sign::minus, std::nullopt};
    spec.validate();
    const RadialProfile g = parse_profile_id(cfg.text("data", "profile", "quenching"), k);
    SchemeConfig scheme = read_scheme(cfg, ctx.threads);
    const double L = cfg.number("scheme", "L", 2.0);
    const int m = cfg.integer("scheme", "m", 129);
    const double T = cfg.number("scheme", "T", 0.6);
    const std::string boundary = cfg.text("scheme", "boundary", "oracle");
    const double t_to = cfg.number("check", "zero_until", 2.0);
    const int t_samples = cfg.integer("check", "zero_samples", 16);
    const double r_max = cfg.number("check", "r_max", 3.0);
    const int r_points = cfg.integer("check", "r_points", 301);
    const double max_sup = cfg.number("check", "max_sup", 5e-3);
    const ClosedFormSolution sol = ClosedFormSolution::radial_transport_minus(N, k, g);
    if (boundary == "oracle") scheme.boundary = DirichletOracle{sol};
    else if (boundary == "extrapolate") scheme.boundary = ExtrapolateConstant{};
    else throw ConfigError("[scheme] boundary must be oracle or extrapolate");
    if (t_samples < 1 || r_points < 2) throw ConfigError("[check] zero_samples >= 1 and r_points >= 2 required");
    (void)GridField::zeros(N, L, m);

    return [=](RunReport& rep) {
        const double tq = quench_time(g, spec);
        const double rho = *g.support_radius();
        rep.values["quench_time"] = tq;
        rep.add("quench_time_formula", std::abs(tq - rho * rho / (2.0 * k)), "<=", 0.0);

        const std::vector<double> r = uniform_r_grid(r_max, r_points);
        std::vector<RadialField> series;
        double worst = 0.0;
        for (int i = 0; i <= t_samples; ++i) {
            const double t = tq + (t_to - tq) * i / t_samples;
            RadialField f = transport_field(g, spec, t, r);
            for (double v : f.values) worst = std::max(worst, std::abs(v));
            series.push_back(std::move(f));
        }
        rep.add("transport_zero_after_quench[t in " + fmt(tq) + ".." + fmt(t_to) + "]", worst, "<=", 0.0);
        std::vector<RadialField> before;
        for (double t : {0.0, 0.25 * tq, 0.5 * tq, 0.75 * tq}) before.push_back(transport_field(g, spec, t, r));
        before.insert(before.end(), series.begin(), series.begin() + 1);
        write_artifact(ctx, rep, "transport.csv", radial_csv(before));

        const GridField u0 = GridField::from_solution(sol, L, m, 0.0);
        const Trajectory tr = solve(u0, spec, scheme, T);
        const double sup = tr.final_state.sup_norm();
        rep.values["grid_sup_at_T"] = sup;
        rep.add("grid_sup[t=" + fmt(T) + "]", sup, "<=", max_sup);
        const GridField fields[] = {u0, tr.final_state};
        write_artifact(ctx, rep, "grid.csv", grid_csv(fields));
    };
}

// ---------------------------------------------------------------- mass_growth

Runner prepare_mass_growth(const Config& cfg, const Context& ctx) {
    const int N = cfg.integer("problem", "N", 2);
    const int k = cfg.integer("problem", "k", 1);
    const std::string mu_text = cfg.text("data", "mu", "auto");
    const double mu = mu_text == "auto" ? std::pow(4.0 * std::numbers::pi, -0.5 * N) : cfg.number("data", "mu");
    const auto times = cfg.numbers("check", "times", {1.0, 4.0});
    const double rel_tol = cfg.number("check", "rel_tol", 1e-4);
    const int nodes = cfg.integer("check", "nodes", 512);
    const double reach = cfg.number("check", "reach", 12.0);
    const ClosedFormSolution sol = ClosedFormSolution::gaussian_plus(N, k, mu);
    if (N > 3) throw ConfigError("mass_growth: N must be 2 or 3");
    for (double t : times) {
        if (!(t > 0.0)) throw ConfigError("[check] times must be positive");
    }

    return [=](RunReport& rep) {
        std::ostringstream csv;
        csv << "t,mass,expected\n";
        for (double t : times) {
            const double R = reach * std::sqrt(t);
            std::array<double, 3> x{};
            std::function<double(int)> nest = [&](int axis) -> double {
                return quad::integrate(
                    [&](double v) {
                        x[static_cast<std::size_t>(axis)] = v;
                        if (axis + 1 == N) return sol(t, std::span<const double>(x.data(), static_cast<std::size_t>(N)));
                        return nest(axis + 1);
                    },
                    -R, R, nodes);
            };
            const double mass = nest(0);
            const double expected = std::pow(t, 0.5 * (N - k));
            csv << fmt(t) << ',' << fmt(mass) << ',' << fmt(expected) << '\n';
            rep.values["mass"][fmt(t)] = mass;
            rep.add(label("mass_relative_error", "t", t), std::abs(mass / expected - 1.0), "<=", rel_tol);
        }
        write_artifact(ctx, rep, "mass.csv", csv.str());
    };
}

// ---------------------------------------------------------------- comparison_fuzz

Runner prepare_comparison_fuzz(const Config& cfg, const Context& ctx) {
    const int N = cfg.integer("problem", "N", 2);
    const int k = cfg.integer("problem", "k", 1);
    const auto sign_names = cfg.words("problem", "signs", {"minus", "plus"});
    std::vector<Sign> signs;
    for (const auto& s : sign_names) signs.push_back(parse_sign(s));
    SchemeConfig scheme = read_scheme(cfg, ctx.threads);
    const double L = cfg.number("scheme", "L", 4.0);
    const int m = cfg.integer("scheme", "m", 65);
    const double T = cfg.number("scheme", "T", 0.5);
    const int trials = cfg.integer("check", "trials", 50);
    ProblemSpec{N, k, Sign::minus, std::nullopt}.validate();
    (void)GridField::zeros(N, L, m);
    if (trials < 1) throw ConfigError("[check] trials must be positive");
    if (!(L > std::sqrt(2.0 * k * T))) throw ConfigError("[scheme] box too small for the diagnostic window");

    return [=](RunReport& rep) {
        std::ostringstream csv;
        csv << "sign,trial,seed,margin,tolerance,violated\n";
        for (Sign s : signs) {
            const ProblemSpec spec{N, k, s, std::nullopt};
            const ComparisonReport cr = comparison_fuzz(random_bump_pairs(N, L, m), spec, scheme, T, trials, ctx.seed);
            for (std::size_t i = 0; i < cr.trials.size(); ++i) {
                const auto& t = cr.trials[i];
                csv << to_string(s) << ',' << i << ',' << t.seed << ',' << fmt(t.margin) << ',' << fmt(t.tolerance) << ','
                    << (t.violated ? 1 : 0) << '\n';
            }
            rep.values["worst_margin"][to_string(s)] = cr.worst_margin;
            rep.add("violations[" + to_string(s) + "]", static_cast<double>(cr.violations), "==", 0.0,
                    "worst margin " + fmt(cr.worst_margin) + " over " + std::to_string(trials) + " trials");
        }
        write_artifact(ctx, rep, "comparison.csv", csv.str());
    };
}

// ---------------------------------------------------------------- envelope_check

Runner prepare_envelope_check(const Config& cfg, const Context& ctx) {
    const int N = cfg.integer("problem", "N", 2);
    const int k = cfg.integer("problem", "k", 1);
    ProblemSpec{N, k, Sign::minus, std::nullopt}.validate();
    const std::string kind = cfg.text("data", "envelope", "light_tail");
    const auto ps = cfg.numbers("data", "p", {1.0});
    const double C = cfg.number("data", "C", 0.5);
    const double eps = cfg.number("data", "eps", 1.0);
    const double beta = cfg.number("data", "beta", 1.0);
    const double a = cfg.number("data", "a", 1.0);
    SchemeConfig scheme = read_scheme(cfg, ctx.threads);
    const double L = cfg.number("scheme", "L", 8.0);
    const int m = cfg.integer("scheme", "m", 129);
    const double T = cfg.number("scheme", "T", 3.0);
    const double bound_factor = cfg.number("check", "bound_factor", 1.1);
    const bool require_decay = cfg.boolean("check", "require_decay", true);
    const bool stationary = cfg.boolean("check", "stationary", false);
    const double st_p = cfg.number("check", "stationary_p", 1.0);
    const double st_mu = cfg.number("check", "stationary_mu", 1.0);
    const double st_T = cfg.number("check", "stationary_T", 1.0);
    const bool st_refine = cfg.boolean("check", "stationary_refine", false);
    const double st_order = cfg.number("check", "stationary_min_ratio", 3.0);
    (void)GridField::zeros(N, L, m);

    std::vector<Envelope> envs;
    for (double p : ps) {
        Envelope e;
        if (kind == "light_tail") e = envelope::LightTailMinus{C, p};
        else if (kind == "heavy_tail") e = envelope::HeavyTailMinus{C, eps, beta, p};
        else if (kind == "gaussian_plus") e = envelope::GaussianPlus{C, a, p};
        else throw ConfigError("[data] envelope must be light_tail, heavy_tail or gaussian_plus");
        validate_envelope(e, k);
        envs.push_back(e);
    }

    return [=](RunReport& rep) {
        std::ostringstream csv;
        csv << "p,t,sup,bound\n";
        for (std::size_t i = 0; i < envs.size(); ++i) {
            const double p = ps[i];
            const EnvelopeReport er = verify_envelope(envs[i], N, k, L, m, scheme, T);
            for (std::size_t j = 0; j < er.times.size(); j += 10) {
                csv << fmt(p) << ',' << fmt(er.times[j]) << ',' << fmt(er.sup[j]) << ',' << fmt(er.bound[j]) << '\n';
            }
            rep.add(label("sup_over_bound", "p", p), er.worst_ratio, "<=", bound_factor);
            if (require_decay) {
                const double shift = std::holds_alternative<envelope::GaussianPlus>(envs[i]) ? a : 0.0;
                const double slope = er.blown_up ? std::numeric_limits<double>::infinity()
                                                 : last_decade_slope(er.times, er.sup, shift);
                rep.values["decay_slope"][fmt(p)] = std::isfinite(slope) ? nlohmann::ordered_json(slope) : nullptr;
                rep.add(label("global_decay_slope", "p", p), slope, "<=", -0.05,
                        er.blown_up ? "blew up" : "last-decade log-log slope of sup |u|");
            }
        }
        write_artifact(ctx, rep, "envelope.csv", csv.str());

        if (stationary) {
            const ClosedFormSolution sol = ClosedFormSolution::stationary_minus(N, k, st_p, st_mu);
            SchemeConfig sc = scheme;
            sc.boundary = DirichletOracle{sol};
            std::vector<double> drifts;
            for (int mm : st_refine ? std::vector<int>{m, 2 * m - 1} : std::vector<int>{m}) {
                const GridField u0 = GridField::from_solution(sol, L, mm, 0.0);
                const Trajectory tr = solve(u0, sol.spec(), sc, st_T);
                double drift = 0.0;
                for (std::size_t c = 0; c < u0.size(); ++c) {
                    drift = std::max(drift, std::abs(tr.final_state.values[c] - u0.values[c]));
                }
                drifts.push_back(drift);
                if (mm == m) {
                    rep.values["stationary_drift"] = drift;
                    rep.add("stationary_drift[T=" + fmt(st_T) + "]", drift, "<=", scheme_tolerance(u0, st_T),
                            "tolerance = scheme consistency error integrated over [0, T]");
                }
            }
            if (drifts.size() == 2) {
                rep.add("stationary_drift_ratio[h->h/2]", drifts[0] / drifts[1], ">=", st_order);
            }
        }
    };
}

// ---------------------------------------------------------------- fujita_sweep

Runner prepare_fujita_sweep(const Config& cfg, const Context& ctx) {
    SweepConfig sc;
    sc.N = cfg.integer("problem", "N", 2);
    sc.k = cfg.integer("problem", "k", 1);
    sc.sign = parse_sign(cfg.text("problem", "sign", "plus"));
    ProblemSpec{sc.N, sc.k, sc.sign, std::nullopt}.validate();
    sc.p_list = cfg.numbers("data", "p", {});
    if (sc.p_list.empty()) throw ConfigError("[data] p must list at least one exponent");
    if (!std::is_sorted(sc.p_list.begin(), sc.p_list.end())) throw ConfigError("[data] p must be sorted");
    const std::string data = cfg.text("data", "data", "automatic");
    if (data == "automatic") sc.data = SweepData::automatic;
    else if (data == "cap") sc.data = SweepData::cap;
    else if (data == "small_gaussian") sc.data = SweepData::small_gaussian;
    else if (data == "light_gaussian") sc.data = SweepData::light_gaussian;
    else throw ConfigError("[data] data must be automatic, cap, small_gaussian or light_gaussian");
    sc.cap_amplitudes = cfg.numbers("data", "cap_amplitudes", sc.cap_amplitudes);
    sc.cap_eps = cfg.number("data", "cap_eps", sc.cap_eps);
    sc.fractions = cfg.numbers("data", "fractions", sc.fractions);
    sc.gaussian_a = cfg.number("data", "gaussian_a", sc.gaussian_a);
    sc.L = cfg.number("scheme", "L", sc.L);
    sc.m = cfg.integer("scheme", "m", sc.m);
    sc.T_max = cfg.number("scheme", "T_max", sc.T_max);
    sc.scheme = read_scheme(cfg, 1);
    sc.threads = ctx.threads;
    const double p_F = sc.sign == Sign::plus ? 2.0 / sc.k : 0.0;
    const bool check_rate = cfg.has("check", "expected_rate") || sc.sign == Sign::plus;
    const double expected_rate = cfg.number("check", "expected_rate", -0.5 * sc.k);
    const double rate_tol = cfg.number("check", "rate_tolerance", 0.1);
    (void)GridField::zeros(sc.N, sc.L, sc.m);

    return [=](RunReport& rep) {
        const VerdictTable table = exponent_sweep(sc);
        std::ostringstream csv;
        write_verdict_csv(csv, table);
        write_artifact(ctx, rep, "verdicts.csv", csv.str());
        std::ostringstream series;
        series << "p,scale,t,sup\n";
        for (const auto& e : table.entries) {
            for (std::size_t i = 0; i < e.verdict.times.size(); i += 20) {
                series << fmt(e.p) << ',' << fmt(e.scale) << ',' << fmt(e.verdict.times[i]) << ','
                       << fmt(e.verdict.sup[i]) << '\n';
            }
        }
        write_artifact(ctx, rep, "sup_series.csv", series.str());

        auto& rows = rep.values["entries"];
        rows = nlohmann::ordered_json::array();
        for (const auto& e : table.entries) {
            nlohmann::ordered_json r;
            r["p"] = e.p;
            r["scale"] = e.scale;
            r["data"] = e.data;
            r["verdict"] = to_string(e.verdict.kind);
            if (e.verdict.kind == BlowupVerdict::Kind::blow_up) r["t_star"] = e.verdict.t_star;
            if (e.verdict.kind == BlowupVerdict::Kind::global_decay) r["rate"] = e.verdict.rate;
            rows.push_back(std::move(r));
        }

        std::vector<double> ps = sc.p_list;
        ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
        for (double p : ps) {
            std::size_t total = 0, hits = 0;
            BlowupVerdict::Kind want = p < p_F ? BlowupVerdict::Kind::blow_up
                                               : (p > p_F ? BlowupVerdict::Kind::global_decay
                                                          : BlowupVerdict::Kind::undecided);
            if (sc.sign == Sign::plus && std::abs(p - p_F) <= 1e-12 * p_F) want = BlowupVerdict::Kind::undecided;
            for (const auto& e : table.entries) {
                if (e.p != p) continue;
                ++total;
                if (e.verdict.kind == want) ++hits;
                if (want == BlowupVerdict::Kind::global_decay && check_rate &&
                    e.verdict.kind == BlowupVerdict::Kind::global_decay) {
                    rep.add("decay_rate_deviation[p=" + fmt(p) + ",scale=" + fmt(e.scale) + "]",
                            std::abs(e.verdict.rate - expected_rate), "<=", rate_tol,
                            "rate " + fmt(e.verdict.rate) + ", expected " + fmt(expected_rate));
                }
            }
            rep.add("verdict_" + to_string(want) + "[p=" + fmt(p) + "]", static_cast<double>(hits), "==",
                    static_cast<double>(total), std::to_string(hits) + " of " + std::to_string(total) + " runs");
        }
        rep.values["bracket"] = {table.p_lo, table.p_hi ? nlohmann::ordered_json(*table.p_hi) : nullptr};
        rep.add(Check{"bracket_contains_critical_exponent", table.bracket_contains(p_F), p_F, p_F, "in",
                      "[" + fmt(table.p_lo) + ", " + (table.p_hi ? fmt(*table.p_hi) : std::string("inf")) + "]"});
    };
}

// ---------------------------------------------------------------- structural_identities

Runner prepare_structural_identities(const Config& cfg, const Context& ctx) {
    const int count = cfg.integer("check", "matrices", 10000);
    const int max_n = cfg.integer("check", "max_n", 6);
    const double tol = cfg.number("check", "tolerance", 1e-10);
    if (count < 1 || max_n < 2 || max_n > kMaxMatrixDim) throw ConfigError("[check] needs matrices >= 1, 2 <= max_n <= 8");

    return [=](RunReport& rep) {
        std::mt19937_64 rng(ctx.seed);
        double shift_err = 0.0, mono_gap = std::numeric_limits<double>::infinity(), order_gap = 0.0, trace_err = 0.0;
        for (int i = 0; i < count; ++i) {
            const int n = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_n - 1));
            const int k = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n));
            SymMatrix A(n);
            for (int r = 0; r < n; ++r) {
                for (int c = r; c < n; ++c) A.set(r, c, uniform_in(rng, -1.0, 1.0));
            }
            SymMatrix P(n);  // B B^T
            std::array<double, kMaxMatrixDim * kMaxMatrixDim> B{};
            for (int r = 0; r < n * n; ++r) B[static_cast<std::size_t>(r)] = uniform_in(rng, -1.0, 1.0);
            for (int r = 0; r < n; ++r) {
                for (int c = r; c < n; ++c) {
                    double s = 0.0;
                    for (int j = 0; j < n; ++j) s += B[static_cast<std::size_t>(r * n + j)] * B[static_cast<std::size_t>(c * n + j)];
                    P.set(r, c, s);
                }
            }
            const double shift = uniform_in(rng, -2.0, 2.0);
            const double scale = 1.0 + A.frobenius_norm();
            for (Sign s : {Sign::minus, Sign::plus}) {
                const double f = truncated_laplacian(A, k, s);
                shift_err = std::max(shift_err, std::abs(truncated_laplacian(A.plus_identity(shift), k, s) - f - k * shift));
                mono_gap = std::min(mono_gap, truncated_laplacian(A + P, k, s) - f);
            }
            const double lo = truncated_laplacian(A, k, Sign::minus);
            const double hi = truncated_laplacian(A, k, Sign::plus);
            const double mid = static_cast<double>(k) / n * A.trace();
            order_gap = std::max({order_gap, lo - mid, mid - hi});
            double sum = 0.0;
            for (double v : eigen_sym(A).view()) sum += v;
            trace_err = std::max(trace_err, std::abs(sum - A.trace()) / scale);
        }
        rep.add("shift_identity_max_error", shift_err, "<=", tol);
        rep.add("psd_monotonicity_min_gap", mono_gap, ">=", -tol);
        rep.add("ordering_max_excess", order_gap, "<=", tol);
        rep.add("eigen_sum_vs_trace_relative", trace_err, "<=", tol);
        rep.values["matrices"] = count;
    };
}

// ---------------------------------------------------------------- convexity_check

Runner prepare_convexity_check(const Config& cfg, const Context& ctx) {
    const int N = cfg.integer("problem", "N", 2);
    const int k = cfg.integer("problem", "k", 1);
    const ProblemSpec spec{N, k, Sign::plus, std::nullopt};
    spec.validate();
    const std::string bad_id = cfg.text("data", "violating", "step{radius=1}");
    const std::string good_id = cfg.text("data", "certified", "cap{eps=1}");
    const RadialProfile bad = parse_profile_id(bad_id, k);
    const RadialProfile good = parse_profile_id(good_id, k);
    const KernelConfig kernel = read_kernel(cfg, ctx.threads);
    const double r_max = cfg.number("scheme", "r_max", 3.0);
    const int points = cfg.integer("scheme", "points", 301);
    const auto times = cfg.numbers("scheme", "times", {0.05, 0.1, 0.2, 0.5});
    const double probe_t = cfg.number("check", "probe_t", 0.1);
    const double probe_r = cfg.number("check", "probe_r", 0.5);
    const double tol_rel = cfg.number("check", "tol_rel", 1e-7);
    if (points < 3 || !(r_max > 0.0)) throw ConfigError("[scheme] needs r_max > 0 and points >= 3");
    for (double t : times) {
        if (!(t > 0.0)) throw ConfigError("[scheme] times must be positive");
    }

    return [=](RunReport& rep) {
        const std::vector<double> r = uniform_r_grid(r_max, points);
        const double h = r[1] - r[0];
        auto evolve = [&](const RadialProfile& g) {
            std::vector<RadialField> series;
            for (double t : times) series.push_back(convolve_field(g, spec, t, r, kernel));
            return series;
        };
        const auto bad_series = evolve(bad);
        const auto good_series = evolve(good);
        write_artifact(ctx, rep, "violating.csv", radial_csv(bad_series));
        write_artifact(ctx, rep, "certified.csv", radial_csv(good_series));

        const ConvexityReport br = check_convexity_condition(bad_series, tol_rel);
        const ConvexityReport gr = check_convexity_condition(good_series, tol_rel);
        bool flagged = false;
        double margin = std::numeric_limits<double>::quiet_NaN();
        for (const auto& v : br.violations) {
            if (std::abs(v.t - probe_t) <= 1e-12 && std::abs(v.r - probe_r) <= 0.5 * h) {
                flagged = true;
                margin = v.margin;
            }
        }
        rep.values["violating_cells"] = br.violations.size();
        rep.values["certified_worst_margin"] = gr.worst_margin;
        rep.add(Check{"flagged[" + bad_id + " at t=" + fmt(probe_t) + ",r=" + fmt(probe_r) + "]", flagged, margin, 0.0,
                      "<", std::to_string(br.violations.size()) + " violating cells in total"});
        rep.add("violations[" + good_id + "]", static_cast<double>(gr.violations.size()), "==", 0.0,
                std::to_string(gr.cells_checked) + " cells checked, worst margin " + fmt(gr.worst_margin));
    };
}

using Preparer = Runner (*)(const Config&, const Context&);

const std::map<std::string, Preparer>& registry() {
    static const std::map<std::string, Preparer> r = {
        {"verify_catalog", prepare_verify_catalog},
        {"grid_convergence", prepare_grid_convergence},
        {"radial_reduce", prepare_radial_reduce},
        {"quenching", prepare_quenching},
        {"mass_growth", prepare_mass_growth},
        {"comparison_fuzz", prepare_comparison_fuzz},
        {"envelope_check", prepare_envelope_check},
        {"fujita_sweep", prepare_fujita_sweep},
        {"structural_identities", prepare_structural_identities},
        {"convexity_check", prepare_convexity_check},
    };
    return r;
}

}  // namespace

std::vector<std::string> experiment_kinds() {
    std::vector<std::string> out;
    for (const auto& kv : registry()) out.push_back(kv.first);
    return out;
}

RunReport run_experiment(const Config& cfg, const RunOptions& opt) {
    const auto start = std::chrono::steady_clock::now();
    RunReport rep;
    rep.kind = cfg.text("experiment", "kind");
    Context ctx;
    ctx.seed = cfg.unsigned64("experiment", "seed", 1);
    if (opt.seed) ctx.seed = *opt.seed;
    ctx.threads = resolve_threads(opt.threads);
    ctx.out_dir = opt.out_dir;
    (void)cfg.text("experiment", "description", "");

    const auto it = registry().find(rep.kind);
    if (it == registry().end()) throw ConfigError("unknown experiment kind '" + rep.kind + "'");
    Runner runner;
    try {
        runner = it->second(cfg, ctx);
    } catch (const ParamError& e) {
        throw ConfigError(e.what());
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    cfg.require_all_used();
    rep.config = cfg.echo();
    rep.config["experiment"]["seed"] = std::to_string(ctx.seed);
    if (opt.dry_run) return rep;

    runner(rep);
    rep.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

int run_command(const std::string& config_path, const RunOptions& opt) {
    RunReport rep;
    try {
        const Config cfg = Config::load(config_path);
        rep = run_experiment(cfg, opt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    if (opt.dry_run) {
        std::cout << "config ok (" << rep.kind << ")\n";
        return 0;
    }
    write_file_atomic((std::filesystem::path(opt.out_dir) / "report.json").string(), rep.to_json().dump(2) + "\n");
    for (const auto& c : rep.checks) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "  measured=" << format_double(c.measured) << ' '
                  << c.relation << ' ' << format_double(c.tolerance) << '\n';
    }
    std::cout << (rep.passed() ? "all checks passed" : "some checks failed") << " (" << rep.kind << ", "
              << format_double(std::round(rep.wall_clock_seconds * 100.0) / 100.0) << " s)\n";
    return rep.passed() ? 0 : 1;
}

std::string merge_reports(const std::vector<RunReport>& reports, const std::vector<std::string>& labels) {
    if (reports.empty()) return {};
    for (const auto& r : reports) {
        if (r.schema_version != reports.front().schema_version) {
            throw SchemaMismatch("reports carry schema versions " + std::to_string(reports.front().schema_version) +
                                 " and " + std::to_string(r.schema_version));
        }
    }
    std::ostringstream out;
    const bool convergence = std::all_of(reports.begin(), reports.end(), [](const RunReport& r) {
        return r.kind == "grid_convergence" && r.values.contains("levels");
    });
    if (convergence) {
        struct Row {
            std::string report;
            double h, dt, error;
        };
        std::vector<Row> rows;
        for (std::size_t i = 0; i < reports.size(); ++i) {
            for (const auto& lv : reports[i].values["levels"]) {
                rows.push_back({labels[i], lv["h"].get<double>(), lv["dt"].get<double>(), lv["error"].get<double>()});
            }
        }
        std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.h > b.h; });
        out << "report,h,dt,error,order\n";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            out << rows[i].report << ',' << format_double(rows[i].h) << ',' << format_double(rows[i].dt) << ','
                << format_double(rows[i].error) << ',';
            if (i > 0 && rows[i].h < rows[i - 1].h) {
                out << format_double(std::log(rows[i - 1].error / rows[i].error) / std::log(rows[i - 1].h / rows[i].h));
            }
            out << '\n';
        }
        return out.str();
    }
    out << "report,kind,check,passed,measured,relation,tolerance\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        for (const auto& c : reports[i].checks) {
            std::string name = c.name;
            if (name.find_first_of(",\"") != std::string::npos) {
                std::string q = "\"";
                for (char ch : name) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
                name = q + "\"";
            }
            out << labels[i] << ',' << reports[i].kind << ',' << name << ',' << (c.passed ? "true" : "false") << ','
                << format_double(c.measured) << ',' << c.relation << ',' << format_double(c.tolerance) << '\n';
        }
    }
    return out.str();
}

}  // namespace heatlab::cli
