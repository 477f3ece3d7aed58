#include "heatlab/analytic_catalog.hpp"

#include "heatlab/errors.hpp"
#include "heatlab/random.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <random>

namespace heatlab {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

double to_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
        throw ParamError("parameter '" + key + "': '" + text + "' is not a finite number");
    }
    return v;
}

// Consumes parameters by name; leftovers are reported as unknown keys.
class Params {
public:
    Params(std::string family, const std::vector<std::pair<std::string, std::string>>& kv) : family_(std::move(family)) {
        for (const auto& [k, v] : kv) {
            if (!values_.emplace(k, v).second) throw ParamError(family_ + ": duplicate parameter '" + k + "'");
        }
    }

    double num(const std::string& key, double fallback) { return has(key) ? to_double(key, take(key)) : fallback; }

    int integer(const std::string& key, int fallback) {
        const double v = num(key, fallback);
        if (v != std::floor(v)) throw ParamError(family_ + ": parameter '" + key + "' must be an integer");
        return static_cast<int>(v);
    }

    std::string text(const std::string& key, const std::string& fallback) { return has(key) ? take(key) : fallback; }

    bool has(const std::string& key) const { return values_.count(key) != 0; }

    std::string take(const std::string& key) {
        auto it = values_.find(key);
        std::string v = it->second;
        values_.erase(it);
        return v;
    }

    void finish() const {
        if (!values_.empty()) {
            throw ParamError(family_ + ": unknown parameter '" + values_.begin()->first + "'");
        }
    }

private:
    std::string family_;
    std::map<std::string, std::string> values_;
};

ScalarFunction named_phi(const std::string& name, double scale, double sign) {
    if (!(scale > 0.0)) throw ParamError("one-variable profile: scale must be positive");
    const double a = scale;
    if (name == "cosh") {
        return {[=](double z) { return sign * std::cosh(a * z); }, [=](double z) { return sign * a * std::sinh(a * z); },
                [=](double z) { return sign * a * a * std::cosh(a * z); }};
    }
    if (name == "square") {
        return {[=](double z) { return sign * 0.5 * a * z * z; }, [=](double z) { return sign * a * z; },
                [=](double) { return sign * a; }};
    }
    if (name == "exp") {
        return {[=](double z) { return sign * std::exp(a * z); }, [=](double z) { return sign * a * std::exp(a * z); },
                [=](double z) { return sign * a * a * std::exp(a * z); }};
    }
    throw ParamError("unknown one-variable profile '" + name + "' (expected cosh, square or exp)");
}

double symmetric_unit(std::mt19937_64& rng) { return uniform_in(rng, -1.0, 1.0); }

RadialProfile load_profile_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParamError("profile table: cannot open '" + path + "'");
    std::vector<double> r;
    std::vector<double> g;
    std::string line;
    while (std::getline(in, line)) {
        const auto body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto comma = body.find(',');
        if (comma == std::string_view::npos) throw ParamError("profile table: expected 'r,value' rows");
        const std::string a(trim(body.substr(0, comma)));
        const std::string b(trim(body.substr(comma + 1)));
        if (r.empty() && g.empty() && a == "r") continue;  // header
        r.push_back(to_double("r", a));
        g.push_back(to_double("value", b));
    }
    return RadialProfile::table("table:" + path, std::move(r), std::move(g));
}

RadialProfile build_profile(const std::string& name, Params& p, int k) {
    RadialProfile out = [&] {
        if (name == "light_gaussian") return profiles::light_gaussian(p.num("mu", 1.0), k);
        if (name == "heat_gaussian") return profiles::heat_gaussian(p.num("a", 1.0), k);
        if (name == "cap") {
            const double eps = p.num("eps", 1.0);
            return profiles::cap(eps, p.num("amp", 1.0));
        }
        if (name == "quenching") return profiles::quenching_bump();
        if (name == "step") return profiles::step(p.num("radius", 1.0));
        if (name == "algebraic") {
            const double mu = p.num("mu", 1.0);
            const double eps = p.num("eps", 1.0);
            return profiles::algebraic(mu, eps, p.num("beta", 1.0));
        }
        if (name == "exp_decay") return profiles::exp_decay(p.num("mu", 1.0));
        if (name == "constant") return profiles::constant(p.num("c", 1.0));
        if (name == "table") {
            if (!p.has("path")) throw ParamError("table profile needs path=...");
            return load_profile_table(p.take("path"));
        }
        throw ParamError("unknown radial profile '" + name + "'");
    }();
    p.finish();
    return out;
}

}  // namespace

ParsedId parse_id(std::string_view id) {
    id = trim(id);
    ParsedId out;
    const auto brace = id.find('{');
    if (brace == std::string_view::npos) {
        out.name = std::string(id);
    } else {
        if (id.back() != '}') throw ParamError("malformed id '" + std::string(id) + "': missing closing brace");
        out.name = std::string(trim(id.substr(0, brace)));
        std::string_view body = id.substr(brace + 1, id.size() - brace - 2);
        while (!trim(body).empty()) {
            const auto comma = body.find(',');
            const std::string_view item = trim(body.substr(0, comma));
            const auto eq = item.find('=');
            if (eq == std::string_view::npos) {
                throw ParamError("malformed id '" + std::string(id) + "': expected key=value");
            }
            out.params.emplace_back(std::string(trim(item.substr(0, eq))), std::string(trim(item.substr(eq + 1))));
            if (comma == std::string_view::npos) break;
            body.remove_prefix(comma + 1);
        }
    }
    if (out.name.empty()) throw ParamError("empty id");
    return out;
}

RadialProfile parse_profile_id(std::string_view id, int k) {
    const ParsedId parsed = parse_id(id);
    Params p(parsed.name, parsed.params);
    return build_profile(parsed.name, p, k);
}

ClosedFormSolution parse_catalog_id(std::string_view id, int N, int k) {
    const ParsedId parsed = parse_id(id);
    const std::string& name = parsed.name;
    Params p(name, parsed.params);

    auto finish = [&](ClosedFormSolution s) {
        p.finish();
        return s;
    };

    if (name == "one_var_convex" || name == "one_var_concave") {
        const bool convex = name == "one_var_convex";
        const int axis = p.integer("axis", 0);
        const std::string phi = p.text("phi", "cosh");
        const ScalarFunction f = named_phi(phi, p.num("scale", 1.0), convex ? 1.0 : -1.0);
        return finish(convex ? ClosedFormSolution::one_var_convex(N, k, axis, phi, f)
                             : ClosedFormSolution::one_var_concave(N, k, axis, phi, f));
    }
    if (name == "travelling_wave") {
        const Sign sign = parse_sign(p.text("sign", "minus"));
        const int axis = p.integer("axis", 0);
        const double alpha = p.num("alpha", 0.0);
        const double beta = p.num("beta", 1.0);
        const double c = p.num("c", 1.0);
        return finish(ClosedFormSolution::travelling_wave(N, k, sign, axis, alpha, beta, c));
    }
    if (name == "polynomial") {
        const Sign sign = parse_sign(p.text("sign", "minus"));
        const auto seed = static_cast<std::uint64_t>(p.integer("seed", 1));
        const double C = p.num("C", 0.0);
        if (N < 2 || N > kMaxMatrixDim) throw ParamError("polynomial: N out of range");
        std::mt19937_64 rng(seed);
        SymMatrix A(N);
        for (int i = 0; i < N; ++i) {
            for (int j = i; j < N; ++j) A.set(i, j, symmetric_unit(rng));
        }
        std::vector<double> x0(static_cast<std::size_t>(N));
        std::vector<double> y(static_cast<std::size_t>(N));
        for (auto& v : x0) v = symmetric_unit(rng);
        for (auto& v : y) v = symmetric_unit(rng);
        return finish(ClosedFormSolution::polynomial(N, k, sign, A, std::move(x0), std::move(y), C));
    }
    if (name == "self_similar_minus") {
        const double beta = p.num("beta", static_cast<double>(k) / 2.0);
        const double mu = p.num("mu", 1.0);
        return finish(ClosedFormSolution::self_similar_minus(N, k, beta, mu, p.num("eps", 0.0)));
    }
    if (name == "gaussian_plus") return finish(ClosedFormSolution::gaussian_plus(N, k, p.num("mu", 1.0)));
    if (name == "shifted_gaussian_plus") return finish(ClosedFormSolution::shifted_gaussian_plus(N, k, p.num("a", 1.0)));
    if (name == "radial_transport_minus") {
        const std::string prof = p.text("profile", "light_gaussian");
        RadialProfile g = build_profile(prof, p, k);
        return ClosedFormSolution::radial_transport_minus(N, k, std::move(g));
    }
    if (name == "separated_exponential_minus") {
        return finish(ClosedFormSolution::separated_exponential_minus(N, k, p.num("mu", 1.0)));
    }
    if (name == "quenching_profile_minus") return finish(ClosedFormSolution::quenching_profile_minus(N, k));
    if (name == "stationary_minus") {
        const double pp = p.num("p", 1.0);
        return finish(ClosedFormSolution::stationary_minus(N, k, pp, p.num("mu", 1.0)));
    }
    throw ParamError("unknown catalog id '" + name + "'");
}

std::vector<std::string> default_catalog_ids() {
    return {
        "one_var_convex{axis=0,phi=cosh}",
        "one_var_concave{axis=1,phi=cosh}",
        "travelling_wave{sign=minus,axis=0,alpha=0,beta=1,c=1}",
        "travelling_wave{sign=plus,axis=1,alpha=0.5,beta=1,c=-0.7}",
        "polynomial{sign=minus,seed=1}",
        "polynomial{sign=plus,seed=2}",
        "self_similar_minus{beta=1,mu=1,eps=0}",
        "self_similar_minus{beta=0.75,mu=2,eps=0.5}",
        "gaussian_plus{mu=1}",
        "shifted_gaussian_plus{a=1}",
        "radial_transport_minus{profile=exp_decay,mu=1}",
        "radial_transport_minus{profile=algebraic,mu=1,eps=1,beta=1}",
        "separated_exponential_minus{mu=1}",
        "quenching_profile_minus",
        "stationary_minus{p=1,mu=1}",
    };
}

}  // namespace heatlab
