#include "heatlab/errors.hpp"
#include "heatlab/format.hpp"
#include "heatlab/grid_solver.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>

namespace heatlab {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <class T>
void put_le(std::ostream& out, T value) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
    unsigned char bytes[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw ConfigError("grid block: truncated input");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

}  // namespace

void write_grid_csv(std::ostream& out, std::span<const GridField> fields) {
    if (fields.empty()) return;
    out << 't';
    for (int a = 1; a <= fields.front().N; ++a) out << ",x" << a;
    out << ",value\n";
    for (const GridField& f : fields) {
        const std::string t = format_double(f.t);
        for (std::size_t c = 0; c < f.values.size(); ++c) {
            const auto x = f.point(c);
            out << t;
            for (int a = 0; a < f.N; ++a) out << ',' << format_double(x[static_cast<std::size_t>(a)]);
            out << ',' << format_double(f.values[c]) << '\n';
        }
    }
}

void write_grid_binary(std::ostream& out, const GridField& f) {
    put_le<std::int32_t>(out, f.N);
    put_le<std::int32_t>(out, f.m);
    put_le<double>(out, f.L);
    put_le<double>(out, f.t);
    for (double v : f.values) put_le<double>(out, v);
}

GridField read_grid_binary(std::istream& in) {
    const auto N = get_le<std::int32_t>(in);
    const auto m = get_le<std::int32_t>(in);
    const auto L = get_le<double>(in);
    const auto t = get_le<double>(in);
    GridField f = GridField::zeros(N, L, m, t);
    for (double& v : f.values) v = get_le<double>(in);
    return f;
}

}  // namespace heatlab
