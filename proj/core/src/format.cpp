#include "heatlab/format.hpp"

#include "heatlab/errors.hpp"

#include <array>
#include <charconv>
#include <filesystem>
#include <fstream>

namespace heatlab {

std::string format_double(double v) {
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc()) return "nan";
    return std::string(buf.data(), ptr);
}

void write_file_atomic(const std::string& path, const std::string& text) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write '" + tmp.string() + "'");
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!out) throw ConfigError("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
}

}  // namespace heatlab
