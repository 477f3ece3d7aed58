#pragma once

#include <string>

namespace heatlab {

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

/// Writes `text` to `path` through a temporary sibling file and a rename.
void write_file_atomic(const std::string& path, const std::string& text);

}  // namespace heatlab
