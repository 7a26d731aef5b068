// Atomic file output and fixed-precision number formatting shared by the
// table writers and the command-line tool.
#pragma once

#include <string>

namespace decoh {

// Writes content to a temporary sibling and renames it into place, so readers
// never observe a partial file.
void atomic_write(const std::string& path, const std::string& content);

// Shortest representation carrying 17 significant digits (round-trip safe).
std::string format_double(double x);

}  // namespace decoh
