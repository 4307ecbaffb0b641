#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace tempsense {

// Shortest round-trip decimal representation, locale-independent.
std::string format_double(double v);

std::optional<double> parse_double(std::string_view text);

// Writes to a temporary file in the target directory, then renames.
// No partial file is left behind on failure.
void atomic_write(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace tempsense
