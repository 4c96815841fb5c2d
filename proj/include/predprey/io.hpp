#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace predprey::io {

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

/// Writes content to path via a sibling temporary file and a rename, so a
/// reader never observes a truncated artifact.
void write_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace predprey::io
