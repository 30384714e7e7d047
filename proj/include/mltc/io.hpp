#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace mltc::io {

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it into place, so a failed
/// write never leaves a partial artifact at `path`.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content);

}  // namespace mltc::io
