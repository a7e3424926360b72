#pragma once

#include <filesystem>
#include <string>

namespace aoi {

/// Shortest decimal form with 12 significant digits; every float that reaches
/// an output file goes through this so reruns are byte-identical.
std::string g12(double x);

/// Writes content to path via a sibling temp file and an atomic rename, so
/// readers never observe a partial file.
void atomic_write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace aoi
