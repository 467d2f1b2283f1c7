#pragma once

#include <filesystem>

#include "ssem/grid.hpp"

namespace ssem {

/// Gridded-field text format: first line "ssem-field 1", second line
/// "<dim> <m>", then m^dim lines with one value each in the grid's flat
/// ordering (last axis contiguous).
void write_field(const Field& f, const std::filesystem::path& path);
Field read_field(const std::filesystem::path& path);

}  // namespace ssem
