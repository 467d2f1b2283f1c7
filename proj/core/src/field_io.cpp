#include "ssem/field_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

namespace ssem {

void write_field(const Field& f, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(errc::io_failure, "cannot write field file " + path.string());
  out << "ssem-field 1\n" << f.grid.dim() << ' ' << f.grid.m() << '\n';
  char buf[40];
  for (double v : f.values) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", v);
    out << buf;
  }
  if (!out) fail(errc::io_failure, "short write to " + path.string());
}

Field read_field(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_failure, "cannot open field file " + path.string());
  std::string magic;
  int version = 0, dim = 0, m = 0;
  in >> magic >> version >> dim >> m;
  if (!in || magic != "ssem-field" || version != 1)
    fail(errc::invalid_data, "not an ssem field file: " + path.string());
  Grid grid(dim, m);
  Field f(grid);
  for (std::int64_t i = 0; i < grid.size(); ++i) {
    in >> f.values[i];
    if (!in || !std::isfinite(f.values[i]))
      fail(errc::invalid_data, "bad value at entry " + std::to_string(i));
  }
  return f;
}

}  // namespace ssem
