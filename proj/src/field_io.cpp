#include "clcons/field_io.hpp"

#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace clcons {

static_assert(std::endian::native == std::endian::little,
              "clf payloads are little-endian; big-endian hosts are unsupported");

namespace {

using nlohmann::json;

void check_writable(const std::string& path, bool force) {
  if (!force && std::filesystem::exists(path)) {
    throw std::invalid_argument("refusing to overwrite '" + path + "' without --force");
  }
}

}  // namespace

void write_field_clf(const Field& field, const std::string& path, bool force) {
  if (!field.all_valid()) {
    throw std::invalid_argument("write_field_clf: partially valid fields cannot be saved");
  }
  field.require_finite("write_field_clf");
  check_writable(path, force);
  const Grid& grid = field.grid();
  json header;
  header["format_version"] = 1;
  header["points_per_axis"] = grid.points_per_axis();
  header["extent_per_axis"] = grid.extent_per_axis();
  header["periodic_per_axis"] = grid.periodic_per_axis();
  header["component_count"] = field.component_count();
  header["dtype"] = "f64le";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::invalid_argument("write_field_clf: cannot open '" + path + "'");
  out << header.dump() << "\n";
  out.write(reinterpret_cast<const char*>(field.values().data()),
            static_cast<std::streamsize>(sizeof(double) * field.values().size()));
  if (!out) throw std::runtime_error("write_field_clf: short write to '" + path + "'");
}

Field read_field_clf(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("read_field_clf: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("read_field_clf: missing header line");
  }
  json header;
  try {
    header = json::parse(line);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("read_field_clf: bad header: ") + e.what());
  }
  for (auto it = header.begin(); it != header.end(); ++it) {
    const std::string& key = it.key();
    if (key != "format_version" && key != "points_per_axis" && key != "extent_per_axis" &&
        key != "periodic_per_axis" && key != "component_count" && key != "dtype") {
      throw std::invalid_argument("read_field_clf: unknown header key '" + key + "'");
    }
  }
  if (header.at("format_version").get<int>() != 1) {
    throw std::invalid_argument("read_field_clf: unsupported format version");
  }
  if (header.at("dtype").get<std::string>() != "f64le") {
    throw std::invalid_argument("read_field_clf: unsupported dtype");
  }
  Grid grid(header.at("points_per_axis").get<std::vector<int>>(),
            header.at("extent_per_axis").get<std::vector<double>>(),
            header.at("periodic_per_axis").get<std::vector<bool>>());
  const int n = header.at("component_count").get<int>();
  Field field(grid, n);
  const std::streamsize bytes =
      static_cast<std::streamsize>(sizeof(double) * field.values().size());
  in.read(reinterpret_cast<char*>(field.values().data()), bytes);
  if (in.gcount() != bytes) {
    throw std::invalid_argument("read_field_clf: truncated payload");
  }
  char extra;
  if (in.read(&extra, 1); in.gcount() != 0) {
    throw std::invalid_argument("read_field_clf: trailing bytes after payload");
  }
  field.require_finite("read_field_clf");
  return field;
}

void write_field_csv(const Field& field, const std::string& path, bool force) {
  check_writable(path, force);
  const Grid& grid = field.grid();
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::invalid_argument("write_field_csv: cannot open '" + path + "'");
  out.precision(17);
  for (int k = 0; k < grid.dim_count(); ++k) out << (k ? "," : "") << "x" << k;
  for (int c = 0; c < field.component_count(); ++c) out << ",u" << c;
  out << "\n";
  std::int64_t flat = 0;
  for_each_index(grid.full_box(), [&](std::span<const int> idx) {
    for (int k = 0; k < grid.dim_count(); ++k) {
      out << (k ? "," : "") << grid.coordinate(k, idx[k]);
    }
    for (int c = 0; c < field.component_count(); ++c) out << "," << field.value(c, flat);
    out << "\n";
    ++flat;
  });
}

Field read_field_csv(const std::string& path, const Grid& grid, int component_count) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("read_field_csv: cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("read_field_csv: empty file");
  Field field(grid, component_count);
  const int dim = grid.dim_count();
  std::int64_t flat = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (flat >= grid.point_count()) {
      throw std::invalid_argument("read_field_csv: more rows than lattice points");
    }
    std::istringstream row(line);
    std::string cell;
    for (int k = 0; k < dim; ++k) {
      if (!std::getline(row, cell, ',')) {
        throw std::invalid_argument("read_field_csv: short row");
      }
      // coordinates are checked loosely; the grid is the source of truth
      const double expect = grid.coordinate(k, [&] {
        std::vector<int> idx(dim);
        grid.unflatten(flat, idx);
        return idx[k];
      }());
      if (std::abs(std::stod(cell) - expect) > 1e-9 * (1.0 + std::abs(expect))) {
        throw std::invalid_argument("read_field_csv: coordinates do not match the grid");
      }
    }
    for (int c = 0; c < component_count; ++c) {
      if (!std::getline(row, cell, ',')) {
        throw std::invalid_argument("read_field_csv: short row");
      }
      field.value(c, flat) = std::stod(cell);
    }
    ++flat;
  }
  if (flat != grid.point_count()) {
    throw std::invalid_argument("read_field_csv: fewer rows than lattice points");
  }
  field.require_finite("read_field_csv");
  return field;
}

}  // namespace clcons
