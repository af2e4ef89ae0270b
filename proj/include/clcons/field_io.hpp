#pragma once

#include <string>

#include "clcons/field.hpp"

namespace clcons {

/// ".clf" field files: line 1 is a JSON header
///   {"format_version":1,"points_per_axis":[...],"extent_per_axis":[...],
///    "periodic_per_axis":[...],"component_count":n,"dtype":"f64le"}
/// terminated by a newline, followed by the raw little-endian f64 payload in
/// storage order (row-major grid points, component index fastest).
void write_field_clf(const Field& field, const std::string& path, bool force = false);
Field read_field_clf(const std::string& path);

/// CSV for small fields: header row "x0,...,xd,u0,...,u{n-1}", one row per
/// lattice point in storage order.
void write_field_csv(const Field& field, const std::string& path, bool force = false);
Field read_field_csv(const std::string& path, const Grid& grid, int component_count);

}  // namespace clcons
