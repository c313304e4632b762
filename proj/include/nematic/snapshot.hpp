#pragma once

#include <filesystem>
#include <iosfwd>

#include "nematic/state.hpp"

namespace nematic {

/// Snapshot layout: one line of UTF-8 JSON (dim, cells, length, boundary,
/// time, step, d_star, field list with element counts) terminated by '\n',
/// then every listed field as little-endian IEEE-754 doubles in list order.
/// Fields: rho, u0..u{dim-1} (face layout), p, d0, d1, d2.
void write_snapshot(std::ostream& out, const FlowState& s);
void write_snapshot(const std::filesystem::path& path, const FlowState& s);

FlowState read_snapshot(std::istream& in);
FlowState read_snapshot(const std::filesystem::path& path);

} // namespace nematic
