#pragma once

#include <iosfwd>
#include <string>

#include "fairal/params.hpp"

namespace fairal {

/// Flat binary parameter snapshot.
///
/// Layout (all integers little-endian uint32, floats little-endian IEEE 754
/// binary64):
///   magic "FALW1" (5 bytes)
///   u32 parameter count
///   per parameter: u32 name length, name bytes, u32 rank, u32 dims[rank],
///                  f64 values[product(dims)] in row-major order
///
/// Only values are stored; gradients and momentum reset to zero on load.
void save_snapshot(const ParameterSet& params, std::ostream& out);
void save_snapshot_file(const ParameterSet& params, const std::string& path);

/// Reads a snapshot into a fresh ParameterSet. Throws IoError on truncated
/// or mis-tagged input.
ParameterSet load_snapshot(std::istream& in);
ParameterSet load_snapshot_file(const std::string& path);

}  // namespace fairal
