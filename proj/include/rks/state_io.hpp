#pragma once

#include <filesystem>
#include <iosfwd>

#include "rks/states.hpp"

namespace rks {

// Binary state dump: "RKS1", N as uint32, lambda as float64, seed as uint64,
// then 2^N float64 amplitudes. All fields little-endian.
void write_state(std::ostream& out, const RkState& state);
RkState read_state(std::istream& in);

void save_state(const std::filesystem::path& path, const RkState& state);
RkState load_state(const std::filesystem::path& path);

}  // namespace rks
