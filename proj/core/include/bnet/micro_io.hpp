#pragma once

#include <filesystem>
#include <string>

#include "bnet/csv.hpp"
#include "bnet/model.hpp"

namespace bnet {

inline constexpr std::uint32_t kMicroDumpVersion = 1;

/// Binary dump, little-endian:
///   "BNET" | version u32 | n u32 | reserved u32 (zero)   16-byte header
///   t f64 | u_e[n] f64 | u_i[n] f64
/// The state must be synced.
std::string encode_micro(const MicroState& state);
MicroState decode_micro(std::string_view bytes);

void write_micro(const std::filesystem::path& path, const MicroState& state);
MicroState read_micro(const std::filesystem::path& path);

}  // namespace bnet
