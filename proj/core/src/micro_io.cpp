#include "bnet/micro_io.hpp"

#include <fmt/format.h>

#include <bit>
#include <cstring>
#include <limits>
#include <stdexcept>

namespace bnet {

namespace {

template <class U>
void put(std::string& out, U value) {
  static_assert(std::is_unsigned_v<U>);
  for (std::size_t b = 0; b < sizeof(U); ++b) {
    out += static_cast<char>((value >> (8 * b)) & 0xFF);
  }
}

template <class U>
U take(std::string_view bytes, std::size_t& pos) {
  if (pos + sizeof(U) > bytes.size()) throw IoError("micro dump truncated");
  U value = 0;
  for (std::size_t b = 0; b < sizeof(U); ++b) {
    value |= static_cast<U>(static_cast<unsigned char>(bytes[pos + b])) << (8 * b);
  }
  pos += sizeof(U);
  return value;
}

}  // namespace

std::string encode_micro(const MicroState& state) {
  if (!state.synced()) throw std::invalid_argument("encode_micro: state not synced");
  if (state.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw std::invalid_argument("encode_micro: too many neurons");
  }
  std::string out;
  out.reserve(24 + 16 * state.size());
  out += "BNET";
  put(out, kMicroDumpVersion);
  put(out, static_cast<std::uint32_t>(state.size()));
  put(out, std::uint32_t{0});
  put(out, std::bit_cast<std::uint64_t>(state.t));
  for (const double x : state.u_e) put(out, std::bit_cast<std::uint64_t>(x));
  for (const double x : state.u_i) put(out, std::bit_cast<std::uint64_t>(x));
  return out;
}

MicroState decode_micro(std::string_view bytes) {
  if (bytes.size() < 4 || bytes.substr(0, 4) != "BNET") throw IoError("not a micro dump");
  std::size_t pos = 4;
  const auto version = take<std::uint32_t>(bytes, pos);
  if (version != kMicroDumpVersion) {
    throw IoError(fmt::format("unsupported micro dump version {}", version));
  }
  const auto n = take<std::uint32_t>(bytes, pos);
  take<std::uint32_t>(bytes, pos);
  const double t = std::bit_cast<double>(take<std::uint64_t>(bytes, pos));
  if (bytes.size() != pos + 16ULL * n) throw IoError("micro dump size does not match header");
  std::vector<double> ue(n);
  std::vector<double> ui(n);
  for (auto& x : ue) x = std::bit_cast<double>(take<std::uint64_t>(bytes, pos));
  for (auto& x : ui) x = std::bit_cast<double>(take<std::uint64_t>(bytes, pos));
  return MicroState(std::move(ue), std::move(ui), t);
}

void write_micro(const std::filesystem::path& path, const MicroState& state) {
  write_file(path, encode_micro(state));
}

MicroState read_micro(const std::filesystem::path& path) { return decode_micro(read_file(path)); }

}  // namespace bnet
