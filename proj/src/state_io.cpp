#include "rks/state_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "rks/error.hpp"

namespace rks {

namespace {

constexpr std::array<char, 4> kMagic{'R', 'K', 'S', '1'};

template <class T>
void put_le(std::ostream& out, T value) {
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  U bits = std::bit_cast<U>(value);
  std::array<char, sizeof(T)> buf;
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(buf.data(), buf.size());
}

template <class T>
T get_le(std::istream& in) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  std::array<unsigned char, sizeof(T)> buf;
  if (!in.read(reinterpret_cast<char*>(buf.data()), buf.size())) throw IoError("truncated RKS1 stream");
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(buf[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

}  // namespace

void write_state(std::ostream& out, const RkState& state) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(state.n_qubits));
  put_le<double>(out, state.lambda);
  put_le<std::uint64_t>(out, state.realization_seed);
  for (double a : state.amplitudes) put_le<double>(out, a);
  if (!out) throw IoError("failed writing RKS1 stream");
}

RkState read_state(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw IoError("not an RKS1 stream (bad magic)");
  RkState s;
  const auto n = get_le<std::uint32_t>(in);
  if (n < 1 || n > 30) throw IoError("RKS1 header has invalid qubit count " + std::to_string(n));
  s.n_qubits = static_cast<int>(n);
  s.lambda = get_le<double>(in);
  s.realization_seed = get_le<std::uint64_t>(in);
  s.amplitudes.resize(std::size_t{1} << n);
  for (auto& a : s.amplitudes) a = get_le<double>(in);
  return s;
}

void save_state(const std::filesystem::path& path, const RkState& state) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_state(out, state);
}

RkState load_state(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_state(in);
}

}  // namespace rks
