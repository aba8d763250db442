#include "miselbo/rng.hpp"

#include <cmath>
#include <numbers>

namespace miselbo {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t& x) {
  x += kGolden;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RandomStream derive_stream(std::uint64_t root_seed, std::string_view stream_id) {
  std::uint64_t x = root_seed ^ (kGolden * fnv1a64(stream_id));
  std::array<std::uint64_t, 4> state{};
  for (auto& word : state) word = splitmix64(x);
  if (state[0] == 0 && state[1] == 0 && state[2] == 0 && state[3] == 0) state[0] = kGolden;
  return RandomStream(state);
}

std::string stream_path(std::initializer_list<std::string_view> segments) {
  std::string path;
  for (auto seg : segments) {
    if (seg.empty()) continue;
    if (!path.empty()) path += '/';
    path += seg;
  }
  return path;
}

std::uint64_t RandomStream::next_u64() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RandomStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // 1 - u avoids log(0); u2 spans the full angle.
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log1p(-u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::vector<double> RandomStream::normals(std::size_t n) {
  std::vector<double> out(n);
  for (auto& value : out) value = normal();
  return out;
}

}  // namespace miselbo
