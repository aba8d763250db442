#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace miselbo {

// Identifies one random stream: a root seed plus a stable textual label.
// Streams are keyed by label, not by position, so reordering ensemble
// members never changes which samples a member receives.
struct SeedSpec {
  std::uint64_t root_seed = 0;
  std::string stream_id;
};

// Deterministic pseudo-random stream.
//
// Generator (fixed per release): xoshiro256**, state derived from
// (root_seed, stream_id) by seeding splitmix64 with
// root_seed ^ (0x9E3779B97F4A7C15 * fnv1a64(stream_id)).
// Normals use the trigonometric Box-Muller transform with a cached
// spare, consuming exactly two uniforms per pair.
class RandomStream {
 public:
  std::uint64_t next_u64();

  // Uniform on [0, 1), 53-bit resolution.
  double uniform();

  // One standard-normal draw.
  double normal();

  // n i.i.d. standard-normal draws; n = 0 gives an empty vector.
  std::vector<double> normals(std::size_t n);

  friend RandomStream derive_stream(std::uint64_t root_seed, std::string_view stream_id);

 private:
  explicit RandomStream(std::array<std::uint64_t, 4> state) : state_(state) {}

  std::array<std::uint64_t, 4> state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Pure function of its inputs: equal (root_seed, stream_id) pairs give
// byte-identical streams, distinct pairs give unrelated streams.
RandomStream derive_stream(std::uint64_t root_seed, std::string_view stream_id);

inline RandomStream derive_stream(const SeedSpec& spec) {
  return derive_stream(spec.root_seed, spec.stream_id);
}

// Joins stream-id path segments with '/', skipping empty ones.
std::string stream_path(std::initializer_list<std::string_view> segments);

inline std::vector<double> standard_normal(RandomStream& stream, std::size_t n) {
  return stream.normals(n);
}

}  // namespace miselbo
