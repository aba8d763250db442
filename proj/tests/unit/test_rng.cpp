#include <doctest.h>

#include <cmath>

#include "miselbo/rng.hpp"

using namespace miselbo;

TEST_CASE("identical seed and stream id give byte-identical sequences") {
  auto a = derive_stream(0, "member-a");
  auto b = derive_stream(0, "member-a");
  for (int i = 0; i < 64; ++i) CHECK(a.next_u64() == b.next_u64());

  auto c = derive_stream(0, "member-a");
  auto d = derive_stream(0, "member-a");
  const auto xs = c.normals(32);
  const auto ys = d.normals(32);
  for (int i = 0; i < 32; ++i) CHECK(xs[i] == ys[i]);
}

TEST_CASE("distinct stream ids and distinct roots give distinct streams") {
  auto a = derive_stream(0, "member-a");
  auto b = derive_stream(0, "member-b");
  bool differs = false;
  for (int i = 0; i < 16 && !differs; ++i) differs = a.next_u64() != b.next_u64();
  CHECK(differs);

  auto c = derive_stream(0, "member-a");
  auto d = derive_stream(1, "member-a");
  differs = false;
  for (int i = 0; i < 16 && !differs; ++i) differs = c.next_u64() != d.next_u64();
  CHECK(differs);
}

TEST_CASE("standard normal moments at a million draws") {
  auto stream = derive_stream(0, "moments");
  const auto xs = stream.normals(1'000'000);
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  CHECK(std::abs(mean) < 4.0 / std::sqrt(1e6));

  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(xs.size() - 1);
  CHECK(std::abs(var - 1.0) < 0.01);
}

TEST_CASE("normal draw counts and edge sizes") {
  auto stream = derive_stream(3, "edge");
  const auto one = stream.normals(1);
  REQUIRE(one.size() == 1);
  CHECK(std::isfinite(one[0]));
  CHECK(stream.normals(0).empty());
}

TEST_CASE("uniform lives in [0, 1)") {
  auto stream = derive_stream(11, "uniform");
  for (int i = 0; i < 10000; ++i) {
    const double u = stream.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("streams are empirically uncorrelated") {
  auto a = derive_stream(0, "corr-a");
  auto b = derive_stream(0, "corr-b");
  const auto xs = a.normals(100'000);
  const auto ys = b.normals(100'000);
  double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxy += xs[i] * ys[i];
    sxx += xs[i] * xs[i];
    syy += ys[i] * ys[i];
  }
  const double corr =
      (sxy - sx * sy / n) / std::sqrt((sxx - sx * sx / n) * (syy - sy * sy / n));
  CHECK(std::abs(corr) < 0.01);
}

TEST_CASE("stream_path joins nonempty segments") {
  CHECK(stream_path({"a", "b", "c"}) == "a/b/c");
  CHECK(stream_path({"", "b", ""}) == "b");
  CHECK(stream_path({}) == "");
}
