#include <doctest.h>

#include <cmath>
#include <numbers>

#include "miselbo/errors.hpp"
#include "miselbo/rng.hpp"
#include "miselbo/targets.hpp"
#include "support/oracles.hpp"

using namespace miselbo;

namespace {

// Direct two-component arithmetic, no log-sum-exp.
double iii_reference(double z) {
  return std::log(0.5 * oracles::normal_pdf(z, 0.0, 2.0) + 0.5 * oracles::normal_pdf(z, 10.0, 4.0));
}

}  // namespace

TEST_CASE("setting iii matches plugged-in mixture arithmetic") {
  const Target t = make_setting("iii");
  CHECK(t.log_density(std::vector<double>{0.0}) == doctest::Approx(iii_reference(0.0)).epsilon(1e-12));
  CHECK(t.log_density(std::vector<double>{10.0}) == doctest::Approx(iii_reference(10.0)).epsilon(1e-12));
  CHECK(t.log_normalizer() == 0.0);
}

TEST_CASE("setting i is symmetric about 7.5") {
  const Target t = make_setting("i");
  const double delta = 1.3;
  const double left = t.log_density(std::vector<double>{7.5 - delta});
  const double right = t.log_density(std::vector<double>{7.5 + delta});
  CHECK(left == doctest::Approx(right).epsilon(1e-12));
}

TEST_CASE("p1 forms agree with an independent re-evaluation") {
  const Target p1 = make_setting("p1");
  const std::vector<double> z = {2.0, 0.0};
  // Re-derive the formula from scratch.
  const double r = std::hypot(z[0], z[1]);
  const double expected =
      -0.5 * std::pow((r - 2.0) / 0.4, 2) -
      (std::exp(-(z[0] - 2.0) / 1.2) + std::exp(-(z[0] + 2.0) / 1.2));
  CHECK(p1.log_density(z) == doctest::Approx(expected).epsilon(1e-12));

  const Target p1s = make_setting("p1-squared");
  const double wells = std::log(std::exp(-0.5 * std::pow((z[0] - 2.0) / 0.6, 2)) +
                                std::exp(-0.5 * std::pow((z[0] + 2.0) / 0.6, 2)));
  CHECK(p1s.log_density(z) == doctest::Approx(-0.0 + wells).epsilon(1e-12));
}

TEST_CASE("p2 vanishes on the ridge") {
  const Target p2 = make_setting("p2");
  // w(1) = sin(pi/2) = 1, so (1, 1) has zero exponent.
  CHECK(p2.log_density(std::vector<double>{1.0, 1.0}) == doctest::Approx(0.0).epsilon(1e-14));
  const Target p2s = make_setting("p2-squared");
  CHECK(p2s.log_density(std::vector<double>{1.0, 1.0}) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("hierarchical joint factorizes") {
  const Target joint = make_setting("hierarchical");
  const Target pz = make_setting("i");
  const double z = 4.2, mu = 8.0;
  const double expected = pz.log_density(std::vector<double>{z}) +
                          std::log(oracles::normal_pdf(mu, 10.0, 3.0));
  CHECK(joint.log_density(std::vector<double>{z, mu}) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("unknown ids raise a configuration error naming the valid ids") {
  CHECK_THROWS_AS(make_setting("nope"), ConfigError);
  try {
    make_setting("nope");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("iii") != std::string::npos);
    CHECK(msg.find("hierarchical") != std::string::npos);
  }
}

TEST_CASE("dimension mismatch raises a usage error") {
  const Target t = make_setting("p1");
  CHECK_THROWS_AS(t.log_density(std::vector<double>{1.0}), UsageError);
}

TEST_CASE("mixture spec validation") {
  GaussianMixtureSpec bad;
  bad.weights = {0.7, 0.7};
  bad.means = {{0.0}, {1.0}};
  bad.sigmas = {1.0, 1.0};
  CHECK_THROWS_AS(make_gaussian_mixture(bad), ConfigError);
  bad.weights = {0.5, 0.5};
  bad.sigmas = {1.0, -1.0};
  CHECK_THROWS_AS(make_gaussian_mixture(bad), ConfigError);
}

TEST_CASE("built-in mixtures integrate to one") {
  for (const char* id : {"i", "ii", "iii"}) {
    const Target t = make_setting(id);
    const double mass = oracles::simpson(
        [&](double z) { return std::exp(t.log_density(std::vector<double>{z})); }, -60.0, 80.0,
        60000);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("mixture log-density stays finite far from every component") {
  const Target t = make_setting("i");
  for (double z : {1e3, 1e6, -1e6}) {
    const double v = t.log_density(std::vector<double>{z});
    CHECK(std::isfinite(v));
    CHECK(v < -1e4);
  }
}

TEST_CASE("analytic gradients match central finite differences") {
  auto stream = derive_stream(5, "target-grad");
  for (const char* id : {"i", "ii", "iii", "hierarchical", "p1", "p1-squared", "p2", "p2-squared"}) {
    const Target t = make_setting(id);
    REQUIRE(t.has_analytic_gradient());
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> z(t.dim());
      for (auto& v : z) v = 6.0 * stream.uniform() - 3.0;
      if (std::string(id) == "hierarchical") z[1] += 10.0;
      std::vector<double> grad(t.dim());
      t.analytic_gradient(z, grad);
      const double h = 1e-6;
      for (std::size_t j = 0; j < z.size(); ++j) {
        std::vector<double> up = z, down = z;
        up[j] += h;
        down[j] -= h;
        const double fd = (t.log_density(up) - t.log_density(down)) / (2.0 * h);
        CHECK(grad[j] == doctest::Approx(fd).epsilon(5e-5));
      }
    }
  }
}
