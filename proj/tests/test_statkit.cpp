#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "newsnet/statkit.hpp"
#include "oracles.hpp"

using namespace newsnet;

TEST_CASE("quantile interpolates between order statistics", "[statkit]") {
  CHECK(quantile({1, 2, 3, 4}, 0.5) == Catch::Approx(2.5));
  CHECK(quantile({1, 2, 3, 4}, 0.0) == 1.0);
  CHECK(quantile({1, 2, 3, 4}, 1.0) == 4.0);
  CHECK(quantile({4, 1, 3, 2}, 0.25) == Catch::Approx(1.75));
  CHECK(quantile({7}, 0.3) == 7.0);
  CHECK(quantile({7}, 0.9) == 7.0);
  CHECK_THROWS_AS(quantile({}, 0.5), ComputationError);
}

TEST_CASE("quantile is monotone in q", "[statkit]") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0, 1);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> sample(1 + rep % 13);
    for (auto& v : sample) v = unit(rng);
    double prev = quantile(sample, 0.0);
    for (double q = 0.05; q <= 1.0; q += 0.05) {
      const double cur = quantile(sample, q);
      CHECK(cur >= prev - 1e-15);
      prev = cur;
    }
  }
}

TEST_CASE("iqr of constants is zero", "[statkit]") {
  CHECK(iqr({3, 3, 3, 3}) == 0.0);
  CHECK(iqr({1, 2, 3, 4}) == Catch::Approx(1.5));
}

TEST_CASE("mann-whitney exact small-sample values", "[statkit]") {
  // separated samples: U = 0, two-sided p = 1/3 over the 6 labelings
  auto res = mann_whitney_u({1, 2}, {3, 4});
  CHECK(res.method == TestResult::Method::exact);
  CHECK(res.statistic == 0.0);
  CHECK(res.p_value == Catch::Approx(1.0 / 3.0));

  // identical multisets: symmetric distribution, p = 1
  auto same = mann_whitney_u({1, 2, 3}, {1, 2, 3});
  CHECK(same.p_value == Catch::Approx(1.0));

  CHECK_THROWS_AS(mann_whitney_u({}, {1.0}), ComputationError);
  CHECK_THROWS_AS(mann_whitney_u({1.0}, {}), ComputationError);
}

TEST_CASE("mann-whitney exact matches enumeration for n,m <= 8", "[statkit][oracle]") {
  std::mt19937_64 rng(20240311);
  std::uniform_int_distribution<int> size(1, 8);
  std::uniform_int_distribution<int> value(0, 5);  // frequent ties
  for (int rep = 0; rep < 300; ++rep) {
    std::vector<double> x(size(rng)), y(size(rng));
    for (auto& v : x) v = value(rng);
    for (auto& v : y) v = value(rng);
    const auto res = mann_whitney_u(x, y);
    REQUIRE(res.method == TestResult::Method::exact);
    const double oracle = oracles::mwu_p_enumeration(x, y);
    INFO("n=" << x.size() << " m=" << y.size());
    CHECK(res.p_value == Catch::Approx(oracle).margin(1e-12));
  }
}

TEST_CASE("mann-whitney is invariant under monotone transforms", "[statkit][property]") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> size(2, 8);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> x(size(rng)), y(size(rng));
    for (auto& v : x) v = gauss(rng);
    for (auto& v : y) v = gauss(rng);
    const auto base = mann_whitney_u(x, y);
    auto tx = x, ty = y;
    for (auto& v : tx) v = std::exp(v) + 3.0;
    for (auto& v : ty) v = std::exp(v) + 3.0;
    const auto mapped = mann_whitney_u(tx, ty);
    CHECK(base.p_value == Catch::Approx(mapped.p_value).margin(1e-14));
    CHECK(base.statistic == Catch::Approx(mapped.statistic).margin(1e-10));
  }
}

TEST_CASE("mann-whitney normal approximation on large shifted samples", "[statkit]") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> x(200), y(200);
  for (auto& v : x) v = gauss(rng);
  for (auto& v : y) v = gauss(rng) + 3.0;
  const auto res = mann_whitney_u(x, y);
  CHECK(res.method == TestResult::Method::normal_approx);
  CHECK(res.p_value < 1e-10);
}

TEST_CASE("mann-whitney approximation tracks the exact tail", "[statkit][oracle]") {
  // same data through both paths by toggling the threshold
  std::mt19937_64 rng(17);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> x(14), y(14);
    for (auto& v : x) v = gauss(rng);
    for (auto& v : y) v = gauss(rng) + 0.7;
    const auto exact = mann_whitney_u(x, y, true, 400);
    const auto approx = mann_whitney_u(x, y, true, 0);
    REQUIRE(exact.method == TestResult::Method::exact);
    REQUIRE(approx.method == TestResult::Method::normal_approx);
    CHECK(approx.p_value == Catch::Approx(exact.p_value).margin(0.02));
  }
}

TEST_CASE("kde single point evaluates to the kernel peak", "[statkit]") {
  const double h = 0.37;
  auto est = kde_evaluate({2.0}, {2.0}, h);
  CHECK(est.density[0] == Catch::Approx(1.0 / (h * std::sqrt(M_PI))).epsilon(1e-12));
  CHECK_THROWS_AS(kde_evaluate({1.0}, {1.0}, 0.0), ComputationError);
}

TEST_CASE("kde is symmetric for a symmetric sample", "[statkit]") {
  auto grid = linspace(-3.0, 3.0, 301);
  auto est = kde_evaluate({-1.0, 1.0}, grid, 0.4);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const std::size_t mirror = grid.size() - 1 - i;
    CHECK(est.density[i] == Catch::Approx(est.density[mirror]).margin(1e-12));
  }
}

TEST_CASE("kde integrates to one on a wide grid", "[statkit][oracle]") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> sample(10 + 17 * rep);
    for (auto& v : sample) v = gauss(rng);
    const double h = scott_bandwidth(sample);
    const auto [mn, mx] = std::minmax_element(sample.begin(), sample.end());
    auto est = kde_evaluate(sample, linspace(*mn - 6 * h, *mx + 6 * h, 801), h);
    CHECK(trapezoid(est.grid, est.density) == Catch::Approx(1.0).margin(0.01));
  }
}

TEST_CASE("kde is translation equivariant", "[statkit][property]") {
  std::vector<double> sample = {0.1, 0.5, 0.9, 1.4};
  auto grid = linspace(-1.0, 3.0, 101);
  auto base = kde_evaluate(sample, grid, 0.3);
  const double c = 11.25;
  std::vector<double> shifted_sample, shifted_grid;
  for (double v : sample) shifted_sample.push_back(v + c);
  for (double v : grid) shifted_grid.push_back(v + c);
  auto shifted = kde_evaluate(shifted_sample, shifted_grid, 0.3);
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(base.density[i] == Catch::Approx(shifted.density[i]).margin(1e-12));
}

TEST_CASE("scott bandwidth falls back on degenerate spread", "[statkit]") {
  CHECK(scott_bandwidth({5.0, 5.0, 5.0}) == Catch::Approx(5e-3));
  CHECK(scott_bandwidth({0.0}) == Catch::Approx(1e-3));
  CHECK(scott_bandwidth({1.0, 2.0, 3.0, 4.0, 5.0}) > 0.0);
}
