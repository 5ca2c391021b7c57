#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "newsnet/errors.hpp"

namespace newsnet {

inline double mean_of(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

// Population variance (divide by n).
inline double variance_pop(std::span<const double> xs) {
  const double m = mean_of(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s / static_cast<double>(xs.size());
}

// Sample standard deviation (divide by n-1); 0 for n < 2.
inline double stddev_sample(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

// Linear interpolation between order statistics (the inclusive method):
// position h = q*(n-1) on the sorted sample.
inline double quantile(std::vector<double> sample, double q) {
  if (sample.empty()) throw ComputationError("quantile of empty sample");
  if (q < 0.0 || q > 1.0) throw ComputationError("quantile level outside [0,1]");
  std::sort(sample.begin(), sample.end());
  const double h = q * static_cast<double>(sample.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  const std::size_t hi = std::min(lo + 1, sample.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return sample[lo] + frac * (sample[hi] - sample[lo]);
}

inline double median_of(std::vector<double> sample) { return quantile(std::move(sample), 0.5); }

inline double iqr(const std::vector<double>& sample) {
  return quantile(sample, 0.75) - quantile(sample, 0.25);
}

// Upper tail of the standard normal.
inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

inline std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) return std::nullopt;
  const double mx = mean_of(x), my = mean_of(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

struct TestResult {
  double statistic = 0.0;  // U of the first sample
  double p_value = 1.0;
  enum class Method { exact, normal_approx } method = Method::exact;

  std::string method_name() const {
    return method == Method::exact ? "exact" : "normal-approx";
  }
};

namespace detail {

// Exact permutation distribution of 2*U over all assignments of the pooled
// multiset into groups of sizes n and m, with midrank tie handling. Counts fit
// a double exactly for the sizes we allow (C(40,20) < 2^53).
inline std::vector<double> mwu_exact_distribution(const std::vector<std::pair<double, int>>& groups,
                                                  std::size_t n, std::size_t m) {
  const std::size_t u2_max = 2 * n * m;
  // binomials up to the largest group size
  std::size_t cmax = 0;
  for (const auto& g : groups) cmax = std::max(cmax, static_cast<std::size_t>(g.second));
  std::vector<std::vector<double>> binom(cmax + 1, std::vector<double>(cmax + 1, 0.0));
  for (std::size_t i = 0; i <= cmax; ++i) {
    binom[i][0] = 1.0;
    for (std::size_t j = 1; j <= i; ++j)
      binom[i][j] = binom[i - 1][j - 1] + (j <= i - 1 ? binom[i - 1][j] : 0.0);
  }

  // dp[a][u2] = number of assignments of processed value groups with `a`
  // pooled observations labelled as first-sample and accumulated 2*U = u2.
  std::vector<std::vector<double>> dp(n + 1, std::vector<double>(u2_max + 1, 0.0));
  dp[0][0] = 1.0;
  std::size_t below = 0;  // total observations in earlier value groups
  for (const auto& [value, count] : groups) {
    (void)value;
    std::vector<std::vector<double>> next(n + 1, std::vector<double>(u2_max + 1, 0.0));
    for (std::size_t a = 0; a <= n; ++a) {
      for (std::size_t u2 = 0; u2 <= u2_max; ++u2) {
        const double ways = dp[a][u2];
        if (ways == 0.0) continue;
        const std::size_t amax = std::min<std::size_t>(count, n - a);
        for (std::size_t at = 0; at <= amax; ++at) {
          const std::size_t y_below = below - a;  // y's strictly smaller
          const std::size_t add =
              2 * at * y_below + at * (static_cast<std::size_t>(count) - at);
          next[a + at][u2 + add] += ways * binom[count][at];
        }
      }
    }
    dp.swap(next);
    below += static_cast<std::size_t>(count);
  }
  return dp[n];
}

}  // namespace detail

// Mann-Whitney U from rank sums with midrank ties. Exact p by enumerating the
// permutation distribution when n*m <= exact_threshold, otherwise a normal
// approximation with tie-corrected variance and continuity correction.
// One-sided tests the alternative "x tends larger than y".
inline TestResult mann_whitney_u(const std::vector<double>& x, const std::vector<double>& y,
                                 bool two_sided = true, std::size_t exact_threshold = 400) {
  if (x.empty() || y.empty()) throw ComputationError("mann_whitney_u: empty sample");
  const std::size_t n = x.size(), m = y.size(), N = n + m;

  std::vector<std::pair<double, int>> pooled;  // (value, 0=x 1=y)
  pooled.reserve(N);
  for (double v : x) pooled.emplace_back(v, 0);
  for (double v : y) pooled.emplace_back(v, 1);
  std::sort(pooled.begin(), pooled.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  // midranks; collect tie-group sizes as we go
  double rank_sum_x = 0.0;
  std::vector<std::pair<double, int>> groups;  // (value, pooled count)
  double tie_term = 0.0;                       // sum of t^3 - t
  std::size_t i = 0;
  while (i < N) {
    std::size_t j = i;
    while (j < N && pooled[j].first == pooled[i].first) ++j;
    const double t = static_cast<double>(j - i);
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (pooled[k].second == 0) rank_sum_x += midrank;
    groups.emplace_back(pooled[i].first, static_cast<int>(j - i));
    tie_term += t * t * t - t;
    i = j;
  }

  const double u_x = rank_sum_x - static_cast<double>(n) * (static_cast<double>(n) + 1.0) / 2.0;

  TestResult res;
  res.statistic = u_x;

  if (n * m <= exact_threshold) {
    res.method = TestResult::Method::exact;
    const auto dist = detail::mwu_exact_distribution(groups, n, m);
    const double total = std::accumulate(dist.begin(), dist.end(), 0.0);
    const long long u2_obs = std::llround(2.0 * u_x);
    double le = 0.0, ge = 0.0;
    for (std::size_t u2 = 0; u2 < dist.size(); ++u2) {
      if (static_cast<long long>(u2) <= u2_obs) le += dist[u2];
      if (static_cast<long long>(u2) >= u2_obs) ge += dist[u2];
    }
    if (two_sided)
      res.p_value = std::min(1.0, 2.0 * std::min(le, ge) / total);
    else
      res.p_value = ge / total;
    return res;
  }

  res.method = TestResult::Method::normal_approx;
  const double nm = static_cast<double>(n) * static_cast<double>(m);
  const double mu = nm / 2.0;
  const double Nd = static_cast<double>(N);
  const double var = nm / 12.0 * ((Nd + 1.0) - tie_term / (Nd * (Nd - 1.0)));
  if (var <= 0.0) {
    res.p_value = 1.0;  // every pooled value tied
    return res;
  }
  const double sd = std::sqrt(var);
  if (two_sided) {
    const double z = (std::abs(u_x - mu) - 0.5) / sd;
    res.p_value = std::clamp(2.0 * normal_sf(std::max(z, 0.0)), 0.0, 1.0);
  } else {
    const double z = (u_x - mu - 0.5) / sd;
    res.p_value = std::clamp(normal_sf(z), 0.0, 1.0);
  }
  return res;
}

struct DensityEstimate {
  std::vector<double> grid;
  std::vector<double> density;
  double bandwidth = 0.0;
  std::size_t n = 0;
};

// Gaussian-type kernel exp(-u^2) normalized by 1/(n h sqrt(pi)) so the
// estimate integrates to one.
inline DensityEstimate kde_evaluate(const std::vector<double>& sample,
                                    std::vector<double> grid, double bandwidth) {
  if (bandwidth <= 0.0) throw ComputationError("kde_evaluate: bandwidth must be positive");
  DensityEstimate out;
  out.bandwidth = bandwidth;
  out.n = sample.size();
  out.grid = std::move(grid);
  out.density.resize(out.grid.size(), 0.0);
  const double norm =
      1.0 / (static_cast<double>(sample.size()) * bandwidth * std::sqrt(M_PI));
  for (std::size_t j = 0; j < out.grid.size(); ++j) {
    double acc = 0.0;
    for (double xi : sample) {
      const double u = (out.grid[j] - xi) / bandwidth;
      acc += std::exp(-u * u);
    }
    out.density[j] = norm * acc;
  }
  return out;
}

// Scott's rule with a robust spread estimate; degenerate samples fall back to
// a small width proportional to the data magnitude.
inline double scott_bandwidth(const std::vector<double>& sample) {
  double spread = 0.0;
  if (sample.size() >= 2)
    spread = std::min(stddev_sample(sample), iqr(sample) / 1.349);
  if (spread > 0.0)
    return spread * std::pow(static_cast<double>(sample.size()), -0.2);
  double amax = 0.0;
  for (double x : sample) amax = std::max(amax, std::abs(x));
  return 1e-3 * std::max(amax, 1.0);
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<double>(i);
  return out;
}

inline double trapezoid(const std::vector<double>& xs, const std::vector<double>& ys) {
  double acc = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i)
    acc += 0.5 * (ys[i] + ys[i - 1]) * (xs[i] - xs[i - 1]);
  return acc;
}

}  // namespace newsnet
