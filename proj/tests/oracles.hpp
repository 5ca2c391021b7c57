// Test-only oracles: independent routes used to verify library results.
// These deliberately avoid the library implementations they check.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "newsnet/community.hpp"
#include "newsnet/corpus.hpp"
#include "newsnet/network.hpp"

namespace oracles {

// Modularity evaluated directly as the ordered-pair sum
//   (1/2m) sum_ij [A_ij - gamma k_i k_j / 2m] delta(c_i, c_j),
// diagonal terms included (A_ii = 0 on these graphs).
inline double modularity_brute(const newsnet::Network& g, const newsnet::Partition& p,
                               double resolution = 1.0) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (const auto& [key, w] : g.edges) {
    a[key.first][key.second] = w;
    a[key.second][key.first] = w;
  }
  std::vector<double> k(n, 0.0);
  double two_m = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      k[i] += a[i][j];
      two_m += a[i][j];
    }
  double q = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (p.groups[i] == p.groups[j]) q += a[i][j] - resolution * k[i] * k[j] / two_m;
  return q / two_m;
}

// Exhaustive search for the maximum-modularity partition via restricted
// growth strings. Only feasible for small n (Bell(8) = 4140).
inline std::pair<newsnet::Partition, double> best_partition_exhaustive(const newsnet::Network& g,
                                                                       double resolution = 1.0) {
  const std::size_t n = g.node_count();
  std::vector<int> rgs(n, 0);
  newsnet::Partition best;
  double best_q = -1e30;

  auto consider = [&]() {
    auto p = newsnet::canonical_partition(rgs);
    const double q = modularity_brute(g, p, resolution);
    if (q > best_q) {
      best_q = q;
      best = p;
    }
  };

  // enumerate restricted growth strings
  std::vector<int> maxv(n, 0);
  std::size_t i = 1;
  consider();
  if (n <= 1) return {best, best_q};
  while (true) {
    if (i == n) {
      consider();
      // backtrack
      while (i > 1 && rgs[i - 1] == maxv[i - 1] + 1) rgs[--i] = 0;
      if (i == 1) break;
      ++rgs[i - 1];
      maxv[i] = std::max(maxv[i - 1], rgs[i - 1]);
      continue;
    }
    rgs[i] = 0;
    maxv[i] = std::max(maxv[i - 1], rgs[i - 1]);
    ++i;
  }
  return {best, best_q};
}

// Dense symmetric eigensolver on the weighted adjacency (Eigen).
struct EigenResult {
  double lambda_max = 0.0;
  std::vector<double> vec;  // unit norm, entries of the dominant eigenvector
};

inline EigenResult dominant_eigenpair(const newsnet::Network& g) {
  const std::size_t n = g.node_count();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<long>(n), static_cast<long>(n));
  for (const auto& [key, w] : g.edges) {
    a(static_cast<long>(key.first), static_cast<long>(key.second)) = w;
    a(static_cast<long>(key.second), static_cast<long>(key.first)) = w;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  EigenResult out;
  const long last = static_cast<long>(n) - 1;
  out.lambda_max = solver.eigenvalues()(last);
  out.vec.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.vec[i] = solver.eigenvectors()(static_cast<long>(i), last);
  return out;
}

inline std::vector<double> correlation_eigenvalues(const std::vector<std::vector<double>>& corr) {
  const long n = static_cast<long>(corr.size());
  Eigen::MatrixXd m(n, n);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) m(i, j) = corr[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = solver.eigenvalues()(n - 1 - i);
  return out;
}

// Betweenness by enumerating every simple path between every pair and
// crediting intermediates of the shortest ones. Exponential, fine for n <= 8.
inline std::vector<double> betweenness_brute(const newsnet::Network& g) {
  const std::size_t n = g.node_count();
  std::vector<double> bc(n, 0.0);
  if (n < 3) return bc;
  auto adj = g.adjacency();

  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = s + 1; t < n; ++t) {
      // collect all simple paths s -> t with their lengths
      std::vector<std::pair<double, std::vector<std::size_t>>> paths;
      std::vector<std::size_t> stack{s};
      std::vector<bool> used(n, false);
      used[s] = true;

      std::function<void(std::size_t, double)> dfs = [&](std::size_t u, double len) {
        if (u == t) {
          paths.emplace_back(len, stack);
          return;
        }
        for (const auto& [v, w] : adj[u]) {
          if (used[v]) continue;
          used[v] = true;
          stack.push_back(v);
          dfs(v, len + 1.0 / w);
          stack.pop_back();
          used[v] = false;
        }
      };
      dfs(s, 0.0);
      if (paths.empty()) continue;

      double dmin = 1e300;
      for (const auto& [len, path] : paths) dmin = std::min(dmin, len);
      auto is_min = [&](double len) {
        return std::abs(len - dmin) <= 1e-12 * std::max(1.0, std::abs(dmin));
      };
      double count = 0.0;
      for (const auto& [len, path] : paths)
        if (is_min(len)) count += 1.0;
      for (const auto& [len, path] : paths) {
        if (!is_min(len)) continue;
        for (std::size_t idx = 1; idx + 1 < path.size(); ++idx) bc[path[idx]] += 1.0 / count;
      }
    }
  }
  const double norm = static_cast<double>(n - 1) * static_cast<double>(n - 2) / 2.0;
  for (auto& v : bc) v /= norm;
  return bc;
}

// Exact Mann-Whitney two-sided p by enumerating every n-subset of the pooled
// sample (midrank ties). Feasible for n, m <= 8.
inline double mwu_p_enumeration(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> pooled(x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());
  const std::size_t N = pooled.size(), n = x.size();

  std::vector<double> ranks(N);
  {
    std::vector<std::size_t> order(N);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
    std::size_t i = 0;
    while (i < N) {
      std::size_t j = i;
      while (j < N && pooled[order[j]] == pooled[order[i]]) ++j;
      const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
      for (std::size_t k = i; k < j; ++k) ranks[order[k]] = midrank;
      i = j;
    }
  }

  auto u_of = [&](const std::vector<std::size_t>& subset) {
    double rank_sum = 0.0;
    for (auto idx : subset) rank_sum += ranks[idx];
    return rank_sum - static_cast<double>(n) * (static_cast<double>(n) + 1.0) / 2.0;
  };

  std::vector<std::size_t> obs(n);
  std::iota(obs.begin(), obs.end(), 0);
  const double u_obs = u_of(obs);

  std::size_t le = 0, ge = 0, total = 0;
  std::vector<std::size_t> subset(n);
  std::function<void(std::size_t, std::size_t)> choose = [&](std::size_t start, std::size_t k) {
    if (k == n) {
      const double u = u_of(subset);
      ++total;
      if (u <= u_obs + 1e-9) ++le;
      if (u >= u_obs - 1e-9) ++ge;
      return;
    }
    for (std::size_t v = start; v < N; ++v) {
      subset[k] = v;
      choose(v + 1, k + 1);
    }
  };
  choose(0, 0);
  return std::min(1.0, 2.0 * std::min(static_cast<double>(le), static_cast<double>(ge)) /
                           static_cast<double>(total));
}

// Random weighted graph over n nodes; edge probability p, weights in (0, 1].
inline newsnet::Network random_graph(std::mt19937_64& rng, std::size_t n, double p) {
  newsnet::Network g;
  for (std::size_t i = 0; i < n; ++i) g.nodes.push_back("N" + std::to_string(i));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (unit(rng) < p) g.edges[{i, j}] = 0.05 + 0.95 * unit(rng);
  return g;
}

// Coverage matrix with three planted blocks: members of an article's block
// are mentioned with probability p_in, everyone else with p_cross.
struct PlantedCoverage {
  newsnet::CoverageMatrix matrix;
  std::vector<int> labels;
};

inline PlantedCoverage planted_blocks(std::mt19937_64& rng, std::size_t tickers_per_block,
                                      std::size_t blocks, std::size_t articles, double p_in,
                                      double p_cross) {
  PlantedCoverage out;
  const std::size_t n = tickers_per_block * blocks;
  for (std::size_t i = 0; i < n; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "T%03zu", i);
    out.matrix.companies.push_back(buf);
    out.labels.push_back(static_cast<int>(i / tickers_per_block));
  }
  out.matrix.counts.assign(n, {});
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, blocks - 1);
  for (std::size_t a = 0; a < articles; ++a) {
    const std::size_t block = pick(rng);
    std::vector<int> col(n, 0);
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
      const double p = out.labels[i] == static_cast<int>(block) ? p_in : p_cross;
      if (unit(rng) < p) {
        col[i] = 1;
        any = true;
      }
    }
    if (!any) continue;
    for (std::size_t i = 0; i < n; ++i) out.matrix.counts[i].push_back(col[i]);
    out.matrix.article_ids.push_back("A" + std::to_string(a));
  }
  return out;
}

}  // namespace oracles
