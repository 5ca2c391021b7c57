#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "newsnet/corpus.hpp"
#include "newsnet/date.hpp"
#include "newsnet/errors.hpp"
#include "newsnet/statkit.hpp"

namespace newsnet {

// Weighted undirected graph over companies. Edges are keyed by node-index
// pairs (i < j); zero-weight pairs are never stored.
struct Network {
  std::vector<std::string> nodes;
  std::map<std::pair<std::size_t, std::size_t>, double> edges;
  DateRange window;

  std::size_t node_count() const { return nodes.size(); }
  std::size_t edge_count() const { return edges.size(); }

  std::optional<std::size_t> node_index(const std::string& ticker) const {
    auto it = std::find(nodes.begin(), nodes.end(), ticker);
    if (it == nodes.end()) return std::nullopt;
    return static_cast<std::size_t>(it - nodes.begin());
  }

  std::vector<std::vector<std::pair<std::size_t, double>>> adjacency() const {
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(nodes.size());
    for (const auto& [key, w] : edges) {
      adj[key.first].emplace_back(key.second, w);
      adj[key.second].emplace_back(key.first, w);
    }
    return adj;
  }
};

// Cosine similarity of coverage rows; all-zero rows yield no incident edges.
inline Network build_network(const CoverageMatrix& m) {
  if (m.companies.size() < 2)
    throw ValidationError("build_network: need at least two companies");

  Network g;
  g.nodes = m.companies;
  g.window = m.window;

  const std::size_t n = m.companies.size();
  std::vector<double> norms(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (int v : m.counts[i]) s += static_cast<double>(v) * static_cast<double>(v);
    norms[i] = std::sqrt(s);
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (norms[i] == 0.0) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (norms[j] == 0.0) continue;
      double dot = 0.0;
      for (std::size_t k = 0; k < m.counts[i].size(); ++k)
        dot += static_cast<double>(m.counts[i][k]) * static_cast<double>(m.counts[j][k]);
      if (dot <= 0.0) continue;
      const double w = std::clamp(dot / (norms[i] * norms[j]), 0.0, 1.0);
      if (w > 0.0) g.edges[{i, j}] = w;
    }
  }
  return g;
}

// Network over the trading-day window [end_day - lookback, end_day).
inline Network dynamic_network(const Corpus& corpus, const std::vector<std::string>& tickers,
                               Date end_day, int lookback, const Calendar& trading_calendar,
                               CoverageMode mode = CoverageMode::kMentionCount) {
  auto idx = trading_calendar.index_of(end_day);
  if (!idx) throw InsufficientWindowError("dynamic_network: " + end_day.str() +
                                          " is not a trading day");
  if (static_cast<int>(*idx) < lookback)
    throw InsufficientWindowError("dynamic_network: fewer than " + std::to_string(lookback) +
                                  " trading days before " + end_day.str());
  const Date start = trading_calendar[*idx - static_cast<std::size_t>(lookback)];
  return build_network(build_coverage_matrix(corpus, tickers, {start, end_day}, mode));
}

struct NetworkStats {
  double avg_degree = 0.0;
  double clustering_coefficient = 0.0;
  std::optional<double> avg_path_length;  // absent for an edgeless graph
};

// Degree and clustering on the unweighted skeleton; path length averaged over
// connected pairs only.
inline NetworkStats network_stats(const Network& g) {
  NetworkStats st;
  const std::size_t n = g.node_count();
  if (n == 0) return st;

  auto adj = g.adjacency();
  std::vector<std::set<std::size_t>> nbr(n);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& [j, w] : adj[i]) {
      (void)w;
      nbr[i].insert(j);
    }

  double degree_sum = 0.0;
  double local_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t d = nbr[i].size();
    degree_sum += static_cast<double>(d);
    if (d < 2) continue;
    std::size_t links = 0;
    for (auto a : nbr[i])
      for (auto b : nbr[i])
        if (a < b && nbr[a].count(b)) ++links;
    local_sum += 2.0 * static_cast<double>(links) / (static_cast<double>(d) * (static_cast<double>(d) - 1.0));
  }
  st.avg_degree = degree_sum / static_cast<double>(n);
  st.clustering_coefficient = local_sum / static_cast<double>(n);

  // unweighted BFS from every node; sum distances over connected pairs
  double dist_sum = 0.0;
  std::size_t pair_count = 0;
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<int> dist(n, -1);
    std::deque<std::size_t> q{s};
    dist[s] = 0;
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop_front();
      for (auto v : nbr[u])
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          q.push_back(v);
        }
    }
    for (std::size_t t = s + 1; t < n; ++t)
      if (dist[t] > 0) {
        dist_sum += dist[t];
        ++pair_count;
      }
  }
  if (pair_count > 0) st.avg_path_length = dist_sum / static_cast<double>(pair_count);
  return st;
}

// Dominant eigenvector of the weighted adjacency matrix by power iteration
// from the uniform vector, normalized to unit Euclidean norm. The iteration
// runs on A + sigma*I (same eigenvectors) so bipartite-like spectra cannot
// oscillate; degenerate eigenspaces inherit the symmetric fixed point.
inline std::vector<double> eigenvector_centrality(const Network& g, double tol = 1e-10,
                                                  int max_iter = 10000) {
  const std::size_t n = g.node_count();
  if (g.edge_count() == 0)
    throw ComputationError("eigenvector_centrality: graph has no edges");
  auto adj = g.adjacency();

  double sigma = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (const auto& [j, w] : adj[i]) {
      (void)j;
      s += w;
    }
    sigma = std::max(sigma, s);
  }

  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> ax(n, 0.0);
  auto multiply = [&](const std::vector<double>& v, std::vector<double>& out) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (const auto& [j, w] : adj[i]) s += w * v[j];
      out[i] = s;
    }
  };

  double delta = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    multiply(x, ax);
    std::vector<double> y(n);
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = ax[i] + sigma * x[i];
      norm += y[i] * y[i];
    }
    norm = std::sqrt(norm);
    delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] /= norm;
      delta = std::max(delta, std::abs(y[i] - x[i]));
    }
    x.swap(y);
    if (delta <= tol) {
      for (auto& v : x) v = std::max(v, 0.0);
      double s = 0.0;
      for (double v : x) s += v * v;
      s = std::sqrt(s);
      for (auto& v : x) v /= s;
      return x;
    }
  }

  multiply(x, ax);
  double lambda = 0.0;
  for (std::size_t i = 0; i < n; ++i) lambda += x[i] * ax[i];
  double resid = 0.0;
  for (std::size_t i = 0; i < n; ++i) resid += (ax[i] - lambda * x[i]) * (ax[i] - lambda * x[i]);
  throw ConvergenceError("eigenvector_centrality: no convergence after " +
                             std::to_string(max_iter) + " iterations",
                         std::sqrt(resid));
}

namespace detail {

inline bool close_dist(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace detail

// Shortest-path betweenness with edge length 1/weight (stronger ties are
// shorter), normalized by (n-1)(n-2)/2. Brandes accumulation over Dijkstra
// predecessor DAGs.
inline std::vector<double> betweenness_centrality(const Network& g) {
  const std::size_t n = g.node_count();
  std::vector<double> bc(n, 0.0);
  if (n < 3) return bc;
  auto adj = g.adjacency();

  for (std::size_t s = 0; s < n; ++s) {
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<double> sigma(n, 0.0);
    std::vector<std::vector<std::size_t>> preds(n);
    std::vector<std::size_t> order;
    std::vector<bool> done(n, false);

    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    dist[s] = 0.0;
    sigma[s] = 1.0;
    pq.emplace(0.0, s);
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (done[u]) continue;
      done[u] = true;
      order.push_back(u);
      for (const auto& [v, w] : adj[u]) {
        const double nd = dist[u] + 1.0 / w;
        if (!done[v] && nd < dist[v] && !detail::close_dist(nd, dist[v])) {
          dist[v] = nd;
          sigma[v] = sigma[u];
          preds[v] = {u};
          pq.emplace(nd, v);
        } else if (!done[v] && detail::close_dist(nd, dist[v])) {
          sigma[v] += sigma[u];
          preds[v].push_back(u);
        }
      }
    }

    std::vector<double> delta(n, 0.0);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const std::size_t w = *it;
      for (auto v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (w != s) bc[w] += delta[w];
    }
  }

  const double norm =
      static_cast<double>(n - 1) * static_cast<double>(n - 2) / 2.0;
  for (auto& v : bc) v = v / 2.0 / norm;  // each unordered pair counted twice
  return bc;
}

struct WeightSplit {
  std::vector<double> in_sector;
  std::vector<double> out_sector;
  std::pair<double, double> medians{0.0, 0.0};  // (in, out); 0 when a side is empty
};

inline WeightSplit weight_split(const Network& g,
                                const std::map<std::string, std::string>& sectors) {
  WeightSplit split;
  for (const auto& node : g.nodes)
    if (!sectors.count(node)) throw ValidationError("weight_split: no sector for " + node);
  for (const auto& [key, w] : g.edges) {
    if (sectors.at(g.nodes[key.first]) == sectors.at(g.nodes[key.second]))
      split.in_sector.push_back(w);
    else
      split.out_sector.push_back(w);
  }
  if (!split.in_sector.empty()) split.medians.first = median_of(split.in_sector);
  if (!split.out_sector.empty()) split.medians.second = median_of(split.out_sector);
  return split;
}

using EdgeRecord = std::pair<std::pair<std::string, std::string>, double>;

// Edges whose weight exceeds Q3 + 1.5*IQR of the reference sample, in
// descending weight order; equal weights ordered by node pair.
inline std::vector<EdgeRecord> outlier_edges(const std::vector<double>& sample,
                                             const std::vector<EdgeRecord>& edges) {
  if (sample.empty()) throw ComputationError("outlier_edges: empty weight sample");
  const double q1 = quantile(sample, 0.25);
  const double q3 = quantile(sample, 0.75);
  const double cutoff = q3 + 1.5 * (q3 - q1);

  std::vector<EdgeRecord> out;
  for (const auto& e : edges)
    if (e.second > cutoff) out.push_back(e);
  std::sort(out.begin(), out.end(), [](const EdgeRecord& a, const EdgeRecord& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

}  // namespace newsnet
