#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "newsnet/errors.hpp"
#include "newsnet/network.hpp"

namespace newsnet {

// Assignment of node indices to dense group ids 0..k-1.
struct Partition {
  std::vector<int> groups;
  int k = 0;
};

// Renumber group ids densely in order of first appearance over ascending
// node index, so equal partitions compare equal.
inline Partition canonical_partition(std::vector<int> raw) {
  Partition p;
  p.groups.resize(raw.size());
  std::map<int, int> remap;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto [it, inserted] = remap.emplace(raw[i], static_cast<int>(remap.size()));
    (void)inserted;
    p.groups[i] = it->second;
  }
  p.k = static_cast<int>(remap.size());
  return p;
}

// Newman modularity of a partition with a resolution factor on the null
// model: Q = sum_c [ S_in(c)/2m - gamma (S_tot(c)/2m)^2 ], where S_in counts
// intra-community weight over ordered pairs and S_tot is total community
// degree. Equivalent to the ordered-pair form with the community indicator
// applied to both terms.
inline double modularity(const Network& g, const Partition& p, double resolution = 1.0) {
  if (p.groups.size() != g.node_count())
    throw ValidationError("modularity: partition does not cover the node set");
  double m = 0.0;
  for (const auto& [key, w] : g.edges) {
    (void)key;
    m += w;
  }
  if (m <= 0.0) throw ComputationError("modularity: undefined for a graph with no edge weight");

  const int k = p.k;
  std::vector<double> s_in(k, 0.0), s_tot(k, 0.0);
  for (const auto& [key, w] : g.edges) {
    const int ci = p.groups[key.first];
    const int cj = p.groups[key.second];
    if (ci == cj) s_in[ci] += 2.0 * w;
    s_tot[ci] += w;
    s_tot[cj] += w;
  }
  const double two_m = 2.0 * m;
  double q = 0.0;
  for (int c = 0; c < k; ++c)
    q += s_in[c] / two_m - resolution * (s_tot[c] / two_m) * (s_tot[c] / two_m);
  return q;
}

namespace detail {

// One Louvain level over an explicit weighted adjacency with self-loops.
// Nodes are visited in ascending id; a node moves only for a strictly
// positive gain, ties keep the incumbent community (then lowest id).
struct LouvainLevel {
  std::vector<int> community;
  bool moved = false;
};

inline LouvainLevel louvain_local_pass(
    const std::vector<std::vector<std::pair<std::size_t, double>>>& adj,
    const std::vector<double>& self_loop, double total_weight, double resolution) {
  const std::size_t n = adj.size();
  const double m = total_weight;
  std::vector<double> k_i(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    k_i[i] = self_loop[i];
    for (const auto& [j, w] : adj[i]) {
      (void)j;
      k_i[i] += w;
    }
  }

  std::vector<int> comm(n);
  for (std::size_t i = 0; i < n; ++i) comm[i] = static_cast<int>(i);
  std::vector<double> s_tot(k_i);

  LouvainLevel level;
  constexpr double kGainEps = 1e-12;
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t i = 0; i < n; ++i) {
      const int original = comm[i];
      s_tot[original] -= k_i[i];

      std::map<int, double> weight_to;  // community -> edge weight from i
      weight_to[original] += 0.0;
      for (const auto& [j, w] : adj[i]) weight_to[comm[j]] += w;

      auto gain = [&](int c) {
        return weight_to.at(c) / m - resolution * k_i[i] * s_tot[c] / (2.0 * m * m);
      };

      // Ascending map order makes the lowest community id win exact ties
      // among challengers; the incumbent is kept unless strictly beaten.
      int best = original;
      double best_gain = gain(original);
      for (const auto& [c, w] : weight_to) {
        (void)w;
        if (c == original) continue;
        const double gc = gain(c);
        if (gc > best_gain + kGainEps) {
          best = c;
          best_gain = gc;
        }
      }

      comm[i] = best;
      s_tot[best] += k_i[i];
      if (best != original) {
        improved = true;
        level.moved = true;
      }
    }
  }
  level.community = std::move(comm);
  return level;
}

}  // namespace detail

// Louvain community detection: sequential local moves maximizing the
// modularity gain until none is positive, then coarsening communities into
// nodes, repeated to a fixed point. Deterministic by construction.
inline Partition louvain(const Network& g, double resolution = 1.0) {
  if (g.edge_count() == 0) throw ValidationError("louvain: graph has no edges");

  const std::size_t n0 = g.node_count();
  std::vector<int> assignment(n0);
  for (std::size_t i = 0; i < n0; ++i) assignment[i] = static_cast<int>(i);

  // current coarse graph
  std::size_t n = n0;
  std::vector<std::vector<std::pair<std::size_t, double>>> adj = g.adjacency();
  std::vector<double> self_loop(n, 0.0);
  double m = 0.0;
  for (const auto& [key, w] : g.edges) {
    (void)key;
    m += w;
  }

  while (true) {
    auto level = detail::louvain_local_pass(adj, self_loop, m, resolution);
    if (!level.moved) break;

    // dense renumbering of surviving communities by first appearance
    std::map<int, std::size_t> remap;
    for (std::size_t i = 0; i < n; ++i) remap.emplace(level.community[i], remap.size());
    const std::size_t nc = remap.size();

    for (std::size_t i = 0; i < n0; ++i)
      assignment[i] = static_cast<int>(remap.at(level.community[static_cast<std::size_t>(assignment[i])]));

    if (nc == n) break;

    // coarsen: community -> node, accumulating weights and internal loops
    std::vector<double> new_loop(nc, 0.0);
    std::map<std::pair<std::size_t, std::size_t>, double> new_edges;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t ci = remap.at(level.community[i]);
      new_loop[ci] += self_loop[i];
      for (const auto& [j, w] : adj[i]) {
        if (j < i) continue;  // each undirected edge once
        const std::size_t cj = remap.at(level.community[j]);
        if (ci == cj)
          new_loop[ci] += w;
        else
          new_edges[{std::min(ci, cj), std::max(ci, cj)}] += w;
      }
    }
    n = nc;
    adj.assign(n, {});
    for (const auto& [key, w] : new_edges) {
      adj[key.first].emplace_back(key.second, w);
      adj[key.second].emplace_back(key.first, w);
    }
    self_loop = std::move(new_loop);
  }

  return canonical_partition(std::move(assignment));
}

namespace detail {

inline std::vector<std::vector<std::size_t>> contingency(const Partition& p, const Partition& q) {
  std::vector<std::vector<std::size_t>> table(p.k, std::vector<std::size_t>(q.k, 0));
  for (std::size_t i = 0; i < p.groups.size(); ++i) ++table[p.groups[i]][q.groups[i]];
  return table;
}

}  // namespace detail

// Normalized mutual information with geometric-mean normalization. Two
// zero-entropy (single-block) partitions score 1; exactly one scores 0.
inline double nmi(const Partition& p, const Partition& q) {
  if (p.groups.size() != q.groups.size() || p.groups.empty())
    throw ValidationError("nmi: partitions cover different node sets");
  const double n = static_cast<double>(p.groups.size());
  auto table = detail::contingency(p, q);

  std::vector<double> a(p.k, 0.0), b(q.k, 0.0);
  for (int i = 0; i < p.k; ++i)
    for (int j = 0; j < q.k; ++j) {
      a[i] += static_cast<double>(table[i][j]);
      b[j] += static_cast<double>(table[i][j]);
    }

  auto entropy = [n](const std::vector<double>& counts) {
    double h = 0.0;
    for (double c : counts)
      if (c > 0.0) h -= c / n * std::log(c / n);
    return h;
  };
  const double hp = entropy(a), hq = entropy(b);
  if (hp == 0.0 && hq == 0.0) return 1.0;
  if (hp == 0.0 || hq == 0.0) return 0.0;

  double info = 0.0;
  for (int i = 0; i < p.k; ++i)
    for (int j = 0; j < q.k; ++j) {
      const double nij = static_cast<double>(table[i][j]);
      if (nij > 0.0) info += nij / n * std::log(nij * n / (a[i] * b[j]));
    }
  return std::clamp(info / std::sqrt(hp * hq), 0.0, 1.0);
}

// F1 over co-membership pairs: precision and recall of node pairs placed
// together in p relative to q.
inline double pairwise_f1(const Partition& p, const Partition& q) {
  if (p.groups.size() != q.groups.size() || p.groups.empty())
    throw ValidationError("pairwise_f1: partitions cover different node sets");
  const std::size_t n = p.groups.size();
  std::size_t both = 0, in_p = 0, in_q = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool cp = p.groups[i] == p.groups[j];
      const bool cq = q.groups[i] == q.groups[j];
      if (cp) ++in_p;
      if (cq) ++in_q;
      if (cp && cq) ++both;
    }
  if (in_p == 0)
    throw ComputationError("pairwise_f1: first partition has no co-member pairs");
  if (in_q == 0)
    throw ComputationError("pairwise_f1: second partition has no co-member pairs");
  const double precision = static_cast<double>(both) / static_cast<double>(in_p);
  const double recall = static_cast<double>(both) / static_cast<double>(in_q);
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

struct GroupComposition {
  std::vector<int> group_ids;
  std::vector<std::string> sectors;
  std::vector<std::vector<std::size_t>> counts;  // groups x sectors
};

inline GroupComposition group_composition(const Partition& p,
                                          const std::vector<std::string>& node_sectors) {
  if (p.groups.size() != node_sectors.size())
    throw ValidationError("group_composition: sector list does not match node set");
  GroupComposition out;
  std::set<std::string> sector_set(node_sectors.begin(), node_sectors.end());
  out.sectors.assign(sector_set.begin(), sector_set.end());
  out.group_ids.resize(p.k);
  for (int gid = 0; gid < p.k; ++gid) out.group_ids[gid] = gid;
  out.counts.assign(p.k, std::vector<std::size_t>(out.sectors.size(), 0));
  std::map<std::string, std::size_t> sindex;
  for (std::size_t i = 0; i < out.sectors.size(); ++i) sindex[out.sectors[i]] = i;
  for (std::size_t i = 0; i < p.groups.size(); ++i)
    ++out.counts[p.groups[i]][sindex.at(node_sectors[i])];
  return out;
}

}  // namespace newsnet
