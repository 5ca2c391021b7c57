#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "newsnet/corpus.hpp"
#include "newsnet/date.hpp"
#include "newsnet/errors.hpp"
#include "newsnet/linalg.hpp"
#include "newsnet/network.hpp"
#include "newsnet/sentiment.hpp"
#include "newsnet/statkit.hpp"

namespace newsnet {

struct SentimentEvent {
  std::string ticker;
  Date date;
  int direction = 0;  // +1 positive, -1 negative
  double z_score = 0.0;
};

// Days on which the sentiment lies strictly beyond z standard deviations of
// the mean over present values in the preceding `lookback` trading days.
// Rolling moments use the population deviation; unstable windows (too few
// observations, or near-zero spread) yield no event.
inline std::vector<SentimentEvent> detect_events(const std::string& ticker,
                                                 const std::vector<std::optional<double>>& series,
                                                 const Calendar& calendar, int lookback = 180,
                                                 double z = 2.0, int min_obs = 30) {
  if (series.size() != calendar.size())
    throw ValidationError("detect_events: series not aligned to calendar");
  std::vector<SentimentEvent> events;
  for (std::size_t t = 0; t < series.size(); ++t) {
    if (!series[t]) continue;
    if (static_cast<int>(t) < lookback) continue;  // not enough history: skip day
    double sum = 0.0;
    int n = 0;
    for (std::size_t i = t - static_cast<std::size_t>(lookback); i < t; ++i)
      if (series[i]) {
        sum += *series[i];
        ++n;
      }
    if (n < min_obs) continue;
    const double mu = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = t - static_cast<std::size_t>(lookback); i < t; ++i)
      if (series[i]) ss += (*series[i] - mu) * (*series[i] - mu);
    const double sigma = std::sqrt(ss / static_cast<double>(n));
    if (sigma < 1e-12) continue;
    const double score = (*series[t] - mu) / sigma;
    if (score > z)
      events.push_back({ticker, calendar[t], +1, score});
    else if (score < -z)
      events.push_back({ticker, calendar[t], -1, score});
  }
  return events;
}

// The min(k, |N(c)|) neighbours with the largest edge weight; equal weights
// are broken lexicographically. Returned sorted by ticker.
inline std::vector<std::string> top_k_neighbours(const Network& g, const std::string& ticker,
                                                 std::size_t k = 10) {
  auto ci = g.node_index(ticker);
  if (!ci) throw ValidationError("top_k_neighbours: " + ticker + " not in network");
  std::vector<std::pair<double, std::string>> nbrs;
  for (const auto& [key, w] : g.edges) {
    if (key.first == *ci) nbrs.emplace_back(w, g.nodes[key.second]);
    else if (key.second == *ci) nbrs.emplace_back(w, g.nodes[key.first]);
  }
  std::sort(nbrs.begin(), nbrs.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  if (nbrs.size() > k) nbrs.resize(k);
  std::vector<std::string> out;
  out.reserve(nbrs.size());
  for (auto& [w, t] : nbrs) {
    (void)w;
    out.push_back(std::move(t));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Unweighted mean of the present daily sentiments of the given neighbours.
inline std::optional<double> neighbour_sentiment(const SentimentPanel& panel,
                                                 const std::vector<std::string>& neighbours,
                                                 std::size_t day_index) {
  double sum = 0.0;
  int n = 0;
  for (const auto& t : neighbours) {
    auto ti = panel.ticker_index(t);
    if (!ti) continue;
    const auto& v = panel.values[*ti][day_index];
    if (v) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

// Convenience overload resolving the top-k neighbourhood from the network at
// the event date.
inline std::optional<double> neighbour_sentiment(const Network& g_at_event,
                                                 const std::string& ticker,
                                                 const SentimentPanel& panel, Date date,
                                                 std::size_t k = 10) {
  auto di = Calendar(panel.calendar).index_of(date);
  if (!di) return std::nullopt;
  return neighbour_sentiment(panel, top_k_neighbours(g_at_event, ticker, k), *di);
}

// Lazily built dynamic networks keyed by end day. Days without enough
// history resolve to nothing rather than an error.
class DynamicNetworkCache {
 public:
  DynamicNetworkCache(const Corpus& corpus, std::vector<std::string> tickers, int lookback,
                      Calendar trading_calendar, CoverageMode mode = CoverageMode::kMentionCount)
      : corpus_(&corpus),
        tickers_(std::move(tickers)),
        lookback_(lookback),
        calendar_(std::move(trading_calendar)),
        mode_(mode) {}

  const Network* get(Date end_day) {
    auto it = cache_.find(end_day);
    if (it == cache_.end()) {
      std::optional<Network> net;
      try {
        net = dynamic_network(*corpus_, tickers_, end_day, lookback_, calendar_, mode_);
      } catch (const InsufficientWindowError&) {
        net = std::nullopt;
      }
      it = cache_.emplace(end_day, std::move(net)).first;
    }
    return it->second ? &*it->second : nullptr;
  }

  const Calendar& calendar() const { return calendar_; }

 private:
  const Corpus* corpus_;
  std::vector<std::string> tickers_;
  int lookback_;
  Calendar calendar_;
  CoverageMode mode_;
  std::map<Date, std::optional<Network>> cache_;
};

struct EventProfile {
  std::vector<int> offsets;                       // -W..+W relative trading days
  std::vector<std::optional<double>> mean;        // absent when no data at an offset
  std::vector<std::optional<double>> median;
  std::vector<std::optional<double>> p_values;
  int n_events = 0;
};

// Significance baseline for an offset profile. Point-in-time quantities use
// every pre-event offset except the tested one (samples on distinct days are
// independent). Trailing-window sums overlap their neighbours, so they are
// compared against the window-start offset only, the one offset whose window
// is disjoint from every post-event window.
enum class ProfileBaseline { kPooledPre, kWindowStart };

namespace detail {

inline std::vector<double> present_at(const std::vector<std::vector<std::optional<double>>>& rows,
                                      std::size_t col) {
  std::vector<double> out;
  for (const auto& r : rows)
    if (r[col]) out.push_back(*r[col]);
  return out;
}

// Pooled median and two-sided Mann-Whitney p per offset from per-event rows.
inline void fill_median_and_p(const std::vector<std::vector<std::optional<double>>>& rows, int W,
                              ProfileBaseline baseline, EventProfile& out,
                              std::size_t mwu_exact_threshold = 400) {
  const std::size_t width = 2 * static_cast<std::size_t>(W) + 1;
  for (std::size_t o = 0; o < width; ++o) {
    auto sample = present_at(rows, o);
    if (!sample.empty()) out.median[o] = median_of(sample);

    std::vector<double> base;
    if (baseline == ProfileBaseline::kPooledPre) {
      for (std::size_t b = 0; b + 1 < static_cast<std::size_t>(W) + 1; ++b) {
        if (b == o) continue;
        for (const auto& r : rows)
          if (r[b]) base.push_back(*r[b]);
      }
    } else {
      if (o == 0) {
        out.p_values[o] = 1.0;  // the baseline itself
        continue;
      }
      base = present_at(rows, 0);
    }
    if (sample.empty() || base.empty()) continue;
    out.p_values[o] =
        mann_whitney_u(sample, base, /*two_sided=*/true, mwu_exact_threshold).p_value;
  }
}

}  // namespace detail

// Offset profile with mean, median and p-values pooled across the per-event
// rows (one row per event, one column per offset, absent cells allowed).
inline EventProfile build_pooled_profile(const std::vector<std::vector<std::optional<double>>>& rows,
                                         int W, ProfileBaseline baseline,
                                         std::size_t mwu_exact_threshold = 400) {
  const std::size_t width = 2 * static_cast<std::size_t>(W) + 1;
  EventProfile out;
  out.offsets.resize(width);
  for (std::size_t o = 0; o < width; ++o) out.offsets[o] = static_cast<int>(o) - W;
  out.mean.assign(width, std::nullopt);
  out.median.assign(width, std::nullopt);
  out.p_values.assign(width, std::nullopt);
  out.n_events = static_cast<int>(rows.size());
  if (rows.empty()) return out;
  for (std::size_t o = 0; o < width; ++o) {
    auto sample = detail::present_at(rows, o);
    if (!sample.empty()) out.mean[o] = mean_of(sample);
  }
  detail::fill_median_and_p(rows, W, baseline, out, mwu_exact_threshold);
  return out;
}

// Group aggregate sentiment profile around event days: for each event, the
// mean sentiment of the event company's top-k network neighbours (neighbours
// fixed by the dynamic network at the event date) is traced over offsets
// -W..+W; events average within each company, companies average within the
// group. Medians and Mann-Whitney p-values are computed on the pooled
// per-event samples against the pre-event baseline.
inline EventProfile group_event_profile(const std::set<std::string>& group,
                                        const std::vector<SentimentEvent>& events,
                                        const SentimentPanel& panel, DynamicNetworkCache& nets,
                                        std::size_t k = 10, int W = 7,
                                        std::size_t mwu_exact_threshold = 400) {
  const std::size_t width = 2 * static_cast<std::size_t>(W) + 1;
  EventProfile out;
  out.offsets.resize(width);
  for (std::size_t o = 0; o < width; ++o) out.offsets[o] = static_cast<int>(o) - W;
  out.mean.assign(width, std::nullopt);
  out.median.assign(width, std::nullopt);
  out.p_values.assign(width, std::nullopt);

  Calendar cal(panel.calendar);
  std::vector<std::vector<std::optional<double>>> rows;  // per event
  std::vector<std::string> row_company;
  for (const auto& ev : events) {
    if (!group.count(ev.ticker)) continue;
    const Network* net = nets.get(ev.date);
    if (!net) continue;
    auto di = cal.index_of(ev.date);
    if (!di) continue;
    const auto neighbours = top_k_neighbours(*net, ev.ticker, k);
    std::vector<std::optional<double>> row(width);
    for (std::size_t o = 0; o < width; ++o) {
      const long long idx = static_cast<long long>(*di) + (static_cast<long long>(o) - W);
      if (idx < 0 || idx >= static_cast<long long>(cal.size())) continue;
      row[o] = neighbour_sentiment(panel, neighbours, static_cast<std::size_t>(idx));
    }
    rows.push_back(std::move(row));
    row_company.push_back(ev.ticker);
  }

  out.n_events = static_cast<int>(rows.size());
  if (rows.empty()) return out;

  // two-level mean: events within a company, then companies within the group
  for (std::size_t o = 0; o < width; ++o) {
    std::map<std::string, std::pair<double, int>> per_company;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (!rows[r][o]) continue;
      auto& acc = per_company[row_company[r]];
      acc.first += *rows[r][o];
      acc.second += 1;
    }
    if (per_company.empty()) continue;
    double sum = 0.0;
    for (const auto& [c, acc] : per_company) {
      (void)c;
      sum += acc.first / static_cast<double>(acc.second);
    }
    out.mean[o] = sum / static_cast<double>(per_company.size());
  }

  detail::fill_median_and_p(rows, W, ProfileBaseline::kPooledPre, out, mwu_exact_threshold);
  return out;
}

// Event indicator series (-1, 0, +1) per ticker over the calendar.
inline std::vector<std::vector<double>> build_event_series(
    const std::vector<SentimentEvent>& events, const std::vector<std::string>& tickers,
    const Calendar& calendar) {
  std::map<std::string, std::size_t> tindex;
  for (std::size_t i = 0; i < tickers.size(); ++i) tindex[tickers[i]] = i;
  std::vector<std::vector<double>> series(tickers.size(),
                                          std::vector<double>(calendar.size(), 0.0));
  for (const auto& ev : events) {
    auto ti = tindex.find(ev.ticker);
    auto di = calendar.index_of(ev.date);
    if (ti == tindex.end() || !di) continue;
    series[ti->second][*di] = static_cast<double>(ev.direction);
  }
  return series;
}

// Pearson correlation per pair of aligned series; zero-variance series give
// absent entries (including their diagonal).
inline std::vector<std::vector<std::optional<double>>> event_correlation_matrix(
    const std::vector<std::vector<double>>& series) {
  const std::size_t n = series.size();
  std::vector<std::vector<std::optional<double>>> corr(
      n, std::vector<std::optional<double>>(n, std::nullopt));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      auto r = pearson(series[i], series[j]);
      corr[i][j] = r;
      corr[j][i] = r;
    }
  }
  return corr;
}

// Share of total variance captured by the leading principal components of
// the correlation matrix: sum of the top eigenvalues over the trace.
inline double explained_variance(const std::vector<std::vector<double>>& series,
                                 std::size_t n_factors = 5) {
  std::vector<const std::vector<double>*> valid;
  for (const auto& s : series) {
    if (s.size() < 2) continue;
    double m = mean_of(s);
    double ss = 0.0;
    for (double v : s) ss += (v - m) * (v - m);
    if (ss > 0.0) valid.push_back(&s);
  }
  if (valid.size() < n_factors)
    throw ComputationError("explained_variance: " + std::to_string(valid.size()) +
                           " series with nonzero variance, need " + std::to_string(n_factors));

  const std::size_t p = valid.size();
  std::vector<std::vector<double>> corr(p, std::vector<double>(p, 1.0));
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j) {
      auto r = pearson(*valid[i], *valid[j]);
      corr[i][j] = corr[j][i] = r.value_or(0.0);
    }

  auto eig = symmetric_eigenvalues(corr);
  double top = 0.0;
  for (std::size_t i = 0; i < n_factors; ++i) top += std::max(eig[i], 0.0);
  return std::clamp(top / static_cast<double>(p), 0.0, 1.0);
}

}  // namespace newsnet
