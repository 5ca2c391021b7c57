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

namespace newsnet {

// Per-company daily sentiment. A cell is absent exactly when the company has
// no mentions that day.
struct SentimentPanel {
  std::vector<Date> calendar;
  std::vector<std::string> tickers;
  std::vector<std::vector<std::optional<double>>> values;  // tickers x calendar

  std::optional<std::size_t> ticker_index(const std::string& t) const {
    auto it = std::find(tickers.begin(), tickers.end(), t);
    if (it == tickers.end()) return std::nullopt;
    return static_cast<std::size_t>(it - tickers.begin());
  }
};

namespace detail {

inline SentimentPanel panel_from_sums(
    const std::vector<Date>& calendar, const std::vector<std::string>& tickers,
    const std::vector<std::vector<std::pair<double, int>>>& sums) {
  SentimentPanel p;
  p.calendar = calendar;
  p.tickers = tickers;
  p.values.assign(tickers.size(), std::vector<std::optional<double>>(calendar.size()));
  for (std::size_t c = 0; c < tickers.size(); ++c)
    for (std::size_t d = 0; d < calendar.size(); ++d)
      if (sums[c][d].second > 0)
        p.values[c][d] = sums[c][d].first / static_cast<double>(sums[c][d].second);
  return p;
}

}  // namespace detail

// Mean mention sentiment per company and exact article date.
inline SentimentPanel daily_sentiment(const Corpus& corpus,
                                      const std::vector<std::string>& tickers,
                                      const Calendar& calendar) {
  std::map<std::string, std::size_t> tindex;
  for (std::size_t i = 0; i < tickers.size(); ++i) tindex[tickers[i]] = i;
  std::vector<std::vector<std::pair<double, int>>> sums(
      tickers.size(), std::vector<std::pair<double, int>>(calendar.size(), {0.0, 0}));
  for (const auto& art : corpus.articles) {
    auto d = calendar.index_of(art.date);
    if (!d) continue;
    for (const auto& m : art.mentions) {
      if (!m.target) continue;
      auto it = tindex.find(m.canonical);
      if (it == tindex.end()) continue;
      sums[it->second][*d].first += m.sentiment;
      sums[it->second][*d].second += 1;
    }
  }
  return detail::panel_from_sums(calendar.days(), tickers, sums);
}

// Same, but article dates that are not trading days are merged into the next
// trading day. Mentions dated after the final trading day are dropped.
inline SentimentPanel daily_sentiment_aligned(const Corpus& corpus,
                                              const std::vector<std::string>& tickers,
                                              const Calendar& trading_calendar) {
  std::map<std::string, std::size_t> tindex;
  for (std::size_t i = 0; i < tickers.size(); ++i) tindex[tickers[i]] = i;
  std::vector<std::vector<std::pair<double, int>>> sums(
      tickers.size(), std::vector<std::pair<double, int>>(trading_calendar.size(), {0.0, 0}));
  for (const auto& art : corpus.articles) {
    auto d = trading_calendar.index_on_or_after(art.date);
    if (!d) continue;
    for (const auto& m : art.mentions) {
      if (!m.target) continue;
      auto it = tindex.find(m.canonical);
      if (it == tindex.end()) continue;
      sums[it->second][*d].first += m.sentiment;
      sums[it->second][*d].second += 1;
    }
  }
  return detail::panel_from_sums(trading_calendar.days(), tickers, sums);
}

struct PeriodTable {
  std::vector<std::string> labels;
  std::vector<DateRange> periods;
  std::vector<std::vector<std::optional<double>>> values;  // labels x periods
};

// Mean over all present company-day cells of each label's members within each
// period; every cell carries equal weight.
inline PeriodTable period_aggregate(const SentimentPanel& panel,
                                    const std::map<std::string, std::string>& grouping,
                                    const std::vector<DateRange>& periods) {
  for (const auto& t : panel.tickers)
    if (!grouping.count(t)) throw ValidationError("period_aggregate: unmapped ticker " + t);

  std::vector<std::string> labels;
  for (const auto& [t, label] : grouping) {
    (void)t;
    if (std::find(labels.begin(), labels.end(), label) == labels.end()) labels.push_back(label);
  }
  std::sort(labels.begin(), labels.end());
  std::map<std::string, std::size_t> lindex;
  for (std::size_t i = 0; i < labels.size(); ++i) lindex[labels[i]] = i;

  std::vector<std::vector<std::pair<double, int>>> sums(
      labels.size(), std::vector<std::pair<double, int>>(periods.size(), {0.0, 0}));
  for (std::size_t c = 0; c < panel.tickers.size(); ++c) {
    const std::size_t li = lindex.at(grouping.at(panel.tickers[c]));
    for (std::size_t d = 0; d < panel.calendar.size(); ++d) {
      if (!panel.values[c][d]) continue;
      for (std::size_t p = 0; p < periods.size(); ++p) {
        if (periods[p].contains(panel.calendar[d])) {
          sums[li][p].first += *panel.values[c][d];
          sums[li][p].second += 1;
          break;
        }
      }
    }
  }

  PeriodTable out;
  out.labels = labels;
  out.periods = periods;
  out.values.assign(labels.size(), std::vector<std::optional<double>>(periods.size()));
  for (std::size_t l = 0; l < labels.size(); ++l)
    for (std::size_t p = 0; p < periods.size(); ++p)
      if (sums[l][p].second > 0)
        out.values[l][p] = sums[l][p].first / static_cast<double>(sums[l][p].second);
  return out;
}

// True when any target company's aggregate sentiment within the article is
// non-neutral. Opposite-signed mentions of one company can cancel.
inline bool sentiment_bearing(const Article& article, const std::set<std::string>& tickers,
                              double eps = 1e-12) {
  std::map<std::string, std::pair<double, int>> per_company;
  for (const auto& m : article.mentions) {
    if (!m.target || !tickers.count(m.canonical)) continue;
    auto& acc = per_company[m.canonical];
    acc.first += m.sentiment;
    acc.second += 1;
  }
  for (const auto& [ticker, acc] : per_company) {
    (void)ticker;
    if (std::abs(acc.first / static_cast<double>(acc.second)) > eps) return true;
  }
  return false;
}

// Cumulative share of total absolute sentiment versus share of articles,
// articles taken in order of descending sentiment magnitude.
struct ConcentrationCurve {
  std::vector<std::pair<double, double>> points;  // (article_fraction, sentiment_fraction)
  bool degenerate = false;                        // no sentiment anywhere: straight diagonal
};

inline ConcentrationCurve concentration_curve(const Corpus& corpus,
                                              const std::set<std::string>& tickers) {
  if (corpus.empty()) throw ValidationError("concentration_curve: empty corpus");

  std::vector<std::pair<double, const Article*>> weights;
  weights.reserve(corpus.articles.size());
  double total = 0.0;
  for (const auto& art : corpus.articles) {
    double w = 0.0;
    for (const auto& m : art.mentions)
      if (m.target && tickers.count(m.canonical)) w += std::abs(m.sentiment);
    weights.emplace_back(w, &art);
    total += w;
  }

  ConcentrationCurve curve;
  const std::size_t n = weights.size();
  if (total <= 0.0) {
    curve.degenerate = true;
    curve.points = {{0.0, 0.0}, {1.0, 1.0}};
    return curve;
  }

  std::sort(weights.begin(), weights.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second->article_id < b.second->article_id;
  });

  curve.points.reserve(n + 1);
  curve.points.emplace_back(0.0, 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += weights[i].first;
    curve.points.emplace_back(static_cast<double>(i + 1) / static_cast<double>(n), acc / total);
  }
  curve.points.back().second = 1.0;  // guard against rounding drift
  return curve;
}

}  // namespace newsnet
