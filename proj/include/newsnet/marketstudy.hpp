#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "newsnet/date.hpp"
#include "newsnet/errors.hpp"
#include "newsnet/events.hpp"
#include "newsnet/statkit.hpp"

namespace newsnet {

// Daily closing prices per company plus the benchmark index, aligned to the
// trading calendar (every date that carries any price).
struct MarketPanel {
  std::vector<Date> calendar;
  std::vector<std::string> tickers;
  std::vector<std::vector<std::optional<double>>> close;  // tickers x calendar
  std::vector<std::optional<double>> index_close;

  std::optional<std::size_t> ticker_index(const std::string& t) const {
    auto it = std::find(tickers.begin(), tickers.end(), t);
    if (it == tickers.end()) return std::nullopt;
    return static_cast<std::size_t>(it - tickers.begin());
  }
};

inline double log_return(double p_prev, double p) {
  if (p_prev <= 0.0 || p <= 0.0)
    throw ComputationError("log_return: prices must be positive");
  return std::log(p / p_prev);
}

// Absolute daily log-return, the standard magnitude proxy for realised
// volatility.
inline double volatility_proxy(double p_prev, double p) { return std::abs(log_return(p_prev, p)); }

// Day-over-day log-returns; present only where both prices are.
inline std::vector<std::optional<double>> returns_from_prices(
    const std::vector<std::optional<double>>& close) {
  std::vector<std::optional<double>> r(close.size());
  for (std::size_t i = 1; i < close.size(); ++i)
    if (close[i] && close[i - 1]) r[i] = log_return(*close[i - 1], *close[i]);
  return r;
}

struct CapmFit {
  double alpha = 0.0;  // per day
  double beta = 0.0;
  std::size_t n_obs = 0;
};

// Ordinary least squares of the stock return on the index return over the
// paired present days in the window of trading days strictly before `at`.
inline CapmFit fit_capm(const std::vector<std::optional<double>>& stock_returns,
                        const std::vector<std::optional<double>>& index_returns, std::size_t at,
                        int window = 180, int min_obs = 120) {
  if (stock_returns.size() != index_returns.size())
    throw ValidationError("fit_capm: series of different length");
  if (at > stock_returns.size())
    throw ValidationError("fit_capm: fit day outside the series");
  const std::size_t lo = at >= static_cast<std::size_t>(window) ? at - window : 0;

  double sr = 0.0, sm = 0.0;
  std::size_t n = 0;
  for (std::size_t i = lo; i < at; ++i)
    if (stock_returns[i] && index_returns[i]) {
      sr += *stock_returns[i];
      sm += *index_returns[i];
      ++n;
    }
  if (n < static_cast<std::size_t>(min_obs))
    throw ComputationError("fit_capm: only " + std::to_string(n) + " paired observations");
  const double mr = sr / static_cast<double>(n), mm = sm / static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = lo; i < at; ++i)
    if (stock_returns[i] && index_returns[i]) {
      sxy += (*index_returns[i] - mm) * (*stock_returns[i] - mr);
      sxx += (*index_returns[i] - mm) * (*index_returns[i] - mm);
    }
  if (sxx <= 0.0) throw ComputationError("fit_capm: index returns have zero variance");

  CapmFit fit;
  fit.beta = sxy / sxx;
  fit.alpha = mr - fit.beta * mm;
  fit.n_obs = n;
  return fit;
}

// Residual of the market model: the abnormal return.
inline double abnormal_return(const CapmFit& fit, double r, double r_m) {
  return r - fit.alpha - fit.beta * r_m;
}

// Abnormal return per day from daily re-fitted market models; absent where
// the fit is impossible or a return is missing.
inline std::vector<std::optional<double>> abnormal_return_series(
    const std::vector<std::optional<double>>& stock_returns,
    const std::vector<std::optional<double>>& index_returns, int window = 180,
    int min_obs = 120) {
  std::vector<std::optional<double>> ar(stock_returns.size());
  for (std::size_t i = 0; i < stock_returns.size(); ++i) {
    if (!stock_returns[i] || !index_returns[i]) continue;
    try {
      const CapmFit fit = fit_capm(stock_returns, index_returns, i, window, min_obs);
      ar[i] = abnormal_return(fit, *stock_returns[i], *index_returns[i]);
    } catch (const ComputationError&) {
      // not enough usable history at this day
    }
  }
  return ar;
}

// Trailing-window cumulative abnormal return around an event. The input spans
// offsets [-W-Ts, +W] relative to the event day; CAR at offset t sums the
// Ts+1 abnormal returns ending at t.
inline std::vector<double> car(const std::vector<double>& ar, int W = 7, int Ts = 7) {
  const std::size_t need = 2 * static_cast<std::size_t>(W) + static_cast<std::size_t>(Ts) + 1;
  if (ar.size() != need)
    throw ValidationError("car: expected " + std::to_string(need) + " abnormal returns, got " +
                          std::to_string(ar.size()));
  std::vector<double> out(2 * static_cast<std::size_t>(W) + 1, 0.0);
  for (std::size_t o = 0; o < out.size(); ++o) {
    double s = 0.0;
    for (std::size_t j = o; j <= o + static_cast<std::size_t>(Ts); ++j) s += ar[j];
    out[o] = s;
  }
  return out;
}

struct EventStudyParams {
  int W = 7;                  // profile half-width in trading days
  int Ts = 7;                 // trailing CAR window
  int capm_window = 180;      // market-model fit window
  int capm_min_obs = 120;
  std::size_t mwu_exact_threshold = 400;
};

struct GroupMarketProfiles {
  EventProfile car_profile;
  EventProfile vol_profile;
  int n_events = 0;
  int n_dropped = 0;
};

struct EventWindowStudy {
  // group label -> direction (+1/-1) -> profiles
  std::map<std::string, std::map<int, GroupMarketProfiles>> groups;
  std::vector<std::string> drop_log;
};

// Per-group CAR and volatility profiles around sentiment events, split by
// event direction. Events whose market window is incomplete are dropped
// rather than imputed. CAR significance is tested against the window-start
// baseline; volatility against the pooled pre-event sample.
inline EventWindowStudy event_window_study(const std::vector<SentimentEvent>& events,
                                           const MarketPanel& panel,
                                           const std::map<std::string, std::string>& groups,
                                           const EventStudyParams& params = {}) {
  EventWindowStudy study;
  Calendar cal(panel.calendar);

  const auto index_returns = returns_from_prices(panel.index_close);
  std::map<std::size_t, std::vector<std::optional<double>>> ar_by_ticker;
  std::map<std::size_t, std::vector<std::optional<double>>> ret_by_ticker;
  auto series_for = [&](std::size_t ti) -> const std::vector<std::optional<double>>& {
    auto it = ar_by_ticker.find(ti);
    if (it == ar_by_ticker.end()) {
      auto r = returns_from_prices(panel.close[ti]);
      it = ar_by_ticker
               .emplace(ti, abnormal_return_series(r, index_returns, params.capm_window,
                                                   params.capm_min_obs))
               .first;
      ret_by_ticker.emplace(ti, std::move(r));
    }
    return it->second;
  };

  struct Bucket {
    std::vector<std::vector<std::optional<double>>> car_rows;
    std::vector<std::vector<std::optional<double>>> vol_rows;
    int dropped = 0;
  };
  std::map<std::string, std::map<int, Bucket>> buckets;

  const int W = params.W, Ts = params.Ts;
  for (const auto& ev : events) {
    auto git = groups.find(ev.ticker);
    if (git == groups.end()) continue;
    auto& bucket = buckets[git->second][ev.direction];

    auto ti = panel.ticker_index(ev.ticker);
    auto di = cal.index_of(ev.date);
    if (!ti || !di) {
      ++bucket.dropped;
      study.drop_log.push_back(ev.ticker + " " + ev.date.str() + ": not covered by market data");
      continue;
    }
    const auto& ar = series_for(*ti);
    const auto& ret = ret_by_ticker.at(*ti);

    const long long lo = static_cast<long long>(*di) - W - Ts;
    const long long hi = static_cast<long long>(*di) + W;
    if (lo < 0 || hi >= static_cast<long long>(ar.size())) {
      ++bucket.dropped;
      study.drop_log.push_back(ev.ticker + " " + ev.date.str() + ": window outside calendar");
      continue;
    }
    bool complete = true;
    for (long long i = lo; i <= hi && complete; ++i)
      if (!ar[static_cast<std::size_t>(i)]) complete = false;
    if (!complete) {
      ++bucket.dropped;
      study.drop_log.push_back(ev.ticker + " " + ev.date.str() + ": abnormal return missing in window");
      continue;
    }

    std::vector<double> window_ar;
    window_ar.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (long long i = lo; i <= hi; ++i) window_ar.push_back(*ar[static_cast<std::size_t>(i)]);
    const auto car_series = car(window_ar, W, Ts);

    std::vector<std::optional<double>> car_row(car_series.begin(), car_series.end());
    std::vector<std::optional<double>> vol_row(2 * static_cast<std::size_t>(W) + 1);
    for (int o = -W; o <= W; ++o) {
      const auto& r = ret[static_cast<std::size_t>(static_cast<long long>(*di) + o)];
      if (r) vol_row[static_cast<std::size_t>(o + W)] = std::abs(*r);
    }
    bucket.car_rows.push_back(std::move(car_row));
    bucket.vol_rows.push_back(std::move(vol_row));
  }

  for (auto& [label, by_dir] : buckets) {
    for (auto& [dir, bucket] : by_dir) {
      if (bucket.car_rows.empty() && bucket.dropped == 0) continue;
      GroupMarketProfiles prof;
      prof.car_profile = build_pooled_profile(bucket.car_rows, W, ProfileBaseline::kWindowStart,
                                              params.mwu_exact_threshold);
      prof.vol_profile = build_pooled_profile(bucket.vol_rows, W, ProfileBaseline::kPooledPre,
                                              params.mwu_exact_threshold);
      prof.n_events = static_cast<int>(bucket.car_rows.size());
      prof.n_dropped = bucket.dropped;
      if (prof.n_events >= 1) study.groups[label][dir] = std::move(prof);
    }
  }
  return study;
}

struct Histogram {
  std::vector<double> edges;        // size counts.size() + 1
  std::vector<std::size_t> counts;
};

inline Histogram make_histogram(const std::vector<double>& sample) {
  Histogram h;
  if (sample.empty()) return h;
  const auto [mn_it, mx_it] = std::minmax_element(sample.begin(), sample.end());
  const double mn = *mn_it, mx = *mx_it;
  if (mn == mx) {
    h.edges = {mn - 0.5, mn + 0.5};
    h.counts = {sample.size()};
    return h;
  }
  const std::size_t k = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(sample.size())))), 10, 50);
  h.edges.resize(k + 1);
  for (std::size_t i = 0; i <= k; ++i)
    h.edges[i] = mn + (mx - mn) * static_cast<double>(i) / static_cast<double>(k);
  h.counts.assign(k, 0);
  for (double x : sample) {
    std::size_t bin = static_cast<std::size_t>((x - mn) / (mx - mn) * static_cast<double>(k));
    if (bin >= k) bin = k - 1;
    ++h.counts[bin];
  }
  return h;
}

struct DistributionParams {
  int W = 7;
  int capm_window = 180;
  int capm_min_obs = 120;
  int kde_min_events = 20;        // density only when events exceed this
  std::size_t kde_grid_points = 401;
};

struct GroupDistributionStudy {
  struct Cell {
    Histogram histogram;
    std::optional<DensityEstimate> density;
    std::size_t n_events = 0;
    std::size_t n_obs = 0;
  };
  // direction (+1/-1) -> phase ("before"/"on"/"after") -> measure ("ar"/"vol")
  std::map<int, std::map<std::string, std::map<std::string, Cell>>> cells;
};

// Distributions of member-company abnormal returns and volatility around
// group-level sentiment events, phased into before [T-W, T), on {T} and
// after (T, T+W]. Histograms are always produced; the density estimate only
// when the direction has more than kde_min_events usable events.
inline GroupDistributionStudy group_distribution_study(
    const std::vector<SentimentEvent>& group_events, const MarketPanel& panel,
    const std::set<std::string>& members, const DistributionParams& params = {}) {
  GroupDistributionStudy out;
  Calendar cal(panel.calendar);

  const auto index_returns = returns_from_prices(panel.index_close);
  std::vector<std::vector<std::optional<double>>> ar(panel.tickers.size());
  std::vector<std::vector<std::optional<double>>> ret(panel.tickers.size());
  for (std::size_t ti = 0; ti < panel.tickers.size(); ++ti) {
    if (!members.count(panel.tickers[ti])) continue;
    ret[ti] = returns_from_prices(panel.close[ti]);
    ar[ti] = abnormal_return_series(ret[ti], index_returns, params.capm_window,
                                    params.capm_min_obs);
  }

  for (int dir : {+1, -1}) {
    std::map<std::string, std::map<std::string, std::vector<double>>> samples;
    std::size_t n_events = 0;
    for (const auto& ev : group_events) {
      if (ev.direction != dir) continue;
      auto di = cal.index_of(ev.date);
      if (!di) continue;
      ++n_events;
      for (std::size_t ti = 0; ti < panel.tickers.size(); ++ti) {
        if (!members.count(panel.tickers[ti])) continue;
        for (int o = -params.W; o <= params.W; ++o) {
          const long long i = static_cast<long long>(*di) + o;
          if (i < 0 || i >= static_cast<long long>(cal.size())) continue;
          const char* phase = o < 0 ? "before" : (o == 0 ? "on" : "after");
          const auto& a = ar[ti][static_cast<std::size_t>(i)];
          const auto& r = ret[ti][static_cast<std::size_t>(i)];
          if (a) samples[phase]["ar"].push_back(*a);
          if (r) samples[phase]["vol"].push_back(std::abs(*r));
        }
      }
    }
    for (const char* phase : {"before", "on", "after"}) {
      for (const char* measure : {"ar", "vol"}) {
        auto& cell = out.cells[dir][phase][measure];
        const auto& sample = samples[phase][measure];
        cell.n_events = n_events;
        cell.n_obs = sample.size();
        cell.histogram = make_histogram(sample);
        if (static_cast<int>(n_events) > params.kde_min_events && !sample.empty()) {
          const double h = scott_bandwidth(sample);
          const auto [mn, mx] = std::minmax_element(sample.begin(), sample.end());
          cell.density = kde_evaluate(
              sample, linspace(*mn - 5.0 * h, *mx + 5.0 * h, params.kde_grid_points), h);
        }
      }
    }
  }
  return out;
}

}  // namespace newsnet
