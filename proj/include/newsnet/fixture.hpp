#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "newsnet/csv.hpp"
#include "newsnet/date.hpp"
#include "newsnet/errors.hpp"

namespace newsnet {

// Synthetic input bundle with planted structure: sector-blocked co-mentions,
// sentiment spikes with neighbour spillover, and market jumps on the spike
// days. Deterministic for a given seed; the seed never influences analysis,
// only this generator.
struct FixtureParams {
  int years = 3;
  Date start = Date::from_ymd(2007, 1, 1);
  double in_block_p = 0.28;
  double cross_block_p = 0.03;
  double mention_noise_sd = 0.06;
  double spike_sentiment = 0.85;
  double spillover_sentiment = 0.2;
  double index_drift = 0.0002;
  double index_sd = 0.008;
  double idio_sd = 0.004;
  double event_jump = 0.02;
  double group_jump = 0.015;
};

struct FixtureCompany {
  std::string ticker;
  std::string full_name;
  std::string sector;
  std::string news_name;  // long form introduced via a bracket sentence
};

inline std::vector<FixtureCompany> fixture_universe() {
  return {
      {"ARGB", "Argent Bancorp", "Finance", ""},
      {"MERI", "Meridian Capital", "Finance", "Meridian Capital Partners"},
      {"SLST", "Solstice Holdings", "Finance", ""},
      {"KSTN", "Keystone Trust", "Finance", ""},
      {"NRTH", "Northgate Partners", "Finance", ""},
      {"VNTA", "Ventara Securities", "Finance", ""},
      {"QNTM", "Quantum Circuits", "Technology", ""},
      {"HLIO", "Helio Systems", "Technology", "Helio Systems International"},
      {"VRTX", "Vertex Micro", "Technology", ""},
      {"OCTA", "Octane Software", "Technology", ""},
      {"PRSM", "Prism Data", "Technology", ""},
      {"NMBS", "Nimbus Networks", "Technology", ""},
      {"LNTR", "Lantern Stores", "Retail", "Lantern Stores Holdings"},
      {"MRCT", "Mercato Markets", "Retail", ""},
      {"HRBR", "Harbor Goods", "Retail", ""},
      {"CSTL", "Castle Retail", "Retail", ""},
      {"PLWD", "Plainwood Grocers", "Retail", ""},
      {"SNDL", "Sundial Outfitters", "Retail", ""},
  };
}

namespace detail {

inline std::string fixture_suffix_variant(const FixtureCompany& c, std::mt19937_64& rng) {
  static const char* kSuffixes[] = {" Inc", " Corp", " Group", " Ltd"};
  std::uniform_int_distribution<int> pick(0, 5);
  const int v = pick(rng);
  if (v == 0) return c.ticker;
  if (v == 1) return c.full_name + kSuffixes[static_cast<std::size_t>(v) % 4];
  if (v == 2 && !c.news_name.empty()) return c.news_name;
  return c.full_name;
}

}  // namespace detail

inline void generate_fixture(const std::string& dir, std::uint64_t seed,
                             const FixtureParams& params = {}) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::mt19937_64 rng(seed);
  const auto universe = fixture_universe();
  const std::size_t n_companies = universe.size();

  std::vector<std::string> sectors;
  for (const auto& c : universe)
    if (std::find(sectors.begin(), sectors.end(), c.sector) == sectors.end())
      sectors.push_back(c.sector);
  std::vector<std::size_t> block_of(n_companies);
  for (std::size_t i = 0; i < n_companies; ++i)
    block_of[i] = static_cast<std::size_t>(
        std::find(sectors.begin(), sectors.end(), universe[i].sector) - sectors.begin());

  // calendars
  const Date end = Date::from_ymd(2007 + params.years, 1, 1);
  std::vector<Date> all_days, trading_days;
  for (Date d = params.start; d < end; d = d + 1) {
    all_days.push_back(d);
    if (!d.is_weekend()) trading_days.push_back(d);
  }
  const std::size_t n_trading = trading_days.size();

  // planted per-company spike days and sector-wide group days
  std::vector<std::vector<std::size_t>> spikes(n_companies);       // trading index
  std::vector<std::vector<int>> spike_dir(n_companies);
  for (std::size_t c = 0; c < n_companies; ++c) {
    std::size_t t = 220 + 7 * c;
    int dir = (c % 2 == 0) ? +1 : -1;
    while (t + 30 < n_trading) {
      spikes[c].push_back(t);
      spike_dir[c].push_back(dir);
      dir = -dir;
      t += 90;
    }
  }
  std::vector<std::vector<std::pair<std::size_t, int>>> group_days(sectors.size());
  const std::size_t group_day_count[] = {26, 12, 0};
  for (std::size_t s = 0; s < sectors.size(); ++s) {
    std::size_t t = 230 + 11 * s;
    for (std::size_t k = 0; k < group_day_count[s] && t + 30 < n_trading; ++k) {
      group_days[s].emplace_back(t, k % 2 == 0 ? +1 : -1);
      t += (n_trading - 260) / (group_day_count[s] + 1);
    }
  }

  auto trading_index_of = [&](Date d) -> std::ptrdiff_t {
    auto it = std::lower_bound(trading_days.begin(), trading_days.end(), d);
    if (it == trading_days.end() || *it != d) return -1;
    return it - trading_days.begin();
  };

  // --- universe.csv
  {
    std::ofstream out(fs::path(dir) / "universe.csv");
    out << "ticker,full_name,sector,aliases\n";
    for (const auto& c : universe) {
      std::vector<std::string> fields = {c.ticker, c.full_name, c.sector, c.full_name};
      csv_write_row(out, fields);
    }
  }

  // --- corpus.jsonl
  std::normal_distribution<double> noise(0.0, params.mention_noise_sd);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto clip = [](double x) { return std::clamp(x, -1.0, 1.0); };
  auto round4 = [](double x) { return std::round(x * 1e4) / 1e4; };

  {
    std::ofstream out(fs::path(dir) / "corpus.jsonl");
    std::size_t article_seq = 0;
    for (Date d : all_days) {
      const std::ptrdiff_t ti = trading_index_of(d);

      // spike state for this day
      std::vector<int> spike_today(n_companies, 0);
      std::vector<int> spill_today(n_companies, 0);
      if (ti >= 0) {
        const std::size_t t = static_cast<std::size_t>(ti);
        for (std::size_t c = 0; c < n_companies; ++c) {
          for (std::size_t k = 0; k < spikes[c].size(); ++k) {
            if (spikes[c][k] == t) spike_today[c] = spike_dir[c][k];
            // same-block spillover lingers for two trading days
            if (t >= spikes[c][k] && t - spikes[c][k] <= 2) {
              for (std::size_t j = 0; j < n_companies; ++j)
                if (j != c && block_of[j] == block_of[c] && spill_today[j] == 0)
                  spill_today[j] = spike_dir[c][k];
            }
          }
        }
        for (std::size_t s = 0; s < sectors.size(); ++s)
          for (const auto& [gt, gdir] : group_days[s])
            if (gt == t)
              for (std::size_t c = 0; c < n_companies; ++c)
                if (block_of[c] == s) spike_today[c] = gdir;
      }

      std::uniform_int_distribution<int> per_day(2, 5);
      const int n_articles = d.is_weekend() ? 1 : per_day(rng);
      for (int a = 0; a < n_articles; ++a) {
        std::uniform_int_distribution<std::size_t> pick_block(0, sectors.size() - 1);
        const std::size_t focus = pick_block(rng);

        nlohmann::json rec;
        char idbuf[32];
        std::snprintf(idbuf, sizeof(idbuf), "A%06zu", article_seq++);
        rec["article_id"] = idbuf;
        rec["date"] = d.str();
        auto& mentions = rec["mentions"] = nlohmann::json::array();
        std::vector<std::string> sentences;

        for (std::size_t c = 0; c < n_companies; ++c) {
          const double p = block_of[c] == focus ? params.in_block_p : params.cross_block_p;
          const bool spiked = spike_today[c] != 0 || spill_today[c] != 0;
          if (unit(rng) >= p && !(spiked && unit(rng) < 0.55)) continue;

          double s = clip(noise(rng));
          if (spike_today[c] != 0)
            s = clip(spike_today[c] * params.spike_sentiment + 0.05 * noise(rng));
          else if (spill_today[c] != 0)
            s = clip(spill_today[c] * params.spillover_sentiment + 0.5 * noise(rng));

          const int copies = unit(rng) < 0.25 ? 2 : 1;
          for (int rep = 0; rep < copies; ++rep) {
            nlohmann::json m;
            m["raw_name"] = detail::fixture_suffix_variant(universe[c], rng);
            m["sentiment"] = round4(s);
            mentions.push_back(std::move(m));
          }
          if (!universe[c].news_name.empty() && unit(rng) < 0.08)
            sentences.push_back("Analysts said " + universe[c].news_name + " (" +
                                universe[c].ticker + ") extended its push this quarter.");
        }
        if (mentions.empty()) {
          // keep the article: off-target chatter with no usable entity
          nlohmann::json m;
          m["raw_name"] = "Broadline Commodities Desk";
          m["sentiment"] = 0.0;
          mentions.push_back(std::move(m));
        }
        if (!sentences.empty()) rec["sentences"] = sentences;
        out << rec.dump() << '\n';
      }
    }
  }

  // --- market.csv and index.csv
  {
    std::normal_distribution<double> index_shock(params.index_drift, params.index_sd);
    std::normal_distribution<double> idio(0.0, params.idio_sd);

    std::vector<double> index_close(n_trading);
    std::vector<double> index_ret(n_trading, 0.0);
    double level = 1000.0;
    for (std::size_t t = 0; t < n_trading; ++t) {
      const double r = t == 0 ? 0.0 : index_shock(rng);
      level *= std::exp(r);
      index_ret[t] = r;
      index_close[t] = level;
    }

    std::ofstream mout(fs::path(dir) / "market.csv");
    std::ofstream iout(fs::path(dir) / "index.csv");
    mout << "date,ticker,close\n";
    iout << "date,close\n";
    for (std::size_t t = 0; t < n_trading; ++t)
      iout << trading_days[t].str() << ',' << fmt_sig(index_close[t], 10) << '\n';

    for (std::size_t c = 0; c < n_companies; ++c) {
      const double beta = 0.8 + 0.04 * static_cast<double>(c % 12);
      const double alpha = (static_cast<double>(c % 5) - 2.0) * 1e-4;
      double price = 40.0 + 3.0 * static_cast<double>(c);
      for (std::size_t t = 0; t < n_trading; ++t) {
        double r = t == 0 ? 0.0 : alpha + beta * index_ret[t] + idio(rng);
        for (std::size_t k = 0; k < spikes[c].size(); ++k)
          if (spikes[c][k] == t) r += spike_dir[c][k] * params.event_jump;
        for (const auto& [gt, gdir] : group_days[block_of[c]])
          if (gt == t) r += gdir * params.group_jump;
        price *= std::exp(r);
        mout << trading_days[t].str() << ',' << universe[c].ticker << ','
             << fmt_sig(price, 10) << '\n';
      }
    }
  }

  // --- config.txt (paths are relative to this file's directory)
  {
    std::ofstream out(fs::path(dir) / "config.txt");
    out << "corpus=corpus.jsonl\n"
        << "universe=universe.csv\n"
        << "market=market.csv\n"
        << "index=index.csv\n";
  }
}

}  // namespace newsnet
