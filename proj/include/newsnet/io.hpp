#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "newsnet/community.hpp"
#include "newsnet/config.hpp"
#include "newsnet/corpus.hpp"
#include "newsnet/csv.hpp"
#include "newsnet/date.hpp"
#include "newsnet/errors.hpp"
#include "newsnet/events.hpp"
#include "newsnet/marketstudy.hpp"
#include "newsnet/network.hpp"
#include "newsnet/sentiment.hpp"

namespace newsnet {

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError(path);
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::filesystem::create_directories(std::filesystem::path(path).parent_path());
  std::ofstream out(path);
  if (!out) throw ComputationError("cannot write " + path);
  return out;
}

// ---------------------------------------------------------------------------
// Artifact headers. Every file the pipeline writes starts with two comment
// lines carrying the kind, the configuration hash and the full parameter
// echo; readers refuse intermediates written under a different configuration.

inline void write_table_header(std::ostream& os, const std::string& kind, const RunConfig& cfg,
                               const std::string& columns) {
  os << "# newsnet kind=" << kind << " config_hash=" << cfg.config_hash() << '\n';
  os << "# params " << cfg.param_echo() << '\n';
  os << columns << '\n';
}

inline std::vector<std::string> read_table_header(std::istream& in, const std::string& kind,
                                                  const RunConfig& cfg, const std::string& path,
                                                  char sep = ',') {
  std::string line1, line2, header;
  if (!std::getline(in, line1) || !std::getline(in, line2) || !std::getline(in, header))
    throw ValidationError(path + ": truncated artifact header");
  const std::string expect = "# newsnet kind=" + kind + " config_hash=";
  if (line1.rfind(expect, 0) != 0)
    throw ValidationError(path + ": not a " + kind + " artifact");
  const std::string hash = trim(line1.substr(expect.size()));
  if (hash != cfg.config_hash())
    throw ValidationError(path + ": written under config " + hash + ", current config is " +
                          cfg.config_hash() + "; re-run the producing stage");
  if (line2.rfind("# params", 0) != 0)
    throw ValidationError(path + ": missing parameter echo");
  return split(header, sep);
}

// ---------------------------------------------------------------------------
// Universe (input CSV: ticker,full_name,sector,aliases with '|' separators).

inline std::vector<Company> read_universe(const std::string& path) {
  auto in = open_input(path);
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ValidationError(path + ": empty universe file");
  ++lineno;
  const auto header = csv_parse_line(line, lineno);
  if (header.size() < 4 || header[0] != "ticker" || header[1] != "full_name" ||
      header[2] != "sector" || header[3] != "aliases")
    throw ValidationError(path + ": expected header ticker,full_name,sector,aliases");

  std::vector<Company> universe;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = csv_parse_line(line, lineno);
    if (f.size() < 4) throw ParseError(lineno, path + ": expected 4 fields");
    Company c;
    c.ticker = trim(f[0]);
    c.full_name = trim(f[1]);
    c.sector = trim(f[2]);
    if (c.ticker.empty()) throw ParseError(lineno, path + ": empty ticker");
    if (!seen.insert(c.ticker).second)
      throw ValidationError(path + ": duplicate ticker " + c.ticker);
    for (const auto& a : split(f[3], '|'))
      if (!trim(a).empty()) c.aliases.push_back(trim(a));
    universe.push_back(std::move(c));
  }
  return universe;
}

// ---------------------------------------------------------------------------
// Corpus intermediate (JSONL; header object first, one article per line).

inline void write_corpus(const std::string& path, const Corpus& corpus, const RunConfig& cfg) {
  auto out = open_output(path);
  nlohmann::json header;
  header["kind"] = "corpus";
  header["config_hash"] = cfg.config_hash();
  header["params"] = cfg.param_echo();
  out << header.dump() << '\n';
  for (const auto& art : corpus.articles) {
    nlohmann::json j;
    j["article_id"] = art.article_id;
    j["date"] = art.date.str();
    auto& mentions = j["mentions"] = nlohmann::json::array();
    for (const auto& m : art.mentions) {
      nlohmann::json mj;
      mj["raw_name"] = m.raw_name;
      mj["canonical"] = m.canonical;
      mj["sentiment"] = m.sentiment;
      mj["target"] = m.target;
      mentions.push_back(std::move(mj));
    }
    out << j.dump() << '\n';
  }
}

inline Corpus read_corpus(const std::string& path, const RunConfig& cfg) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path + ": empty corpus artifact");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path + ": bad corpus header: " + e.what());
  }
  if (header.value("kind", "") != "corpus")
    throw ValidationError(path + ": not a corpus artifact");
  if (header.value("config_hash", "") != cfg.config_hash())
    throw ValidationError(path + ": written under config " + header.value("config_hash", "?") +
                          ", current config is " + cfg.config_hash() +
                          "; re-run the producing stage");

  Corpus corpus;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(lineno, path + ": " + e.what());
    }
    Article art;
    art.article_id = j.at("article_id").get<std::string>();
    auto d = Date::parse(j.at("date").get<std::string>());
    if (!d) throw ParseError(lineno, path + ": bad date");
    art.date = *d;
    for (const auto& mj : j.at("mentions")) {
      Mention m;
      m.raw_name = mj.at("raw_name").get<std::string>();
      m.canonical = mj.at("canonical").get<std::string>();
      m.sentiment = mj.at("sentiment").get<double>();
      m.target = mj.at("target").get<bool>();
      m.article_id = art.article_id;
      art.mentions.push_back(std::move(m));
    }
    corpus.articles.push_back(std::move(art));
  }
  return corpus;
}

// ---------------------------------------------------------------------------
// Market data (input CSVs, no artifact header).

struct PriceRow {
  Date date;
  std::string ticker;
  double close = 0.0;
};

inline MarketPanel read_market_panel(const std::string& market_path,
                                     const std::string& index_path) {
  std::vector<PriceRow> rows;
  {
    auto in = open_input(market_path);
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ValidationError(market_path + ": empty file");
    ++lineno;
    if (csv_parse_line(line, lineno) != std::vector<std::string>{"date", "ticker", "close"})
      throw ValidationError(market_path + ": expected header date,ticker,close");
    while (std::getline(in, line)) {
      ++lineno;
      if (trim(line).empty()) continue;
      const auto f = csv_parse_line(line, lineno);
      if (f.size() != 3) throw ParseError(lineno, market_path + ": expected 3 fields");
      auto d = Date::parse(f[0]);
      if (!d) throw ParseError(lineno, market_path + ": bad date '" + f[0] + "'");
      double close = 0.0;
      try {
        close = std::stod(f[2]);
      } catch (...) {
        throw ParseError(lineno, market_path + ": bad close '" + f[2] + "'");
      }
      if (close <= 0.0) throw ParseError(lineno, market_path + ": non-positive close");
      rows.push_back({*d, f[1], close});
    }
  }

  std::vector<std::pair<Date, double>> index_rows;
  {
    auto in = open_input(index_path);
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ValidationError(index_path + ": empty file");
    ++lineno;
    if (csv_parse_line(line, lineno) != std::vector<std::string>{"date", "close"})
      throw ValidationError(index_path + ": expected header date,close");
    while (std::getline(in, line)) {
      ++lineno;
      if (trim(line).empty()) continue;
      const auto f = csv_parse_line(line, lineno);
      if (f.size() != 2) throw ParseError(lineno, index_path + ": expected 2 fields");
      auto d = Date::parse(f[0]);
      if (!d) throw ParseError(lineno, index_path + ": bad date '" + f[0] + "'");
      double close = 0.0;
      try {
        close = std::stod(f[1]);
      } catch (...) {
        throw ParseError(lineno, index_path + ": bad close '" + f[1] + "'");
      }
      if (close <= 0.0) throw ParseError(lineno, index_path + ": non-positive close");
      index_rows.emplace_back(*d, close);
    }
  }

  // trading calendar: every date carrying any price
  std::vector<Date> dates;
  for (const auto& r : rows) dates.push_back(r.date);
  for (const auto& [d, c] : index_rows) {
    (void)c;
    dates.push_back(d);
  }
  Calendar cal(std::move(dates));

  std::set<std::string> ticker_set;
  for (const auto& r : rows) ticker_set.insert(r.ticker);

  MarketPanel panel;
  panel.calendar = cal.days();
  panel.tickers.assign(ticker_set.begin(), ticker_set.end());
  panel.close.assign(panel.tickers.size(),
                     std::vector<std::optional<double>>(panel.calendar.size()));
  panel.index_close.assign(panel.calendar.size(), std::nullopt);

  std::map<std::string, std::size_t> tindex;
  for (std::size_t i = 0; i < panel.tickers.size(); ++i) tindex[panel.tickers[i]] = i;
  for (const auto& r : rows) {
    auto di = cal.index_of(r.date);
    auto& cell = panel.close[tindex.at(r.ticker)][*di];
    if (cell && *cell != r.close)
      throw ValidationError(market_path + ": conflicting close for " + r.ticker + " on " +
                            r.date.str());
    cell = r.close;
  }
  for (const auto& [d, c] : index_rows) {
    auto di = cal.index_of(d);
    if (panel.index_close[*di] && *panel.index_close[*di] != c)
      throw ValidationError(index_path + ": conflicting close on " + d.str());
    panel.index_close[*di] = c;
  }
  return panel;
}

// ---------------------------------------------------------------------------
// Sentiment panel (CSV artifact; empty cell means absent; exact round-trip).

inline void write_panel(const std::string& path, const SentimentPanel& panel,
                        const RunConfig& cfg) {
  auto out = open_output(path);
  std::string columns = "date";
  for (const auto& t : panel.tickers) columns += "," + t;
  write_table_header(out, "panel", cfg, columns);
  for (std::size_t d = 0; d < panel.calendar.size(); ++d) {
    out << panel.calendar[d].str();
    for (std::size_t c = 0; c < panel.tickers.size(); ++c) {
      out << ',';
      if (panel.values[c][d]) out << fmt_exact(*panel.values[c][d]);
    }
    out << '\n';
  }
}

inline SentimentPanel read_panel(const std::string& path, const RunConfig& cfg) {
  auto in = open_input(path);
  const auto columns = read_table_header(in, "panel", cfg, path);
  if (columns.empty() || columns[0] != "date")
    throw ValidationError(path + ": first panel column must be date");
  SentimentPanel panel;
  panel.tickers.assign(columns.begin() + 1, columns.end());
  std::vector<std::vector<std::optional<double>>> by_row;
  std::string line;
  std::size_t lineno = 3;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = csv_parse_line(line, lineno);
    if (f.size() != columns.size())
      throw ParseError(lineno, path + ": wrong number of panel cells");
    auto d = Date::parse(f[0]);
    if (!d) throw ParseError(lineno, path + ": bad date '" + f[0] + "'");
    panel.calendar.push_back(*d);
    std::vector<std::optional<double>> row(panel.tickers.size());
    for (std::size_t c = 0; c < panel.tickers.size(); ++c)
      if (!f[c + 1].empty()) row[c] = std::stod(f[c + 1]);
    by_row.push_back(std::move(row));
  }
  panel.values.assign(panel.tickers.size(),
                      std::vector<std::optional<double>>(panel.calendar.size()));
  for (std::size_t d = 0; d < by_row.size(); ++d)
    for (std::size_t c = 0; c < panel.tickers.size(); ++c)
      panel.values[c][d] = by_row[d][c];
  return panel;
}

// ---------------------------------------------------------------------------
// Edge lists (TSV artifact; src < dst lexicographically, 10 significant
// digits, rows sorted by pair).

inline void write_edges(const std::string& path, const Network& g, const RunConfig& cfg) {
  auto out = open_output(path);
  write_table_header(out, "edges", cfg, "src\tdst\tweight");
  std::vector<EdgeRecord> records;
  records.reserve(g.edges.size());
  for (const auto& [key, w] : g.edges) {
    std::string a = g.nodes[key.first], b = g.nodes[key.second];
    if (b < a) std::swap(a, b);
    records.push_back({{a, b}, w});
  }
  std::sort(records.begin(), records.end(),
            [](const EdgeRecord& x, const EdgeRecord& y) { return x.first < y.first; });
  for (const auto& [pair, w] : records)
    out << pair.first << '\t' << pair.second << '\t' << fmt_sig(w, 10) << '\n';
}

inline std::vector<EdgeRecord> read_edges(const std::string& path, const RunConfig& cfg) {
  auto in = open_input(path);
  const auto columns = read_table_header(in, "edges", cfg, path, '\t');
  if (columns != std::vector<std::string>{"src", "dst", "weight"})
    throw ValidationError(path + ": expected columns src, dst, weight");
  std::vector<EdgeRecord> records;
  std::string line;
  std::size_t lineno = 3;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split(line, '\t');
    if (f.size() != 3) throw ParseError(lineno, path + ": expected 3 fields");
    records.push_back({{f[0], f[1]}, std::stod(f[2])});
  }
  return records;
}

// ---------------------------------------------------------------------------
// Partition (CSV artifact: ticker,group).

inline void write_partition(const std::string& path, const std::vector<std::string>& tickers,
                            const Partition& p, const RunConfig& cfg) {
  auto out = open_output(path);
  write_table_header(out, "partition", cfg, "ticker,group");
  for (std::size_t i = 0; i < tickers.size(); ++i)
    out << tickers[i] << ',' << p.groups[i] << '\n';
}

inline std::pair<std::vector<std::string>, Partition> read_partition(const std::string& path,
                                                                     const RunConfig& cfg) {
  auto in = open_input(path);
  const auto columns = read_table_header(in, "partition", cfg, path);
  if (columns != std::vector<std::string>{"ticker", "group"})
    throw ValidationError(path + ": expected columns ticker, group");
  std::vector<std::string> tickers;
  std::vector<int> groups;
  std::string line;
  std::size_t lineno = 3;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = csv_parse_line(line, lineno);
    if (f.size() != 2) throw ParseError(lineno, path + ": expected 2 fields");
    tickers.push_back(f[0]);
    groups.push_back(std::stoi(f[1]));
  }
  Partition p;
  p.groups = std::move(groups);
  p.k = p.groups.empty() ? 0 : *std::max_element(p.groups.begin(), p.groups.end()) + 1;
  return {std::move(tickers), std::move(p)};
}

// ---------------------------------------------------------------------------
// Events (CSV artifact: ticker,date,direction,z).

inline void write_events(const std::string& path, const std::vector<SentimentEvent>& events,
                         const RunConfig& cfg) {
  auto out = open_output(path);
  write_table_header(out, "events", cfg, "ticker,date,direction,z");
  for (const auto& ev : events)
    out << ev.ticker << ',' << ev.date.str() << ','
        << (ev.direction > 0 ? "positive" : "negative") << ',' << fmt_sig(ev.z_score, 10) << '\n';
}

inline std::vector<SentimentEvent> read_events(const std::string& path, const RunConfig& cfg) {
  auto in = open_input(path);
  const auto columns = read_table_header(in, "events", cfg, path);
  if (columns != std::vector<std::string>{"ticker", "date", "direction", "z"})
    throw ValidationError(path + ": expected columns ticker, date, direction, z");
  std::vector<SentimentEvent> events;
  std::string line;
  std::size_t lineno = 3;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = csv_parse_line(line, lineno);
    if (f.size() != 4) throw ParseError(lineno, path + ": expected 4 fields");
    SentimentEvent ev;
    ev.ticker = f[0];
    auto d = Date::parse(f[1]);
    if (!d) throw ParseError(lineno, path + ": bad date '" + f[1] + "'");
    ev.date = *d;
    if (f[2] == "positive") ev.direction = +1;
    else if (f[2] == "negative") ev.direction = -1;
    else throw ParseError(lineno, path + ": bad direction '" + f[2] + "'");
    ev.z_score = std::stod(f[3]);
    events.push_back(std::move(ev));
  }
  return events;
}

// ---------------------------------------------------------------------------
// Profiles, densities, histograms, stats tables.

inline std::string opt_cell(const std::optional<double>& v, int digits = 10) {
  return v ? fmt_sig(*v, digits) : std::string();
}

inline void write_profile(const std::string& path, const EventProfile& profile,
                          const RunConfig& cfg) {
  auto out = open_output(path);
  write_table_header(out, "profile", cfg, "offset,mean,median,p");
  for (std::size_t o = 0; o < profile.offsets.size(); ++o)
    out << profile.offsets[o] << ',' << opt_cell(profile.mean[o]) << ','
        << opt_cell(profile.median[o]) << ',' << opt_cell(profile.p_values[o]) << '\n';
}

inline void write_market_profile(const std::string& path,
                                 const std::map<int, GroupMarketProfiles>& by_direction,
                                 const RunConfig& cfg) {
  auto out = open_output(path);
  write_table_header(out, "market_profile", cfg,
                     "offset,mean_car,median_car,p_car,mean_vol,median_vol,p_vol,direction");
  for (const char* dirname : {"positive", "negative"}) {
    const int dir = dirname[0] == 'p' ? +1 : -1;
    auto it = by_direction.find(dir);
    if (it == by_direction.end()) continue;
    const auto& prof = it->second;
    for (std::size_t o = 0; o < prof.car_profile.offsets.size(); ++o)
      out << prof.car_profile.offsets[o] << ',' << opt_cell(prof.car_profile.mean[o]) << ','
          << opt_cell(prof.car_profile.median[o]) << ',' << opt_cell(prof.car_profile.p_values[o])
          << ',' << opt_cell(prof.vol_profile.mean[o]) << ','
          << opt_cell(prof.vol_profile.median[o]) << ',' << opt_cell(prof.vol_profile.p_values[o])
          << ',' << dirname << '\n';
  }
}

inline void write_density(const std::string& path, const DensityEstimate& de,
                          const RunConfig& cfg) {
  auto out = open_output(path);
  write_table_header(out, "density", cfg, "grid,density");
  for (std::size_t i = 0; i < de.grid.size(); ++i)
    out << fmt_sig(de.grid[i], 10) << ',' << fmt_sig(de.density[i], 10) << '\n';
}

inline void write_histogram(const std::string& path, const Histogram& h, const RunConfig& cfg) {
  auto out = open_output(path);
  write_table_header(out, "histogram", cfg, "bin_left,bin_right,count");
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    out << fmt_sig(h.edges[i], 10) << ',' << fmt_sig(h.edges[i + 1], 10) << ',' << h.counts[i]
        << '\n';
}

inline void write_correlation(const std::string& path, const std::vector<std::string>& tickers,
                              const std::vector<std::vector<std::optional<double>>>& corr,
                              const RunConfig& cfg) {
  auto out = open_output(path);
  std::string columns = "ticker";
  for (const auto& t : tickers) columns += "," + t;
  write_table_header(out, "correlation", cfg, columns);
  for (std::size_t i = 0; i < tickers.size(); ++i) {
    out << tickers[i];
    for (std::size_t j = 0; j < tickers.size(); ++j) out << ',' << opt_cell(corr[i][j]);
    out << '\n';
  }
}

inline void write_period_table(const std::string& path, const PeriodTable& table,
                               const RunConfig& cfg) {
  auto out = open_output(path);
  std::string columns = "label";
  for (const auto& p : table.periods) columns += "," + quarter_label(p.start);
  write_table_header(out, "period_table", cfg, columns);
  for (std::size_t l = 0; l < table.labels.size(); ++l) {
    out << csv_quote(table.labels[l]);
    for (std::size_t p = 0; p < table.periods.size(); ++p)
      out << ',' << opt_cell(table.values[l][p]);
    out << '\n';
  }
}

inline void write_concentration(const std::string& path, const ConcentrationCurve& curve,
                                const RunConfig& cfg) {
  auto out = open_output(path);
  write_table_header(out, "concentration", cfg, "article_fraction,sentiment_fraction");
  for (const auto& [af, sf] : curve.points)
    out << fmt_sig(af, 10) << ',' << fmt_sig(sf, 10) << '\n';
}

inline void write_json_report(const std::string& path, const std::string& kind,
                              nlohmann::json body, const RunConfig& cfg) {
  body["kind"] = kind;
  body["config_hash"] = cfg.config_hash();
  body["params"] = cfg.param_echo();
  auto out = open_output(path);
  out << body.dump(2) << '\n';
}

inline nlohmann::json read_json_report(const std::string& path, const std::string& kind,
                                       const RunConfig& cfg) {
  auto in = open_input(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
  if (j.value("kind", "") != kind) throw ValidationError(path + ": not a " + kind + " report");
  if (j.value("config_hash", "") != cfg.config_hash())
    throw ValidationError(path + ": written under config " + j.value("config_hash", "?") +
                          ", current config is " + cfg.config_hash() +
                          "; re-run the producing stage");
  return j;
}

}  // namespace newsnet
