#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "newsnet/community.hpp"
#include "newsnet/config.hpp"
#include "newsnet/corpus.hpp"
#include "newsnet/date.hpp"
#include "newsnet/errors.hpp"
#include "newsnet/events.hpp"
#include "newsnet/io.hpp"
#include "newsnet/marketstudy.hpp"
#include "newsnet/network.hpp"
#include "newsnet/sentiment.hpp"

namespace newsnet {

// Stage orchestration. Stages communicate only through files under the
// output directory, so any stage can be re-run in isolation; artifact
// headers guarantee the inputs were produced under the same configuration.
class Pipeline {
 public:
  explicit Pipeline(RunConfig cfg) : cfg_(std::move(cfg)) { validate(cfg_); }

  const RunConfig& config() const { return cfg_; }

  std::string out_path(const std::string& rel) const {
    return (std::filesystem::path(cfg_.out_dir) / rel).string();
  }

  // --- ingest -------------------------------------------------------------

  struct IngestSummary {
    std::size_t articles = 0;
    std::size_t mentions = 0;
    std::size_t target_mentions = 0;
    std::size_t selected_companies = 0;
  };

  IngestSummary run_ingest() {
    const auto universe = read_universe(cfg_.universe_path);
    auto in = open_input(cfg_.corpus_path);
    const Corpus corpus = parse_corpus(in, universe);
    write_corpus(out_path("corpus.jsonl"), corpus, cfg_);

    IngestSummary summary;
    summary.articles = corpus.articles.size();
    std::map<std::string, std::pair<std::size_t, std::set<std::string>>> per_ticker;
    for (const auto& art : corpus.articles)
      for (const auto& m : art.mentions) {
        ++summary.mentions;
        if (m.target) {
          ++summary.target_mentions;
          auto& acc = per_ticker[m.canonical];
          ++acc.first;
          acc.second.insert(art.article_id);
        }
      }

    std::set<std::string> selected;
    if (!corpus.empty()) {
      const auto span = corpus.span();
      selected = select_frequent_companies(corpus, calendar_quarters(span.start, span.end),
                                           cfg_.min_mentions);
    }
    summary.selected_companies = selected.size();

    auto out = open_output(out_path("universe_summary.csv"));
    write_table_header(out, "universe_summary", cfg_,
                       "ticker,sector,total_mentions,articles,selected");
    for (const auto& c : universe) {
      auto it = per_ticker.find(c.ticker);
      const std::size_t mentions = it == per_ticker.end() ? 0 : it->second.first;
      const std::size_t articles = it == per_ticker.end() ? 0 : it->second.second.size();
      out << c.ticker << ',' << csv_quote(c.sector) << ',' << mentions << ',' << articles << ','
          << (selected.count(c.ticker) ? 1 : 0) << '\n';
    }
    return summary;
  }

  // --- network ------------------------------------------------------------

  struct NetworkSummary {
    std::size_t windows = 0;
    std::size_t edges = 0;
  };

  NetworkSummary run_network(const std::string& window_spec) {
    const auto universe = read_universe(cfg_.universe_path);
    const auto corpus = read_corpus(out_path("corpus.jsonl"), cfg_);
    const auto tickers = universe_tickers(universe);
    std::map<std::string, std::string> sectors;
    for (const auto& c : universe) sectors[c.ticker] = c.sector;

    struct Window {
      std::string label;
      Network net;
    };
    std::vector<Window> windows;
    if (window_spec == "static") {
      windows.push_back(
          {"static", build_network(build_coverage_matrix(corpus, tickers, corpus.span(),
                                                         coverage_mode()))});
    } else if (window_spec == "quarterly") {
      const auto span = corpus.span();
      for (const auto& q : calendar_quarters(span.start, span.end))
        windows.push_back(
            {quarter_label(q.start),
             build_network(build_coverage_matrix(corpus, tickers, q, coverage_mode()))});
    } else if (window_spec.rfind("at:", 0) == 0) {
      const auto date = Date::parse(window_spec.substr(3));
      if (!date) throw ConfigError("network: bad date in window spec '" + window_spec + "'");
      const auto panel = read_market_panel(cfg_.market_path, cfg_.index_path);
      windows.push_back({"at-" + date->str(),
                         dynamic_network(corpus, tickers, *date, cfg_.network_window,
                                         Calendar(panel.calendar), coverage_mode())});
    } else {
      throw ConfigError("network: unknown window spec '" + window_spec +
                        "' (use static, quarterly or at:YYYY-MM-DD)");
    }

    auto stats_out = open_output(out_path("network_stats.csv"));
    write_table_header(stats_out, "network_stats", cfg_,
                       "window,nodes,edges,avg_degree,clustering_coefficient,avg_path_length");

    NetworkSummary summary;
    summary.windows = windows.size();
    for (const auto& w : windows) {
      summary.edges += w.net.edge_count();
      write_edges(out_path("edges_" + w.label + ".tsv"), w.net, cfg_);

      const auto stats = network_stats(w.net);
      stats_out << w.label << ',' << w.net.node_count() << ',' << w.net.edge_count() << ','
                << fmt_sig(stats.avg_degree, 10) << ','
                << fmt_sig(stats.clustering_coefficient, 10) << ','
                << (stats.avg_path_length ? fmt_sig(*stats.avg_path_length, 10) : std::string())
                << '\n';

      write_centrality(w);
      write_outliers(w.label, w.net, sectors);
    }
    return summary;
  }

  // --- groups -------------------------------------------------------------

  struct GroupsSummary {
    int k = 0;
    double nmi_vs_sectors = 0.0;
    std::optional<double> f1_vs_sectors;
    double modularity_q = 0.0;
  };

  GroupsSummary run_groups() {
    const auto universe = read_universe(cfg_.universe_path);
    const auto corpus = read_corpus(out_path("corpus.jsonl"), cfg_);
    const auto tickers = universe_tickers(universe);

    DateRange window = corpus.span();
    if (cfg_.group_period == "first-year")
      window.end = std::min(window.end, window.start + 365);
    const Network net =
        build_network(build_coverage_matrix(corpus, tickers, window, coverage_mode()));

    const Partition partition = louvain(net, cfg_.resolution);
    write_partition(out_path("partition.csv"), tickers, partition, cfg_);

    std::vector<std::string> node_sectors;
    node_sectors.reserve(tickers.size());
    std::map<std::string, std::string> sector_of;
    for (const auto& c : universe) sector_of[c.ticker] = c.sector;
    for (const auto& t : tickers) node_sectors.push_back(sector_of.at(t));

    std::vector<int> sector_ids;
    {
      std::map<std::string, int> sid;
      for (const auto& s : node_sectors) sid.emplace(s, static_cast<int>(sid.size()));
      // re-key densely in sorted sector order for stability
      int next = 0;
      for (auto& [name, id] : sid) id = next++;
      for (const auto& s : node_sectors) sector_ids.push_back(sid.at(s));
    }
    Partition sector_partition = canonical_partition(std::move(sector_ids));

    GroupsSummary summary;
    summary.k = partition.k;
    summary.modularity_q = modularity(net, partition, cfg_.resolution);
    summary.nmi_vs_sectors = nmi(partition, sector_partition);
    try {
      summary.f1_vs_sectors = pairwise_f1(partition, sector_partition);
    } catch (const ComputationError&) {
      summary.f1_vs_sectors = std::nullopt;  // a side has no co-member pairs
    }

    const auto comp = group_composition(partition, node_sectors);
    {
      auto out = open_output(out_path("group_composition.csv"));
      write_table_header(out, "composition", cfg_, "group,sector,count");
      for (std::size_t g = 0; g < comp.counts.size(); ++g)
        for (std::size_t s = 0; s < comp.sectors.size(); ++s)
          if (comp.counts[g][s] > 0)
            out << comp.group_ids[g] << ',' << csv_quote(comp.sectors[s]) << ','
                << comp.counts[g][s] << '\n';
    }

    nlohmann::json body;
    body["k"] = partition.k;
    body["modularity"] = summary.modularity_q;
    body["nmi"] = summary.nmi_vs_sectors;
    if (summary.f1_vs_sectors) body["f1"] = *summary.f1_vs_sectors;
    else body["f1"] = nullptr;
    {
      nlohmann::json contingency;
      contingency["sectors"] = comp.sectors;
      auto& rows = contingency["counts"] = nlohmann::json::array();
      for (const auto& row : comp.counts) rows.push_back(row);
      body["contingency"] = std::move(contingency);
    }
    write_json_report(out_path("group_comparison.json"), "group_comparison", std::move(body),
                      cfg_);
    return summary;
  }

  // --- events -------------------------------------------------------------

  struct EventsSummary {
    std::size_t events = 0;
    std::optional<double> sentiment_explained_variance;
    std::optional<double> event_explained_variance;
  };

  EventsSummary run_events() {
    const auto universe = read_universe(cfg_.universe_path);
    const auto corpus = read_corpus(out_path("corpus.jsonl"), cfg_);
    const auto tickers = universe_tickers(universe);
    const auto market = read_market_panel(cfg_.market_path, cfg_.index_path);
    const Calendar trading(market.calendar);

    const SentimentPanel panel = daily_sentiment_aligned(corpus, tickers, trading);
    write_panel(out_path("panel_trading.csv"), panel, cfg_);

    std::vector<SentimentEvent> events;
    for (std::size_t c = 0; c < tickers.size(); ++c) {
      auto evs = detect_events(tickers[c], panel.values[c], trading, cfg_.lookback_event, cfg_.z,
                               cfg_.min_event_obs);
      events.insert(events.end(), evs.begin(), evs.end());
    }
    std::sort(events.begin(), events.end(), [](const SentimentEvent& a, const SentimentEvent& b) {
      if (a.ticker != b.ticker) return a.ticker < b.ticker;
      return a.date < b.date;
    });
    write_events(out_path("events.csv"), events, cfg_);

    const auto [ptickers, partition] = read_partition(out_path("partition.csv"), cfg_);
    if (ptickers != tickers)
      throw ValidationError("partition.csv does not cover the current universe; re-run groups");

    DynamicNetworkCache cache(corpus, tickers, cfg_.network_window, trading, coverage_mode());
    nlohmann::json index;
    auto& group_entries = index["groups"] = nlohmann::json::array();
    for (int g = 0; g < partition.k; ++g) {
      std::set<std::string> members;
      for (std::size_t i = 0; i < tickers.size(); ++i)
        if (partition.groups[i] == g) members.insert(tickers[i]);
      const auto profile =
          group_event_profile(members, events, panel, cache,
                              static_cast<std::size_t>(cfg_.k_neighbours), cfg_.car_window,
                              static_cast<std::size_t>(cfg_.mwu_exact_threshold));
      const std::string file = "profiles/group_" + std::to_string(g) + ".csv";
      write_profile(out_path(file), profile, cfg_);
      nlohmann::json entry;
      entry["group"] = g;
      entry["file"] = file;
      entry["n_events"] = profile.n_events;
      entry["members"] = std::vector<std::string>(members.begin(), members.end());
      group_entries.push_back(std::move(entry));
    }
    write_json_report(out_path("profiles/index.json"), "profile_index", std::move(index), cfg_);

    const auto event_series = build_event_series(events, tickers, trading);
    write_correlation(out_path("event_correlation.csv"), tickers,
                      event_correlation_matrix(event_series), cfg_);

    // explained variance of the daily sentiment (absent days as neutral) and
    // of the event indicator series
    EventsSummary summary;
    summary.events = events.size();
    std::vector<std::vector<double>> filled(tickers.size(),
                                            std::vector<double>(trading.size(), 0.0));
    for (std::size_t c = 0; c < tickers.size(); ++c)
      for (std::size_t d = 0; d < trading.size(); ++d)
        if (panel.values[c][d]) filled[c][d] = *panel.values[c][d];

    nlohmann::json var_report;
    var_report["n_factors"] = 5;
    try {
      summary.sentiment_explained_variance = explained_variance(filled, 5);
      var_report["sentiment_explained_variance"] = *summary.sentiment_explained_variance;
    } catch (const ComputationError& e) {
      var_report["sentiment_explained_variance"] = nullptr;
      var_report["sentiment_note"] = e.what();
    }
    try {
      summary.event_explained_variance = explained_variance(event_series, 5);
      var_report["event_explained_variance"] = *summary.event_explained_variance;
    } catch (const ComputationError& e) {
      var_report["event_explained_variance"] = nullptr;
      var_report["event_note"] = e.what();
    }
    write_json_report(out_path("variance_report.json"), "variance_report", std::move(var_report),
                      cfg_);
    return summary;
  }

  // --- study --------------------------------------------------------------

  struct StudySummary {
    std::size_t groups = 0;
    std::size_t events_used = 0;
    std::size_t events_dropped = 0;
  };

  StudySummary run_study() {
    const auto universe = read_universe(cfg_.universe_path);
    const auto tickers = universe_tickers(universe);
    const auto market = read_market_panel(cfg_.market_path, cfg_.index_path);
    const auto events = read_events(out_path("events.csv"), cfg_);
    const auto [ptickers, partition] = read_partition(out_path("partition.csv"), cfg_);
    if (ptickers != tickers)
      throw ValidationError("partition.csv does not cover the current universe; re-run groups");

    std::map<std::string, std::string> group_of;
    for (std::size_t i = 0; i < tickers.size(); ++i)
      group_of[tickers[i]] = std::to_string(partition.groups[i]);

    EventStudyParams params;
    params.W = cfg_.car_window;
    params.Ts = cfg_.car_window;
    params.capm_window = cfg_.capm_window;
    params.capm_min_obs = cfg_.capm_min_obs;
    params.mwu_exact_threshold = static_cast<std::size_t>(cfg_.mwu_exact_threshold);
    const auto study = event_window_study(events, market, group_of, params);

    nlohmann::json index;
    auto& group_entries = index["groups"] = nlohmann::json::array();

    StudySummary summary;
    const Calendar trading(market.calendar);
    const SentimentPanel panel = read_panel(out_path("panel_trading.csv"), cfg_);

    for (int g = 0; g < partition.k; ++g) {
      const std::string label = std::to_string(g);
      nlohmann::json entry;
      entry["group"] = g;

      auto it = study.groups.find(label);
      if (it != study.groups.end()) {
        const std::string file = "study/group_" + label + "_profile.csv";
        write_market_profile(out_path(file), it->second, cfg_);
        entry["profile"] = file;
        nlohmann::json dirs;
        for (const auto& [dir, prof] : it->second) {
          const char* dname = dir > 0 ? "positive" : "negative";
          dirs[dname] = {{"n_events", prof.n_events}, {"n_dropped", prof.n_dropped}};
          summary.events_used += static_cast<std::size_t>(prof.n_events);
          summary.events_dropped += static_cast<std::size_t>(prof.n_dropped);
        }
        entry["directions"] = std::move(dirs);
        ++summary.groups;
      } else {
        entry["profile"] = nullptr;
      }

      // group-level events on the aggregate sentiment series drive the
      // distribution study
      std::set<std::string> members;
      for (std::size_t i = 0; i < tickers.size(); ++i)
        if (partition.groups[i] == g) members.insert(tickers[i]);
      const auto group_series = aggregate_series(panel, members);
      const auto group_events =
          detect_events("group_" + label, group_series, trading, cfg_.lookback_event, cfg_.z,
                        cfg_.min_event_obs);

      DistributionParams dist_params;
      dist_params.W = cfg_.car_window;
      dist_params.capm_window = cfg_.capm_window;
      dist_params.capm_min_obs = cfg_.capm_min_obs;
      dist_params.kde_min_events = cfg_.kde_min_events;
      const auto dist = group_distribution_study(group_events, market, members, dist_params);

      nlohmann::json dist_index;
      for (const auto& [dir, phases] : dist.cells) {
        const char* dname = dir > 0 ? "positive" : "negative";
        for (const auto& [phase, measures] : phases) {
          for (const auto& [measure, cell] : measures) {
            const std::string stem =
                "study/group_" + label + "_" + dname + "_" + phase + "_" + measure;
            write_histogram(out_path(stem + "_hist.csv"), cell.histogram, cfg_);
            nlohmann::json centry;
            centry["histogram"] = stem + "_hist.csv";
            centry["n_events"] = cell.n_events;
            centry["n_obs"] = cell.n_obs;
            if (cell.density) {
              write_density(out_path(stem + "_density.csv"), *cell.density, cfg_);
              centry["density"] = stem + "_density.csv";
            } else {
              centry["density"] = nullptr;  // at most kde_min_events events
            }
            dist_index[dname][phase][measure] = std::move(centry);
          }
        }
      }
      entry["distributions"] = std::move(dist_index);
      entry["n_group_events"] = group_events.size();
      group_entries.push_back(std::move(entry));
    }

    auto& drops = index["drop_log"] = nlohmann::json::array();
    for (const auto& d : study.drop_log) drops.push_back(d);
    write_json_report(out_path("study/index.json"), "study_index", std::move(index), cfg_);
    return summary;
  }

  // --- report -------------------------------------------------------------

  struct ReportSummary {
    std::size_t articles = 0;
    std::size_t bearing_articles = 0;
  };

  ReportSummary run_report() {
    const auto universe = read_universe(cfg_.universe_path);
    const auto corpus = read_corpus(out_path("corpus.jsonl"), cfg_);
    const auto tickers = universe_tickers(universe);
    const std::set<std::string> target_set(tickers.begin(), tickers.end());

    std::vector<Date> article_dates;
    for (const auto& art : corpus.articles) article_dates.push_back(art.date);
    const Calendar news_calendar(std::move(article_dates));

    const SentimentPanel panel = daily_sentiment(corpus, tickers, news_calendar);
    write_panel(out_path("panel.csv"), panel, cfg_);

    const auto span = corpus.span();
    const auto quarters =
        corpus.empty() ? std::vector<DateRange>{} : calendar_quarters(span.start, span.end);
    if (!quarters.empty()) {
      std::map<std::string, std::string> identity, sector_of;
      for (const auto& c : universe) {
        identity[c.ticker] = c.ticker;
        sector_of[c.ticker] = c.sector;
      }
      write_period_table(out_path("company_quarterly.csv"),
                         period_aggregate(panel, identity, quarters), cfg_);
      write_period_table(out_path("sector_quarterly.csv"),
                         period_aggregate(panel, sector_of, quarters), cfg_);
    }

    ReportSummary summary;
    summary.articles = corpus.articles.size();
    for (const auto& art : corpus.articles)
      if (sentiment_bearing(art, target_set, cfg_.nonneutral_eps)) ++summary.bearing_articles;

    nlohmann::json body;
    body["articles"] = summary.articles;
    body["sentiment_bearing_articles"] = summary.bearing_articles;
    body["companies"] = tickers.size();
    if (!corpus.empty()) {
      body["span"] = {{"start", span.start.str()}, {"end", (span.end - 1).str()}};
      const auto curve = concentration_curve(corpus, target_set);
      write_concentration(out_path("concentration.csv"), curve, cfg_);
      body["concentration_degenerate"] = curve.degenerate;
    }
    for (const char* artifact : {"events.csv", "partition.csv"}) {
      body[std::string("has_") + artifact] =
          std::filesystem::exists(out_path(artifact));
    }
    write_json_report(out_path("report.json"), "report", std::move(body), cfg_);
    return summary;
  }

 private:
  CoverageMode coverage_mode() const {
    return cfg_.coverage_mode == "indicator" ? CoverageMode::kArticleIndicator
                                             : CoverageMode::kMentionCount;
  }

  static std::vector<std::string> universe_tickers(const std::vector<Company>& universe) {
    std::vector<std::string> tickers;
    tickers.reserve(universe.size());
    for (const auto& c : universe) tickers.push_back(c.ticker);
    return tickers;
  }

  static std::vector<std::optional<double>> aggregate_series(const SentimentPanel& panel,
                                                             const std::set<std::string>& members) {
    std::vector<std::optional<double>> out(panel.calendar.size());
    for (std::size_t d = 0; d < panel.calendar.size(); ++d) {
      double sum = 0.0;
      int n = 0;
      for (std::size_t c = 0; c < panel.tickers.size(); ++c) {
        if (!members.count(panel.tickers[c]) || !panel.values[c][d]) continue;
        sum += *panel.values[c][d];
        ++n;
      }
      if (n > 0) out[d] = sum / static_cast<double>(n);
    }
    return out;
  }

  void write_centrality(const auto& window) {
    std::vector<std::optional<double>> eig(window.net.node_count());
    try {
      const auto v = eigenvector_centrality(window.net);
      for (std::size_t i = 0; i < v.size(); ++i) eig[i] = v[i];
    } catch (const ComputationError&) {
      // edgeless window: leave centralities absent
    }
    const auto bc = betweenness_centrality(window.net);
    auto out = open_output(out_path("centrality_" + window.label + ".csv"));
    write_table_header(out, "centrality", cfg_, "ticker,eigenvector,betweenness");
    for (std::size_t i = 0; i < window.net.node_count(); ++i)
      out << window.net.nodes[i] << ',' << opt_cell(eig[i]) << ',' << fmt_sig(bc[i], 10) << '\n';
  }

  void write_outliers(const std::string& label, const Network& net,
                      const std::map<std::string, std::string>& sectors) {
    const auto split = weight_split(net, sectors);
    std::vector<EdgeRecord> in_edges, out_edges;
    for (const auto& [key, w] : net.edges) {
      std::string a = net.nodes[key.first], b = net.nodes[key.second];
      if (b < a) std::swap(a, b);
      EdgeRecord rec{{a, b}, w};
      if (sectors.at(a) == sectors.at(b)) in_edges.push_back(rec);
      else out_edges.push_back(rec);
    }

    auto write_side = [&](const std::string& side, const std::vector<double>& sample,
                          const std::vector<EdgeRecord>& edges) {
      auto out = open_output(out_path("outliers_" + side + "_" + label + ".csv"));
      write_table_header(out, "outliers", cfg_, "rank,src,src_sector,dst,dst_sector,weight");
      if (sample.empty()) return;
      const auto outliers = outlier_edges(sample, edges);
      std::size_t rank = 1;
      for (const auto& [pair, w] : outliers)
        out << rank++ << ',' << pair.first << ',' << csv_quote(sectors.at(pair.first)) << ','
            << pair.second << ',' << csv_quote(sectors.at(pair.second)) << ','
            << fmt_sig(w, 10) << '\n';
    };
    write_side("in", split.in_sector, in_edges);
    write_side("out", split.out_sector, out_edges);
  }

  RunConfig cfg_;
};

}  // namespace newsnet
