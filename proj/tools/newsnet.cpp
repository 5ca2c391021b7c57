// Command-line front end for the news co-occurrence analysis pipeline.
// Subcommands mirror the pipeline stages; every stage persists its outputs
// under --out and later stages refuse intermediates from other configs.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "newsnet/config.hpp"
#include "newsnet/errors.hpp"
#include "newsnet/fixture.hpp"
#include "newsnet/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMissingInput = 2;
constexpr int kExitValidation = 3;
constexpr int kExitComputation = 4;

struct GlobalOptions {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 42;
  std::vector<std::string> overrides;  // key=value
  std::string corpus, universe, market, index;
};

// Paths in a config file are resolved against the file's own directory so a
// bundled fixture works from any working directory.
std::string resolve_against(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return p;
  std::filesystem::path fp(p);
  if (fp.is_absolute()) return p;
  return (base / fp).lexically_normal().string();
}

newsnet::RunConfig load_config(const GlobalOptions& opts) {
  newsnet::RunConfig cfg;
  if (!opts.config_path.empty()) {
    cfg = newsnet::RunConfig::from_file(opts.config_path);
    const auto base = std::filesystem::path(opts.config_path).parent_path();
    cfg.corpus_path = resolve_against(base, cfg.corpus_path);
    cfg.universe_path = resolve_against(base, cfg.universe_path);
    cfg.market_path = resolve_against(base, cfg.market_path);
    cfg.index_path = resolve_against(base, cfg.index_path);
    if (!cfg.out_dir.empty()) cfg.out_dir = resolve_against(base, cfg.out_dir);
  }
  for (const auto& kv : opts.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw newsnet::ConfigError("--set expects key=value, got '" + kv + "'");
    cfg.apply(newsnet::trim(kv.substr(0, eq)), newsnet::trim(kv.substr(eq + 1)));
  }
  if (!opts.corpus.empty()) cfg.corpus_path = opts.corpus;
  if (!opts.universe.empty()) cfg.universe_path = opts.universe;
  if (!opts.market.empty()) cfg.market_path = opts.market;
  if (!opts.index.empty()) cfg.index_path = opts.index;
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"news co-occurrence network and sentiment event analysis"};
  app.require_subcommand(1);

  GlobalOptions opts;
  app.add_option("--config", opts.config_path, "key=value configuration file");
  app.add_option("--out", opts.out_dir, "output directory (overrides config)");
  app.add_option("--seed", opts.seed, "seed for synthetic fixture generation only");
  app.add_option("--set", opts.overrides, "override a config key, e.g. --set z=2.5");
  app.add_option("--corpus", opts.corpus, "corpus JSONL path");
  app.add_option("--universe", opts.universe, "universe CSV path");
  app.add_option("--market", opts.market, "market CSV path");
  app.add_option("--index", opts.index, "index CSV path");

  auto* ingest = app.add_subcommand("ingest", "parse and persist corpus + universe summary");
  auto* network = app.add_subcommand("network", "build co-occurrence networks and statistics");
  std::string window_spec = "static";
  network->add_option("--window", window_spec, "static | quarterly | at:YYYY-MM-DD");
  auto* groups = app.add_subcommand("groups", "detect company groups and compare to sectors");
  auto* events = app.add_subcommand("events", "detect sentiment events and neighbour profiles");
  auto* study = app.add_subcommand("study", "event study: CAR/volatility profiles and densities");
  auto* report = app.add_subcommand("report", "sentiment evolution tables and run summary");
  auto* fixture = app.add_subcommand("fixture", "generate the synthetic input bundle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (fixture->parsed()) {
      const std::string dir = opts.out_dir.empty() ? "fixture" : opts.out_dir;
      newsnet::generate_fixture(dir, opts.seed);
      std::cout << "fixture: wrote corpus.jsonl, universe.csv, market.csv, index.csv, config.txt"
                << " under " << dir << " (seed " << opts.seed << ")\n";
      return kExitOk;
    }

    newsnet::Pipeline pipeline(load_config(opts));
    if (ingest->parsed()) {
      const auto s = pipeline.run_ingest();
      std::cout << "ingest: " << s.articles << " articles, " << s.mentions << " mentions ("
                << s.target_mentions << " target), " << s.selected_companies
                << " companies pass the frequency rule\n";
    } else if (network->parsed()) {
      const auto s = pipeline.run_network(window_spec);
      std::cout << "network: " << s.windows << " window(s), " << s.edges << " edges total\n";
    } else if (groups->parsed()) {
      const auto s = pipeline.run_groups();
      std::cout << "groups: k=" << s.k << " Q=" << newsnet::fmt_sig(s.modularity_q, 6)
                << " nmi=" << newsnet::fmt_sig(s.nmi_vs_sectors, 6) << " f1="
                << (s.f1_vs_sectors ? newsnet::fmt_sig(*s.f1_vs_sectors, 6) : std::string("n/a"))
                << "\n";
    } else if (events->parsed()) {
      const auto s = pipeline.run_events();
      std::cout << "events: " << s.events << " events";
      if (s.sentiment_explained_variance)
        std::cout << ", sentiment EV(5)=" << newsnet::fmt_sig(*s.sentiment_explained_variance, 6);
      if (s.event_explained_variance)
        std::cout << ", event EV(5)=" << newsnet::fmt_sig(*s.event_explained_variance, 6);
      std::cout << "\n";
    } else if (study->parsed()) {
      const auto s = pipeline.run_study();
      std::cout << "study: " << s.groups << " group(s), " << s.events_used << " events used, "
                << s.events_dropped << " dropped\n";
    } else if (report->parsed()) {
      const auto s = pipeline.run_report();
      std::cout << "report: " << s.articles << " articles, " << s.bearing_articles
                << " sentiment-bearing\n";
    }
    return kExitOk;
  } catch (const newsnet::MissingInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMissingInput;
  } catch (const newsnet::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const newsnet::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const newsnet::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const newsnet::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitComputation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitComputation;
  }
}
