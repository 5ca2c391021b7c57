#pragma once

#include <algorithm>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "newsnet/date.hpp"
#include "newsnet/errors.hpp"
#include "newsnet/text.hpp"

namespace newsnet {

struct Mention {
  std::string raw_name;
  std::string canonical;  // ticker when target, otherwise the normalized text
  double sentiment = 0.0;
  std::string article_id;
  bool target = false;
};

struct Article {
  std::string article_id;
  Date date;
  std::vector<Mention> mentions;
};

struct Company {
  std::string ticker;
  std::string full_name;
  std::string sector;
  std::vector<std::string> aliases;
};

struct Corpus {
  std::vector<Article> articles;  // ascending date

  bool empty() const { return articles.empty(); }
  // Half-open span covering every article date.
  DateRange span() const {
    if (articles.empty()) return {Date(0), Date(0)};
    return {articles.front().date, articles.back().date + 1};
  }
};

// Trailing corporate designators dropped during name normalization. The list
// is configurable; these defaults cover the common registered forms.
inline const std::vector<std::string>& default_suffixes() {
  static const std::vector<std::string> kSuffixes = {
      "llc", "group", "inc", "corp", "co", "ltd", "ag", "se", "plc",
  };
  return kSuffixes;
}

// Case-folded, suffix-stripped canonical form of an entity name. Idempotent:
// a second application never changes the result.
inline std::string canonicalize_name(std::string_view raw,
                                     const std::vector<std::string>& suffixes = default_suffixes()) {
  std::string folded = to_lower(trim(raw));
  auto tokens = split_ws(folded);
  auto strip_punct = [](std::string t) {
    while (!t.empty() && (t.back() == '.' || t.back() == ',')) t.pop_back();
    return t;
  };
  for (auto& t : tokens) t = strip_punct(t);
  auto is_suffix = [&](const std::string& t) {
    return std::find(suffixes.begin(), suffixes.end(), t) != suffixes.end();
  };
  while (tokens.size() > 1 && is_suffix(tokens.back())) tokens.pop_back();
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

// Lookup from canonical entity text to ticker. Built from the company
// universe; bracket-derived pairs may be registered on top.
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(const std::vector<Company>& universe,
                      std::vector<std::string> suffixes = default_suffixes())
      : suffixes_(std::move(suffixes)) {
    for (const auto& c : universe) {
      add_strict(canonicalize_name(c.ticker, suffixes_), c.ticker);
      add_strict(canonicalize_name(c.full_name, suffixes_), c.ticker);
      for (const auto& a : c.aliases) add_strict(canonicalize_name(a, suffixes_), c.ticker);
    }
  }

  const std::vector<std::string>& suffixes() const { return suffixes_; }

  std::optional<std::string> lookup_canonical(const std::string& canonical) const {
    auto it = entries_.find(canonical);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  // Bracket pairs are only accepted when the abbreviation already resolves;
  // they must not override curated entries.
  void register_bracket_pair(const std::string& long_form, const std::string& abbreviation) {
    auto ticker = lookup_canonical(canonicalize_name(abbreviation, suffixes_));
    if (!ticker) return;
    entries_.emplace(canonicalize_name(long_form, suffixes_), *ticker);
  }

  std::size_t size() const { return entries_.size(); }

 private:
  void add_strict(const std::string& key, const std::string& ticker) {
    if (key.empty()) return;
    auto [it, inserted] = entries_.emplace(key, ticker);
    if (!inserted && it->second != ticker)
      throw ValidationError("alias '" + key + "' maps to both " + it->second + " and " + ticker);
  }

  std::map<std::string, std::string> entries_;
  std::vector<std::string> suffixes_ = default_suffixes();
};

// Normalizes a raw entity string and resolves it against the alias table.
// A failed lookup is a value, not an error.
inline std::optional<std::string> normalize_entity_name(std::string_view raw,
                                                        const AliasTable& table) {
  return table.lookup_canonical(canonicalize_name(raw, table.suffixes()));
}

// Finds parenthesized all-caps tokens of length 2-6 that directly follow a
// capitalized multi-word phrase and emits (phrase, token) pairs.
inline std::vector<std::pair<std::string, std::string>> extract_bracket_aliases(
    std::string_view sentence) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t open = sentence.find('(', pos);
    if (open == std::string_view::npos) break;
    const std::size_t close = sentence.find(')', open + 1);
    if (close == std::string_view::npos) break;
    pos = close + 1;
    const std::string_view token = sentence.substr(open + 1, close - open - 1);
    if (token.size() < 2 || token.size() > 6 || !all_caps(token)) continue;
    const auto words = split_ws(sentence.substr(0, open));
    std::size_t run = 0;
    while (run < words.size() && starts_with_upper(words[words.size() - 1 - run])) ++run;
    if (run < 2) continue;
    std::string phrase;
    for (std::size_t i = words.size() - run; i < words.size(); ++i) {
      if (!phrase.empty()) phrase += ' ';
      phrase += words[i];
    }
    out.emplace_back(std::move(phrase), std::string(token));
  }
  return out;
}

// Parses line-delimited article records, resolving mention names against the
// universe (augmented with bracket aliases found in the optional sentence
// text). Unresolved mentions are kept but flagged non-target.
inline Corpus parse_corpus(std::istream& in, const std::vector<Company>& universe,
                           const std::vector<std::string>& suffixes = default_suffixes()) {
  struct RawArticle {
    std::string id;
    Date date;
    std::vector<std::pair<std::string, double>> mentions;
  };

  AliasTable table(universe, suffixes);
  std::vector<RawArticle> raw;
  std::set<std::string> seen_ids;
  std::vector<std::string> duplicate_ids;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;

    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(lineno, std::string("invalid record: ") + e.what());
    }
    if (!rec.is_object() || !rec.contains("article_id") || !rec.contains("date") ||
        !rec.contains("mentions"))
      throw ParseError(lineno, "record must have article_id, date and mentions");

    RawArticle art;
    art.id = rec["article_id"].is_string() ? rec["article_id"].get<std::string>()
                                           : rec["article_id"].dump();
    auto date = Date::parse(rec["date"].get<std::string>());
    if (!date) throw ParseError(lineno, "invalid date '" + rec["date"].get<std::string>() + "'");
    art.date = *date;

    if (!rec["mentions"].is_array()) throw ParseError(lineno, "mentions must be an array");
    for (const auto& m : rec["mentions"]) {
      if (!m.contains("raw_name") || !m.contains("sentiment"))
        throw ParseError(lineno, "mention must have raw_name and sentiment");
      const double s = m["sentiment"].get<double>();
      if (!(s >= -1.0 && s <= 1.0))
        throw ParseError(lineno, "sentiment " + std::to_string(s) + " outside [-1,1]");
      art.mentions.emplace_back(m["raw_name"].get<std::string>(), s);
    }

    if (!seen_ids.insert(art.id).second) duplicate_ids.push_back(art.id);

    if (rec.contains("sentences") && rec["sentences"].is_array()) {
      for (const auto& s : rec["sentences"]) {
        if (!s.is_string()) continue;
        for (auto& [phrase, abbrev] : extract_bracket_aliases(s.get<std::string>()))
          table.register_bracket_pair(phrase, abbrev);
      }
    }

    raw.push_back(std::move(art));
  }

  if (!duplicate_ids.empty()) {
    std::string msg = "duplicate article_id:";
    for (const auto& id : duplicate_ids) msg += " " + id;
    throw ValidationError(msg);
  }

  Corpus corpus;
  corpus.articles.reserve(raw.size());
  for (auto& r : raw) {
    Article art;
    art.article_id = r.id;
    art.date = r.date;
    for (auto& [name, sentiment] : r.mentions) {
      Mention m;
      m.raw_name = name;
      m.sentiment = sentiment;
      m.article_id = r.id;
      if (auto ticker = normalize_entity_name(name, table)) {
        m.canonical = *ticker;
        m.target = true;
      } else {
        m.canonical = canonicalize_name(name, suffixes);
        m.target = false;
      }
      art.mentions.push_back(std::move(m));
    }
    corpus.articles.push_back(std::move(art));
  }
  std::stable_sort(corpus.articles.begin(), corpus.articles.end(),
                   [](const Article& a, const Article& b) { return a.date < b.date; });
  return corpus;
}

// Tickers mentioned strictly more than min_mentions times in every quarter.
inline std::set<std::string> select_frequent_companies(const Corpus& corpus,
                                                       const std::vector<DateRange>& quarters,
                                                       int min_mentions = 4) {
  if (quarters.empty()) throw ConfigError("select_frequent_companies: no quarters given");

  std::map<std::string, std::vector<int>> counts;  // ticker -> per-quarter count
  for (const auto& art : corpus.articles) {
    std::size_t q = quarters.size();
    for (std::size_t i = 0; i < quarters.size(); ++i) {
      if (quarters[i].contains(art.date)) {
        q = i;
        break;
      }
    }
    if (q == quarters.size()) continue;
    for (const auto& m : art.mentions) {
      if (!m.target) continue;
      auto& v = counts.try_emplace(m.canonical, std::vector<int>(quarters.size(), 0)).first->second;
      ++v[q];
    }
  }

  std::set<std::string> selected;
  for (const auto& [ticker, per_quarter] : counts) {
    bool ok = true;
    for (int c : per_quarter)
      if (c <= min_mentions) {
        ok = false;
        break;
      }
    if (ok) selected.insert(ticker);
  }
  return selected;
}

enum class CoverageMode {
  kMentionCount,      // entry = number of mentions of the company in the article
  kArticleIndicator,  // entry = 1 if the company appears at all
};

struct CoverageMatrix {
  std::vector<std::string> companies;
  std::vector<std::string> article_ids;
  std::vector<std::vector<int>> counts;  // companies x articles
  DateRange window;
};

// Company-by-article mention counts over a date window. Articles mentioning
// none of the listed companies contribute no column.
inline CoverageMatrix build_coverage_matrix(const Corpus& corpus,
                                            const std::vector<std::string>& companies,
                                            DateRange window,
                                            CoverageMode mode = CoverageMode::kMentionCount) {
  CoverageMatrix m;
  m.companies = companies;
  m.window = window;
  m.counts.assign(companies.size(), {});

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < companies.size(); ++i) index[companies[i]] = i;

  for (const auto& art : corpus.articles) {
    if (!window.contains(art.date)) continue;
    std::vector<int> col(companies.size(), 0);
    bool any = false;
    for (const auto& men : art.mentions) {
      if (!men.target) continue;
      auto it = index.find(men.canonical);
      if (it == index.end()) continue;
      ++col[it->second];
      any = true;
    }
    if (!any) continue;
    for (std::size_t i = 0; i < companies.size(); ++i) {
      int c = col[i];
      if (mode == CoverageMode::kArticleIndicator && c > 0) c = 1;
      m.counts[i].push_back(c);
    }
    m.article_ids.push_back(art.article_id);
  }
  return m;
}

}  // namespace newsnet
