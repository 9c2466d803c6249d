// Copyright 2026 The PLC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// File formats and data preparation.
//
//   rankings CSV   one ranking per line, labels comma-separated, top first.
//                  A row may end in "|A,B,C" naming its consideration set;
//                  after a "#considered" line every row must.
//   ratings CSV    respondent,item,score (header optional).
//   utilities CSV  item,utility
//   params CSV     item,utility,p
//   stats CSV      item,l,prob (long format), "# source=... samples=... k=..."
//   bounds report  item,lower_initial,lower,upper_initial,upper,utility, or
//                  the same fields as JSON.
//   DAG            Graphviz digraph of the transitively reduced flip graph.
//
// Lines starting with '#' are comments unless noted. Numbers are written
// with 6 decimals.

#ifndef PLC_IO_HPP_
#define PLC_IO_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "plc/bounds.hpp"
#include "plc/core.hpp"
#include "plc/plc.hpp"
#include "plc/random.hpp"

namespace plc::io {

inline std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void WriteFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open '" + path + "' for writing");
  out << contents;
  if (!out) throw Error(ErrorCode::kIoError, "failed writing '" + path + "'");
}

inline std::string Fixed6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", x);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

inline double Round6(double x) { return std::round(x * 1e6) / 1e6; }

inline std::string_view Trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> SplitFields(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    out.emplace_back(Trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::vector<std::string> SplitLines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

inline double ParseDouble(const std::string& field, std::size_t line_no) {
  try {
    std::size_t used = 0;
    double v = std::stod(field, &used);
    if (used != field.size() || !std::isfinite(v)) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": bad number '" + field + "'",
                static_cast<std::int64_t>(line_no));
  }
}

inline long ParseInt(const std::string& field, std::size_t line_no) {
  try {
    std::size_t used = 0;
    long v = std::stol(field, &used);
    if (used != field.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": bad integer '" + field + "'",
                static_cast<std::int64_t>(line_no));
  }
}

// Grows a label universe in order of first appearance.
class LabelInterner {
 public:
  LabelInterner() = default;
  explicit LabelInterner(std::vector<std::string> labels) {
    for (auto& l : labels) Intern(l);
  }

  Item Intern(const std::string& label) {
    auto [it, inserted] = index_.emplace(label, static_cast<Item>(labels_.size()));
    if (inserted) labels_.push_back(label);
    return it->second;
  }

  std::optional<Item> Find(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }

 private:
  std::vector<std::string> labels_;
  std::map<std::string, Item> index_;
};

struct LabeledRankings {
  std::vector<std::string> labels;
  RankingDataset data;
};

// Parses the rankings CSV. `known_labels` seeds the universe so indices line
// up with another file (e.g. utilities); unseen labels are appended.
inline LabeledRankings ParseRankingsText(const std::string& text, std::vector<std::string> known_labels = {}) {
  LabelInterner interner(std::move(known_labels));
  struct Row {
    std::vector<Item> ranking;
    std::optional<std::vector<Item>> considered;
    std::size_t line_no;
  };
  std::vector<Row> rows;
  std::optional<std::size_t> k;
  bool require_considered = false;
  auto lines = SplitLines(text);
  for (std::size_t idx = 0; idx < lines.size(); ++idx) {
    const std::size_t line_no = idx + 1;
    std::string_view line = Trim(lines[idx]);
    if (line.empty()) continue;
    if (line == "#considered") {
      require_considered = true;
      continue;
    }
    if (line.front() == '#') continue;
    if (line.find(';') != std::string_view::npos || line.find('\t') != std::string_view::npos) {
      throw Error(ErrorCode::kUnknownSeparator, "line " + std::to_string(line_no) + ": fields must be comma-separated",
                  static_cast<std::int64_t>(line_no));
    }
    Row row{{}, std::nullopt, line_no};
    auto bar = line.find('|');
    if (require_considered && bar == std::string_view::npos) {
      throw Error(ErrorCode::kMissingConsiderationSet,
                  "line " + std::to_string(line_no) + ": consideration set expected after '|'",
                  static_cast<std::int64_t>(line_no));
    }
    auto intern_all = [&](std::string_view part) {
      std::vector<Item> items;
      for (const std::string& f : SplitFields(part, ',')) {
        if (f.empty()) {
          throw Error(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": empty label",
                      static_cast<std::int64_t>(line_no));
        }
        Item i = interner.Intern(f);
        if (std::find(items.begin(), items.end(), i) != items.end()) {
          throw Error(ErrorCode::kDuplicateItem, "line " + std::to_string(line_no) + ": repeated label '" + f + "'",
                      static_cast<std::int64_t>(line_no));
        }
        items.push_back(i);
      }
      return items;
    };
    row.ranking = intern_all(line.substr(0, bar));
    if (bar != std::string_view::npos) row.considered = intern_all(line.substr(bar + 1));
    if (k && *k != row.ranking.size()) {
      throw Error(ErrorCode::kNonUniformK,
                  "line " + std::to_string(line_no) + ": ranking has " + std::to_string(row.ranking.size()) +
                      " items, expected " + std::to_string(*k),
                  static_cast<std::int64_t>(line_no));
    }
    k = row.ranking.size();
    rows.push_back(std::move(row));
  }
  if (!k) throw Error(ErrorCode::kEmptyDataset, "no rankings found");
  if (interner.size() == 0) throw Error(ErrorCode::kEmptyDataset, "no items found");
  RankingDataset data(interner.size(), *k);
  for (auto& row : rows) {
    try {
      data.add(Ranking(std::move(row.ranking)), std::move(row.considered));
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(row.line_no) + ": " + e.what(),
                  static_cast<std::int64_t>(row.line_no));
    }
  }
  return {interner.labels(), std::move(data)};
}

inline LabeledRankings ParseRankingsCsv(const std::string& path, std::vector<std::string> known_labels = {}) {
  return ParseRankingsText(ReadFile(path), std::move(known_labels));
}

inline std::string FormatRankingsCsv(const RankingDataset& data, const std::vector<std::string>& labels) {
  std::ostringstream out;
  bool with_sets = data.size() > 0 && data.all_have_consideration_sets();
  if (with_sets) out << "#considered\n";
  auto join = [&](auto&& items) {
    std::string s;
    for (Item i : items) {
      if (!s.empty()) s += ',';
      s += labels.at(static_cast<std::size_t>(i));
    }
    return s;
  };
  for (std::size_t idx = 0; idx < data.size(); ++idx) {
    out << join(data.ranking(idx));
    if (with_sets) out << '|' << join(*data.considered(idx));
    out << '\n';
  }
  return out.str();
}

struct Rating {
  std::string respondent;
  std::string item;
  double score;
};

struct RatingsTable {
  std::vector<Rating> rows;
};

inline RatingsTable ParseRatingsText(const std::string& text) {
  RatingsTable table;
  std::map<std::pair<std::string, std::string>, std::size_t> seen;
  auto lines = SplitLines(text);
  for (std::size_t idx = 0; idx < lines.size(); ++idx) {
    const std::size_t line_no = idx + 1;
    std::string_view line = Trim(lines[idx]);
    if (line.empty() || line.front() == '#') continue;
    auto f = SplitFields(line, ',');
    if (f.size() != 3) {
      throw Error(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": expected respondent,item,score",
                  static_cast<std::int64_t>(line_no));
    }
    if (table.rows.empty() && seen.empty() && f[0] == "respondent" && f[1] == "item") continue;
    if (!seen.emplace(std::make_pair(f[0], f[1]), line_no).second) {
      throw Error(ErrorCode::kDuplicateItem,
                  "line " + std::to_string(line_no) + ": respondent '" + f[0] + "' rated '" + f[1] + "' twice",
                  static_cast<std::int64_t>(line_no));
    }
    table.rows.push_back({f[0], f[1], ParseDouble(f[2], line_no)});
  }
  return table;
}

struct TiePolicy {
  // Unset: ties keep their order of appearance. Set: tied items are shuffled
  // with this seed.
  std::optional<std::uint64_t> random_seed;

  static TiePolicy Parse(const std::string& spec) {
    if (spec == "stable") return {};
    if (spec.rfind("random:", 0) == 0) {
      try {
        return TiePolicy{std::stoull(spec.substr(7))};
      } catch (const std::exception&) {
      }
    }
    throw Error(ErrorCode::kInvalidArgument, "tie policy must be 'stable' or 'random:<seed>'");
  }
};

struct RatingsConversion {
  LabeledRankings rankings;
  // Respondents whose scores contained ties.
  std::vector<std::string> tied_respondents;
};

// One ranking per respondent: items by descending score, optionally truncated
// to k, with the full rated set as the consideration set.
inline RatingsConversion RatingsToRankings(const RatingsTable& table, std::optional<std::size_t> k = std::nullopt,
                                           const TiePolicy& ties = {}) {
  LabelInterner items;
  std::vector<std::string> respondents;
  std::map<std::string, std::vector<std::pair<Item, double>>> by_respondent;
  for (const Rating& r : table.rows) {
    Item i = items.Intern(r.item);
    auto [it, inserted] = by_respondent.try_emplace(r.respondent);
    if (inserted) respondents.push_back(r.respondent);
    it->second.emplace_back(i, r.score);
  }
  if (respondents.empty()) throw Error(ErrorCode::kEmptyDataset, "ratings table is empty");

  std::optional<Rng> rng;
  if (ties.random_seed) rng.emplace(*ties.random_seed);
  std::vector<std::pair<Ranking, ItemSet>> rows;
  std::vector<std::string> tied;
  std::optional<std::size_t> length;
  for (std::size_t idx = 0; idx < respondents.size(); ++idx) {
    auto scored = by_respondent[respondents[idx]];
    if (scored.size() < 2) {
      throw Error(ErrorCode::kTooFewRatings, "respondent '" + respondents[idx] + "' rated fewer than 2 items",
                  static_cast<std::int64_t>(idx));
    }
    std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    bool has_tie = false;
    for (std::size_t a = 0; a < scored.size();) {
      std::size_t b = a + 1;
      while (b < scored.size() && scored[b].second == scored[a].second) ++b;
      if (b - a > 1) {
        has_tie = true;
        if (rng) {
          for (std::size_t t = b - 1; t > a; --t) {
            auto pick = a + static_cast<std::size_t>(UniformUnit(*rng) * static_cast<double>(t - a + 1));
            std::swap(scored[t], scored[std::min(pick, t)]);
          }
        }
      }
      a = b;
    }
    if (has_tie) tied.push_back(respondents[idx]);
    std::vector<Item> order;
    ItemSet considered;
    for (const auto& [item, score] : scored) {
      order.push_back(item);
      considered.push_back(item);
    }
    std::size_t len = k ? *k : order.size();
    if (len > order.size() || len == 0) {
      throw Error(ErrorCode::kTooFewRatings,
                  "respondent '" + respondents[idx] + "' rated " + std::to_string(order.size()) +
                      " items, cannot form a ranking of length " + std::to_string(len),
                  static_cast<std::int64_t>(idx));
    }
    if (length && *length != len) {
      throw Error(ErrorCode::kNonUniformK,
                  "respondent '" + respondents[idx] + "' rated " + std::to_string(order.size()) +
                      " items; pass a truncation length to equalize",
                  static_cast<std::int64_t>(idx));
    }
    length = len;
    order.resize(len);
    rows.emplace_back(Ranking(std::move(order)), std::move(considered));
  }
  RankingDataset data(items.size(), *length);
  for (auto& [r, c] : rows) data.add(std::move(r), std::move(c));
  return {{items.labels(), std::move(data)}, std::move(tied)};
}

inline TopLStats EmpiricalTopLStats(const RankingDataset& data) {
  if (data.empty()) throw Error(ErrorCode::kEmptyDataset, "no rankings to count");
  const std::size_t n = data.n();
  const std::size_t k = data.k();
  std::vector<std::size_t> counts(n * k, 0);
  for (const Ranking& r : data.rankings()) {
    for (std::size_t pos = 0; pos < k; ++pos) {
      for (std::size_t l = pos + 1; l <= k; ++l) ++counts[static_cast<std::size_t>(r[pos]) * k + (l - 1)];
    }
  }
  TopLStats stats(n, k, StatsSource::kEmpirical, data.size());
  const double m = static_cast<double>(data.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t l = 1; l <= k; ++l) {
      stats.set(static_cast<Item>(i), l, static_cast<double>(counts[i * k + (l - 1)]) / m);
    }
  }
  return stats;
}

// m independent PL+C rankings from one seeded engine.
inline RankingDataset GenerateSynthetic(const PlcParams& params, std::size_t k, std::size_t m, std::uint64_t seed) {
  const std::size_t n = params.n();
  if (k == 0 || k > n) throw Error(ErrorCode::kNormalizerZero, "no consideration set of size k exists");
  RankingDataset data(n, k);
  Rng rng(seed);
  for (std::size_t s = 0; s < m; ++s) data.add(SamplePlcRanking(params.u, params.p, k, rng));
  return data;
}

inline std::string FormatUtilitiesCsv(const std::vector<std::string>& labels, const Utilities& u,
                                      std::optional<double> min_zero_shift = std::nullopt) {
  std::ostringstream out;
  if (min_zero_shift) out << "# min_zero_shift=" << Fixed6(*min_zero_shift) << '\n';
  out << "item,utility\n";
  for (std::size_t i = 0; i < u.size(); ++i) out << labels.at(i) << ',' << Fixed6(u[i]) << '\n';
  return out.str();
}

struct LabeledUtilities {
  std::vector<std::string> labels;
  Utilities u;
};

namespace detail {
// Data rows of a CSV with the given header; header line is optional.
inline std::vector<std::pair<std::size_t, std::vector<std::string>>> CsvRows(const std::string& text,
                                                                              const std::vector<std::string>& header) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  bool first = true;
  auto lines = SplitLines(text);
  for (std::size_t idx = 0; idx < lines.size(); ++idx) {
    std::string_view line = Trim(lines[idx]);
    if (line.empty() || line.front() == '#') continue;
    auto f = SplitFields(line, ',');
    if (first && f == header) {
      first = false;
      continue;
    }
    first = false;
    if (f.size() != header.size()) {
      throw Error(ErrorCode::kParseError,
                  "line " + std::to_string(idx + 1) + ": expected " + std::to_string(header.size()) + " fields",
                  static_cast<std::int64_t>(idx + 1));
    }
    rows.emplace_back(idx + 1, std::move(f));
  }
  return rows;
}

inline std::map<std::string, std::string> CommentMetadata(const std::string& text) {
  std::map<std::string, std::string> meta;
  for (const std::string& raw : SplitLines(text)) {
    std::string_view line = Trim(raw);
    if (line.empty() || line.front() != '#') continue;
    std::istringstream in{std::string(line.substr(1))};
    std::string token;
    while (in >> token) {
      auto eq = token.find('=');
      if (eq != std::string::npos) meta[token.substr(0, eq)] = token.substr(eq + 1);
    }
  }
  return meta;
}
}  // namespace detail

inline LabeledUtilities ParseUtilitiesText(const std::string& text) {
  LabelInterner interner;
  std::vector<double> values;
  for (const auto& [line_no, f] : detail::CsvRows(text, {"item", "utility"})) {
    if (interner.Find(f[0])) {
      throw Error(ErrorCode::kDuplicateItem, "line " + std::to_string(line_no) + ": item '" + f[0] + "' repeated",
                  static_cast<std::int64_t>(line_no));
    }
    interner.Intern(f[0]);
    values.push_back(ParseDouble(f[1], line_no));
  }
  if (values.empty()) throw Error(ErrorCode::kEmptyDataset, "utilities file has no rows");
  return {interner.labels(), Utilities(std::move(values))};
}

struct LabeledParams {
  std::vector<std::string> labels;
  PlcParams params;
};

inline std::string FormatParamsCsv(const std::vector<std::string>& labels, const PlcParams& params,
                                   std::optional<std::size_t> k = std::nullopt) {
  std::ostringstream out;
  if (k) out << "# alpha_true=" << Fixed6(params.p.sum() / static_cast<double>(*k)) << " k=" << *k << '\n';
  out << "item,utility,p\n";
  for (std::size_t i = 0; i < params.n(); ++i) {
    out << labels.at(i) << ',' << Fixed6(params.u[i]) << ',' << Fixed6(params.p[i]) << '\n';
  }
  return out.str();
}

inline LabeledParams ParseParamsText(const std::string& text) {
  LabelInterner interner;
  std::vector<double> u;
  std::vector<double> p;
  for (const auto& [line_no, f] : detail::CsvRows(text, {"item", "utility", "p"})) {
    if (interner.Find(f[0])) {
      throw Error(ErrorCode::kDuplicateItem, "line " + std::to_string(line_no) + ": item '" + f[0] + "' repeated",
                  static_cast<std::int64_t>(line_no));
    }
    interner.Intern(f[0]);
    u.push_back(ParseDouble(f[1], line_no));
    p.push_back(ParseDouble(f[2], line_no));
  }
  if (u.empty()) throw Error(ErrorCode::kEmptyDataset, "params file has no rows");
  return {interner.labels(), PlcParams{Utilities(std::move(u)), ConsiderationProbs(std::move(p))}};
}

inline std::string FormatStatsCsv(const TopLStats& stats, const std::vector<std::string>& labels) {
  std::ostringstream out;
  out << "# source=" << (stats.source() == StatsSource::kExact ? "exact" : "empirical")
      << " samples=" << stats.sample_count() << " k=" << stats.k() << '\n';
  out << "item,l,prob\n";
  for (std::size_t i = 0; i < stats.n(); ++i) {
    for (std::size_t l = 1; l <= stats.k(); ++l) {
      out << labels.at(i) << ',' << l << ',' << Fixed6(stats.at(static_cast<Item>(i), l)) << '\n';
    }
  }
  return out.str();
}

// Reads long-format stats onto the given universe. Items of the universe
// absent from the file get zero rates; items outside it are an error.
inline TopLStats ParseStatsText(const std::string& text, const std::vector<std::string>& universe) {
  LabelInterner interner(universe);
  auto meta = detail::CommentMetadata(text);
  auto rows = detail::CsvRows(text, {"item", "l", "prob"});
  std::size_t k = 0;
  for (const auto& [line_no, f] : rows) {
    long l = ParseInt(f[1], line_no);
    if (l < 1) {
      throw Error(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": cutoff must be >= 1",
                  static_cast<std::int64_t>(line_no));
    }
    k = std::max(k, static_cast<std::size_t>(l));
  }
  if (meta.count("k")) k = std::max(k, static_cast<std::size_t>(ParseInt(meta["k"], 0)));
  if (k == 0) throw Error(ErrorCode::kEmptyDataset, "stats file has no rows");
  StatsSource source = meta.count("source") && meta["source"] == "exact" ? StatsSource::kExact : StatsSource::kEmpirical;
  std::size_t samples = meta.count("samples") ? static_cast<std::size_t>(ParseInt(meta["samples"], 0)) : 0;
  TopLStats stats(universe.size(), k, source, samples);
  for (const auto& [line_no, f] : rows) {
    auto item = interner.Find(f[0]);
    if (!item) {
      throw Error(ErrorCode::kInvalidArgument,
                  "line " + std::to_string(line_no) + ": item '" + f[0] + "' has no utility",
                  static_cast<std::int64_t>(line_no));
    }
    double prob = ParseDouble(f[2], line_no);
    if (prob < 0.0 || prob > 1.0) {
      throw Error(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": probability outside [0, 1]",
                  static_cast<std::int64_t>(line_no));
    }
    stats.set(*item, static_cast<std::size_t>(ParseInt(f[1], line_no)), prob);
  }
  return stats;
}

struct BoundsRow {
  std::string item;
  double lower_initial = 0.0;
  double lower = 0.0;
  double upper_initial = 0.0;
  double upper = 0.0;
  double utility = 0.0;

  friend bool operator==(const BoundsRow&, const BoundsRow&) = default;
};

struct BoundsReport {
  double alpha = 0.0;
  std::size_t k = 0;
  std::size_t n_items = 0;
  std::size_t n_rankings = 0;
  std::string stats_source;
  std::optional<double> conservative_ci;
  std::vector<std::string> inconsistent;
  std::vector<BoundsRow> rows;

  friend bool operator==(const BoundsReport&, const BoundsReport&) = default;
};

// Rows ordered by descending utility, ties by label.
inline BoundsReport MakeBoundsReport(const std::vector<std::string>& labels, const Utilities& u,
                                     const TopLStats& stats, const BoundsResult& result, const BoundsOptions& opts) {
  BoundsReport report;
  report.alpha = opts.alpha;
  report.k = opts.k;
  report.n_items = labels.size();
  report.n_rankings = stats.sample_count();
  report.stats_source = stats.source() == StatsSource::kExact ? "exact" : "empirical";
  report.conservative_ci = opts.conservative_ci;
  for (Item i : result.tightened.inconsistent) report.inconsistent.push_back(labels.at(static_cast<std::size_t>(i)));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    report.rows.push_back({labels[i], result.initial.lower[i], result.tightened.lower[i], result.initial.upper[i],
                           result.tightened.upper[i], u[i]});
  }
  std::sort(report.rows.begin(), report.rows.end(), [](const BoundsRow& a, const BoundsRow& b) {
    if (a.utility != b.utility) return a.utility > b.utility;
    return a.item < b.item;
  });
  return report;
}

inline std::string FormatBoundsCsv(const BoundsReport& report) {
  std::ostringstream out;
  out << "item,lower_initial,lower,upper_initial,upper,utility\n";
  for (const BoundsRow& r : report.rows) {
    out << r.item << ',' << Fixed6(r.lower_initial) << ',' << Fixed6(r.lower) << ',' << Fixed6(r.upper_initial)
        << ',' << Fixed6(r.upper) << ',' << Fixed6(r.utility) << '\n';
  }
  return out.str();
}

inline std::string FormatBoundsJson(const BoundsReport& report) {
  nlohmann::ordered_json j;
  j["alpha"] = Round6(report.alpha);
  j["k"] = report.k;
  j["n_items"] = report.n_items;
  j["n_rankings"] = report.n_rankings;
  j["stats_source"] = report.stats_source;
  j["conservative_ci"] = report.conservative_ci ? nlohmann::ordered_json(Round6(*report.conservative_ci)) : nullptr;
  j["inconsistent"] = report.inconsistent;
  j["rows"] = nlohmann::ordered_json::array();
  for (const BoundsRow& r : report.rows) {
    j["rows"].push_back({{"item", r.item},
                         {"lower_initial", Round6(r.lower_initial)},
                         {"lower", Round6(r.lower)},
                         {"upper_initial", Round6(r.upper_initial)},
                         {"upper", Round6(r.upper)},
                         {"utility", Round6(r.utility)}});
  }
  return j.dump(2) + "\n";
}

inline BoundsReport ParseBoundsJson(const std::string& text) {
  try {
    auto j = nlohmann::json::parse(text);
    BoundsReport report;
    report.alpha = j.at("alpha").get<double>();
    report.k = j.at("k").get<std::size_t>();
    report.n_items = j.at("n_items").get<std::size_t>();
    report.n_rankings = j.at("n_rankings").get<std::size_t>();
    report.stats_source = j.at("stats_source").get<std::string>();
    if (!j.at("conservative_ci").is_null()) report.conservative_ci = j.at("conservative_ci").get<double>();
    report.inconsistent = j.at("inconsistent").get<std::vector<std::string>>();
    for (const auto& r : j.at("rows")) {
      report.rows.push_back({r.at("item").get<std::string>(), r.at("lower_initial").get<double>(),
                             r.at("lower").get<double>(), r.at("upper_initial").get<double>(),
                             r.at("upper").get<double>(), r.at("utility").get<double>()});
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("bounds report JSON: ") + e.what());
  }
}

inline std::string DotQuote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

// Transitive reduction of the flip DAG as a Graphviz digraph. Nodes are the
// items touching an edge, in index order; edges in (from, to) index order.
inline std::string FormatDagDot(const FlipDag& dag, const std::vector<std::string>& labels) {
  FlipDag reduced = TransitiveReduction(dag);
  std::vector<char> used(dag.n(), 0);
  for (const FlipEdge& e : reduced.edges()) {
    used[static_cast<std::size_t>(e.from)] = 1;
    used[static_cast<std::size_t>(e.to)] = 1;
  }
  std::ostringstream out;
  out << "digraph flips {\n";
  for (std::size_t i = 0; i < dag.n(); ++i) {
    if (used[i]) out << "  " << DotQuote(labels.at(i)) << ";\n";
  }
  for (const FlipEdge& e : reduced.edges()) {
    out << "  " << DotQuote(labels.at(static_cast<std::size_t>(e.from))) << " -> "
        << DotQuote(labels.at(static_cast<std::size_t>(e.to))) << ";\n";
  }
  out << "}\n";
  return out.str();
}

struct DotGraph {
  std::string name;
  std::vector<std::string> nodes;
  std::vector<std::pair<std::string, std::string>> edges;
};

// Reader for the digraph subset written by FormatDagDot: quoted or bare IDs,
// node statements and single-hop edge statements.
inline DotGraph ParseDot(const std::string& text) {
  std::size_t pos = 0;
  auto fail = [&](const std::string& what) -> Error {
    return Error(ErrorCode::kParseError, "DOT: " + what + " at offset " + std::to_string(pos),
                 static_cast<std::int64_t>(pos));
  };
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto read_id = [&]() -> std::string {
    skip_ws();
    if (pos >= text.size()) throw fail("unexpected end");
    std::string id;
    if (text[pos] == '"') {
      ++pos;
      while (pos < text.size() && text[pos] != '"') {
        if (text[pos] == '\\' && pos + 1 < text.size()) ++pos;
        id += text[pos++];
      }
      if (pos >= text.size()) throw fail("unterminated string");
      ++pos;
      return id;
    }
    while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
      id += text[pos++];
    }
    if (id.empty()) throw fail("expected identifier");
    return id;
  };
  auto expect = [&](std::string_view token) {
    skip_ws();
    if (text.compare(pos, token.size(), token) != 0) throw fail("expected '" + std::string(token) + "'");
    pos += token.size();
  };

  DotGraph g;
  if (read_id() != "digraph") throw fail("expected 'digraph'");
  skip_ws();
  if (pos < text.size() && text[pos] != '{') g.name = read_id();
  expect("{");
  while (true) {
    skip_ws();
    if (pos >= text.size()) throw fail("missing '}'");
    if (text[pos] == '}') {
      ++pos;
      break;
    }
    std::string a = read_id();
    skip_ws();
    if (text.compare(pos, 2, "->") == 0) {
      pos += 2;
      g.edges.emplace_back(a, read_id());
    } else {
      g.nodes.push_back(a);
    }
    expect(";");
  }
  skip_ws();
  if (pos != text.size()) throw fail("trailing content");
  return g;
}

}  // namespace plc::io

#endif  // PLC_IO_HPP_
