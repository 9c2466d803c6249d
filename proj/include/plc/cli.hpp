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

// Command-line front end. Exit codes: 0 success, 1 usage or validation
// error, 2 I/O error.

#ifndef PLC_CLI_HPP_
#define PLC_CLI_HPP_

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "plc/bounds.hpp"
#include "plc/core.hpp"
#include "plc/io.hpp"
#include "plc/plackett_luce.hpp"
#include "plc/plc.hpp"

namespace plc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

namespace detail {

inline std::string Sci(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

struct DataSource {
  std::string rankings;
  std::string ratings;
  std::size_t k = 0;
  std::string tie_policy = "stable";
};

inline void AddDataOptions(CLI::App* cmd, DataSource& src) {
  auto* rk = cmd->add_option("--rankings", src.rankings, "rankings CSV");
  auto* rt = cmd->add_option("--ratings", src.ratings, "ratings CSV (respondent,item,score)");
  rk->excludes(rt);
  cmd->add_option("--k", src.k, "truncate converted ratings to this length");
  cmd->add_option("--tie-policy", src.tie_policy, "stable | random:<seed>");
}

inline io::LabeledRankings LoadData(const DataSource& src, std::ostream& err) {
  if (!src.rankings.empty()) return io::ParseRankingsCsv(src.rankings);
  if (src.ratings.empty()) throw Error(ErrorCode::kInvalidArgument, "one of --rankings or --ratings is required");
  io::TiePolicy ties = io::TiePolicy::Parse(src.tie_policy);
  auto table = io::ParseRatingsText(io::ReadFile(src.ratings));
  auto conv = io::RatingsToRankings(table, src.k ? std::optional<std::size_t>(src.k) : std::nullopt, ties);
  if (!conv.tied_respondents.empty()) {
    err << "warning: " << conv.tied_respondents.size() << " respondent(s) gave tied scores; "
        << (ties.random_seed ? "ties shuffled" : "kept order of appearance") << " (first: '"
        << conv.tied_respondents.front() << "')\n";
  }
  return std::move(conv.rankings);
}

inline void Emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    io::WriteFile(path, text);
  }
}

inline Ranking ParseRankingArg(const std::string& arg, const std::vector<std::string>& labels) {
  io::LabelInterner known(labels);
  std::vector<Item> items;
  for (const std::string& f : io::SplitFields(arg, ',')) {
    auto i = known.Find(f);
    if (!i) throw Error(ErrorCode::kItemOutOfRange, "unknown item '" + f + "' in --ranking");
    items.push_back(*i);
  }
  return Ranking(std::move(items));
}

}  // namespace detail

inline int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Plackett-Luce with consideration: fitting, probabilities and consideration bounds", "plc"};
  app.require_subcommand(1);

  // fit
  detail::DataSource fit_src;
  FitConfig fit_cfg;
  std::string fit_out;
  auto* fit = app.add_subcommand("fit", "fit PL utilities from rankings with consideration sets");
  detail::AddDataOptions(fit, fit_src);
  fit->add_option("--l2", fit_cfg.l2_strength, "L2 penalty strength");
  fit->add_option("--learning-rate", fit_cfg.learning_rate, "initial step size");
  fit->add_option("--tolerance", fit_cfg.grad_sq_tolerance, "squared-gradient stopping tolerance");
  fit->add_option("--max-iterations", fit_cfg.max_iterations, "iteration budget");
  fit->add_option("--out", fit_out, "utilities CSV (default stdout)");

  // stats
  detail::DataSource stats_src;
  std::string stats_out;
  auto* stats = app.add_subcommand("stats", "empirical top-l statistics");
  detail::AddDataOptions(stats, stats_src);
  stats->add_option("--out", stats_out, "stats CSV (default stdout)");

  // bounds
  std::string b_stats, b_utilities, b_out, b_dot, b_format = "csv";
  double b_alpha = 0.0;
  std::size_t b_k = 0;
  double b_ci = 0.0;
  auto* bounds = app.add_subcommand("bounds", "consideration-probability bounds");
  bounds->add_option("--stats", b_stats, "stats CSV")->required();
  bounds->add_option("--utilities", b_utilities, "utilities CSV")->required();
  bounds->add_option("--alpha", b_alpha, "expected consideration-set size over k; must exceed 1")->required();
  auto* b_k_opt = bounds->add_option("--k", b_k, "ranking length (default: from stats)");
  bounds->add_option("--format", b_format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  bounds->add_option("--out", b_out, "report path (default stdout)");
  bounds->add_option("--dot", b_dot, "write the reduced flip DAG here");
  auto* b_ci_opt = bounds->add_option("--conservative-ci", b_ci, "two-sided Wilson level for empirical rates");

  // prob
  std::string p_params, p_ranking, p_method = "exact";
  std::size_t p_k = 0;
  McConfig p_mc;
  double p_epsilon = 0.05;
  auto* prob = app.add_subcommand("prob", "probability of one ranking");
  prob->add_option("--params", p_params, "params CSV (item,utility,p)")->required();
  prob->add_option("--ranking", p_ranking, "comma-separated labels, top first")->required();
  auto* p_k_opt = prob->add_option("--k", p_k, "ranking length (default: length of --ranking)");
  prob->add_option("--method", p_method, "exact | mc | binned")->check(CLI::IsMember({"exact", "mc", "binned"}));
  prob->add_option("--epsilon", p_epsilon, "error parameter for mc and binned");
  prob->add_option("--delta", p_mc.delta, "failure probability for mc");
  prob->add_option("--seed", p_mc.seed, "seed for mc");

  // simulate
  std::string s_params, s_out, s_truth;
  std::size_t s_k = 0, s_m = 0;
  std::uint64_t s_seed = 0;
  auto* simulate = app.add_subcommand("simulate", "sample synthetic PL+C rankings");
  simulate->add_option("--params", s_params, "params CSV (item,utility,p)")->required();
  simulate->add_option("--k", s_k, "ranking length")->required();
  simulate->add_option("--m", s_m, "number of rankings")->required();
  simulate->add_option("--seed", s_seed, "random seed");
  simulate->add_option("--out", s_out, "rankings CSV")->required();
  simulate->add_option("--truth", s_truth, "ground-truth params file (default <out>.truth.csv)");

  // witness
  std::size_t w_n = 0, w_k = 0;
  double w_g1 = 0.0, w_g2 = 0.0, w_c = 0.0;
  std::string w_out;
  auto* witness = app.add_subcommand("witness", "two parameterizations with the same ranking distribution");
  witness->add_option("--n", w_n, "number of items")->required();
  witness->add_option("--k", w_k, "ranking length")->required();
  witness->add_option("--g1", w_g1, "good-item probability, first model")->required();
  witness->add_option("--g2", w_g2, "good-item probability, second model")->required();
  witness->add_option("--c", w_c, "mass of rankings ending in the bad item")->required();
  witness->add_option("--out", w_out, "prefix for <prefix>1.csv and <prefix>2.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kExitValidation;
  }

  try {
    if (fit->parsed()) {
      auto data = detail::LoadData(fit_src, err);
      FitReport rep = PlFitDetailed(data.data, fit_cfg);
      auto values = rep.utilities.values();
      const double shift = *std::min_element(values.begin(), values.end());
      Utilities normalized = NormalizeUtilities(rep.utilities, NormalizeMode::kMinZero);
      detail::Emit(fit_out, io::FormatUtilitiesCsv(data.labels, normalized, shift), out);
      err << "fit: " << data.labels.size() << " items, " << data.data.size() << " rankings, nll "
          << detail::Sci(rep.nll) << ", " << rep.iterations << " iterations\n";
    } else if (stats->parsed()) {
      auto data = detail::LoadData(stats_src, err);
      detail::Emit(stats_out, io::FormatStatsCsv(io::EmpiricalTopLStats(data.data), data.labels), out);
    } else if (bounds->parsed()) {
      auto utilities = io::ParseUtilitiesText(io::ReadFile(b_utilities));
      TopLStats st = io::ParseStatsText(io::ReadFile(b_stats), utilities.labels);
      BoundsOptions opts;
      opts.alpha = b_alpha;
      opts.k = b_k_opt->count() ? b_k : st.k();
      if (b_ci_opt->count()) opts.conservative_ci = b_ci;
      BoundsResult result = ComputeBounds(st, utilities.u, opts);
      io::BoundsReport report = io::MakeBoundsReport(utilities.labels, utilities.u, st, result, opts);
      detail::Emit(b_out, b_format == "json" ? io::FormatBoundsJson(report) : io::FormatBoundsCsv(report), out);
      if (!b_dot.empty()) io::WriteFile(b_dot, io::FormatDagDot(result.dag, utilities.labels));
      if (!report.inconsistent.empty()) {
        err << "warning: lower bound exceeds upper bound for " << report.inconsistent.size()
            << " item(s); the alpha assumption or utility order is violated\n";
      }
    } else if (prob->parsed()) {
      auto params = io::ParseParamsText(io::ReadFile(p_params));
      Ranking r = detail::ParseRankingArg(p_ranking, params.labels);
      const std::size_t k = p_k_opt->count() ? p_k : r.size();
      if (p_method == "exact") {
        out << "probability=" << detail::Sci(PlcProbExact(r, params.params.u, params.params.p, k)) << "\n";
      } else if (p_method == "mc") {
        p_mc.epsilon = p_epsilon;
        McEstimate est = PlcProbMc(r, params.params.u, params.params.p, k, p_mc);
        out << "probability=" << detail::Sci(est.estimate) << "\nsamples=" << est.samples
            << "\nattempts=" << est.attempts << "\n";
      } else {
        out << "probability=" << detail::Sci(PlcProbBinned(r, params.params.u, params.params.p, k, p_epsilon))
            << "\n";
      }
    } else if (simulate->parsed()) {
      auto params = io::ParseParamsText(io::ReadFile(s_params));
      RankingDataset data = io::GenerateSynthetic(params.params, s_k, s_m, s_seed);
      io::WriteFile(s_out, io::FormatRankingsCsv(data, params.labels));
      io::WriteFile(s_truth.empty() ? s_out + ".truth.csv" : s_truth,
                    io::FormatParamsCsv(params.labels, params.params, s_k));
    } else if (witness->parsed()) {
      auto [a, b] = NonidentifiabilityWitness(w_n, w_k, w_g1, w_g2, w_c);
      std::vector<std::string> labels;
      for (std::size_t i = 0; i < w_n; ++i) labels.push_back("item" + std::to_string(i));
      if (!w_out.empty()) {
        io::WriteFile(w_out + "1.csv", io::FormatParamsCsv(labels, a));
        io::WriteFile(w_out + "2.csv", io::FormatParamsCsv(labels, b));
      }
      out << "# model 1\n" << io::FormatParamsCsv(labels, a) << "# model 2\n" << io::FormatParamsCsv(labels, b);
      out << "total_variation=" << detail::Sci(TotalVariationExact(a, b, w_k)) << "\n";
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kIoError ? kExitIo : kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}

inline int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"plc"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  return Run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace plc::cli

#endif  // PLC_CLI_HPP_
