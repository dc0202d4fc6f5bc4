#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "walkcover/errors.hpp"
#include "walkcover/estimate.hpp"
#include "walkcover/extensions.hpp"
#include "walkcover/hitting.hpp"
#include "walkcover/oracles/exact.hpp"
#include "walkcover/oracles/monte_carlo.hpp"
#include "walkcover/rational.hpp"
#include "walkcover/report_json.hpp"
#include "walkcover/tree.hpp"

namespace walkcover {

enum class ExitCode : int { ok = 0, input_error = 2, resource_error = 3 };

struct RunConfig {
  std::string command;  // estimate | oracle mc | oracle exact | hitting
  std::string input;
  std::string start;
  std::optional<std::string> epsilon;
  std::optional<std::size_t> trunc_n;
  std::string mode = "cover-return";
  std::string targets;
  std::string units = "chain";
  std::string backend = "auto";
  unsigned precision = 53;
  std::string truncation = "adaptive";
  std::size_t max_n = 4096;
  unsigned threads = 1;
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  std::string from, to;
  std::string output = "json";
};

namespace detail {

inline WeightedTree read_tree_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input file '" + path + "'");
  return parse_tree(in);
}

// One label per line; '#' comments and blank lines are ignored.
inline std::vector<std::string> read_targets_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open targets file '" + path + "'");
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) {
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream tok(line);
    std::string label, extra;
    if (!(tok >> label)) continue;
    if (tok >> extra) throw InputError("targets file: one label per line");
    out.push_back(label);
  }
  return out;
}

inline EstimateOptions estimate_options(const RunConfig& cfg) {
  EstimateOptions opt;
  if (cfg.epsilon.has_value() == cfg.trunc_n.has_value())
    throw InputError("give exactly one of --epsilon and --trunc-n");
  if (cfg.epsilon) opt.epsilon = parse_rational(*cfg.epsilon);
  opt.trunc_n = cfg.trunc_n;
  opt.backend = cfg.backend == "rational" ? BackendChoice::rational
                : cfg.backend == "float"  ? BackendChoice::floating
                                          : BackendChoice::automatic;
  opt.precision_bits = cfg.precision;
  opt.threads = cfg.threads;
  opt.truncation = cfg.truncation == "apriori" ? TruncationPolicy::apriori : TruncationPolicy::adaptive;
  opt.max_n = cfg.max_n;
  return opt;
}

inline std::string run_estimate(const RunConfig& cfg) {
  const WeightedTree tree = read_tree_file(cfg.input);
  const EstimateOptions opt = estimate_options(cfg);
  EstimateReport r;
  if (cfg.mode == "cover-return") {
    r = cover_return_time(tree, cfg.start, opt);
  } else if (cfg.mode == "cover") {
    r = cover_time(tree, cfg.start, opt);
  } else if (cfg.mode == "subset") {
    if (cfg.targets.empty()) throw InputError("--mode subset needs --targets");
    r = cover_return_subset(tree, cfg.start, read_targets_file(cfg.targets), opt);
  } else {
    r = cover_return_weighted(tree, cfg.start, opt,
                              cfg.units == "subdivided" ? StepUnits::subdivided : StepUnits::chain);
  }
  return cfg.output == "json" ? report_json(r).dump() + "\n" : report_text(r);
}

inline std::string run_oracle_mc(const RunConfig& cfg) {
  const WeightedTree tree = read_tree_file(cfg.input);
  const auto task = cfg.mode == "cover" ? oracles::McTask::cover : oracles::McTask::cover_return;
  const auto r = oracles::mc_walk(tree, cfg.start, cfg.samples, cfg.seed, task, std::nullopt, cfg.threads);
  nlohmann::ordered_json j;
  j["oracle"] = "mc";
  j["mode"] = cfg.mode == "cover" ? "cover" : "cover-return";
  j["n"] = tree.vertex_count();
  j["start"] = cfg.start;
  j["samples"] = r.samples;
  j["mean"] = r.mean;
  j["stddev"] = r.stddev;
  j["half_width_99"] = r.half_width;
  j["seed"] = r.seed;
  if (cfg.output == "json") return j.dump() + "\n";
  std::ostringstream os;
  os << "mean " << r.mean << " +/- " << r.half_width << " (99%, " << r.samples << " samples)\n";
  return os.str();
}

inline std::string run_oracle_exact(const RunConfig& cfg) {
  const WeightedTree tree = read_tree_file(cfg.input);
  oracles::ExactResult r;
  if (cfg.mode == "cover") {
    r = oracles::exact_cover_small(tree, cfg.start);
  } else if (cfg.mode == "subset") {
    if (cfg.targets.empty()) throw InputError("--mode subset needs --targets");
    r = oracles::exact_subset_cover_return_small(tree, cfg.start, read_targets_file(cfg.targets));
  } else {
    r = oracles::exact_cover_return_small(tree, cfg.start);
  }
  nlohmann::ordered_json j;
  j["oracle"] = "exact";
  j["mode"] = cfg.mode;
  j["n"] = tree.vertex_count();
  j["start"] = cfg.start;
  j["value"] = to_decimal(r.value);
  j["fraction"] = r.value.get_str();
  j["states"] = r.states;
  if (cfg.output == "json") return j.dump() + "\n";
  return to_decimal(r.value) + " (" + r.value.get_str() + ")\n";
}

inline std::string run_hitting(const RunConfig& cfg) {
  const WeightedTree tree = read_tree_file(cfg.input);
  const Rational h = hitting_time_exact(tree, cfg.from, cfg.to);
  if (cfg.output == "text") return to_decimal(h) + "\n";
  nlohmann::ordered_json j;
  j["from"] = cfg.from;
  j["to"] = cfg.to;
  j["value"] = to_decimal(h);
  j["fraction"] = h.get_str();
  return j.dump() + "\n";
}

}  // namespace detail

// Parses argv (without the program name) and runs one command.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Certified cover-time estimates for random walks on trees", "walkcover"};
  app.require_subcommand(1);
  const std::vector<std::string> output_formats{"json", "text"};

  auto* est = app.add_subcommand("estimate", "Certified estimate for one tree and start vertex");
  est->add_option("--input", cfg.input, "Tree file")->required();
  est->add_option("--start", cfg.start, "Start vertex label")->required();
  est->add_option("--epsilon", cfg.epsilon, "Relative width target");
  est->add_option("--trunc-n", cfg.trunc_n, "Fixed profile length N")->check(CLI::PositiveNumber);
  est->add_option("--mode", cfg.mode)->check(CLI::IsMember({"cover-return", "cover", "subset", "weighted"}));
  est->add_option("--targets", cfg.targets, "Targets file for --mode subset");
  est->add_option("--units", cfg.units)->check(CLI::IsMember({"chain", "subdivided"}));
  est->add_option("--backend", cfg.backend)->check(CLI::IsMember({"auto", "rational", "float"}));
  est->add_option("--precision", cfg.precision, "Float precision in bits")->check(CLI::Range(53u, 100000u));
  est->add_option("--truncation", cfg.truncation)->check(CLI::IsMember({"adaptive", "apriori"}));
  est->add_option("--max-n", cfg.max_n, "Largest N tried")->check(CLI::PositiveNumber);
  est->add_option("--threads", cfg.threads)->check(CLI::Range(1u, 1024u));
  est->add_option("--output", cfg.output)->check(CLI::IsMember(output_formats));

  auto* oracle = app.add_subcommand("oracle", "Reference values from simulation or exact solving");
  oracle->require_subcommand(1);
  auto* mc = oracle->add_subcommand("mc", "Monte-Carlo mean with a 99% interval");
  mc->add_option("--input", cfg.input)->required();
  mc->add_option("--start", cfg.start)->required();
  mc->add_option("--samples", cfg.samples)->check(CLI::PositiveNumber);
  mc->add_option("--seed", cfg.seed);
  mc->add_option("--mode", cfg.mode)->check(CLI::IsMember({"cover-return", "cover"}));
  mc->add_option("--threads", cfg.threads)->check(CLI::Range(1u, 1024u));
  mc->add_option("--output", cfg.output)->check(CLI::IsMember(output_formats));
  auto* exact = oracle->add_subcommand("exact", "Exact value by solving the visited-set chain");
  exact->add_option("--input", cfg.input)->required();
  exact->add_option("--start", cfg.start)->required();
  exact->add_option("--mode", cfg.mode)->check(CLI::IsMember({"cover-return", "cover", "subset"}));
  exact->add_option("--targets", cfg.targets);
  exact->add_option("--output", cfg.output)->check(CLI::IsMember(output_formats));

  auto* hit = app.add_subcommand("hitting", "Exact hitting time H[from, to]");
  hit->add_option("--input", cfg.input)->required();
  hit->add_option("--from", cfg.from)->required();
  hit->add_option("--to", cfg.to)->required();
  hit->add_option("--output", cfg.output)->check(CLI::IsMember(output_formats));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help("", CLI::AppFormatMode::All);
    return static_cast<int>(ExitCode::input_error);
  }

  try {
    if (est->parsed()) out << detail::run_estimate(cfg);
    else if (mc->parsed()) out << detail::run_oracle_mc(cfg);
    else if (exact->parsed()) out << detail::run_oracle_exact(cfg);
    else out << detail::run_hitting(cfg);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::input_error);
  } catch (const ResourceError& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::resource_error);
  }
  return 0;
}

}  // namespace walkcover
