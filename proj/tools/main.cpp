// vllcm: derive probe sets, simulate or ingest model probabilities, score
// logical consistency and summarize / correlate across models.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

using namespace vllcm;
using namespace vllcm::cli;

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("vllcm");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("LCM_LOG_LEVEL")) {
    const std::string level = env;
    if (level == "error" || level == "warn" || level == "info" || level == "debug") {
      spdlog::set_level(spdlog::level::from_str(level));
    } else {
      spdlog::warn("ignoring unknown LCM_LOG_LEVEL '{}'", level);
    }
  }
}


}  // namespace

int main(int argc, char** argv) {
  configure_logging();

  CLI::App app{"Logical-consistency scoring for vision-language model outputs"};
  app.require_subcommand(1);

  std::string format_name, jacc_scale = "root", mode_name = "mc_pairs";
  std::string manifest, tests, probs, out, scores, pool, model, dataset;
  std::optional<std::string> coverage, distribution;
  std::vector<std::string> summaries;
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  ScoringOptions scoring;
  std::string profile_name = "perfect";
  double sigma = 0.1;
  std::optional<double> accuracy_target;
  PairingConfig pairing;

  auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", format_name, "mc|nb")->required()->check(CLI::IsMember({"mc", "nb"}));
  };

  auto* derive = app.add_subcommand("derive", "Expand a manifest into its probe set");
  derive->add_option("manifest", manifest, "Manifest file")->required()->check(CLI::ExistingFile);
  add_format(derive);
  derive->add_option("--out", out, "Tests file to write")->required();

  auto* validate = app.add_subcommand("validate", "List every invariant violation in a manifest");
  validate->add_option("manifest", manifest, "Manifest file")->required()->check(CLI::ExistingFile);
  add_format(validate);

  auto* simulate = app.add_subcommand("simulate", "Fill probability records with a synthetic model");
  simulate->add_option("tests", tests, "Tests file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--manifest", manifest, "Manifest the tests were derived from")
      ->required()
      ->check(CLI::ExistingFile);
  add_format(simulate);
  simulate->add_option("--profile", profile_name, "perfect|uniform|overconfident_yes|shortcut|noisy")
      ->check(CLI::IsMember({"perfect", "uniform", "overconfident_yes", "shortcut", "noisy"}));
  simulate->add_option("--seed", seed, "Random seed");
  simulate->add_option("--sigma", sigma, "Noise level for the noisy profile")->check(CLI::NonNegativeNumber);
  simulate->add_option("--accuracy-target", accuracy_target, "Target MC accuracy (shortcut, noisy)")
      ->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--out", out, "Probability file to write")->required();

  auto* score = app.add_subcommand("score", "Score every complete sample");
  score->add_option("--manifest", manifest, "Manifest file")->required()->check(CLI::ExistingFile);
  add_format(score);
  score->add_option("--tests", tests, "Tests file")->required()->check(CLI::ExistingFile);
  score->add_option("--probs", probs, "Probability records")->required()->check(CLI::ExistingFile);
  score->add_option("--workers", workers, "Scoring threads (0 = all cores)");
  score->add_option("--threshold", scoring.threshold, "Confirmation / J-Acc threshold")
      ->check(CLI::Range(0.0, 1.0));
  score->add_option("--nb-jacc-scale", jacc_scale, "root|raw")->check(CLI::IsMember({"root", "raw"}));
  score->add_option("--coverage", coverage, "Write excluded samples here");
  score->add_option("--out", out, "Scores file to write")->required();

  auto* summarize = app.add_subcommand("summarize", "Aggregate a scores file into a summary row");
  summarize->add_option("scores", scores, "Scores file")->required()->check(CLI::ExistingFile);
  summarize->add_option("--model", model, "Model name")->required();
  summarize->add_option("--dataset", dataset, "Dataset name")->required();
  summarize->add_option("--distribution", distribution, "Also write the response distribution");
  summarize->add_option("--out", out, "Summary CSV (a .txt table is written alongside)")->required();

  auto* pair = app.add_subcommand("pair", "Build paired units from a single-image pool");
  pair->add_option("pool", pool, "Pool file")->required()->check(CLI::ExistingFile);
  pair->add_option("--mode", mode_name, "mc_pairs|tf_pairs")->check(CLI::IsMember({"mc_pairs", "tf_pairs"}));
  pair->add_option("--pairs-per-category", pairing.pairs_per_category)->check(CLI::PositiveNumber);
  pair->add_option("--max-attempts", pairing.max_attempts)->check(CLI::PositiveNumber);
  pair->add_option("--seed", pairing.seed, "Random seed");
  pair->add_option("--out", out, "NB manifest to write")->required();

  auto* correlate = app.add_subcommand("correlate", "Correlate LCM with gt metrics across models");
  correlate->add_option("summaries", summaries, "Summary CSV files")->required()->check(CLI::ExistingFile);
  correlate->add_option("--out", out, "Correlation CSV to write")->required();

  auto* dist = app.add_subcommand("distribution", "Response-type distribution sorted by LCM");
  dist->add_option("summaries", summaries, "Summary CSV files")->required()->check(CLI::ExistingFile);
  dist->add_option("--out", out, "Distribution CSV to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  const Format format = format_name.empty() ? Format::mc : parse_format(format_name);
  scoring.nb_jacc_scale = jacc_scale == "raw" ? JaccScale::raw : JaccScale::root;
  pairing.mode = parse_pairing_mode(mode_name);

  try {
    if (*derive) {
      std::cout << cmd_derive(manifest, format, out) << " tests\n";
    } else if (*validate) {
      std::vector<Violation> report;
      const auto n = cmd_validate(manifest, format, report);
      for (const auto& v : report) std::cout << v.sample_id << ": " << v.rule << '\n';
      std::cout << n << " items, " << report.size() << " violation(s)\n";
      return report.empty() ? kOk : kDataError;
    } else if (*simulate) {
      sim::SimProfile profile{sim::parse_profile_kind(profile_name), seed, sigma, accuracy_target};
      std::cout << cmd_simulate(manifest, format, tests, profile, out) << " records\n";
    } else if (*score) {
      std::optional<fs::path> cov;
      if (coverage) cov = *coverage;
      const auto report = cmd_score(manifest, format, tests, probs, out, scoring, workers, cov);
      std::cout << report.scores.size() << " scored, " << report.excluded.size() << " excluded\n";
    } else if (*summarize) {
      std::optional<fs::path> dist_path;
      if (distribution) dist_path = *distribution;
      cmd_summarize(scores, model, dataset, out, dist_path);
      std::ifstream table(fs::path(out).replace_extension(".txt"));
      std::cout << table.rdbuf();
    } else if (*pair) {
      std::cout << cmd_pair(pool, pairing, out) << " units\n";
    } else if (*correlate) {
      std::vector<fs::path> paths(summaries.begin(), summaries.end());
      cmd_correlate(paths, out);
      std::ifstream report(out);
      std::cout << report.rdbuf();
    } else if (*dist) {
      std::vector<fs::path> paths(summaries.begin(), summaries.end());
      cmd_distribution(paths, out);
    }
  } catch (const vllcm::Error& e) {
    spdlog::error("{}", e.what());
    return kDataError;
  } catch (const std::invalid_argument& e) {
    spdlog::error("{}", e.what());
    return kDataError;
  } catch (const std::exception& e) {
    spdlog::error("internal error: {}", e.what());
    return kInternal;
  }
  return kOk;
}
