#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "json.hpp"

namespace vllcm::cli {

std::size_t cmd_derive(const fs::path& manifest, Format format, const fs::path& out) {
  const auto items = io::load_manifest(manifest, format);
  const auto tests = derive_suite(items);
  io::write_tests(out, tests);
  spdlog::info("derived {} tests from {}", tests.size(), manifest.string());
  return tests.size();
}

std::size_t cmd_validate(const fs::path& manifest, Format format, std::vector<Violation>& report) {
  std::ifstream in(manifest);
  if (!in) throw Error(fmt::format("cannot open '{}' for reading", manifest.string()));
  const auto items = io::parse_manifest(in, format);
  report = validate_manifest(items);
  return std::visit([](const auto& v) { return v.size(); }, items);
}

std::size_t cmd_simulate(const fs::path& manifest, Format format, const fs::path& tests,
                         const sim::SimProfile& profile, const fs::path& out) {
  const auto items = io::load_manifest(manifest, format);
  const auto derived = io::load_tests(tests);
  const auto records = sim::simulate(items, derived, profile);
  io::write_probs(out, records);
  spdlog::info("simulated {} records with profile {}", records.size(),
               sim::to_string(profile.kind));
  return records.size();
}

std::vector<SampleScore> score_all(const io::JoinResult& joined, const ScoringOptions& opts,
                                   std::size_t workers) {
  const std::size_t n = joined.format == Format::mc ? joined.mc.size() : joined.nb.size();
  std::vector<SampleScore> scores(n);
  auto score_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      scores[i] = joined.format == Format::mc ? score_mc(joined.mc[i], opts)
                                              : score_nb(joined.nb[i], opts);
    }
  };
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    score_range(0, n);
    return scores;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = std::min(n, w * chunk);
      const std::size_t end = std::min(n, begin + chunk);
      pool.emplace_back([&, w, begin, end] {
        try {
          score_range(begin, end);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return scores;
}

ScoreReport cmd_score(const fs::path& manifest, Format format, const fs::path& tests,
                      const fs::path& probs, const fs::path& out, const ScoringOptions& opts,
                      std::size_t workers, const std::optional<fs::path>& coverage) {
  const auto items = io::load_manifest(manifest, format);
  const auto derived = io::load_tests(tests);
  const auto records = io::load_probs(probs);
  const auto joined = io::join(items, derived, records);

  ScoreReport report;
  report.scores = score_all(joined, opts, workers);
  report.excluded = joined.excluded;
  for (const auto& ex : report.excluded) {
    spdlog::warn("sample '{}' excluded: {} probe(s) missing", ex.sample_id,
                 ex.missing_tests.size());
  }
  if (report.scores.empty()) throw Error("no complete samples to score");
  io::write_scores(out, report.scores);

  if (coverage) {
    std::ofstream cov(*coverage, std::ios::binary | std::ios::trunc);
    if (!cov) throw Error(fmt::format("cannot open '{}' for writing", coverage->string()));
    for (const auto& ex : report.excluded) {
      nlohmann::ordered_json j;
      j["sample_id"] = ex.sample_id;
      j["missing_tests"] = ex.missing_tests;
      cov << j.dump() << '\n';
    }
  }
  spdlog::info("scored {} samples, excluded {}", report.scores.size(), report.excluded.size());
  return report;
}

DatasetSummary cmd_summarize(const fs::path& scores, const std::string& model,
                             const std::string& dataset, const fs::path& out,
                             const std::optional<fs::path>& distribution) {
  const auto loaded = io::load_scores(scores);
  if (loaded.empty()) throw Error(fmt::format("'{}' holds no scores", scores.string()));
  DatasetSummary summary;
  try {
    summary = aggregate(loaded, model, dataset);
  } catch (const std::invalid_argument& e) {
    throw Error(e.what());
  }
  const std::vector<DatasetSummary> rows{summary};
  io::write_summary(out, rows);
  if (distribution) io::write_distribution(*distribution, rows);
  return summary;
}

std::size_t cmd_pair(const fs::path& pool, const PairingConfig& cfg, const fs::path& out) {
  std::vector<NbUnit> units;
  if (cfg.mode == PairingMode::mc_pairs) {
    const auto items = io::load_manifest(pool, Format::mc);
    units = pair_natconbench_mc(std::get<std::vector<McItem>>(items), cfg);
  } else {
    units = pair_natconbench_tf(io::load_tf_pool(pool), cfg);
  }
  const std::size_t n = units.size();
  io::write_manifest(out, Manifest{std::move(units)});
  spdlog::info("paired {} units", n);
  return n;
}

namespace {

std::vector<std::vector<DatasetSummary>> group_by_dataset(const std::vector<fs::path>& paths) {
  std::vector<std::vector<DatasetSummary>> groups;
  std::vector<std::string> order;
  for (const auto& path : paths) {
    for (auto& s : io::load_summaries(path)) {
      auto it = std::find(order.begin(), order.end(), s.dataset);
      if (it == order.end()) {
        order.push_back(s.dataset);
        groups.emplace_back();
        it = order.end() - 1;
      }
      groups[static_cast<std::size_t>(it - order.begin())].push_back(std::move(s));
    }
  }
  return groups;
}

}  // namespace

std::vector<CorrelationReport> cmd_correlate(const std::vector<fs::path>& summaries,
                                             const fs::path& out) {
  std::vector<CorrelationReport> reports;
  for (const auto& group : group_by_dataset(summaries)) {
    try {
      reports.push_back(correlate_models(group));
    } catch (const std::invalid_argument& e) {
      throw Error(fmt::format("dataset '{}': {}", group.front().dataset, e.what()));
    }
  }
  if (reports.empty()) throw Error("no summary rows to correlate");
  io::write_correlations(out, reports);
  return reports;
}

void cmd_distribution(const std::vector<fs::path>& summaries, const fs::path& out) {
  std::vector<DatasetSummary> rows;
  for (const auto& path : summaries) {
    auto loaded = io::load_summaries(path);
    rows.insert(rows.end(), loaded.begin(), loaded.end());
  }
  if (rows.empty()) throw Error("no summary rows");
  io::write_distribution(out, rows);
}

}  // namespace vllcm::cli
