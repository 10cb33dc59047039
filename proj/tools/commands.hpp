#pragma once

// The operator commands behind the `vllcm` executable. Each command reads and
// writes files only, so any stage can be swapped for external output.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "simulate.hpp"
#include "vllcm/analysis.hpp"
#include "vllcm/derive.hpp"
#include "vllcm/io.hpp"
#include "vllcm/metrics.hpp"

namespace vllcm::cli {

namespace fs = std::filesystem;

/// Exit-code contract of the executable.
enum ExitCode : int { kOk = 0, kUsage = 1, kDataError = 2, kInternal = 3 };

struct ScoreReport {
  std::vector<SampleScore> scores;
  std::vector<io::ExcludedSample> excluded;
};

/// Returns the number of tests written.
std::size_t cmd_derive(const fs::path& manifest, Format format, const fs::path& out);

std::size_t cmd_validate(const fs::path& manifest, Format format, std::vector<Violation>& report);

std::size_t cmd_simulate(const fs::path& manifest, Format format, const fs::path& tests,
                         const sim::SimProfile& profile, const fs::path& out);

/// Scores every complete sample with `workers` threads (0 = hardware
/// concurrency). Output is ordered by sample id. When `coverage` is given,
/// excluded samples are written there, one per line.
ScoreReport cmd_score(const fs::path& manifest, Format format, const fs::path& tests,
                      const fs::path& probs, const fs::path& out, const ScoringOptions& opts,
                      std::size_t workers, const std::optional<fs::path>& coverage = {});

DatasetSummary cmd_summarize(const fs::path& scores, const std::string& model,
                             const std::string& dataset, const fs::path& out,
                             const std::optional<fs::path>& distribution = {});

std::size_t cmd_pair(const fs::path& pool, const PairingConfig& cfg, const fs::path& out);

/// Groups the rows of all summary files by dataset (first-appearance order)
/// and correlates each group.
std::vector<CorrelationReport> cmd_correlate(const std::vector<fs::path>& summaries,
                                             const fs::path& out);

void cmd_distribution(const std::vector<fs::path>& summaries, const fs::path& out);

/// Scores bundles in parallel; results keep the input order.
std::vector<SampleScore> score_all(const io::JoinResult& joined, const ScoringOptions& opts,
                                   std::size_t workers);

}  // namespace vllcm::cli
