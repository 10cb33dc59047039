#pragma once

// Line-delimited JSON record files, the probe/record join, and tabular
// report emission.
//
// Record schemas, one JSON object per line:
//   MC manifest   {"id","image","question","choices","gt_index"?,"category"?}
//   NB manifest   {"id","images":[2],"texts":[2],"gt_pairing"?,"category"?}
//   TF pool       {"id","image","question","answer":bool,"category"}
//   derived test  {"test_id","sample_id","kind","subtest","arity"}
//   prob record   {"test_id","sample_id","probs":[...],"meta"?:{str:str}}
//   score         {"sample_id","format","p_lc","p_lc_gt"?,"chosen_index",
//                  "p_mc_chosen","p_jyn_chosen","response_class"?,
//                  "mc_correct"?,"jyn_correct"?,"subscores"?:[4],
//                  "chosen_correct"?,"probe_hits"?}
//
// Blank lines are skipped. Readers report errors with 1-based line numbers.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "vllcm/analysis.hpp"
#include "vllcm/core.hpp"
#include "vllcm/derive.hpp"
#include "vllcm/metrics.hpp"

namespace vllcm::io {

namespace fs = std::filesystem;

// Manifests. parse_manifest checks syntax and schema only; read_manifest also
// validates every item and throws ValidationError naming the first offending
// sample.
Manifest parse_manifest(std::istream& in, Format format);
Manifest read_manifest(std::istream& in, Format format);
Manifest load_manifest(const fs::path& path, Format format);
void write_manifest(std::ostream& out, const Manifest& manifest);
void write_manifest(const fs::path& path, const Manifest& manifest);

std::vector<TfItem> read_tf_pool(std::istream& in);
std::vector<TfItem> load_tf_pool(const fs::path& path);

std::vector<DerivedTest> read_tests(std::istream& in);
std::vector<DerivedTest> load_tests(const fs::path& path);
void write_tests(std::ostream& out, std::span<const DerivedTest> tests);
void write_tests(const fs::path& path, std::span<const DerivedTest> tests);

/// Applies the probability clamp rule; values further than 1e-9 outside
/// [0,1] are a ParseError. An empty input logs a warning.
std::vector<ProbRecord> read_probs(std::istream& in);
std::vector<ProbRecord> load_probs(const fs::path& path);
void write_probs(std::ostream& out, std::span<const ProbRecord> records);
void write_probs(const fs::path& path, std::span<const ProbRecord> records);

std::vector<SampleScore> read_scores(std::istream& in);
std::vector<SampleScore> load_scores(const fs::path& path);
void write_scores(std::ostream& out, std::span<const SampleScore> scores);
void write_scores(const fs::path& path, std::span<const SampleScore> scores);

// ---------------------------------------------------------------------------
// Join
// ---------------------------------------------------------------------------

struct ExcludedSample {
  std::string sample_id;
  std::vector<std::string> missing_tests;
};

struct JoinResult {
  Format format = Format::mc;
  std::vector<McProbBundle> mc;
  std::vector<NbProbBundle> nb;
  std::vector<ExcludedSample> excluded;  // samples with at least one missing probe
};

/// Builds one bundle per manifest sample, ordered by sample id. Samples with
/// any missing probe are excluded and listed. Throws Error for records whose
/// test_id is unknown, whose sample_id disagrees with the test, whose length
/// differs from the test's arity, or that duplicate another record.
JoinResult join(const Manifest& manifest, std::span<const DerivedTest> tests,
                std::span<const ProbRecord> probs);

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

/// Comma-separated, one row per summary, 4 decimals; absent values empty.
void write_summary_csv(std::ostream& out, std::span<const DatasetSummary> summaries);
/// Plain aligned text with the same columns; absent values shown as "-".
void write_summary_table(std::ostream& out, std::span<const DatasetSummary> summaries);
/// Writes `path` as CSV and a sibling `.txt` aligned table.
void write_summary(const fs::path& path, std::span<const DatasetSummary> summaries);

std::vector<DatasetSummary> read_summary_csv(std::istream& in);
std::vector<DatasetSummary> load_summaries(const fs::path& path);

/// model, lcm and the three response rates, ascending by lcm.
void write_distribution(std::ostream& out, std::span<const DatasetSummary> summaries);
void write_distribution(const fs::path& path, std::span<const DatasetSummary> summaries);

void write_correlations(std::ostream& out, std::span<const CorrelationReport> reports);
void write_correlations(const fs::path& path, std::span<const CorrelationReport> reports);

}  // namespace vllcm::io
