#pragma once

// Cross-model correlation statistics and the per-sample analyses built on top
// of scores: response-type classification, reliable-answer selection and the
// gt/annotation-free reliability ratio.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vllcm/core.hpp"

namespace vllcm {

// ---------------------------------------------------------------------------
// Correlation
//
// All three return nullopt when either input has zero variance (the
// coefficient is undefined), and throw std::invalid_argument when the inputs
// differ in length or hold fewer than three points.
// ---------------------------------------------------------------------------

std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

/// Pearson on average ranks.
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);

/// Kendall tau-b.
std::optional<double> kendall(std::span<const double> x, std::span<const double> y);

/// 1-based ranks; tied values share the mean of the positions they occupy.
std::vector<double> average_ranks(std::span<const double> values);

struct Correlation {
  std::optional<double> pearson_r;
  std::optional<double> spearman_rho;
  std::optional<double> kendall_tau;
};

struct CorrelationReport {
  std::string dataset;
  std::size_t n_models = 0;
  Correlation lcm_acc;
  Correlation lcm_j_acc;
  Correlation lcm_f1;
};

/// Correlates LCM against Acc, J-Acc and F1 across models on one dataset.
/// Requires at least three summaries, all from the same dataset and all
/// carrying gt metrics.
CorrelationReport correlate_models(std::span<const DatasetSummary> summaries);

// ---------------------------------------------------------------------------
// Per-sample analyses
// ---------------------------------------------------------------------------

/// Counts yes/no probes confirmed above `threshold`: none is abstention, one
/// is confidence, more is overconfidence.
ResponseClass classify_response(std::span<const double> p_yn, double threshold = 0.5);

struct ReliableSelection {
  std::vector<std::string> selected;
  std::size_t n_r = 0;
  std::optional<std::size_t> n_rgt;
  std::optional<double> precision;
};

/// A sample is reliable when both p_mc_chosen and p_jyn_chosen exceed
/// `threshold`. n_rgt counts the reliable samples whose chosen answer matches
/// gt; it is absent when no reliable sample carries gt, and precision is
/// absent when n_r is 0.
ReliableSelection select_reliable(std::span<const SampleScore> scores, double threshold = 0.5);

/// lcm_gt / lcm; absent when lcm_gt is missing or lcm is 0.
std::optional<double> reliability_ratio(const DatasetSummary& summary);

}  // namespace vllcm
