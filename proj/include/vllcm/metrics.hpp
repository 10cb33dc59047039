#pragma once

// Per-sample logical-consistency scoring for multiple-choice and paired
// (two images x two texts) samples, and dataset-level aggregation.
//
// Multiple-choice sample with K options. Every option is also asked as a
// standalone yes/no probe; the yes-probabilities form p_yn.
//
//   joint_yn(k) = sqrt( p_yn[k] * min_{i != k} (1 - p_yn[i]) )
//   p_lc        = max_k sqrt( p_mc[k] * joint_yn(k) )
//
// Paired sample (V1, V2, T1, T2). Label c1 means V1-T1 / V2-T2 match, c2
// means V1-T2 / V2-T1 match. Each of the four two-way choice tests a..d
// contributes
//
//   P_mc(c)  = p(c) * (1 - p(other))
//   P_jyn(c) = yes(cell matching under c) * (1 - yes(cell matching under other))
//   sub      = max_c ( P_mc(c) * P_jyn(c) )^(1/4)
//
// and p_lc is the mean of the four subscores.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "vllcm/core.hpp"

namespace vllcm {

struct McProbBundle {
  std::string sample_id;
  std::vector<double> p_mc;
  std::vector<double> p_yn;
  std::optional<std::size_t> gt_index;
};

/// Probabilities of one paired sample.
///
/// p_yn[i][j] is the yes-probability for image i with text j (0-based).
/// p_mc[s] holds the two option probabilities of choice test s (a..d),
/// already mapped onto the labels: entry 0 is P(c1), entry 1 is P(c2).
/// Use nb_mc_from_options to convert from manifest option order.
struct NbProbBundle {
  std::string sample_id;
  std::array<std::array<double, 2>, 2> p_yn{};
  std::array<std::array<double, 2>, 4> p_mc{};
  std::optional<Pairing> gt_pairing;
};

/// Maps raw option probabilities (manifest order: (T1, T2) for tests a and b,
/// (V1, V2) for tests c and d) onto (P(c1), P(c2)).
std::array<double, 2> nb_mc_from_options(char subtest, std::array<double, 2> options);

/// The two yes/no cells a choice test compares: first is the cell that
/// matches under c1, second the one that matches under c2. Indices are
/// (image, text), 0-based.
using Cell = std::pair<std::size_t, std::size_t>;
std::pair<Cell, Cell> nb_subtest_cells(char subtest);

/// How the per-subtest joint yes/no value is compared to the J-Acc threshold
/// for paired samples: on its square root (probability scale) or raw.
enum class JaccScale { root, raw };

struct ScoringOptions {
  double threshold = 0.5;  // response classification and J-Acc
  JaccScale nb_jacc_scale = JaccScale::root;
};

// ---------------------------------------------------------------------------
// Multiple-choice format
// ---------------------------------------------------------------------------

/// Throws std::out_of_range when k >= p_yn.size(), std::invalid_argument
/// when fewer than two probes are given.
double joint_yn(std::span<const double> p_yn, std::size_t k);

struct McLcm {
  double p_lc = 0.0;
  std::size_t chosen_index = 0;
  double p_mc_chosen = 0.0;
  double p_jyn_chosen = 0.0;
};

/// Ties on the maximum resolve to the lowest index.
McLcm lcm_mc(const McProbBundle& bundle);

/// The same quantity evaluated at the gt choice. Throws without gt_index.
double lcm_mc_gt(const McProbBundle& bundle);

// ---------------------------------------------------------------------------
// Paired format
// ---------------------------------------------------------------------------

struct NbSubtestLcm {
  double p_lc_sub = 0.0;
  int chosen = 1;  // 1 -> c1, 2 -> c2
};

/// `p_mc_pair` is (P(c1), P(c2)). `p_yn_pos` is the yes-probability of the
/// cell that matches under c1, `p_yn_neg` that of the cell matching under c2.
/// Throws std::invalid_argument for inputs outside [0,1].
NbSubtestLcm nb_subtest_lcm(std::pair<double, double> p_mc_pair, double p_yn_pos, double p_yn_neg);

/// (P_mc(c), P_jyn(c)) for one choice test and label; both are raw
/// two-factor products.
std::pair<double, double> nb_subtest_terms(const NbProbBundle& bundle, char subtest,
                                           Pairing label);

struct NbLcm {
  double p_lc = 0.0;
  std::array<double, 4> subscores{};
  std::array<int, 4> chosen{};
};

NbLcm lcm_nb(const NbProbBundle& bundle);

/// Mean over a..d of each subtest's score at the gt label.
double lcm_nb_gt(const NbProbBundle& bundle);

// ---------------------------------------------------------------------------
// Correctness against gt
// ---------------------------------------------------------------------------

std::optional<bool> jyn_correct(const McProbBundle& bundle, const ScoringOptions& opts = {});
std::optional<bool> jyn_correct(const NbProbBundle& bundle, const ScoringOptions& opts = {});

/// Argmax of p_mc (lowest index on ties) equals gt.
std::optional<bool> mc_correct(const McProbBundle& bundle);

/// Number of the four yes/no probes whose thresholded answer (p > 0.5)
/// matches the alternating gt pattern.
std::optional<std::size_t> nb_probe_hits(const NbProbBundle& bundle);

/// All four yes/no probes correct.
std::optional<bool> mc_correct(const NbProbBundle& bundle);

/// Harmonic mean; 0 when both inputs are 0.
double f1(double acc, double j_acc);

// ---------------------------------------------------------------------------
// Scoring and aggregation
// ---------------------------------------------------------------------------

SampleScore score_mc(const McProbBundle& bundle, const ScoringOptions& opts = {});
SampleScore score_nb(const NbProbBundle& bundle, const ScoringOptions& opts = {});

/// Throws std::invalid_argument on empty input or mixed formats.
DatasetSummary aggregate(std::span<const SampleScore> scores, std::string model = {},
                         std::string dataset = {});

}  // namespace vllcm
