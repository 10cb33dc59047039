#include "vllcm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "vllcm/analysis.hpp"

namespace vllcm {

namespace {

bool in_unit(double p) { return p >= 0.0 && p <= 1.0; }

void check_unit(std::span<const double> values, const char* what) {
  for (double p : values) {
    if (!in_unit(p)) throw std::invalid_argument(fmt::format("{} entry {} outside [0,1]", what, p));
  }
}

void check_bundle(const McProbBundle& b) {
  if (b.p_mc.size() < 2 || b.p_mc.size() != b.p_yn.size()) {
    throw std::invalid_argument(fmt::format("sample '{}': p_mc and p_yn need equal length >= 2",
                                            b.sample_id));
  }
  check_unit(b.p_mc, "p_mc");
  check_unit(b.p_yn, "p_yn");
  if (b.gt_index && *b.gt_index >= b.p_mc.size()) {
    throw std::invalid_argument(fmt::format("sample '{}': gt_index out of range", b.sample_id));
  }
}

void check_bundle(const NbProbBundle& b) {
  for (const auto& row : b.p_yn) check_unit(row, "p_yn");
  for (const auto& pair : b.p_mc) check_unit(pair, "p_mc");
}

constexpr std::array<char, 4> kSubtests = {'a', 'b', 'c', 'd'};

std::size_t label_index(Pairing p) { return p == Pairing::straight ? 0 : 1; }

std::size_t subtest_index(char s) {
  if (s < 'a' || s > 'd') throw std::invalid_argument(fmt::format("unknown subtest '{}'", s));
  return static_cast<std::size_t>(s - 'a');
}

}  // namespace

// ---------------------------------------------------------------------------
// Multiple-choice format
// ---------------------------------------------------------------------------

double joint_yn(std::span<const double> p_yn, std::size_t k) {
  if (p_yn.size() < 2) throw std::invalid_argument("joint_yn needs at least two choices");
  if (k >= p_yn.size()) throw std::out_of_range(fmt::format("choice index {} out of range", k));
  double necessity = 1.0;
  for (std::size_t i = 0; i < p_yn.size(); ++i) {
    if (i != k) necessity = std::min(necessity, 1.0 - p_yn[i]);
  }
  return std::sqrt(p_yn[k] * necessity);
}

McLcm lcm_mc(const McProbBundle& bundle) {
  check_bundle(bundle);
  McLcm best;
  best.p_lc = -1.0;
  for (std::size_t k = 0; k < bundle.p_mc.size(); ++k) {
    const double jyn = joint_yn(bundle.p_yn, k);
    const double score = std::sqrt(bundle.p_mc[k] * jyn);
    if (score > best.p_lc) best = {score, k, bundle.p_mc[k], jyn};
  }
  return best;
}

double lcm_mc_gt(const McProbBundle& bundle) {
  check_bundle(bundle);
  if (!bundle.gt_index) {
    throw std::invalid_argument(fmt::format("sample '{}': gt_index required", bundle.sample_id));
  }
  const std::size_t gt = *bundle.gt_index;
  return std::sqrt(bundle.p_mc[gt] * joint_yn(bundle.p_yn, gt));
}

// ---------------------------------------------------------------------------
// Paired format
// ---------------------------------------------------------------------------

std::array<double, 2> nb_mc_from_options(char subtest, std::array<double, 2> options) {
  switch (subtest) {
    case 'a':
    case 'c': return options;
    case 'b':
    case 'd': return {options[1], options[0]};
    default: throw std::invalid_argument(fmt::format("unknown subtest '{}'", subtest));
  }
}

std::pair<Cell, Cell> nb_subtest_cells(char subtest) {
  switch (subtest) {
    case 'a': return {{0, 0}, {0, 1}};  // image V1, texts T1 / T2
    case 'b': return {{1, 1}, {1, 0}};  // image V2
    case 'c': return {{0, 0}, {1, 0}};  // text T1, images V1 / V2
    case 'd': return {{1, 1}, {0, 1}};  // text T2
    default: throw std::invalid_argument(fmt::format("unknown subtest '{}'", subtest));
  }
}

NbSubtestLcm nb_subtest_lcm(std::pair<double, double> p_mc_pair, double p_yn_pos,
                            double p_yn_neg) {
  const std::array<double, 4> inputs = {p_mc_pair.first, p_mc_pair.second, p_yn_pos, p_yn_neg};
  check_unit(inputs, "nb_subtest_lcm input");
  const double mc1 = p_mc_pair.first * (1.0 - p_mc_pair.second);
  const double mc2 = p_mc_pair.second * (1.0 - p_mc_pair.first);
  const double jyn1 = p_yn_pos * (1.0 - p_yn_neg);
  const double jyn2 = p_yn_neg * (1.0 - p_yn_pos);
  const double s1 = std::sqrt(std::sqrt(mc1 * jyn1));
  const double s2 = std::sqrt(std::sqrt(mc2 * jyn2));
  if (s2 > s1) return {s2, 2};
  return {s1, 1};
}

std::pair<double, double> nb_subtest_terms(const NbProbBundle& bundle, char subtest,
                                           Pairing label) {
  const std::size_t l = label_index(label);
  const auto& mc = bundle.p_mc[subtest_index(subtest)];
  const auto cells = nb_subtest_cells(subtest);
  const Cell own = l == 0 ? cells.first : cells.second;
  const Cell other = l == 0 ? cells.second : cells.first;
  const double p_mc = mc[l] * (1.0 - mc[1 - l]);
  const double p_jyn = bundle.p_yn[own.first][own.second] *
                       (1.0 - bundle.p_yn[other.first][other.second]);
  return {p_mc, p_jyn};
}

NbLcm lcm_nb(const NbProbBundle& bundle) {
  check_bundle(bundle);
  NbLcm out;
  double total = 0.0;
  for (std::size_t s = 0; s < kSubtests.size(); ++s) {
    const auto [pos_cell, neg_cell] = nb_subtest_cells(kSubtests[s]);
    const auto& mc = bundle.p_mc[s];
    const auto sub = nb_subtest_lcm({mc[0], mc[1]}, bundle.p_yn[pos_cell.first][pos_cell.second],
                                    bundle.p_yn[neg_cell.first][neg_cell.second]);
    out.subscores[s] = sub.p_lc_sub;
    out.chosen[s] = sub.chosen;
    total += sub.p_lc_sub;
  }
  out.p_lc = total / 4.0;
  return out;
}

double lcm_nb_gt(const NbProbBundle& bundle) {
  check_bundle(bundle);
  if (!bundle.gt_pairing) {
    throw std::invalid_argument(fmt::format("sample '{}': gt_pairing required", bundle.sample_id));
  }
  double total = 0.0;
  for (char s : kSubtests) {
    const auto [p_mc, p_jyn] = nb_subtest_terms(bundle, s, *bundle.gt_pairing);
    total += std::sqrt(std::sqrt(p_mc * p_jyn));
  }
  return total / 4.0;
}

// ---------------------------------------------------------------------------
// Correctness
// ---------------------------------------------------------------------------

std::optional<bool> jyn_correct(const McProbBundle& bundle, const ScoringOptions& opts) {
  if (!bundle.gt_index) return std::nullopt;
  return joint_yn(bundle.p_yn, *bundle.gt_index) > opts.threshold;
}

std::optional<bool> jyn_correct(const NbProbBundle& bundle, const ScoringOptions& opts) {
  if (!bundle.gt_pairing) return std::nullopt;
  for (char s : kSubtests) {
    const double raw = nb_subtest_terms(bundle, s, *bundle.gt_pairing).second;
    const double value = opts.nb_jacc_scale == JaccScale::root ? std::sqrt(raw) : raw;
    if (!(value > opts.threshold)) return false;
  }
  return true;
}

std::optional<bool> mc_correct(const McProbBundle& bundle) {
  if (!bundle.gt_index) return std::nullopt;
  auto it = std::max_element(bundle.p_mc.begin(), bundle.p_mc.end());
  return static_cast<std::size_t>(it - bundle.p_mc.begin()) == *bundle.gt_index;
}

std::optional<std::size_t> nb_probe_hits(const NbProbBundle& bundle) {
  if (!bundle.gt_pairing) return std::nullopt;
  const bool straight = *bundle.gt_pairing == Pairing::straight;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      const bool expected_yes = (i == j) == straight;
      if ((bundle.p_yn[i][j] > 0.5) == expected_yes) ++hits;
    }
  }
  return hits;
}

std::optional<bool> mc_correct(const NbProbBundle& bundle) {
  auto hits = nb_probe_hits(bundle);
  if (!hits) return std::nullopt;
  return *hits == 4;
}

double f1(double acc, double j_acc) {
  const double denom = acc + j_acc;
  if (denom <= 0.0) return 0.0;
  return 2.0 * acc * j_acc / denom;
}

// ---------------------------------------------------------------------------
// Scoring
// ---------------------------------------------------------------------------

SampleScore score_mc(const McProbBundle& bundle, const ScoringOptions& opts) {
  const McLcm lcm = lcm_mc(bundle);
  SampleScore s;
  s.sample_id = bundle.sample_id;
  s.format = Format::mc;
  s.p_lc = lcm.p_lc;
  s.chosen_index = lcm.chosen_index;
  s.p_mc_chosen = lcm.p_mc_chosen;
  s.p_jyn_chosen = lcm.p_jyn_chosen;
  s.response_class = classify_response(bundle.p_yn, opts.threshold);
  if (bundle.gt_index) {
    s.p_lc_gt = lcm_mc_gt(bundle);
    s.mc_correct = mc_correct(bundle);
    s.jyn_correct = jyn_correct(bundle, opts);
    s.chosen_correct = lcm.chosen_index == *bundle.gt_index;
  }
  return s;
}

SampleScore score_nb(const NbProbBundle& bundle, const ScoringOptions& opts) {
  const NbLcm lcm = lcm_nb(bundle);
  SampleScore s;
  s.sample_id = bundle.sample_id;
  s.format = Format::nb;
  s.p_lc = lcm.p_lc;
  s.subscores = lcm.subscores;

  // Unit-level answer: the label with the larger summed subtest score. Its
  // MC / joint yes-no strengths are the weakest over the four tests, on the
  // square-root scale.
  std::array<double, 2> label_total{};
  std::array<double, 2> mc_min{1.0, 1.0};
  std::array<double, 2> jyn_min{1.0, 1.0};
  for (std::size_t l = 0; l < 2; ++l) {
    const Pairing label = l == 0 ? Pairing::straight : Pairing::crossed;
    for (char sub : kSubtests) {
      const auto [p_mc, p_jyn] = nb_subtest_terms(bundle, sub, label);
      label_total[l] += std::sqrt(std::sqrt(p_mc * p_jyn));
      mc_min[l] = std::min(mc_min[l], std::sqrt(p_mc));
      jyn_min[l] = std::min(jyn_min[l], std::sqrt(p_jyn));
    }
  }
  const std::size_t chosen = label_total[1] > label_total[0] ? 1 : 0;
  s.chosen_index = chosen;
  s.p_mc_chosen = mc_min[chosen];
  s.p_jyn_chosen = jyn_min[chosen];

  if (bundle.gt_pairing) {
    s.p_lc_gt = lcm_nb_gt(bundle);
    s.probe_hits = nb_probe_hits(bundle);
    s.mc_correct = *s.probe_hits == 4;
    s.jyn_correct = jyn_correct(bundle, opts);
    s.chosen_correct = chosen == label_index(*bundle.gt_pairing);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Aggregation
// ---------------------------------------------------------------------------

DatasetSummary aggregate(std::span<const SampleScore> scores, std::string model,
                         std::string dataset) {
  if (scores.empty()) throw std::invalid_argument("aggregate: no scores");
  const Format format = scores.front().format;
  for (const auto& s : scores) {
    if (s.format != format) throw std::invalid_argument("aggregate: mixed formats");
  }

  DatasetSummary out;
  out.model = std::move(model);
  out.dataset = std::move(dataset);
  out.n_samples = scores.size();

  double lcm_sum = 0.0;
  double lcm_gt_sum = 0.0;
  std::size_t n_gt = 0;
  std::size_t acc_hits = 0;
  std::size_t acc_total = 0;
  std::size_t jacc_hits = 0;
  std::size_t jacc_total = 0;
  std::array<std::size_t, 3> classes{};
  std::size_t n_classified = 0;

  for (const auto& s : scores) {
    lcm_sum += s.p_lc;
    if (s.p_lc_gt) {
      lcm_gt_sum += *s.p_lc_gt;
      ++n_gt;
    }
    if (format == Format::nb) {
      // Accuracy counts individual yes/no probes.
      if (s.probe_hits) {
        acc_hits += *s.probe_hits;
        acc_total += 4;
      }
    } else if (s.mc_correct) {
      acc_hits += *s.mc_correct ? 1 : 0;
      ++acc_total;
    }
    if (s.jyn_correct) {
      jacc_hits += *s.jyn_correct ? 1 : 0;
      ++jacc_total;
    }
    if (s.response_class) {
      ++classes[static_cast<std::size_t>(*s.response_class)];
      ++n_classified;
    }
  }

  const auto n = static_cast<double>(scores.size());
  out.lcm = lcm_sum / n;
  if (n_gt > 0) out.lcm_gt = lcm_gt_sum / static_cast<double>(n_gt);
  if (acc_total > 0) out.acc = static_cast<double>(acc_hits) / static_cast<double>(acc_total);
  if (jacc_total > 0) out.j_acc = static_cast<double>(jacc_hits) / static_cast<double>(jacc_total);
  if (out.acc && out.j_acc) out.f1 = f1(*out.acc, *out.j_acc);
  out.ratio_lcm_gt = reliability_ratio(out);
  if (n_classified > 0) {
    const auto m = static_cast<double>(n_classified);
    out.abstention_rate = static_cast<double>(classes[0]) / m;
    out.confidence_rate = static_cast<double>(classes[1]) / m;
    out.overconfidence_rate = static_cast<double>(classes[2]) / m;
  }

  const auto reliable = select_reliable(scores);
  out.n_r = reliable.n_r;
  out.n_rgt = reliable.n_rgt;
  out.reliable_precision = reliable.precision;
  return out;
}

}  // namespace vllcm
