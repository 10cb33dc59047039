#include "vllcm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace vllcm {

namespace {

void check_inputs(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument(
        fmt::format("correlation inputs differ in length ({} vs {})", x.size(), y.size()));
  }
  if (x.size() < 3) throw std::invalid_argument("correlation needs at least 3 points");
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  check_inputs(x, y);
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) share the mean 1-based rank.
    const double rank = (static_cast<double>(i + j) / 2.0) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
  check_inputs(x, y);
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

std::optional<double> kendall(std::span<const double> x, std::span<const double> y) {
  check_inputs(x, y);
  // n is the number of models, so the quadratic pair scan is fine.
  long long concordant_minus_discordant = 0;
  long long untied_x = 0;
  long long untied_y = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const int sx = sign(x[i] - x[j]);
      const int sy = sign(y[i] - y[j]);
      concordant_minus_discordant += sx * sy;
      untied_x += sx != 0;
      untied_y += sy != 0;
    }
  }
  if (untied_x == 0 || untied_y == 0) return std::nullopt;
  const double tau = static_cast<double>(concordant_minus_discordant) /
                     std::sqrt(static_cast<double>(untied_x) * static_cast<double>(untied_y));
  return std::clamp(tau, -1.0, 1.0);
}

CorrelationReport correlate_models(std::span<const DatasetSummary> summaries) {
  if (summaries.size() < 3) {
    throw std::invalid_argument(
        fmt::format("correlation needs at least 3 models, got {}", summaries.size()));
  }
  CorrelationReport report;
  report.dataset = summaries.front().dataset;
  report.n_models = summaries.size();

  std::vector<double> lcm, acc, j_acc, f1;
  for (const auto& s : summaries) {
    if (s.dataset != report.dataset) {
      throw std::invalid_argument(fmt::format("mixed datasets '{}' and '{}'", report.dataset,
                                              s.dataset));
    }
    if (!s.acc || !s.j_acc || !s.f1) {
      throw std::invalid_argument(
          fmt::format("model '{}' on '{}' has no gt metrics", s.model, s.dataset));
    }
    lcm.push_back(s.lcm);
    acc.push_back(*s.acc);
    j_acc.push_back(*s.j_acc);
    f1.push_back(*s.f1);
  }

  auto all_three = [&](const std::vector<double>& metric) {
    return Correlation{pearson(metric, lcm), spearman(metric, lcm), kendall(metric, lcm)};
  };
  report.lcm_acc = all_three(acc);
  report.lcm_j_acc = all_three(j_acc);
  report.lcm_f1 = all_three(f1);
  return report;
}

ResponseClass classify_response(std::span<const double> p_yn, double threshold) {
  const auto confirmed = std::count_if(p_yn.begin(), p_yn.end(),
                                       [threshold](double p) { return p > threshold; });
  if (confirmed == 0) return ResponseClass::abstention;
  if (confirmed == 1) return ResponseClass::confidence;
  return ResponseClass::overconfidence;
}

ReliableSelection select_reliable(std::span<const SampleScore> scores, double threshold) {
  ReliableSelection out;
  std::size_t with_gt = 0;
  std::size_t matching = 0;
  for (const auto& s : scores) {
    if (!(s.p_mc_chosen > threshold && s.p_jyn_chosen > threshold)) continue;
    out.selected.push_back(s.sample_id);
    if (s.chosen_correct) {
      ++with_gt;
      matching += *s.chosen_correct ? 1 : 0;
    }
  }
  out.n_r = out.selected.size();
  if (with_gt > 0) out.n_rgt = matching;
  if (out.n_r > 0 && out.n_rgt) {
    out.precision = static_cast<double>(*out.n_rgt) / static_cast<double>(out.n_r);
  }
  return out;
}

std::optional<double> reliability_ratio(const DatasetSummary& summary) {
  if (!summary.lcm_gt || !(summary.lcm > 0.0)) return std::nullopt;
  return *summary.lcm_gt / summary.lcm;
}

}  // namespace vllcm
