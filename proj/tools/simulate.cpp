#include "simulate.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <unordered_map>

#include <fmt/format.h>

#include "vllcm/derive.hpp"
#include "vllcm/metrics.hpp"

namespace vllcm::sim {

std::string_view to_string(ProfileKind k) {
  switch (k) {
    case ProfileKind::perfect: return "perfect";
    case ProfileKind::uniform: return "uniform";
    case ProfileKind::overconfident_yes: return "overconfident_yes";
    case ProfileKind::shortcut: return "shortcut";
    case ProfileKind::noisy: return "noisy";
  }
  return "";
}

ProfileKind parse_profile_kind(std::string_view s) {
  for (auto k : {ProfileKind::perfect, ProfileKind::uniform, ProfileKind::overconfident_yes,
                 ProfileKind::shortcut, ProfileKind::noisy}) {
    if (s == to_string(k)) return k;
  }
  throw Error(fmt::format("unknown profile '{}'", s));
}

bool SimProfile::needs_gt() const {
  return kind == ProfileKind::perfect || kind == ProfileKind::shortcut ||
         kind == ProfileKind::noisy;
}

namespace {

// Saturated yes: every alternative is confirmed, so the necessity factor is 0.
constexpr double kOverconfidentYes = 1.0;
constexpr double kOverconfidentPeak = 0.7;

// Probabilities for every probe of one sample, keyed by subtest text.
using SampleProbs = std::map<std::string, std::vector<double>>;

void check_profile(const SimProfile& p) {
  if (p.sigma < 0.0) throw Error("sigma must be non-negative");
  if (p.accuracy_target && (*p.accuracy_target < 0.0 || *p.accuracy_target > 1.0)) {
    throw Error("accuracy_target must lie in [0,1]");
  }
}

// Peak probability `peak` on index `at`, remainder spread evenly.
std::vector<double> peaked(std::size_t n, std::size_t at, double peak) {
  std::vector<double> v(n, (1.0 - peak) / static_cast<double>(n - 1));
  v[at] = peak;
  return v;
}

std::size_t other_index(std::size_t n, std::size_t avoid, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(1, n - 1);
  return (avoid + pick(rng)) % n;
}

std::size_t answer_with_accuracy(std::size_t n, std::size_t gt, double accuracy,
                                 std::mt19937_64& rng) {
  std::bernoulli_distribution correct(accuracy);
  return correct(rng) ? gt : other_index(n, gt, rng);
}

void add_noise(std::vector<double>& v, double sigma, std::mt19937_64& rng) {
  if (sigma <= 0.0) return;
  std::normal_distribution<double> noise(0.0, sigma);
  for (double& p : v) p = std::clamp(p + noise(rng), 0.0, 1.0);
}

SampleProbs simulate_mc(const McItem& item, const SimProfile& profile) {
  const std::size_t k_choices = item.choices.size();
  if (profile.needs_gt() && !item.gt_index) {
    throw Error(fmt::format("profile '{}' needs gt, sample '{}' has none",
                            to_string(profile.kind), item.id));
  }
  std::mt19937_64 rng(profile.seed ^ stable_hash(item.id));
  std::vector<double> p_mc(k_choices);
  std::vector<double> p_yn(k_choices);

  switch (profile.kind) {
    case ProfileKind::perfect:
      p_mc = peaked(k_choices, *item.gt_index, 1.0);
      for (std::size_t k = 0; k < k_choices; ++k) p_yn[k] = k == *item.gt_index ? 1.0 : 0.0;
      break;
    case ProfileKind::uniform:
      std::fill(p_mc.begin(), p_mc.end(), 1.0 / static_cast<double>(k_choices));
      std::fill(p_yn.begin(), p_yn.end(), 0.5);
      break;
    case ProfileKind::overconfident_yes: {
      std::uniform_int_distribution<std::size_t> pick(0, k_choices - 1);
      p_mc = peaked(k_choices, pick(rng), kOverconfidentPeak);
      std::fill(p_yn.begin(), p_yn.end(), kOverconfidentYes);
      break;
    }
    case ProfileKind::shortcut: {
      const std::size_t answer =
          answer_with_accuracy(k_choices, *item.gt_index, profile.accuracy_target.value_or(0.9), rng);
      std::uniform_real_distribution<double> peak(0.6, 0.95);
      p_mc = peaked(k_choices, answer, peak(rng));
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      for (double& p : p_yn) p = unit(rng);
      break;
    }
    case ProfileKind::noisy: {
      const std::size_t answer =
          answer_with_accuracy(k_choices, *item.gt_index, profile.accuracy_target.value_or(1.0), rng);
      p_mc = peaked(k_choices, answer, 1.0);
      for (std::size_t k = 0; k < k_choices; ++k) p_yn[k] = k == answer ? 1.0 : 0.0;
      add_noise(p_mc, profile.sigma, rng);
      add_noise(p_yn, profile.sigma, rng);
      break;
    }
  }

  SampleProbs out;
  out[Subtest::mc_main().str()] = p_mc;
  for (std::size_t k = 0; k < k_choices; ++k) out[Subtest::yn_choice(k).str()] = {p_yn[k]};
  return out;
}

SampleProbs simulate_nb(const NbUnit& unit, const SimProfile& profile) {
  if (profile.needs_gt() && !unit.gt_pairing) {
    throw Error(fmt::format("profile '{}' needs gt, sample '{}' has none",
                            to_string(profile.kind), unit.id));
  }
  std::mt19937_64 rng(profile.seed ^ stable_hash(unit.id));
  std::array<std::array<double, 2>, 2> yes{};
  // Option probabilities per subtest, in label order (c1, c2).
  std::array<std::array<double, 2>, 4> labels{};

  auto one_hot = [](std::size_t l) {
    return l == 0 ? std::array<double, 2>{1.0, 0.0} : std::array<double, 2>{0.0, 1.0};
  };
  auto label_of = [](Pairing p) -> std::size_t { return p == Pairing::straight ? 0 : 1; };
  auto matching_yes = [&](std::size_t label) {
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) yes[i][j] = ((i == j) == (label == 0)) ? 1.0 : 0.0;
    }
  };

  switch (profile.kind) {
    case ProfileKind::perfect:
      matching_yes(label_of(*unit.gt_pairing));
      for (auto& l : labels) l = one_hot(label_of(*unit.gt_pairing));
      break;
    case ProfileKind::uniform:
      for (auto& row : yes) row = {0.5, 0.5};
      for (auto& l : labels) l = {0.5, 0.5};
      break;
    case ProfileKind::overconfident_yes: {
      for (auto& row : yes) row = {kOverconfidentYes, kOverconfidentYes};
      std::bernoulli_distribution coin(0.5);
      for (auto& l : labels) {
        l = coin(rng) ? std::array<double, 2>{kOverconfidentPeak, 1.0 - kOverconfidentPeak}
                      : std::array<double, 2>{1.0 - kOverconfidentPeak, kOverconfidentPeak};
      }
      break;
    }
    case ProfileKind::shortcut: {
      const double accuracy = profile.accuracy_target.value_or(0.9);
      std::uniform_real_distribution<double> peak(0.6, 0.95);
      for (auto& l : labels) {
        const std::size_t answer = answer_with_accuracy(2, label_of(*unit.gt_pairing), accuracy, rng);
        const double c = peak(rng);
        l = answer == 0 ? std::array<double, 2>{c, 1.0 - c} : std::array<double, 2>{1.0 - c, c};
      }
      std::uniform_real_distribution<double> unit_draw(0.0, 1.0);
      for (auto& row : yes) row = {unit_draw(rng), unit_draw(rng)};
      break;
    }
    case ProfileKind::noisy: {
      const std::size_t answer = answer_with_accuracy(2, label_of(*unit.gt_pairing),
                                                      profile.accuracy_target.value_or(1.0), rng);
      matching_yes(answer);
      for (auto& l : labels) l = one_hot(answer);
      std::vector<double> flat;
      for (const auto& row : yes) flat.insert(flat.end(), row.begin(), row.end());
      for (const auto& l : labels) flat.insert(flat.end(), l.begin(), l.end());
      add_noise(flat, profile.sigma, rng);
      for (std::size_t i = 0; i < 4; ++i) yes[i / 2][i % 2] = flat[i];
      for (std::size_t s = 0; s < 4; ++s) labels[s] = {flat[4 + 2 * s], flat[5 + 2 * s]};
      break;
    }
  }

  SampleProbs out;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) out[Subtest::nb_yn(i + 1, j + 1).str()] = {yes[i][j]};
  }
  for (std::size_t s = 0; s < 4; ++s) {
    const char letter = static_cast<char>('a' + s);
    // The label<->option mapping swaps or keeps the pair, so it is its own inverse.
    const auto options = nb_mc_from_options(letter, labels[s]);
    out[Subtest::nb_mc(letter).str()] = {options[0], options[1]};
  }
  return out;
}

}  // namespace

std::vector<ProbRecord> simulate(const Manifest& manifest, const std::vector<DerivedTest>& tests,
                                 const SimProfile& profile) {
  check_profile(profile);
  std::unordered_map<std::string, const McItem*> mc_items;
  std::unordered_map<std::string, const NbUnit*> nb_units;
  if (const auto* items = std::get_if<std::vector<McItem>>(&manifest)) {
    for (const auto& item : *items) mc_items.emplace(item.id, &item);
  } else {
    for (const auto& unit : std::get<std::vector<NbUnit>>(manifest)) nb_units.emplace(unit.id, &unit);
  }

  std::unordered_map<std::string, SampleProbs> cache;
  auto probs_for = [&](const std::string& sample_id) -> const SampleProbs& {
    if (auto it = cache.find(sample_id); it != cache.end()) return it->second;
    SampleProbs drawn;
    if (auto mc = mc_items.find(sample_id); mc != mc_items.end()) {
      drawn = simulate_mc(*mc->second, profile);
    } else if (auto nb = nb_units.find(sample_id); nb != nb_units.end()) {
      drawn = simulate_nb(*nb->second, profile);
    } else {
      throw Error(fmt::format("test references unknown sample '{}'", sample_id));
    }
    return cache.emplace(sample_id, std::move(drawn)).first->second;
  };

  const std::string model = fmt::format("sim-{}", to_string(profile.kind));
  std::vector<ProbRecord> records;
  records.reserve(tests.size());
  for (const auto& t : tests) {
    const auto& drawn = probs_for(t.sample_id);
    auto it = drawn.find(t.subtest.str());
    if (it == drawn.end() || it->second.size() != t.arity) {
      throw Error(fmt::format("test '{}' does not fit sample '{}'", t.test_id, t.sample_id));
    }
    records.push_back({t.test_id, t.sample_id, it->second, {{"model", model}}});
  }
  return records;
}

}  // namespace vllcm::sim
