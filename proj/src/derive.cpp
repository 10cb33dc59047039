#include "vllcm/derive.hpp"

#include <algorithm>
#include <map>
#include <random>

#include <fmt/format.h>

namespace vllcm {

namespace {

void require_valid(const Manifest& single) {
  auto violations = validate_manifest(single);
  if (!violations.empty()) {
    throw DerivationError(
        fmt::format("sample '{}': {}", violations.front().sample_id, violations.front().rule));
  }
}

DerivedTest make_test(const std::string& sample_id, TestKind kind, Subtest subtest,
                      std::size_t arity) {
  return {make_test_id(sample_id, subtest), sample_id, kind, subtest, arity};
}

}  // namespace

std::vector<DerivedTest> derive_mc_suite(const McItem& item) {
  require_valid(std::vector<McItem>{item});
  const std::size_t k_choices = item.choices.size();
  std::vector<DerivedTest> tests;
  tests.reserve(k_choices + 1);
  tests.push_back(make_test(item.id, TestKind::mc, Subtest::mc_main(), k_choices));
  for (std::size_t k = 0; k < k_choices; ++k) {
    tests.push_back(make_test(item.id, TestKind::yn, Subtest::yn_choice(k), 1));
  }
  return tests;
}

std::vector<DerivedTest> derive_nb_suite(const NbUnit& unit) {
  require_valid(std::vector<NbUnit>{unit});
  std::vector<DerivedTest> tests;
  tests.reserve(8);
  for (std::size_t i = 1; i <= 2; ++i) {
    for (std::size_t j = 1; j <= 2; ++j) {
      tests.push_back(make_test(unit.id, TestKind::yn, Subtest::nb_yn(i, j), 1));
    }
  }
  for (char letter : {'a', 'b', 'c', 'd'}) {
    tests.push_back(make_test(unit.id, TestKind::mc, Subtest::nb_mc(letter), 2));
  }
  return tests;
}

std::vector<DerivedTest> derive_suite(const Manifest& manifest) {
  std::vector<DerivedTest> out;
  std::visit(
      [&](const auto& items) {
        for (const auto& item : items) {
          std::vector<DerivedTest> part;
          if constexpr (std::is_same_v<std::decay_t<decltype(item)>, McItem>) {
            part = derive_mc_suite(item);
          } else {
            part = derive_nb_suite(item);
          }
          out.insert(out.end(), std::make_move_iterator(part.begin()),
                     std::make_move_iterator(part.end()));
        }
      },
      manifest);
  return out;
}

// ---------------------------------------------------------------------------
// Pairing
// ---------------------------------------------------------------------------

std::string_view to_string(PairingMode m) {
  return m == PairingMode::mc_pairs ? "mc_pairs" : "tf_pairs";
}

PairingMode parse_pairing_mode(std::string_view s) {
  if (s == "mc_pairs") return PairingMode::mc_pairs;
  if (s == "tf_pairs") return PairingMode::tf_pairs;
  throw Error(fmt::format("unknown pairing mode '{}'", s));
}

std::uint64_t stable_hash(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool mc_pair_admissible(const McItem& a, const McItem& b) {
  if (!a.gt_index || !b.gt_index) return false;
  if (*a.gt_index >= a.choices.size() || *b.gt_index >= b.choices.size()) return false;
  return a.image != b.image && a.choices[*a.gt_index] != b.choices[*b.gt_index];
}

bool tf_pair_admissible(const TfItem& a, const TfItem& b) {
  return a.image != b.image && a.question != b.question && a.answer && b.answer;
}

namespace {

void check_config(const PairingConfig& cfg, PairingMode expected) {
  if (cfg.mode != expected) {
    throw Error(fmt::format("pairing mode must be {}", to_string(expected)));
  }
  if (cfg.pairs_per_category < 1) throw Error("pairs_per_category must be at least 1");
  if (cfg.max_attempts < cfg.pairs_per_category) {
    throw Error("max_attempts must be at least pairs_per_category");
  }
}

// Draws pairs of distinct positions from `members` until `wanted` admissible
// pairs are found; both members of an accepted pair leave the pool.
template <class Item, class Admissible, class MakeUnit>
void sample_category(const std::string& category, std::vector<const Item*> members,
                     const PairingConfig& cfg, Admissible admissible, MakeUnit make_unit,
                     std::vector<NbUnit>& out) {
  if (members.size() < 2) {
    throw PairingError(category, fmt::format("only {} eligible item(s)", members.size()));
  }
  std::mt19937_64 rng(cfg.seed ^ stable_hash(category));
  std::size_t emitted = 0;
  std::size_t attempts = 0;
  while (emitted < cfg.pairs_per_category) {
    if (members.size() < 2 || attempts >= cfg.max_attempts) {
      throw PairingError(category, fmt::format("produced {} of {} pairs after {} attempts", emitted,
                                               cfg.pairs_per_category, attempts));
    }
    ++attempts;
    std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
    std::size_t i = pick(rng);
    std::size_t j = pick(rng);
    if (i == j) continue;
    if (!admissible(*members[i], *members[j])) continue;
    out.push_back(make_unit(*members[i], *members[j], category));
    ++emitted;
    // Erase the larger index first so the smaller stays valid.
    members.erase(members.begin() + static_cast<std::ptrdiff_t>(std::max(i, j)));
    members.erase(members.begin() + static_cast<std::ptrdiff_t>(std::min(i, j)));
  }
}

std::string mc_statement(const McItem& item) {
  return fmt::format("{} {}", item.question, item.choices[*item.gt_index]);
}

}  // namespace

std::vector<NbUnit> pair_natconbench_mc(const std::vector<McItem>& pool, const PairingConfig& cfg) {
  check_config(cfg, PairingMode::mc_pairs);
  std::map<std::string, std::vector<const McItem*>> by_category;
  for (const auto& item : pool) {
    if (!item.category) throw PairingError("", fmt::format("item '{}' has no category", item.id));
    if (!item.gt_index || *item.gt_index >= item.choices.size()) {
      throw PairingError(*item.category, fmt::format("item '{}' has no valid gt_index", item.id));
    }
    by_category[*item.category].push_back(&item);
  }
  std::vector<NbUnit> out;
  for (const auto& [category, members] : by_category) {
    sample_category<McItem>(
        category, members, cfg, mc_pair_admissible,
        [](const McItem& a, const McItem& b, const std::string& cat) {
          return NbUnit{fmt::format("{}+{}", a.id, b.id),
                        {a.image, b.image},
                        {mc_statement(a), mc_statement(b)},
                        Pairing::straight,
                        cat};
        },
        out);
  }
  return out;
}

std::vector<NbUnit> pair_natconbench_tf(const std::vector<TfItem>& pool, const PairingConfig& cfg) {
  check_config(cfg, PairingMode::tf_pairs);
  // Only "yes" items can take part in an admissible pair.
  std::map<std::string, std::vector<const TfItem*>> by_category;
  for (const auto& item : pool) {
    auto& members = by_category[item.category];
    if (item.answer) members.push_back(&item);
  }
  std::vector<NbUnit> out;
  for (const auto& [category, members] : by_category) {
    sample_category<TfItem>(
        category, members, cfg, tf_pair_admissible,
        [](const TfItem& a, const TfItem& b, const std::string& cat) {
          return NbUnit{fmt::format("{}+{}", a.id, b.id),
                        {a.image, b.image},
                        {a.question, b.question},
                        Pairing::straight,
                        cat};
        },
        out);
  }
  return out;
}

}  // namespace vllcm
