#pragma once

// Probe-set expansion for both dataset formats, and construction of
// two-image/two-text units from single-image pools.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vllcm/core.hpp"

namespace vllcm {

/// One mc_main probe (arity K) followed by yn_choice(k) for k ascending.
std::vector<DerivedTest> derive_mc_suite(const McItem& item);

/// nb_yn(1,1), nb_yn(1,2), nb_yn(2,1), nb_yn(2,2), then nb_a .. nb_d.
///
/// nb_a / nb_b present (T1, T2) on image V1 / V2; nb_c / nb_d present
/// (V1, V2) for text T1 / T2. Option order is always manifest order.
std::vector<DerivedTest> derive_nb_suite(const NbUnit& unit);

std::vector<DerivedTest> derive_suite(const Manifest& manifest);

// ---------------------------------------------------------------------------
// Pairing
// ---------------------------------------------------------------------------

enum class PairingMode { mc_pairs, tf_pairs };

std::string_view to_string(PairingMode m);
PairingMode parse_pairing_mode(std::string_view s);

struct PairingConfig {
  std::size_t pairs_per_category = 50;
  std::uint64_t seed = 0;
  PairingMode mode = PairingMode::mc_pairs;
  std::size_t max_attempts = 100000;
};

/// A true/false pool entry: one image, one question, the gt answer.
struct TfItem {
  std::string id;
  std::string image;
  std::string question;
  bool answer = false;
  std::string category;

  bool operator==(const TfItem&) const = default;
};

/// Retention rule for multiple-choice pairs: different images and different
/// gt answer texts. Questions may coincide.
bool mc_pair_admissible(const McItem& a, const McItem& b);

/// Retention rule for true/false pairs: different images, different
/// questions, both answers "yes".
bool tf_pair_admissible(const TfItem& a, const TfItem& b);

/// Rejection-samples `pairs_per_category` admissible pairs per category,
/// without replacement. Categories are processed in lexicographic order, each
/// with its own sub-seed, so the result depends only on the pool order and
/// the seed. Every emitted unit has gt_pairing = straight.
///
/// Throws PairingError when a category has fewer than two eligible items or
/// runs out of attempts, and for pool items lacking gt_index / category.
std::vector<NbUnit> pair_natconbench_mc(const std::vector<McItem>& pool, const PairingConfig& cfg);
std::vector<NbUnit> pair_natconbench_tf(const std::vector<TfItem>& pool, const PairingConfig& cfg);

/// Stable 64-bit FNV-1a; used for per-category and per-sample sub-seeds.
std::uint64_t stable_hash(std::string_view s);

}  // namespace vllcm
