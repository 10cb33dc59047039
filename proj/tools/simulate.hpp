#pragma once

// Synthetic model that fills probability records for a derived test set.
// Used to exercise the pipeline without running a real model.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vllcm/core.hpp"

namespace vllcm::sim {

enum class ProfileKind { perfect, uniform, overconfident_yes, shortcut, noisy };

std::string_view to_string(ProfileKind k);
ProfileKind parse_profile_kind(std::string_view s);

struct SimProfile {
  ProfileKind kind = ProfileKind::perfect;
  std::uint64_t seed = 0;
  double sigma = 0.0;                      // noisy only
  std::optional<double> accuracy_target;  // shortcut / noisy

  bool needs_gt() const;
};

/// One record per test, in test order.
///
///  perfect            p = 1 on gt slots, 0 elsewhere
///  uniform            MC entries 1/K (1/2 for paired tests), yes/no 0.5
///  overconfident_yes  every yes/no entry 1.0; MC peak on a seeded index
///  shortcut           MC peak on gt with probability accuracy_target
///                     (default 0.9); yes/no drawn U(0,1) independent of gt
///  noisy              perfect answer (replaced by a wrong one with
///                     probability 1 - accuracy_target) plus N(0, sigma)
///                     noise, clamped to [0,1]
///
/// Randomness for each sample comes from seed ^ hash(sample_id), so a record
/// does not depend on which other samples are present.
///
/// Throws Error when a test references a sample missing from the manifest,
/// or when a gt-dependent profile meets a sample without gt.
std::vector<ProbRecord> simulate(const Manifest& manifest, const std::vector<DerivedTest>& tests,
                                 const SimProfile& profile);

}  // namespace vllcm::sim
