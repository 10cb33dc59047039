#pragma once

// Shared generators and reference implementations for the test binaries.
// The oracles below are written from the formulas directly and share no code
// with the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "vllcm/core.hpp"
#include "vllcm/derive.hpp"
#include "vllcm/metrics.hpp"

namespace testing_support {

namespace fs = std::filesystem;

inline double uniform01(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

// Mix of interior values and exact 0/1 so boundary cases get exercised.
inline double draw_prob(std::mt19937_64& rng) {
  const auto r = std::uniform_int_distribution<int>(0, 19)(rng);
  if (r == 0) return 0.0;
  if (r == 1) return 1.0;
  return uniform01(rng);
}

inline vllcm::McProbBundle random_mc_bundle(std::mt19937_64& rng, std::size_t k) {
  vllcm::McProbBundle b;
  b.sample_id = "s";
  for (std::size_t i = 0; i < k; ++i) {
    b.p_mc.push_back(draw_prob(rng));
    b.p_yn.push_back(draw_prob(rng));
  }
  b.gt_index = std::uniform_int_distribution<std::size_t>(0, k - 1)(rng);
  return b;
}

inline vllcm::NbProbBundle random_nb_bundle(std::mt19937_64& rng) {
  vllcm::NbProbBundle b;
  b.sample_id = "u";
  for (auto& row : b.p_yn) {
    for (double& v : row) v = draw_prob(rng);
  }
  for (auto& pair : b.p_mc) {
    for (double& v : pair) v = draw_prob(rng);
  }
  b.gt_pairing = std::bernoulli_distribution(0.5)(rng) ? vllcm::Pairing::straight
                                                         : vllcm::Pairing::crossed;
  return b;
}

// sqrt(p_mc[k] * sqrt(p_yn[k] * min_{i != k}(1 - p_yn[i]))) for every k.
inline std::vector<double> oracle_mc_candidates(const std::vector<double>& p_mc,
                                                const std::vector<double>& p_yn) {
  std::vector<double> out;
  for (std::size_t k = 0; k < p_mc.size(); ++k) {
    double nec = 1.0;
    for (std::size_t i = 0; i < p_yn.size(); ++i) {
      if (i != k) nec = std::min(nec, 1.0 - p_yn[i]);
    }
    out.push_back(std::sqrt(p_mc[k] * std::sqrt(p_yn[k] * nec)));
  }
  return out;
}

struct OracleMc {
  double p_lc;
  std::size_t chosen;
};

inline OracleMc oracle_lcm_mc(const std::vector<double>& p_mc, const std::vector<double>& p_yn) {
  const auto c = oracle_mc_candidates(p_mc, p_yn);
  const auto it = std::max_element(c.begin(), c.end());
  return {*it, static_cast<std::size_t>(it - c.begin())};
}

// Cells of the yes/no matrix (image, text), 0-based, for the statement each
// label of subtest s ('a'..'d') asserts.
struct SubtestCells {
  int c1_img, c1_txt, c2_img, c2_txt;
};

inline SubtestCells oracle_cells(char s) {
  switch (s) {
    case 'a': return {0, 0, 0, 1};
    case 'b': return {1, 1, 1, 0};
    case 'c': return {0, 0, 1, 0};
    default: return {1, 1, 0, 1};
  }
}

// Per-label subscore (P_MC * P_JYN)^(1/4), label 0 = c1.
inline double oracle_nb_label(const vllcm::NbProbBundle& b, int s, int label) {
  const auto cells = oracle_cells(static_cast<char>('a' + s));
  const double y1 = b.p_yn[cells.c1_img][cells.c1_txt];
  const double y2 = b.p_yn[cells.c2_img][cells.c2_txt];
  const double m1 = b.p_mc[s][0];
  const double m2 = b.p_mc[s][1];
  const double pmc = label == 0 ? m1 * (1 - m2) : m2 * (1 - m1);
  const double pjyn = label == 0 ? y1 * (1 - y2) : y2 * (1 - y1);
  return std::pow(pmc * pjyn, 0.25);
}

inline double oracle_lcm_nb(const vllcm::NbProbBundle& b) {
  double total = 0;
  for (int s = 0; s < 4; ++s) total += std::max(oracle_nb_label(b, s, 0), oracle_nb_label(b, s, 1));
  return total / 4;
}

// Renames texts T1 <-> T2. In label space this swaps the labels of every
// subtest, exchanges subtests c and d, and transposes the yes/no columns.
inline vllcm::NbProbBundle swap_texts(const vllcm::NbProbBundle& b) {
  vllcm::NbProbBundle out = b;
  for (int i = 0; i < 2; ++i) {
    out.p_yn[i][0] = b.p_yn[i][1];
    out.p_yn[i][1] = b.p_yn[i][0];
  }
  auto flip = [](std::array<double, 2> p) { return std::array<double, 2>{p[1], p[0]}; };
  out.p_mc = {flip(b.p_mc[0]), flip(b.p_mc[1]), flip(b.p_mc[3]), flip(b.p_mc[2])};
  if (b.gt_pairing) {
    out.gt_pairing = *b.gt_pairing == vllcm::Pairing::straight ? vllcm::Pairing::crossed
                                                               : vllcm::Pairing::straight;
  }
  return out;
}

inline std::vector<vllcm::McItem> make_mc_manifest(std::size_t n, std::size_t k,
                                                   std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::vector<vllcm::McItem> items;
  for (std::size_t i = 0; i < n; ++i) {
    vllcm::McItem item;
    item.id = "q" + std::to_string(1000 + i);
    item.image = "img" + std::to_string(i) + ".jpg";
    item.question = "Which object is shown?";
    for (std::size_t c = 0; c < k; ++c) item.choices.push_back("choice " + std::to_string(c));
    item.gt_index = std::uniform_int_distribution<std::size_t>(0, k - 1)(rng);
    items.push_back(std::move(item));
  }
  return items;
}

inline std::vector<vllcm::NbUnit> make_nb_manifest(std::size_t n) {
  std::vector<vllcm::NbUnit> units;
  for (std::size_t i = 0; i < n; ++i) {
    vllcm::NbUnit u;
    u.id = "u" + std::to_string(1000 + i);
    u.images = {"a" + std::to_string(i) + ".jpg", "b" + std::to_string(i) + ".jpg"};
    u.texts = {"first caption " + std::to_string(i), "second caption " + std::to_string(i)};
    u.gt_pairing = i % 2 == 0 ? vllcm::Pairing::straight : vllcm::Pairing::crossed;
    units.push_back(std::move(u));
  }
  return units;
}

// Pool of `per_category` MC items in each of `categories` categories, with
// enough image/answer variety that pairing always succeeds.
inline std::vector<vllcm::McItem> make_mc_pool(std::size_t categories, std::size_t per_category,
                                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<vllcm::McItem> pool;
  for (std::size_t c = 0; c < categories; ++c) {
    for (std::size_t i = 0; i < per_category; ++i) {
      vllcm::McItem item;
      item.id = "c" + std::to_string(c) + "_" + std::to_string(i);
      item.image = "img" + std::to_string(std::uniform_int_distribution<int>(0, 60)(rng)) + ".jpg";
      item.question = "q" + std::to_string(i % 7);
      item.choices = {"cat", "dog", "bird", "fish"};
      item.gt_index = std::uniform_int_distribution<std::size_t>(0, 3)(rng);
      item.category = "cat" + std::to_string(c);
      pool.push_back(std::move(item));
    }
  }
  return pool;
}

inline std::vector<vllcm::TfItem> make_tf_pool(std::size_t categories, std::size_t per_category,
                                               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<vllcm::TfItem> pool;
  for (std::size_t c = 0; c < categories; ++c) {
    for (std::size_t i = 0; i < per_category; ++i) {
      vllcm::TfItem item;
      item.id = "t" + std::to_string(c) + "_" + std::to_string(i);
      item.image = "img" + std::to_string(std::uniform_int_distribution<int>(0, 60)(rng)) + ".jpg";
      item.question = "statement " + std::to_string(std::uniform_int_distribution<int>(0, 40)(rng));
      item.answer = std::bernoulli_distribution(0.7)(rng);
      item.category = "cat" + std::to_string(c);
      pool.push_back(std::move(item));
    }
  }
  return pool;
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("vllcm_test_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  fs::path operator/(const std::string& name) const { return path_ / name; }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::size_t count_lines(const fs::path& p) {
  const auto s = slurp(p);
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace testing_support
