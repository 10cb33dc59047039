#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "benchmark_tables.hpp"
#include "support.hpp"
#include "vllcm/metrics.hpp"

using namespace vllcm;
namespace ts = testing_support;

namespace {

McProbBundle mc(std::vector<double> p_mc, std::vector<double> p_yn,
                std::optional<std::size_t> gt = std::nullopt) {
  return {"s", std::move(p_mc), std::move(p_yn), gt};
}

NbProbBundle nb_all(double v) {
  NbProbBundle b;
  b.sample_id = "u";
  for (auto& row : b.p_yn) row = {v, v};
  for (auto& p : b.p_mc) p = {v, v};
  return b;
}

NbProbBundle nb_perfect(Pairing gt) {
  NbProbBundle b;
  b.sample_id = "u";
  const bool straight = gt == Pairing::straight;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) b.p_yn[i][j] = ((i == j) == straight) ? 1.0 : 0.0;
  }
  for (auto& p : b.p_mc) p = straight ? std::array<double, 2>{1, 0} : std::array<double, 2>{0, 1};
  b.gt_pairing = gt;
  return b;
}

}  // namespace

TEST(JointYn, Examples) {
  const std::vector<double> perfect{1, 0, 0, 0};
  EXPECT_DOUBLE_EQ(joint_yn(perfect, 0), 1.0);
  const std::vector<double> all_yes{1, 1, 1, 1};
  for (std::size_t k = 0; k < 4; ++k) EXPECT_DOUBLE_EQ(joint_yn(all_yes, k), 0.0);
  const std::vector<double> half{0.5, 0.5, 0.5, 0.5};
  EXPECT_NEAR(joint_yn(half, 0), 0.5, 1e-12);
}

TEST(JointYn, IndexOutOfRange) {
  const std::vector<double> p{0.2, 0.3};
  EXPECT_THROW(joint_yn(p, 2), std::out_of_range);
}

TEST(LcmMc, Examples) {
  const auto perfect = lcm_mc(mc({1, 0, 0, 0}, {1, 0, 0, 0}));
  EXPECT_DOUBLE_EQ(perfect.p_lc, 1.0);
  EXPECT_EQ(perfect.chosen_index, 0u);

  const auto uniform = lcm_mc(mc({0.25, 0.25, 0.25, 0.25}, {0.5, 0.5, 0.5, 0.5}));
  EXPECT_NEAR(uniform.p_lc, std::sqrt(0.125), 1e-9);
  EXPECT_EQ(uniform.chosen_index, 0u);

  EXPECT_DOUBLE_EQ(lcm_mc(mc({0.1, 0.6, 0.2, 0.1}, {1, 1, 1, 1})).p_lc, 0.0);
}

TEST(LcmMc, ConsistentButWrong) {
  const auto b = mc({0, 1, 0, 0}, {0, 1, 0, 0}, 0);
  EXPECT_DOUBLE_EQ(lcm_mc_gt(b), 0.0);
  EXPECT_DOUBLE_EQ(lcm_mc(b).p_lc, 1.0);
}

TEST(LcmMc, GtMatchesArgmax) {
  const auto b = mc({0.7, 0.2, 0.1}, {0.9, 0.1, 0.2}, 0);
  EXPECT_EQ(lcm_mc(b).chosen_index, 0u);
  EXPECT_DOUBLE_EQ(lcm_mc_gt(b), lcm_mc(b).p_lc);
}

TEST(LcmMc, GtRequired) {
  EXPECT_THROW(lcm_mc_gt(mc({0.5, 0.5}, {0.5, 0.5})), std::invalid_argument);
}

TEST(LcmMc, RejectsMalformedBundles) {
  EXPECT_THROW(lcm_mc(mc({0.5}, {0.5})), std::invalid_argument);
  EXPECT_THROW(lcm_mc(mc({0.5, 0.5}, {0.5})), std::invalid_argument);
  EXPECT_THROW(lcm_mc(mc({0.5, 1.5}, {0.5, 0.5})), std::invalid_argument);
}

TEST(LcmMc, MatchesOracleOnRandomBundles) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 2000; ++t) {
    const auto k = std::uniform_int_distribution<std::size_t>(2, 6)(rng);
    const auto b = ts::random_mc_bundle(rng, k);
    const auto got = lcm_mc(b);
    const auto want = ts::oracle_lcm_mc(b.p_mc, b.p_yn);
    ASSERT_NEAR(got.p_lc, want.p_lc, 1e-12);
    const auto cand = ts::oracle_mc_candidates(b.p_mc, b.p_yn);
    ASSERT_NEAR(lcm_mc_gt(b), cand[*b.gt_index], 1e-12);
  }
}

TEST(NbSubtest, Examples) {
  const auto perfect = nb_subtest_lcm({1, 0}, 1, 0);
  EXPECT_DOUBLE_EQ(perfect.p_lc_sub, 1.0);
  EXPECT_EQ(perfect.chosen, 1);

  EXPECT_NEAR(nb_subtest_lcm({0.5, 0.5}, 0.5, 0.5).p_lc_sub, 0.5, 1e-12);

  // MC prefers c2, YN prefers c1: each candidate has one zero factor.
  const auto split = nb_subtest_lcm({0, 1}, 1, 0);
  EXPECT_DOUBLE_EQ(split.p_lc_sub, 0.0);
  EXPECT_EQ(split.chosen, 1);

  const auto second = nb_subtest_lcm({0.1, 0.8}, 0.2, 0.9);
  const double c1 = std::pow(0.1 * 0.2 * 0.2 * 0.1, 0.25);
  const double c2 = std::pow(0.8 * 0.9 * 0.9 * 0.8, 0.25);
  EXPECT_NEAR(second.p_lc_sub, std::max(c1, c2), 1e-12);
  EXPECT_EQ(second.chosen, 2);
}

TEST(LcmNb, PerfectAndHalf) {
  EXPECT_DOUBLE_EQ(lcm_nb(nb_perfect(Pairing::straight)).p_lc, 1.0);
  EXPECT_DOUBLE_EQ(lcm_nb(nb_perfect(Pairing::crossed)).p_lc, 1.0);
  EXPECT_DOUBLE_EQ(lcm_nb_gt(nb_perfect(Pairing::crossed)), 1.0);
  EXPECT_NEAR(lcm_nb(nb_all(0.5)).p_lc, 0.5, 1e-9);
}

TEST(LcmNb, MatchesOracleOnRandomBundles) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 2000; ++t) {
    const auto b = ts::random_nb_bundle(rng);
    ASSERT_NEAR(lcm_nb(b).p_lc, ts::oracle_lcm_nb(b), 1e-12);
    const int label = *b.gt_pairing == Pairing::straight ? 0 : 1;
    double gt = 0;
    for (int s = 0; s < 4; ++s) gt += ts::oracle_nb_label(b, s, label);
    ASSERT_NEAR(lcm_nb_gt(b), gt / 4, 1e-12);
  }
}

TEST(JynCorrect, Examples) {
  EXPECT_EQ(jyn_correct(mc({0.7, 0.1, 0.1, 0.1}, {0.9, 0.1, 0.1, 0.1}, 0)), true);
  EXPECT_EQ(jyn_correct(mc({0.7, 0.1, 0.1, 0.1}, {0.9, 0.9, 0.1, 0.1}, 0)), false);
  EXPECT_EQ(jyn_correct(mc({1, 0}, {1, 0}, 0)), true);
  EXPECT_FALSE(jyn_correct(mc({1, 0}, {1, 0})).has_value());
  EXPECT_EQ(jyn_correct(nb_perfect(Pairing::straight)), true);
}

TEST(JynCorrect, NbScaleSwitch) {
  // sqrt(0.7 * 0.4) ~ 0.529 passes on the root scale; 0.28 fails raw.
  NbProbBundle b = nb_perfect(Pairing::straight);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) b.p_yn[i][j] = i == j ? 0.7 : 0.6;
  }
  ScoringOptions root;
  ScoringOptions raw;
  raw.nb_jacc_scale = JaccScale::raw;
  EXPECT_EQ(jyn_correct(b, root), true);
  EXPECT_EQ(jyn_correct(b, raw), false);
}

TEST(McCorrect, Examples) {
  EXPECT_EQ(mc_correct(mc({0.7, 0.1, 0.1, 0.1}, {0, 0, 0, 0}, 0)), true);
  EXPECT_EQ(mc_correct(mc({0.4, 0.6, 0, 0}, {0, 0, 0, 0}, 0)), false);
  EXPECT_EQ(mc_correct(mc({0.5, 0.5}, {0, 0}, 0)), true);  // tie to lowest index
}

TEST(McCorrect, NbProbesCountedIndividually) {
  NbProbBundle b = nb_all(0.5);
  b.p_yn = {{{0.9, 0.2}, {0.3, 0.8}}};
  b.gt_pairing = Pairing::straight;
  EXPECT_EQ(nb_probe_hits(b), 4u);
  b.p_yn[0][1] = 0.7;
  EXPECT_EQ(nb_probe_hits(b), 3u);
  b.gt_pairing = Pairing::crossed;
  EXPECT_EQ(nb_probe_hits(b), 1u);
}

TEST(F1, Examples) {
  EXPECT_NEAR(f1(0.9319, 0.5413), 0.6848, 0.0005);
  EXPECT_NEAR(f1(0.7198, 0.4207), 0.5310, 0.0005);
  EXPECT_DOUBLE_EQ(f1(0, 0), 0.0);
  for (double x : {0.01, 0.3, 0.77, 1.0}) EXPECT_NEAR(f1(x, x), x, 1e-15);
}

TEST(F1, ReproducesPublishedCells) {
  for (const auto& bench : bench::kBenchmarks) {
    for (const auto& row : bench.rows) {
      EXPECT_NEAR(f1(row.acc, row.j_acc), row.f1, 0.0005) << bench.name << " " << row.model;
    }
  }
}

TEST(ScoreMc, PerfectSample) {
  const auto s = score_mc(mc({0, 0, 1}, {0, 0, 1}, 2));
  EXPECT_EQ(s.format, Format::mc);
  EXPECT_DOUBLE_EQ(s.p_lc, 1.0);
  EXPECT_EQ(s.p_lc_gt, 1.0);
  EXPECT_EQ(s.chosen_index, 2u);
  EXPECT_EQ(s.response_class, ResponseClass::confidence);
  EXPECT_EQ(s.mc_correct, true);
  EXPECT_EQ(s.jyn_correct, true);
  EXPECT_EQ(s.chosen_correct, true);
  EXPECT_DOUBLE_EQ(s.p_mc_chosen, 1.0);
  EXPECT_DOUBLE_EQ(s.p_jyn_chosen, 1.0);
}

TEST(ScoreMc, WithoutGt) {
  const auto s = score_mc(mc({0.6, 0.4}, {0.8, 0.3}));
  EXPECT_FALSE(s.p_lc_gt);
  EXPECT_FALSE(s.mc_correct);
  EXPECT_FALSE(s.jyn_correct);
  EXPECT_FALSE(s.chosen_correct);
  EXPECT_TRUE(s.response_class);
}

TEST(ScoreNb, PerfectUnit) {
  const auto s = score_nb(nb_perfect(Pairing::crossed));
  EXPECT_EQ(s.format, Format::nb);
  EXPECT_DOUBLE_EQ(s.p_lc, 1.0);
  EXPECT_EQ(s.chosen_index, 1u);
  EXPECT_EQ(s.probe_hits, 4u);
  EXPECT_EQ(s.mc_correct, true);
  EXPECT_FALSE(s.response_class);
  ASSERT_TRUE(s.subscores);
  for (double v : *s.subscores) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(Aggregate, PerfectScores) {
  std::vector<SampleScore> scores;
  for (std::size_t i = 0; i < 5; ++i) scores.push_back(score_mc(mc({1, 0}, {1, 0}, 0)));
  const auto s = aggregate(scores, "m", "d");
  EXPECT_EQ(s.n_samples, 5u);
  EXPECT_EQ(s.acc, 1.0);
  EXPECT_EQ(s.j_acc, 1.0);
  EXPECT_EQ(s.f1, 1.0);
  EXPECT_DOUBLE_EQ(s.lcm, 1.0);
  EXPECT_EQ(s.lcm_gt, 1.0);
  EXPECT_EQ(s.ratio_lcm_gt, 1.0);
  EXPECT_EQ(s.confidence_rate, 1.0);
  EXPECT_EQ(s.n_r, 5u);
  EXPECT_EQ(s.reliable_precision, 1.0);
}

TEST(Aggregate, MeanOfPerSampleScores) {
  SampleScore a;
  a.p_lc = 0.2;
  SampleScore b;
  b.p_lc = 0.6;
  const std::vector<SampleScore> scores{a, b};
  EXPECT_NEAR(aggregate(scores).lcm, 0.4, 1e-15);
}

TEST(Aggregate, AnnotationFreePath) {
  std::vector<SampleScore> scores = {score_mc(mc({0.6, 0.4}, {0.8, 0.3})),
                                     score_mc(mc({0.2, 0.8}, {0.7, 0.9}))};
  const auto s = aggregate(scores);
  EXPECT_FALSE(s.acc);
  EXPECT_FALSE(s.j_acc);
  EXPECT_FALSE(s.f1);
  EXPECT_FALSE(s.lcm_gt);
  EXPECT_FALSE(s.n_rgt);
  ASSERT_TRUE(s.abstention_rate);
  EXPECT_NEAR(*s.abstention_rate + *s.confidence_rate + *s.overconfidence_rate, 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(*s.confidence_rate, 0.5);
  EXPECT_DOUBLE_EQ(*s.overconfidence_rate, 0.5);
}

TEST(Aggregate, NbAccuracyCountsProbes) {
  NbProbBundle b = nb_all(0.5);
  b.p_yn = {{{0.9, 0.2}, {0.3, 0.8}}};
  b.gt_pairing = Pairing::straight;
  NbProbBundle c = b;
  c.p_yn[0][1] = 0.7;
  const std::vector<SampleScore> scores{score_nb(b), score_nb(c)};
  const auto s = aggregate(scores);
  EXPECT_NEAR(*s.acc, 7.0 / 8.0, 1e-15);
  EXPECT_FALSE(s.abstention_rate);
}

TEST(Aggregate, RejectsEmptyAndMixed) {
  EXPECT_THROW(aggregate(std::vector<SampleScore>{}), std::invalid_argument);
  const std::vector<SampleScore> mixed{score_mc(mc({1, 0}, {1, 0}, 0)),
                                       score_nb(nb_perfect(Pairing::straight))};
  EXPECT_THROW(aggregate(mixed), std::invalid_argument);
}
