#include <cmath>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "rectconv/experiments.hpp"
#include "rectconv/stats.hpp"

using namespace rectconv;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.spec = canonical_sqrt_spectrum(40, 1.0);
  cfg.params = make_params(40, 80, std::pow(80.0, -1.0 / 6.0));
  cfg.trials = 6;
  cfg.k_max = 8;
  return cfg;
}

std::vector<double> column(const ExperimentReport& r, const std::string& key) {
  std::vector<double> out;
  for (const auto& m : r.per_trial)
    for (const auto& [k, v] : m.values)
      if (k == key) out.push_back(v);
  return out;
}

void expect_same(const ExperimentReport& a, const ExperimentReport& b) {
  ASSERT_EQ(a.per_trial.size(), b.per_trial.size());
  for (std::size_t i = 0; i < a.per_trial.size(); ++i) {
    EXPECT_EQ(a.per_trial[i].seed, b.per_trial[i].seed);
    EXPECT_EQ(a.per_trial[i].values, b.per_trial[i].values);
  }
  EXPECT_EQ(a.summary, b.summary);
  EXPECT_EQ(a.pass, b.pass);
}

}  // namespace

TEST(T1, Examples) {
  std::vector<double> a{4, 2, 1}, b{3, 2, 1};
  EXPECT_DOUBLE_EQ(t1_statistic(a), 2.0);
  EXPECT_DOUBLE_EQ(t1_statistic(b), 1.0);
  std::vector<double> tie{3, 1, 1}, short_list{2, 1};
  EXPECT_THROW(t1_statistic(tie), std::domain_error);
  EXPECT_THROW(t1_statistic(short_list), std::invalid_argument);
}

TEST(T1, ScaleInvariant) {
  std::vector<double> v{5.3, 4.1, 3.95, 3.2, 1.0};
  const double base = t1_statistic(v);
  for (double s : {1e-3, 0.5, 7.0, 1e4}) {
    std::vector<double> w = v;
    for (auto& x : w) x *= s;
    EXPECT_NEAR(t1_statistic(w), base, 1e-12 * base);
  }
}

TEST(Rank, Examples) {
  std::vector<double> mu{10, 1.01, 1.0, 0.99, 0.98, 0.97, 0.96};
  auto r = rank_estimator(mu, 0.05, 3);
  EXPECT_EQ(r.rank, 1u);
  EXPECT_FALSE(r.flagged);
  std::vector<double> two{10, 8, 3, 2.99, 2.98, 2.97};
  EXPECT_EQ(rank_estimator(two, 0.05, 3).rank, 2u);
  std::vector<double> none{64, 32, 16, 8, 4, 2};
  auto f = rank_estimator(none, 0.05, 3);
  EXPECT_TRUE(f.flagged);
  EXPECT_EQ(f.rank, 3u);
  EXPECT_THROW(rank_estimator(none, 0.05, 5), std::invalid_argument);
  EXPECT_THROW(rank_estimator(none, 0.0, 2), std::invalid_argument);
}

TEST(Rank, ScaleInvariant) {
  std::vector<double> v{9, 7, 3.1, 3.0, 2.9, 2.85, 2.8};
  for (double s : {0.01, 3.0}) {
    std::vector<double> w = v;
    for (auto& x : w) x *= s;
    EXPECT_EQ(rank_estimator(w, 0.05, 4).rank, rank_estimator(v, 0.05, 4).rank);
  }
}

TEST(Spikes, PlantReplacesSmallestAtoms) {
  auto base = make_spectrum({1.0, 0.5, 0.2, 0.1});
  std::vector<double> spikes{3.0, 2.0};
  auto s = plant_spikes(base, spikes);
  EXPECT_EQ(s.values(), (std::vector<double>{3.0, 2.0, 1.0, 0.5}));
  std::vector<double> many{1, 2, 3, 4, 5};
  EXPECT_THROW(plant_spikes(base, many), std::invalid_argument);
}

TEST(Experiments, RunsAreBitIdentical) {
  auto cfg = small_config();
  expect_same(rigidity_experiment(cfg), rigidity_experiment(cfg));
  cfg.kinds = {NoiseKind::gaussian, NoiseKind::trinary};
  expect_same(edge_universality_experiment(cfg), edge_universality_experiment(cfg));
  expect_same(t1_null_experiment(cfg), t1_null_experiment(cfg));
  cfg.kinds = {NoiseKind::gaussian};
  cfg.k_max = 3;
  expect_same(delocalization_experiment(cfg), delocalization_experiment(cfg));
  expect_same(local_law_experiment(cfg), local_law_experiment(cfg));
}

TEST(Experiments, ReportShape) {
  auto cfg = small_config();
  auto r = rigidity_experiment(cfg);
  EXPECT_EQ(r.name, "rigidity");
  EXPECT_EQ(r.per_trial.size(), cfg.trials);
  EXPECT_EQ(r.pass, r.summary.at("max_r_tail") <= r.criteria.at("c_rigid"));
  for (std::size_t i = 0; i < r.per_trial.size(); ++i) EXPECT_EQ(r.per_trial[i].trial, i);
  auto by_name = run_experiment("rigidity", cfg);
  expect_same(r, by_name);
  EXPECT_THROW(run_experiment("nope", cfg), std::invalid_argument);
  EXPECT_EQ(experiment_names().size(), 7u);
}

TEST(Experiments, ConfigValidation) {
  auto cfg = small_config();
  cfg.k_max = 41;
  EXPECT_THROW(rigidity_experiment(cfg), std::invalid_argument);
  cfg = small_config();
  cfg.params = make_params(40, 80, 0.0);
  EXPECT_THROW(rigidity_experiment(cfg), std::invalid_argument);
  cfg = small_config();
  EXPECT_THROW(edge_universality_experiment(cfg), std::invalid_argument);
  cfg.trials = 0;
  EXPECT_THROW(rigidity_experiment(cfg), std::invalid_argument);
}

// Two disjoint seed batches describe the same law of max_k r_k.
TEST(Experiments, RigiditySeedShift) {
  ExperimentConfig cfg;
  cfg.spec = canonical_sqrt_spectrum(100, 1.0);
  cfg.params = make_params(100, 200, std::pow(200.0, -1.0 / 6.0));
  cfg.trials = 100;
  cfg.k_max = 10;
  auto a = rigidity_experiment(cfg);
  cfg.base_seed += 1;
  auto b = rigidity_experiment(cfg);
  EXPECT_LT(ks_two_sample(column(a, "max_r"), column(b, "max_r")), 0.2);
}

TEST(Experiments, DelocalizationBasisCompleteness) {
  auto s = canonical_sqrt_spectrum(15, 1.0);
  auto tr = run_trial(s, make_params(15, 30, 0.3), NoiseKind::gaussian, 9, true);
  for (int k = 0; k < 3; ++k) {
    double total = 0.0;
    for (int j = 0; j < 15; ++j) total += std::pow((*tr.left)(j, k), 2);
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(Experiments, BbpBoundaryIsSubcritical) {
  ExperimentConfig cfg;
  cfg.spec = zero_spectrum(60);
  cfg.params = make_params(60, 60, 1.0);
  cfg.trials = 4;
  auto edge = find_right_edge(cfg.spec, cfg.params);
  auto r = bbp_experiment(cfg, edge.zeta_plus);
  EXPECT_EQ(r.summary.at("supercritical"), 0.0);
  EXPECT_NEAR(r.summary.at("prediction"), edge.lambda_plus, 1e-12);
  auto sup = bbp_experiment(cfg, 2.0);
  EXPECT_EQ(sup.summary.at("supercritical"), 1.0);
  EXPECT_NEAR(sup.summary.at("prediction"), 4.5, 1e-9);
  EXPECT_THROW(bbp_experiment(cfg, -1.0), std::invalid_argument);
}

TEST(Experiments, LocalLawFarField) {
  ExperimentConfig cfg;
  cfg.spec = canonical_sqrt_spectrum(100, 1.0);
  cfg.params = make_params(100, 200, 0.3);
  cfg.trials = 20;
  const double lp = find_right_edge(cfg.spec, cfg.params).lambda_plus;
  cfg.z_grid = {{lp, 9.0}, {lp + 0.05, 10.0}};
  auto r = local_law_experiment(cfg);
  EXPECT_LE(r.summary.at("avg_tail"), 2.0);
}

TEST(Experiments, DefaultLocalLawGridInDomain) {
  auto spec = canonical_sqrt_spectrum(200, 1.0);
  auto pr = make_params(200, 400, std::pow(400.0, -1.0 / 6.0));
  auto edge = find_right_edge(spec, pr);
  auto grid = default_local_law_grid(pr, edge);
  EXPECT_EQ(grid.size(), 12u);
  for (auto z : grid) EXPECT_TRUE(in_domain(pr, edge, z, 0.1)) << z.re << "+" << z.im << "i";
}
