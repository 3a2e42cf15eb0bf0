#include <numeric>

#include "chl/error.hpp"
#include "chl/estimators.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace chl;

namespace {

SampleTable smooth_table(std::size_t n, std::uint64_t seed) {
  return test::random_table(n, seed, [](const Reflectances& r, Rng& rng) {
    return 1.0 + std::sin(300.0 * r[1]) + 50.0 * r[3] + 0.1 * rng.normal();
  });
}

EstimatorSpec spec_of(ModelKind kind, std::size_t n_estimators) {
  EstimatorSpec s = EstimatorSpec::defaults(kind);
  s.ensemble.n_estimators = n_estimators;
  return s;
}

}  // namespace

TEST_SUITE("ensemble") {

TEST_CASE("documented defaults") {
  const auto bag = EstimatorSpec::defaults(ModelKind::bagging);
  CHECK(bag.ensemble.n_estimators == 100);
  CHECK(bag.ensemble.max_features == 6);
  CHECK(bag.ensemble.bootstrap);
  CHECK(EstimatorSpec::defaults(ModelKind::forest).ensemble.max_features == 2);
  CHECK_FALSE(EstimatorSpec::defaults(ModelKind::extra_trees).ensemble.bootstrap);
}

TEST_CASE("bagging with one tree and no bootstrap is CART") {
  const SampleTable t = smooth_table(150, 1);
  EstimatorSpec s = spec_of(ModelKind::bagging, 1);
  s.ensemble.bootstrap = false;
  s.tree.max_depth = 6;
  const FittedModel bag = fit(s, t);
  const FittedModel cart = fit_cart(t, s.tree);
  CHECK(std::get<EnsemblePayload>(bag.payload).trees.front() == std::get<Tree>(cart.payload));
  const SampleTable q = smooth_table(50, 2);
  for (const Sample& x : q.rows) CHECK(predict_one(bag, x) == predict_one(cart, x));
}

TEST_CASE("forest with all features and no bootstrap repeats CART in every tree") {
  const SampleTable t = smooth_table(120, 3);
  EstimatorSpec s = spec_of(ModelKind::forest, 8);
  s.ensemble.max_features = 6;
  s.ensemble.bootstrap = false;
  const FittedModel forest = fit(s, t);
  const Tree& cart = std::get<Tree>(fit_cart(t, s.tree).payload);
  for (const Tree& tree : std::get<EnsemblePayload>(forest.payload).trees) CHECK(tree == cart);
}

TEST_CASE("ensemble output is the mean of its members") {
  const SampleTable t = smooth_table(200, 4);
  for (ModelKind kind : {ModelKind::bagging, ModelKind::forest, ModelKind::extra_trees}) {
    const FittedModel m = fit(spec_of(kind, 25), t);
    const SampleTable q = smooth_table(30, 5);
    for (const Sample& x : q.rows) {
      const auto members = member_predictions(m, x.rrs);
      CHECK(members.size() == 25);
      const double mean = std::accumulate(members.begin(), members.end(), 0.0) / 25.0;
      CHECK(std::abs(predict_one(m, x) - mean) <= 1e-12);
    }
  }
}

TEST_CASE("two-tree ensemble averages 1 and 3 to 2") {
  EnsemblePayload p;
  p.trees = {Tree({TreeNode{TreeNode::kLeaf, 0, -1, -1, 1.0}}),
             Tree({TreeNode{TreeNode::kLeaf, 0, -1, -1, 3.0}})};
  const FittedModel m{EstimatorSpec::defaults(ModelKind::forest), std::nullopt, p};
  Sample s;
  s.rrs.fill(0.01);
  CHECK(predict_one(m, s) == 2.0);
}

TEST_CASE("same seed refits bit-identically, with or without threads") {
  const SampleTable t = smooth_table(300, 6);
  for (ModelKind kind : {ModelKind::bagging, ModelKind::forest, ModelKind::extra_trees}) {
    const EstimatorSpec s = spec_of(kind, 12);
    const auto a = std::get<EnsemblePayload>(fit(s, t, {1}).payload);
    const auto b = std::get<EnsemblePayload>(fit(s, t, {1}).payload);
    const auto c = std::get<EnsemblePayload>(fit(s, t, {4}).payload);
    CHECK(a == b);
    CHECK(a == c);
    EstimatorSpec other = s;
    other.seed += 1;
    CHECK_FALSE(std::get<EnsemblePayload>(fit(other, t, {1}).payload) == a);
  }
}

TEST_CASE("bootstrap in-bag counts sum to N per tree") {
  const SampleTable t = smooth_table(80, 7);
  const auto p = std::get<EnsemblePayload>(fit(spec_of(ModelKind::forest, 10), t).payload);
  REQUIRE(p.inbag.size() == 10);
  for (const auto& counts : p.inbag) {
    CHECK(counts.size() == 80);
    CHECK(std::accumulate(counts.begin(), counts.end(), 0u) == 80u);
  }
}

TEST_CASE("max_features out of range is an argument error") {
  const SampleTable t = smooth_table(50, 8);
  EstimatorSpec s = spec_of(ModelKind::forest, 3);
  s.ensemble.max_features = 0;
  CHECK_THROWS_AS(fit(s, t), ArgumentError);
  s.ensemble.max_features = 7;
  CHECK_THROWS_AS(fit(s, t), ArgumentError);
  EstimatorSpec bag = spec_of(ModelKind::bagging, 3);
  bag.ensemble.max_features = 2;
  CHECK_THROWS_AS(fit(bag, t), ArgumentError);
}

TEST_CASE("oob: 200 trees on 100 rows cover every row") {
  const SampleTable t = smooth_table(100, 9);
  const FittedModel m = fit(spec_of(ModelKind::forest, 200), t);
  const OobResult r = compute_oob_mae(m, t);
  CHECK(r.covered_rows == 100);
  REQUIRE(r.mae.has_value());
  CHECK(*r.mae > 0.0);
}

TEST_CASE("oob: constant target gives zero error") {
  const SampleTable t = test::random_table(100, 10, [](const Reflectances&, Rng&) { return 2.5; });
  for (ModelKind kind : {ModelKind::bagging, ModelKind::forest}) {
    const OobResult r = compute_oob_mae(fit(spec_of(kind, 50), t), t);
    REQUIRE(r.mae.has_value());
    CHECK(*r.mae == 0.0);
  }
}

TEST_CASE("oob: no bootstrap is a state error; an uncovered table is empty") {
  const SampleTable t = smooth_table(60, 11);
  CHECK_THROWS_AS(compute_oob_mae(fit(spec_of(ModelKind::extra_trees, 5), t), t), StateError);
  CHECK_THROWS_AS(compute_oob_mae(fit_cart(t, {}), t), StateError);

  // A single row is in-bag for every bootstrap draw of size 1.
  SampleTable one;
  one.rows.push_back(t.rows[0]);
  const OobResult r = compute_oob_mae(fit(spec_of(ModelKind::bagging, 4), one), one);
  CHECK(r.covered_rows == 0);
  CHECK_FALSE(r.mae.has_value());
}

TEST_CASE("extra trees approximate a step") {
  Rng rng(12);
  auto step_table = [&](std::size_t n) {
    SampleTable t = test::random_table(n, rng.next_u64(), [](const Reflectances& r, Rng&) {
      return r[1] > 0.5 ? 2.0 : 1.0;
    }, 1e-6, 1.0);
    // Only the step feature varies.
    for (Sample& s : t.rows) {
      for (std::size_t f = 0; f < kNumBands; ++f) {
        if (f != 1) s.rrs[f] = 0.01;
      }
    }
    return t;
  };
  const SampleTable train = step_table(1000);
  const SampleTable test = step_table(500);
  const FittedModel m = fit(spec_of(ModelKind::extra_trees, 400), train);
  double err = 0.0;
  for (const Sample& s : test.rows) err += std::abs(predict_one(m, s) - *s.chl);
  CHECK(err / 500.0 < 0.05);
}

TEST_CASE("extra trees on a constant-feature node stop splitting") {
  SampleTable t;
  for (int i = 0; i < 20; ++i) {
    Sample s;
    s.rrs.fill(0.01);
    s.chl = 1.0 + i;
    t.rows.push_back(s);
  }
  const FittedModel m = fit(spec_of(ModelKind::extra_trees, 3), t);
  for (const Tree& tree : std::get<EnsemblePayload>(m.payload).trees) CHECK(tree.node_count() == 1);
}

}
