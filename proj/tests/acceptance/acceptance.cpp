// Acceptance runner: one PASS/FAIL line per criterion, exit 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "chl/baseline.hpp"
#include "chl/error.hpp"
#include "chl/estimators.hpp"
#include "chl/evaluation.hpp"
#include "chl/io.hpp"
#include "chl/knn.hpp"
#include "chl/model_io.hpp"
#include "chl/svr.hpp"
#include "chl/tree.hpp"
#include "cli.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace chl;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Collects the failed expectations of one criterion.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    ++total_;
    if (!ok && first_failure_.empty()) first_failure_ = what;
    failed_ += ok ? 0 : 1;
  }
  void note(const std::string& kv) { notes_ += (notes_.empty() ? "" : " ") + kv; }

  bool ok() const { return failed_ == 0; }
  std::string detail() const {
    std::ostringstream s;
    s << "checks=" << total_ << " failed=" << failed_;
    if (!notes_.empty()) s << " " << notes_;
    if (!first_failure_.empty()) s << " first_failure=\"" << first_failure_ << "\"";
    return s.str();
  }

 private:
  std::size_t total_ = 0;
  std::size_t failed_ = 0;
  std::string first_failure_;
  std::string notes_;
};

std::string num(double v) { return format_number(v); }

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Two informative features (1 and 3); the others are constant.
SampleTable two_feature_table(std::size_t n, std::uint64_t seed, std::size_t levels) {
  Rng rng(seed);
  SampleTable t;
  for (std::size_t i = 0; i < n; ++i) {
    Sample s;
    s.rrs.fill(0.01);
    for (std::size_t f : {1, 3}) {
      s.rrs[f] = levels > 0 ? static_cast<double>(rng.uniform_index(levels)) / static_cast<double>(levels)
                            : rng.uniform01();
    }
    s.chl = std::sin(6.0 * s.rrs[1]) + s.rrs[3] * s.rrs[3] + 0.3 * rng.normal();
    t.rows.push_back(s);
  }
  return t;
}

SampleTable smooth_table(std::size_t n, std::uint64_t seed) {
  return test::random_table(n, seed, [](const Reflectances& r, Rng& rng) {
    return 1.0 + std::sin(300.0 * r[1]) + 50.0 * r[3] + 0.1 * rng.normal();
  });
}

Checks criterion_baseline() {
  Checks c;
  const auto t0 = Clock::now();
  const BandRatioCoeffs paper = BandRatioCoeffs::paper();
  const double want = std::pow(10.0, 0.366);
  c.expect(std::abs(polynomial_chl(0.0, paper) / want - 1.0) <= 1e-9, "polynomial_chl(0) = 10^0.366");

  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    Reflectances r;
    for (double& v : r) v = 0.0005 + 0.03 * rng.uniform01();
    const double scale = std::pow(10.0, 6.0 * rng.uniform01() - 3.0);
    Reflectances s = r;
    for (double& v : s) v *= scale;
    c.expect(std::abs(max_band_ratio(r, paper) - max_band_ratio(s, paper)) <= 1e-12,
             "R invariant under c * rrs");
  }

  // Runtime on a 1000 x 1000 scene.
  const GridStack stack = test::random_stack(1000, 1000, 2);
  const auto t1 = Clock::now();
  const GeoGrid g = baseline_grid(stack, paper);
  const double grid_s = seconds_since(t1);
  c.expect(g.size() == 1'000'000, "grid size");
  const double total = seconds_since(t0);
  c.expect(grid_s < 1.0, "1e6-pixel baseline under 1 s");
  c.note("grid_seconds=" + num(grid_s) + " total_seconds=" + num(total));
  return c;
}

Checks criterion_ols() {
  Checks c;
  const SampleTable t = test::random_table(100, 11, [](const Reflectances& r, Rng&) {
    return 0.7 + 30.0 * r[0] - 12.0 * r[2] + 5.0 * r[5];
  });
  const FittedModel m = fit_ols(t);
  const auto& p = std::get<LinearPayload>(m.payload);
  const Reflectances w{30.0, 0.0, -12.0, 0.0, 0.0, 5.0};
  double worst = std::abs(p.intercept - 0.7);
  for (std::size_t j = 0; j < kNumBands; ++j) worst = std::max(worst, std::abs(p.weights[j] - w[j]));
  c.expect(worst <= 1e-8, "planted coefficients recovered to 1e-8");

  const SampleTable noisy = test::random_table(100, 12, [](const Reflectances& r, Rng& rng) {
    return 0.5 + 40.0 * r[1] - 25.0 * r[4] + 0.05 * rng.normal();
  });
  const FittedModel n = fit_ols(noisy);
  std::array<double, kNumBands + 1> grad{};
  for (const Sample& s : noisy.rows) {
    const double res = predict_one(n, s) - *s.chl;
    grad[0] += res;
    for (std::size_t j = 0; j < kNumBands; ++j) grad[j + 1] += res * s.rrs[j];
  }
  double gmax = 0.0;
  for (double g : grad) gmax = std::max(gmax, std::abs(g) / static_cast<double>(noisy.size()));
  c.expect(gmax <= 1e-8, "mean-squared-loss gradient max-norm <= 1e-8");
  c.note("coef_err=" + num(worst) + " grad_max=" + num(gmax));
  return c;
}

Checks criterion_ridge() {
  Checks c;
  const SampleTable t = test::random_table(150, 21, [](const Reflectances& r, Rng& rng) {
    return 0.5 + 40.0 * r[1] - 25.0 * r[4] + 10.0 * r[5] + 0.05 * rng.normal();
  });
  const auto& ols = std::get<LinearPayload>(fit_ols(t).payload);
  const auto& r0 = std::get<LinearPayload>(fit_ridge(t, 0.0).payload);
  double diff = std::abs(ols.intercept - r0.intercept) / std::max(1.0, std::abs(ols.intercept));
  for (std::size_t j = 0; j < kNumBands; ++j) {
    diff = std::max(diff, std::abs(ols.weights[j] - r0.weights[j]) / std::max(1.0, std::abs(ols.weights[j])));
  }
  c.expect(diff <= 1e-9, "lambda=0 equals OLS");

  const FittedModel big = fit_ridge(t, 1e9);
  const auto& pb = std::get<LinearPayload>(big.payload);
  double wmax = 0.0;
  for (double w : pb.weights) wmax = std::max(wmax, std::abs(w));
  c.expect(wmax < 1e-6, "lambda=1e9 weights < 1e-6");
  const double ymean = mean_of(t.targets());
  double pred_gap = 0.0;
  for (const Sample& s : t.rows) pred_gap = std::max(pred_gap, std::abs(predict_one(big, s) - ymean));
  c.expect(pred_gap < 1e-6, "lambda=1e9 predicts mean(y)");

  double prev = INFINITY;
  for (int i = 0; i < 10; ++i) {
    const double lambda = std::pow(10.0, -6.0 + i);
    double norm = 0.0;
    for (double w : std::get<LinearPayload>(fit_ridge(t, lambda).payload).weights) norm += w * w;
    norm = std::sqrt(norm);
    c.expect(norm <= prev, "||w|| non-increasing at lambda=" + num(lambda));
    prev = norm;
  }
  c.note("ols_gap=" + num(diff) + " max_weight_1e9=" + num(wmax));
  return c;
}

Checks criterion_cart() {
  Checks c;
  Rng pick(4);
  for (std::uint64_t k = 0; k < 50; ++k) {
    const std::size_t n = 2 + pick.uniform_index(199);
    const SampleTable t = two_feature_table(n, 1000 + k, k % 2 == 0 ? 0 : 1 + pick.uniform_index(8));
    TreeParams params;
    if (k % 5 != 0) params.max_depth = 1 + pick.uniform_index(8);
    params.min_samples_split = 2 + pick.uniform_index(6);

    const FittedModel m = fit_cart(t, params);
    const Tree& tree = std::get<Tree>(m.payload);
    std::vector<Reflectances> x;
    for (const Sample& s : t.rows) x.push_back(s.rrs);
    const std::vector<double> y = t.targets();
    const TrainingView view{x, y};
    std::vector<std::size_t> rows(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    const auto oracle = test::oracle_cart(view, rows, params.max_depth, params.min_samples_split);
    const double got = test::training_cost(view, [&](const Reflectances& r) { return tree.predict(r); });
    const double want =
        test::training_cost(view, [&](const Reflectances& r) { return test::oracle_predict(*oracle, r); });
    c.expect(got == want, "training cost equals brute force on dataset " + std::to_string(k));
    c.expect(test::same_structure(tree, 0, *oracle), "tree equals brute force on dataset " + std::to_string(k));
  }
  return c;
}

Checks criterion_ensembles() {
  Checks c;
  const SampleTable t = smooth_table(200, 31);
  const SampleTable q = smooth_table(100, 32);

  EstimatorSpec bag = EstimatorSpec::defaults(ModelKind::bagging);
  bag.ensemble.n_estimators = 1;
  bag.ensemble.bootstrap = false;
  const FittedModel bm = fit(bag, t);
  const FittedModel cart = fit_cart(t, bag.tree);
  c.expect(std::get<EnsemblePayload>(bm.payload).trees.front() == std::get<Tree>(cart.payload),
           "bagging n=1 no-bootstrap tree equals CART");
  for (const Sample& s : q.rows) c.expect(predict_one(bm, s) == predict_one(cart, s), "bagging n=1 predictions");

  EstimatorSpec forest = EstimatorSpec::defaults(ModelKind::forest);
  forest.ensemble.n_estimators = 10;
  forest.ensemble.max_features = 6;
  forest.ensemble.bootstrap = false;
  const FittedModel fm = fit(forest, t);
  for (const Tree& tree : std::get<EnsemblePayload>(fm.payload).trees) {
    c.expect(tree == std::get<Tree>(cart.payload), "forest max_features=6 tree equals CART");
  }
  for (const Sample& s : q.rows) c.expect(predict_one(fm, s) == predict_one(cart, s), "forest predictions");

  for (ModelKind kind : {ModelKind::bagging, ModelKind::forest, ModelKind::extra_trees}) {
    EstimatorSpec s = EstimatorSpec::defaults(kind);
    s.ensemble.n_estimators = 40;
    const FittedModel a = fit(s, t, {1});
    const FittedModel b = fit(s, t, {1});
    const FittedModel p = fit(s, t, {4});
    const std::string name(model_kind_name(kind));
    c.expect(std::get<EnsemblePayload>(a.payload) == std::get<EnsemblePayload>(b.payload),
             name + " refit is bit-identical");
    c.expect(std::get<EnsemblePayload>(a.payload) == std::get<EnsemblePayload>(p.payload),
             name + " parallel fit is bit-identical");
    for (const Sample& x : q.rows) {
      const auto members = member_predictions(a, x.rrs);
      c.expect(std::abs(predict_one(a, x) - mean_of(members)) <= 1e-12, name + " output is the member mean");
      c.expect(predict_one(a, x) == predict_one(p, x), name + " parallel predictions");
    }
  }
  return c;
}

Checks criterion_oob() {
  Checks c;
  const SampleTable t = smooth_table(100, 41);
  for (ModelKind kind : {ModelKind::bagging, ModelKind::forest}) {
    EstimatorSpec s = EstimatorSpec::defaults(kind);
    s.ensemble.n_estimators = 200;
    const OobResult r = compute_oob_mae(fit(s, t), t);
    const std::string name(model_kind_name(kind));
    c.expect(r.covered_rows == 100, name + " covers all 100 rows");
    c.expect(r.mae.has_value(), name + " has an OOB MAE");
    c.note(name + "_covered=" + std::to_string(r.covered_rows));

    const SampleTable flat = test::random_table(100, 42, [](const Reflectances&, Rng&) { return 2.5; });
    const OobResult z = compute_oob_mae(fit(s, flat), flat);
    c.expect(z.mae.has_value() && *z.mae == 0.0, name + " constant target OOB MAE is 0");
  }
  return c;
}

Checks criterion_knn() {
  Checks c;
  Rng rng(51);
  std::vector<Reflectances> pts(3000);
  for (auto& p : pts) {
    for (double& v : p) v = rng.normal();
  }
  // Coarse copies force distance ties.
  for (std::size_t i = 0; i < 500; ++i) {
    for (double& v : pts[i]) v = std::round(v);
  }
  const KdTree tree(pts);
  for (int i = 0; i < 1000; ++i) {
    Reflectances q;
    for (double& v : q) v = i % 4 == 0 ? std::round(rng.normal()) : rng.normal();
    const std::size_t k = 1 + rng.uniform_index(12);
    c.expect(tree.nearest(q, k) == test::brute_force_knn(pts, q, k), "kd-tree equals brute force");
  }

  const SampleTable t = test::random_table(80, 52);
  EstimatorSpec s = EstimatorSpec::defaults(ModelKind::knn);
  s.knn.k = 1;
  const FittedModel one = fit(s, t);
  for (const Sample& x : t.rows) c.expect(predict_one(one, x) == *x.chl, "k=1 memorizes");
  s.knn.k = t.size();
  const FittedModel all = fit(s, t);
  const double mean = mean_of(t.targets());
  for (const Sample& x : test::random_table(50, 53).rows) {
    c.expect(std::abs(predict_one(all, x) - mean) <= 1e-12 * std::abs(mean), "k=N gives the global mean");
  }
  return c;
}

Checks criterion_svr() {
  Checks c;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(600 + seed);
    std::vector<Reflectances> x(10);
    std::vector<double> y(10);
    for (std::size_t i = 0; i < 10; ++i) {
      for (double& v : x[i]) v = rng.normal();
      y[i] = std::sin(x[i][0]) + 0.5 * x[i][1] + 0.2 * rng.normal();
    }
    SvrParams params;
    params.c = 0.5 + 2.0 * rng.uniform01();
    params.epsilon = 0.05 + 0.1 * rng.uniform01();
    params.tol = 1e-6;
    const double gamma = 1.0 / 6.0;
    const SvrSolution sol = solve_svr_dual(x, y, params, gamma);
    const auto oracle = test::oracle_svr_dual(x, y, params.c, params.epsilon, gamma);
    const double got = svr_dual_objective(x, y, sol.beta, gamma, params.epsilon);
    const double want = svr_dual_objective(x, y, oracle, gamma, params.epsilon);
    worst = std::max(worst, std::abs(got - want));
    c.expect(std::abs(got - want) <= 1e-4, "dual objective within 1e-4 of the QP oracle");
    double sum = 0.0;
    for (double b : sol.beta) {
      c.expect(b >= -params.c && b <= params.c, "beta in [-C, C]");
      sum += b;
    }
    c.expect(std::abs(sum) <= 1e-9, "sum of beta is 0");
  }

  const SampleTable flat = test::random_table(40, 61, [](const Reflectances&, Rng&) { return 1.3; });
  const FittedModel m = fit(EstimatorSpec::defaults(ModelKind::svr), flat);
  c.expect(std::get<SvrPayload>(m.payload).support_vectors.empty(), "constant target has no support vectors");
  for (const Sample& s : test::random_table(30, 62).rows) {
    c.expect(std::abs(predict_one(m, s) - 1.3) <= 1e-12, "constant target gives a flat predictor");
  }
  c.note("max_objective_gap=" + num(worst));
  return c;
}

Checks criterion_metrics_kde() {
  Checks c;
  Rng rng(71);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(500);
    std::vector<double> pred(n), truth(n);
    for (std::size_t i = 0; i < n; ++i) {
      truth[i] = std::exp(rng.normal());
      pred[i] = truth[i] + 0.3 * rng.normal();
    }
    long double abs_sum = 0.0L, tmean = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      abs_sum += std::fabs(static_cast<long double>(pred[i]) - truth[i]);
      tmean += truth[i];
    }
    tmean /= static_cast<long double>(n);
    long double res = 0.0L, tot = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      const long double e = static_cast<long double>(pred[i]) - truth[i];
      const long double d = static_cast<long double>(truth[i]) - tmean;
      res += e * e;
      tot += d * d;
    }
    const auto want_mae = static_cast<double>(abs_sum / static_cast<long double>(n));
    const auto want_r2 = static_cast<double>(100.0L * (1.0L - res / tot));
    c.expect(std::abs(mae(pred, truth) - want_mae) <= 1e-12 * std::max(1.0, want_mae), "mae matches brute force");
    c.expect(std::abs(r2_accuracy(pred, truth) - want_r2) <= 1e-12 * std::max(1.0, std::abs(want_r2)),
             "r2 matches brute force");
  }

  std::vector<double> v(400);
  for (double& x : v) x = std::exp(rng.normal());
  const double h = silverman_bandwidth(v);
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const auto xs = linspace(*lo - 6.0 * h, *hi + 6.0 * h, 4000);
  const DensityCurve d = kde_density(v, h, xs);
  double integral = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i) integral += 0.5 * (d.ys[i] + d.ys[i - 1]) * (xs[i] - xs[i - 1]);
  c.expect(std::abs(integral - 1.0) <= 1e-3, "KDE integrates to 1");

  const std::vector<double> zero{0.0};
  const double peak = kde_density(zero, 1.0, zero).ys[0];
  c.expect(std::abs(peak - 1.0 / std::sqrt(2.0 * std::numbers::pi)) <= 1e-9, "single-point peak 1/sqrt(2 pi)");
  c.note("integral=" + num(integral));
  return c;
}

// Parses report.csv into model -> (mae, accuracy).
std::map<std::string, std::pair<double, double>> read_report(const fs::path& path) {
  std::map<std::string, std::pair<double, double>> out;
  std::istringstream in(read_file(path));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string name, mae_s, acc_s;
    std::getline(row, name, ',');
    std::getline(row, mae_s, ',');
    std::getline(row, acc_s, ',');
    out[name] = {std::stod(mae_s), std::stod(acc_s)};
  }
  return out;
}

int run_cli(const std::vector<std::string>& args, std::string& err_text) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  std::cout << "  " << out.str();
  err_text = err.str();
  return code;
}

Checks criterion_bench(const fs::path& work) {
  Checks c;
  const fs::path dir = work / "bench-0.02";
  std::string err;
  const auto t0 = Clock::now();
  const int code = run_cli({"bench-synth", "--n", "50000", "--noise", "0.02", "--out-dir", dir.string()}, err);
  const double secs = seconds_since(t0);
  c.expect(code == 0, "bench-synth exit status: " + err);
  c.expect(secs < 300.0, "bench-synth under 5 minutes");
  c.note("bench_seconds=" + num(secs));
  if (code == 0) {
    const auto report = read_report(dir / "report.csv");
    auto mae_of = [&](const std::string& m) { return report.count(m) ? report.at(m).first : NAN; };
    c.expect(mae_of("extra_trees") <= mae_of("tree"), "extra_trees MAE <= tree MAE");
    c.expect(mae_of("tree") <= mae_of("linear"), "tree MAE <= linear MAE");
    for (const char* m : {"bagging", "forest", "extra_trees"}) {
      const double acc = report.count(m) ? report.at(m).second : NAN;
      c.expect(acc > 90.0, std::string(m) + " accuracy > 90%");
      c.note(std::string(m) + "_acc=" + num(acc));
    }
    c.note("extra_trees_mae=" + num(mae_of("extra_trees")) + " tree_mae=" + num(mae_of("tree")) +
           " linear_mae=" + num(mae_of("linear")));
  }

  const fs::path clean = work / "bench-0";
  const int code0 = run_cli({"bench-synth", "--n", "5000", "--noise", "0", "--out-dir", clean.string()}, err);
  c.expect(code0 == 0, "noise-0 bench-synth exit status: " + err);
  if (code0 == 0) {
    const auto report = read_report(clean / "report.csv");
    c.expect(report.count("oc4_baseline") && report.at("oc4_baseline").first == 0.0, "noise-0 baseline MAE is 0");
  }
  return c;
}

// Runs `parse` on 1000 corrupted copies; returns the count of non-Error throws.
template <class Parse>
std::size_t fuzz(const std::string& valid, std::uint64_t seed, Parse parse, std::size_t& structured) {
  Rng rng(seed);
  std::size_t bad = 0;
  for (int i = 0; i < 1000; ++i) {
    try {
      parse(test::mutate(valid, rng));
    } catch (const Error&) {
      ++structured;
    } catch (...) {
      ++bad;
    }
  }
  return bad;
}

Checks criterion_formats() {
  Checks c;
  GridStack stack = test::random_stack(7, 9, 81);
  GeoGrid chl = test::grid_like(7, 9);
  Rng rng(82);
  for (double& v : chl.values) v = rng.uniform01() < 0.1 ? chl.fill_value : test::f32(std::exp(rng.normal()));
  stack.chl = chl;
  stack.time_start = "2019-01-01";
  const std::string grid_bytes = write_grid(stack);
  c.expect(read_grid(grid_bytes) == stack, "grid round trip");

  const SampleTable table = test::random_table(300, 83, [](const Reflectances&, Rng& r) { return std::exp(r.normal()); });
  const std::string table_text = write_table(table);
  c.expect(read_table(table_text) == table, "table round trip");

  std::string model_text;
  for (ModelKind kind : kAllModelKinds) {
    EstimatorSpec s = EstimatorSpec::defaults(kind);
    if (is_ensemble(kind)) s.ensemble.n_estimators = 5;
    const FittedModel m = fit(s, table);
    const std::string text = save_model(m);
    const FittedModel back = load_model(text);
    const std::string name(model_kind_name(kind));
    c.expect(save_model(back) == text, name + " model text round trip");
    c.expect(back.spec == m.spec, name + " spec round trip");
    bool same = true;
    for (const Sample& x : table.rows) same = same && predict_one(back, x) == predict_one(m, x);
    c.expect(same, name + " model predictions round trip");
    if (kind == ModelKind::forest) model_text = text;
  }

  std::size_t structured = 0;
  c.expect(fuzz(grid_bytes, 84, [](const std::string& b) { read_grid(b); }, structured) == 0,
           "grid fuzzing raises only structured errors");
  c.expect(fuzz(table_text, 85, [](const std::string& b) { read_table(b); }, structured) == 0,
           "table fuzzing raises only structured errors");
  c.expect(fuzz(model_text, 86, [](const std::string& b) { load_model(b); }, structured) == 0,
           "model fuzzing raises only structured errors");
  c.note("structured_errors=" + std::to_string(structured));
  return c;
}

Checks criterion_grid_pipeline() {
  Checks c;
  const SampleTable t = test::random_table(150, 91);
  const GridStack stack = test::random_stack(8, 8, 92);
  for (ModelKind kind : kAllModelKinds) {
    EstimatorSpec s = EstimatorSpec::defaults(kind);
    if (is_ensemble(kind)) s.ensemble.n_estimators = 10;
    const FittedModel m = fit(s, t);
    const GeoGrid g = predict_grid(m, stack);
    for (std::size_t i = 0; i < g.size(); ++i) {
      Sample x;
      for (std::size_t b = 0; b < kNumBands; ++b) x.rrs[b] = stack.bands.at(std::string(kBandLabels[b])).values[i];
      c.expect(g.values[i] == predict_one(m, x), std::string(model_kind_name(kind)) + " predict_grid pixel");
    }
  }

  Rng rng(93);
  std::vector<GeoGrid> grids;
  for (int k = 0; k < 5; ++k) {
    GeoGrid g = test::grid_like(8, 8);
    for (double& v : g.values) v = rng.uniform01() < 0.25 ? g.fill_value : std::exp(rng.normal());
    grids.push_back(g);
  }
  const Composite base = composite_average(grids);
  std::vector<std::size_t> order(grids.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  while (std::next_permutation(order.begin(), order.end())) {
    std::vector<GeoGrid> permuted;
    for (auto i : order) permuted.push_back(grids[i]);
    const Composite p = composite_average(permuted);
    c.expect(p.mean == base.mean && p.counts == base.counts, "composite permutation invariant");
  }

  const GeoGrid rel = relative_error_grid(grids[0], grids[0]);
  for (std::size_t i = 0; i < rel.size(); ++i) {
    if (grids[0].is_present(i)) c.expect(rel.values[i] == 0.0, "relative error zero on identical grids");
  }
  return c;
}

struct Criterion {
  const char* name;
  std::function<Checks()> run;
};

}  // namespace

int main(int argc, char** argv) {
  fs::path work = fs::temp_directory_path() / "chl-acceptance";
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--work-dir") work = argv[i + 1];
  }
  fs::create_directories(work);

  const std::vector<Criterion> criteria{
      {"baseline polynomial, scale invariance, runtime", criterion_baseline},
      {"ols planted recovery and zero gradient", criterion_ols},
      {"ridge limits and monotone weight norm", criterion_ridge},
      {"cart equals brute-force split search", criterion_cart},
      {"ensemble reductions, member mean, determinism", criterion_ensembles},
      {"out-of-bag coverage and constant target", criterion_oob},
      {"k-nn kd-tree, k=1 and k=N", criterion_knn},
      {"svr dual optimality and feasibility", criterion_svr},
      {"metrics and kde", criterion_metrics_kde},
      {"synthetic benchmark ordering and accuracy", [&] { return criterion_bench(work); }},
      {"format round trips and fuzzing", criterion_formats},
      {"grid prediction, compositing, relative error", criterion_grid_pipeline},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    bool ok = false;
    std::string detail;
    try {
      const Checks c = criteria[i].run();
      ok = c.ok();
      detail = c.detail();
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    failures += ok ? 0 : 1;
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << (i + 1) << ": " << criteria[i].name << " ("
              << detail << " seconds=" << num(seconds_since(t0)) << ")" << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << "\n";
  return failures == 0 ? 0 : 1;
}
