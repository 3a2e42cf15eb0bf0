#include "chl/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "chl/error.hpp"
#include "detail.hpp"

namespace chl {

std::string_view model_kind_name(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::linear: return "linear";
    case ModelKind::ridge: return "ridge";
    case ModelKind::tree: return "tree";
    case ModelKind::bagging: return "bagging";
    case ModelKind::forest: return "forest";
    case ModelKind::extra_trees: return "extra_trees";
    case ModelKind::svr: return "svr";
    case ModelKind::knn: return "knn";
  }
  return "unknown";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) noexcept {
  for (ModelKind k : kAllModelKinds) {
    if (model_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

bool is_ensemble(ModelKind kind) noexcept {
  return kind == ModelKind::bagging || kind == ModelKind::forest || kind == ModelKind::extra_trees;
}

EstimatorSpec EstimatorSpec::defaults(ModelKind kind) {
  EstimatorSpec s;
  s.kind = kind;
  switch (kind) {
    case ModelKind::bagging:
      s.ensemble = {100, kNumBands, true};
      break;
    case ModelKind::forest:
      s.ensemble = {100, 2, true};
      break;
    case ModelKind::extra_trees:
      s.ensemble = {100, 2, false};
      break;
    default:
      break;
  }
  return s;
}

void EstimatorSpec::validate() const {
  switch (kind) {
    case ModelKind::linear:
      break;
    case ModelKind::ridge:
      if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw ArgumentError("ridge lambda must be finite and >= 0");
      }
      break;
    case ModelKind::tree:
    case ModelKind::bagging:
    case ModelKind::forest:
    case ModelKind::extra_trees:
      if (tree.min_samples_split < 2) throw ArgumentError("min_samples_split must be >= 2");
      if (kind == ModelKind::tree) break;
      if (ensemble.n_estimators < 1) throw ArgumentError("n_estimators must be >= 1");
      if (ensemble.max_features < 1 || ensemble.max_features > kNumBands) {
        throw ArgumentError("max_features must be in 1..6");
      }
      break;
    case ModelKind::svr:
      if (!(svr.c > 0.0) || !std::isfinite(svr.c)) throw ArgumentError("SVR C must be > 0");
      if (!(svr.epsilon >= 0.0) || !std::isfinite(svr.epsilon)) {
        throw ArgumentError("SVR epsilon must be >= 0");
      }
      if (svr.gamma && (!(*svr.gamma > 0.0) || !std::isfinite(*svr.gamma))) {
        throw ArgumentError("SVR gamma must be > 0");
      }
      if (!(svr.tol > 0.0)) throw ArgumentError("SVR tol must be > 0");
      break;
    case ModelKind::knn:
      if (knn.k < 1) throw ArgumentError("k must be >= 1");
      break;
  }
}

namespace detail {

double to_target_space(double chl, TargetSpace target) {
  if (target == TargetSpace::linear) return chl;
  if (!(chl > 0.0)) throw DomainError("log10 target needs chl_a > 0");
  return std::log10(chl);
}

double from_target_space(double value, TargetSpace target) noexcept {
  return target == TargetSpace::linear ? value : std::pow(10.0, value);
}

Design make_design(const SampleTable& train, TargetSpace target) {
  require_canonical_bands(train);
  if (train.empty()) throw ArgumentError("training table is empty");
  Design d;
  d.x.reserve(train.size());
  d.y.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    const Sample& s = train.rows[i];
    if (!s.chl) throw SchemaError("training row " + std::to_string(i) + " has no chl_a");
    for (double v : s.rrs) {
      if (!std::isfinite(v)) {
        throw DomainError("training row " + std::to_string(i) + " has a non-finite band");
      }
    }
    if (!std::isfinite(*s.chl)) {
      throw DomainError("training row " + std::to_string(i) + " has a non-finite chl_a");
    }
    d.x.push_back(s.rrs);
    d.y.push_back(to_target_space(*s.chl, target));
  }
  return d;
}

}  // namespace detail

FittedModel fit_cart(const SampleTable& train, const TreeParams& params, TargetSpace target) {
  EstimatorSpec spec = EstimatorSpec::defaults(ModelKind::tree);
  spec.tree = params;
  spec.target = target;
  spec.validate();
  const detail::Design design = detail::make_design(train, target);
  std::vector<std::size_t> rows(design.y.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  TreeBuildConfig config;
  config.params = params;
  Tree tree = build_tree({design.x, design.y}, std::move(rows), config, nullptr);
  return FittedModel{spec, std::nullopt, std::move(tree)};
}

FittedModel fit_svr(const SampleTable& train, const EstimatorSpec& spec) {
  if (spec.kind != ModelKind::svr) throw ArgumentError("fit_svr needs an svr spec");
  spec.validate();
  const detail::Design raw = detail::make_design(train, spec.target);
  TableStats stats = table_stats(train);
  std::vector<Reflectances> x;
  x.reserve(raw.x.size());
  for (const auto& r : raw.x) x.push_back(standardize(r, stats));

  double gamma = 1.0;
  if (spec.svr.gamma) {
    gamma = *spec.svr.gamma;
  } else {
    // Mean variance of the standardized features.
    double var_sum = 0.0;
    for (std::size_t b = 0; b < kNumBands; ++b) var_sum += stats.features[b].sd > 0.0 ? 1.0 : 0.0;
    const double mean_var = var_sum / static_cast<double>(kNumBands);
    gamma = mean_var > 0.0 ? 1.0 / (static_cast<double>(kNumBands) * mean_var) : 1.0;
  }

  const SvrSolution sol = solve_svr_dual(x, raw.y, spec.svr, gamma);
  SvrPayload p;
  p.bias = sol.bias;
  p.gamma = gamma;
  p.converged = sol.converged;
  p.iterations = sol.iterations;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (sol.beta[i] == 0.0) continue;
    p.support_vectors.push_back(x[i]);
    p.coefficients.push_back(sol.beta[i]);
  }
  return FittedModel{spec, std::move(stats), std::move(p)};
}

FittedModel fit_knn(const SampleTable& train, const EstimatorSpec& spec) {
  if (spec.kind != ModelKind::knn) throw ArgumentError("fit_knn needs a knn spec");
  spec.validate();
  const detail::Design raw = detail::make_design(train, spec.target);
  TableStats stats = table_stats(train);
  std::vector<Reflectances> x;
  x.reserve(raw.x.size());
  for (const auto& r : raw.x) x.push_back(standardize(r, stats));
  KnnPayload p{KdTree(std::move(x)), raw.y};
  return FittedModel{spec, std::move(stats), std::move(p)};
}

FittedModel fit(const EstimatorSpec& spec, const SampleTable& train, const FitOptions& options) {
  spec.validate();
  switch (spec.kind) {
    case ModelKind::linear: return fit_ols(train, spec.target);
    case ModelKind::ridge: return fit_ridge(train, spec.lambda, spec.target);
    case ModelKind::tree: {
      FittedModel m = fit_cart(train, spec.tree, spec.target);
      m.spec = spec;
      return m;
    }
    case ModelKind::bagging: return fit_bagging(train, spec, options);
    case ModelKind::forest: return fit_random_forest(train, spec, options);
    case ModelKind::extra_trees: return fit_extra_trees(train, spec, options);
    case ModelKind::svr: return fit_svr(train, spec);
    case ModelKind::knn: return fit_knn(train, spec);
  }
  throw ArgumentError("unknown model kind");
}

namespace {

double aggregate(std::vector<double>& values, Aggregation how) {
  if (how == Aggregation::mean) {
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  }
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

struct RawPredictor {
  const FittedModel& model;
  const Reflectances& rrs;

  double operator()(const LinearPayload& p) const {
    double v = p.intercept;
    for (std::size_t j = 0; j < kNumBands; ++j) v += p.weights[j] * rrs[j];
    return v;
  }
  double operator()(const Tree& t) const { return t.predict(rrs); }
  double operator()(const EnsemblePayload& p) const {
    // Averaging offsets from the first member keeps identical members exact.
    if (p.trees.empty()) throw StateError("ensemble has no trees");
    const double first = p.trees.front().predict(rrs);
    double offset = 0.0;
    for (std::size_t t = 1; t < p.trees.size(); ++t) offset += p.trees[t].predict(rrs) - first;
    return first + offset / static_cast<double>(p.trees.size());
  }
  double operator()(const SvrPayload& p) const {
    const Reflectances z = standardized();
    double v = p.bias;
    for (std::size_t i = 0; i < p.support_vectors.size(); ++i) {
      v += p.coefficients[i] * rbf_kernel(p.support_vectors[i], z, p.gamma);
    }
    return v;
  }
  double operator()(const KnnPayload& p) const {
    const auto neighbors = p.index.nearest(standardized(), model.spec.knn.k);
    std::vector<double> values;
    values.reserve(neighbors.size());
    for (const auto& nb : neighbors) values.push_back(p.targets[nb.index]);
    return aggregate(values, model.spec.knn.aggregation);
  }

  Reflectances standardized() const {
    return model.preprocessing ? standardize(rrs, *model.preprocessing) : rrs;
  }
};

}  // namespace

double predict_raw(const FittedModel& model, const Reflectances& rrs) {
  return std::visit(RawPredictor{model, rrs}, model.payload);
}

double predict_one(const FittedModel& model, const Sample& sample) {
  for (double v : sample.rrs) {
    if (!std::isfinite(v)) throw SchemaError("sample bands are incomplete (non-finite value)");
  }
  return detail::from_target_space(predict_raw(model, sample.rrs), model.spec.target);
}

std::vector<double> predict(const FittedModel& model, const SampleTable& table) {
  require_canonical_bands(table);
  std::vector<double> out;
  out.reserve(table.size());
  for (const Sample& s : table.rows) out.push_back(predict_one(model, s));
  return out;
}

GeoGrid predict_grid(const FittedModel& model, const GridStack& stack) {
  stack.require_all_bands();
  stack.validate();
  const GeoGrid& ref = stack.bands.at(std::string(kBandLabels[0]));
  GeoGrid out = GeoGrid::filled(ref.n_rows, ref.n_cols, ref.lat_north, ref.lat_south,
                                ref.lon_west, ref.lon_east, ref.fill_value);
  std::array<const GeoGrid*, kNumBands> planes{};
  for (std::size_t b = 0; b < kNumBands; ++b) {
    planes[b] = &stack.bands.at(std::string(kBandLabels[b]));
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    Sample s;
    bool ok = true;
    for (std::size_t b = 0; b < kNumBands && ok; ++b) {
      ok = planes[b]->is_present(i);
      s.rrs[b] = planes[b]->values[i];
    }
    if (!ok || !is_valid_sample(s)) continue;
    out.values[i] = predict_one(model, s);
  }
  return out;
}

}  // namespace chl
