#include <algorithm>
#include <atomic>
#include <mutex>
#include <cmath>
#include <numeric>
#include <thread>

#include "chl/error.hpp"
#include "chl/estimators.hpp"
#include "chl/random.hpp"
#include "detail.hpp"

namespace chl {

namespace {

struct MemberFit {
  Tree tree;
  std::vector<std::uint32_t> inbag;
};

MemberFit fit_member(const TrainingView& data, const EstimatorSpec& spec,
                     const TreeBuildConfig& config, std::size_t index) {
  Rng rng(derive_stream_seed(spec.seed, index));
  const std::size_t n = data.y.size();
  MemberFit m;
  std::vector<std::size_t> rows;
  if (spec.ensemble.bootstrap) {
    m.inbag.assign(n, 0);
    rows.resize(n);
    for (auto& r : rows) {
      r = rng.uniform_index(n);
      ++m.inbag[r];
    }
    std::sort(rows.begin(), rows.end());
  } else {
    rows.resize(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
  }
  m.tree = build_tree(data, std::move(rows), config, &rng);
  return m;
}

// Members are independent given (seed, index), so the worker count only
// changes scheduling; results land in their index slot.
FittedModel fit_ensemble(const SampleTable& train, const EstimatorSpec& spec,
                         SplitStrategy strategy, const FitOptions& options) {
  spec.validate();
  const detail::Design design = detail::make_design(train, spec.target);
  const TrainingView data{design.x, design.y};

  TreeBuildConfig config;
  config.params = spec.tree;
  config.max_features = spec.ensemble.max_features;
  config.strategy = strategy;

  const std::size_t n_members = spec.ensemble.n_estimators;
  std::vector<MemberFit> members(n_members);
  unsigned workers = options.threads != 0 ? options.threads : std::thread::hardware_concurrency();
  workers = static_cast<unsigned>(
      std::clamp<std::size_t>(workers == 0 ? 1 : workers, 1, n_members));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < n_members; i = next++) {
      try {
        members[i] = fit_member(data, spec, config, i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  EnsemblePayload payload;
  payload.trees.reserve(n_members);
  for (auto& m : members) {
    payload.trees.push_back(std::move(m.tree));
    if (spec.ensemble.bootstrap) payload.inbag.push_back(std::move(m.inbag));
  }
  return FittedModel{spec, std::nullopt, std::move(payload)};
}

void require_kind(const EstimatorSpec& spec, ModelKind kind) {
  if (spec.kind != kind) {
    throw ArgumentError("spec kind " + std::string(model_kind_name(spec.kind)) + " passed to " +
                        std::string(model_kind_name(kind)) + " fit");
  }
}

}  // namespace

FittedModel fit_bagging(const SampleTable& train, const EstimatorSpec& spec,
                        const FitOptions& options) {
  require_kind(spec, ModelKind::bagging);
  if (spec.ensemble.max_features != kNumBands) {
    throw ArgumentError("bagging uses all six features (max_features = 6)");
  }
  return fit_ensemble(train, spec, SplitStrategy::best, options);
}

FittedModel fit_random_forest(const SampleTable& train, const EstimatorSpec& spec,
                              const FitOptions& options) {
  require_kind(spec, ModelKind::forest);
  return fit_ensemble(train, spec, SplitStrategy::best, options);
}

FittedModel fit_extra_trees(const SampleTable& train, const EstimatorSpec& spec,
                            const FitOptions& options) {
  require_kind(spec, ModelKind::extra_trees);
  return fit_ensemble(train, spec, SplitStrategy::random, options);
}

std::vector<double> member_predictions(const FittedModel& model, const Reflectances& rrs) {
  const auto* ens = std::get_if<EnsemblePayload>(&model.payload);
  if (ens == nullptr) throw StateError("model is not an ensemble");
  std::vector<double> out;
  out.reserve(ens->trees.size());
  for (const Tree& t : ens->trees) out.push_back(t.predict(rrs));
  return out;
}

OobResult compute_oob_mae(const FittedModel& model, const SampleTable& train) {
  const auto* ens = std::get_if<EnsemblePayload>(&model.payload);
  if (ens == nullptr) throw StateError("out-of-bag error needs a bagging or forest model");
  if (!model.spec.ensemble.bootstrap || ens->inbag.empty()) {
    throw StateError("out-of-bag error needs recorded bootstrap membership");
  }
  const std::size_t n = train.size();
  for (const auto& counts : ens->inbag) {
    if (counts.size() != n) throw ArgumentError("training table differs from the fitted one");
  }
  const std::vector<double> truth = train.targets();

  OobResult result;
  double abs_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double first = 0.0;
    double offset = 0.0;
    std::size_t used = 0;
    for (std::size_t t = 0; t < ens->trees.size(); ++t) {
      if (ens->inbag[t][i] != 0) continue;
      const double v = ens->trees[t].predict(train.rows[i].rrs);
      if (used == 0) first = v;
      offset += v - first;
      ++used;
    }
    if (used == 0) continue;
    const double mean = first + offset / static_cast<double>(used);
    const double pred = detail::from_target_space(mean, model.spec.target);
    abs_sum += std::abs(pred - truth[i]);
    ++result.covered_rows;
  }
  if (result.covered_rows > 0) result.mae = abs_sum / static_cast<double>(result.covered_rows);
  return result;
}

}  // namespace chl
