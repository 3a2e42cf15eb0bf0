#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "chl/baseline.hpp"
#include "chl/error.hpp"
#include "chl/estimators.hpp"
#include "chl/evaluation.hpp"
#include "chl/io.hpp"
#include "chl/model_io.hpp"
#include "chl/synthetic.hpp"

namespace chl::cli {

namespace {

namespace fs = std::filesystem;

/// Space-separated key=value pairs in insertion order.
class Summary {
 public:
  explicit Summary(std::string command) { add("status", "ok"); add("command", std::move(command)); }

  void add(const std::string& key, const std::string& value) {
    text_ += (text_.empty() ? "" : " ") + key + "=" + value;
  }
  void add(const std::string& key, double value) { add(key, format_number(value)); }
  void add(const std::string& key, std::size_t value) { add(key, std::to_string(value)); }

  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

// Estimator flags shared by `train`.
struct EstimatorFlags {
  std::string model;
  std::string spec_file;
  std::optional<std::size_t> k;
  std::optional<double> lambda;
  std::optional<std::size_t> n_estimators;
  std::optional<std::size_t> max_features;
  std::optional<std::string> max_depth;
  std::optional<std::size_t> min_samples_split;
  std::optional<double> c;
  std::optional<double> epsilon;
  std::optional<std::string> gamma;
  std::optional<double> tol;
  std::optional<std::uint64_t> max_iter;
  std::optional<std::string> aggregation;
  std::optional<bool> bootstrap;
  bool log_target = false;
  std::optional<std::uint64_t> seed;
};

void add_estimator_flags(CLI::App* app, EstimatorFlags& f) {
  app->add_option("--model", f.model, "linear|ridge|tree|bagging|forest|extra_trees|svr|knn");
  app->add_option("--spec-file", f.spec_file, "JSON estimator spec");
  app->add_option("--k", f.k, "k-NN neighbour count");
  app->add_option("--lambda", f.lambda, "ridge penalty");
  app->add_option("--n-estimators", f.n_estimators, "ensemble size");
  app->add_option("--max-features", f.max_features, "features drawn per node (1..6)");
  app->add_option("--max-depth", f.max_depth, "tree depth limit or 'none'");
  app->add_option("--min-samples-split", f.min_samples_split, "minimum rows to split a node");
  app->add_option("--c", f.c, "SVR box constraint C");
  app->add_option("--epsilon", f.epsilon, "SVR tube half-width");
  app->add_option("--gamma", f.gamma, "RBF gamma or 'scale'");
  app->add_option("--tol", f.tol, "SVR KKT tolerance");
  app->add_option("--max-iter", f.max_iter, "SVR pair-update limit");
  app->add_option("--aggregation", f.aggregation, "k-NN aggregation: mean|median");
  app->add_option("--bootstrap", f.bootstrap, "ensemble bootstrap resampling (true|false)");
  app->add_flag("--log-target", f.log_target, "fit log10(chl) instead of chl");
  app->add_option("--seed", f.seed, "random seed");
}

EstimatorSpec build_spec(const EstimatorFlags& f) {
  EstimatorSpec spec;
  if (!f.spec_file.empty()) {
    if (!f.model.empty()) throw ArgumentError("give either --model or --spec-file, not both");
    spec = parse_spec_json(read_file(f.spec_file));
  } else {
    if (f.model.empty()) throw ArgumentError("--model or --spec-file is required");
    const auto kind = parse_model_kind(f.model);
    if (!kind) throw ArgumentError("unknown model '" + f.model + "'");
    spec = EstimatorSpec::defaults(*kind);
  }
  if (f.k) spec.knn.k = *f.k;
  if (f.lambda) spec.lambda = *f.lambda;
  if (f.n_estimators) spec.ensemble.n_estimators = *f.n_estimators;
  if (f.max_features) spec.ensemble.max_features = *f.max_features;
  if (f.max_depth) {
    if (*f.max_depth == "none") {
      spec.tree.max_depth.reset();
    } else {
      try {
        spec.tree.max_depth = std::stoul(*f.max_depth);
      } catch (const std::exception&) {
        throw ArgumentError("--max-depth takes an integer or 'none'");
      }
    }
  }
  if (f.min_samples_split) spec.tree.min_samples_split = *f.min_samples_split;
  if (f.c) spec.svr.c = *f.c;
  if (f.epsilon) spec.svr.epsilon = *f.epsilon;
  if (f.gamma) {
    if (*f.gamma == "scale") {
      spec.svr.gamma.reset();
    } else {
      try {
        spec.svr.gamma = std::stod(*f.gamma);
      } catch (const std::exception&) {
        throw ArgumentError("--gamma takes a number or 'scale'");
      }
    }
  }
  if (f.tol) spec.svr.tol = *f.tol;
  if (f.max_iter) spec.svr.max_iter = *f.max_iter;
  if (f.aggregation) {
    if (*f.aggregation == "mean") {
      spec.knn.aggregation = Aggregation::mean;
    } else if (*f.aggregation == "median") {
      spec.knn.aggregation = Aggregation::median;
    } else {
      throw ArgumentError("--aggregation takes mean or median");
    }
  }
  if (f.bootstrap) spec.ensemble.bootstrap = *f.bootstrap;
  if (f.log_target) spec.target = TargetSpace::log10;
  if (f.seed) spec.seed = *f.seed;
  spec.validate();
  return spec;
}

BandRatioCoeffs load_coeffs(const std::string& which) {
  if (which == "paper") return BandRatioCoeffs::paper();
  if (which == "canonical") return BandRatioCoeffs::canonical();
  return BandRatioCoeffs::from_json(read_file(which));
}

MapScale parse_scale(const std::string& s) {
  if (s == "log10") return MapScale::log10;
  if (s == "linear") return MapScale::linear;
  throw ArgumentError("--scale takes log10 or linear");
}

GridStack read_stack(const std::string& path) { return read_grid(read_file(path)); }

GridStack chl_stack(GeoGrid grid, const GridStack& like) {
  GridStack s;
  s.chl = std::move(grid);
  s.time_start = like.time_start;
  s.time_end = like.time_end;
  return s;
}

// Plane `label` of a stack: "chl" or a wavelength label.
const GeoGrid& plane(const GridStack& s, const std::string& label) {
  if (label == kChlLabel) {
    if (!s.chl) throw SchemaError("grid has no chl plane");
    return *s.chl;
  }
  auto it = s.bands.find(label);
  if (it == s.bands.end()) throw SchemaError("grid has no plane '" + label + "'");
  return it->second;
}

std::size_t count_present(const GeoGrid& g) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < g.size(); ++i) n += g.is_present(i) ? 1 : 0;
  return n;
}

// --- subcommands ------------------------------------------------------------

struct IngestArgs {
  std::string in, out, index_out;
  std::size_t rows = 0, cols = 0;
  double lat_north = NAN, lat_south = NAN, lon_west = NAN, lon_east = NAN;
  double fill = GeoGrid::kDefaultFill;
  std::string time_start, time_end;
};

std::string run_ingest(const IngestArgs& a) {
  Summary sum("ingest");
  if (fs::path(a.in).extension() == ".csv") {
    if (a.rows == 0 || a.cols == 0) throw ArgumentError("pixel CSV ingestion needs --rows and --cols");
    const NumericCsv csv = read_numeric_csv(read_file(a.in));
    const auto row_idx = csv.column("row");
    const auto col_idx = csv.column("col");
    GridStack stack;
    const GeoGrid blank =
        GeoGrid::filled(a.rows, a.cols, a.lat_north, a.lat_south, a.lon_west, a.lon_east, a.fill);
    blank.validate();
    std::vector<std::vector<double>> bands;
    for (std::size_t b = 0; b < kNumBands; ++b) {
      stack.bands[std::string(kBandLabels[b])] = blank;
      bands.push_back(csv.column(feature_name(b)));
    }
    const bool has_chl =
        std::find(csv.header.begin(), csv.header.end(), "chl_a") != csv.header.end();
    std::vector<double> chl;
    if (has_chl) {
      stack.chl = blank;
      chl = csv.column("chl_a");
    }
    for (std::size_t i = 0; i < csv.rows.size(); ++i) {
      const double r = row_idx[i];
      const double c = col_idx[i];
      if (!(r >= 0 && c >= 0 && r < static_cast<double>(a.rows) && c < static_cast<double>(a.cols)) ||
          r != std::floor(r) || c != std::floor(c)) {
        throw DimensionError("pixel (" + format_number(r) + "," + format_number(c) +
                             ") lies outside the grid");
      }
      const auto ri = static_cast<std::size_t>(r);
      const auto ci = static_cast<std::size_t>(c);
      for (std::size_t b = 0; b < kNumBands; ++b) {
        const double v = bands[b][i];
        stack.bands[std::string(kBandLabels[b])].at(ri, ci) = std::isnan(v) ? a.fill : v;
      }
      if (has_chl) stack.chl->at(ri, ci) = std::isnan(chl[i]) ? a.fill : chl[i];
    }
    if (!a.time_start.empty()) stack.time_start = a.time_start;
    if (!a.time_end.empty()) stack.time_end = a.time_end;
    write_file(a.out, write_grid(stack));
    sum.add("n_rows", a.rows);
    sum.add("n_cols", a.cols);
    sum.add("pixels_written", csv.rows.size());
    return sum.str();
  }

  const GridStack stack = read_stack(a.in);
  const FlattenedStack flat = flatten_grid_stack(stack);
  write_file(a.out, write_table(flat.table));
  if (!a.index_out.empty()) {
    std::string idx = "row,col\n";
    for (const auto& p : flat.pixels) idx += std::to_string(p.row) + ',' + std::to_string(p.col) + '\n';
    write_file(a.index_out, idx);
  }
  const GeoGrid& ref = stack.reference();
  sum.add("pixels", ref.size());
  sum.add("rows_written", flat.table.size());
  return sum.str();
}

struct SplitArgs {
  std::vector<std::string> in;
  std::string train_out, test_out;
  double train_frac = 0.05, test_frac = 0.01;
  std::uint64_t seed = kDefaultSeed;
};

std::string run_split(SplitArgs a) {
  // Several inputs (e.g. one table per image) are pooled before shuffling.
  SampleTable table;
  for (const std::string& path : a.in) {
    SampleTable part = read_table(read_file(path));
    table.rows.insert(table.rows.end(), part.rows.begin(), part.rows.end());
  }
  const fs::path in(a.in.front());
  const fs::path stem = in.parent_path() / in.stem();
  if (a.train_out.empty()) a.train_out = stem.string() + ".train.csv";
  if (a.test_out.empty()) a.test_out = stem.string() + ".test.csv";
  const TrainTestSplit split = split_train_test(table, a.train_frac, a.test_frac, a.seed);
  write_file(a.train_out, write_table(split.train));
  write_file(a.test_out, write_table(split.test));
  Summary sum("split");
  sum.add("n_train", split.train.size());
  sum.add("n_test", split.test.size());
  sum.add("seed", std::to_string(a.seed));
  sum.add("train_out", a.train_out);
  sum.add("test_out", a.test_out);
  return sum.str();
}

struct TrainArgs {
  std::string in, out;
  unsigned threads = 0;
};

std::string run_train(const TrainArgs& a, const EstimatorFlags& flags) {
  const EstimatorSpec spec = build_spec(flags);
  const SampleTable train = read_table(read_file(a.in));
  const FittedModel model = fit(spec, train, {a.threads});
  write_file(a.out, save_model(model));

  Summary sum("train");
  sum.add("model", std::string(model_kind_name(spec.kind)));
  sum.add("n_train", train.size());
  sum.add("train_mae", mae(predict(model, train), train.targets()));
  if (is_ensemble(spec.kind) && spec.ensemble.bootstrap) {
    const OobResult oob = compute_oob_mae(model, train);
    sum.add("oob_rows", oob.covered_rows);
    if (oob.mae) sum.add("oob_mae", *oob.mae);
  }
  if (const auto* svr = std::get_if<SvrPayload>(&model.payload)) {
    sum.add("support_vectors", svr->support_vectors.size());
    sum.add("converged", std::string(svr->converged ? "true" : "false"));
  }
  return sum.str();
}

struct CompareArgs {
  std::string train, test, specs = "all-defaults", spec_file, out = "report.csv", text_out,
                                  predictions_out;
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 0;
};

std::vector<EstimatorSpec> select_specs(const CompareArgs& a) {
  if (!a.spec_file.empty()) return parse_spec_list_json(read_file(a.spec_file));
  if (a.specs == "all-defaults") return default_specs(a.seed);
  std::vector<EstimatorSpec> specs;
  std::stringstream ss(a.specs);
  std::string name;
  while (std::getline(ss, name, ',')) {
    const auto kind = parse_model_kind(name);
    if (!kind) throw ArgumentError("unknown model '" + name + "' in --specs");
    EstimatorSpec s = EstimatorSpec::defaults(*kind);
    s.seed = a.seed;
    specs.push_back(s);
  }
  if (specs.empty()) throw ArgumentError("--specs lists no models");
  return specs;
}

std::string run_compare(const CompareArgs& a) {
  TrainTestSplit split;
  split.train = read_table(read_file(a.train));
  split.test = read_table(read_file(a.test));
  split.seed = a.seed;
  const auto specs = select_specs(a);
  ComparisonResult result = compare_models(specs, split, {a.threads});
  result.report.dataset_id = fs::path(a.test).filename().string();
  write_file(a.out, result.report.to_csv());
  if (!a.text_out.empty()) write_file(a.text_out, result.report.to_text());
  if (!a.predictions_out.empty()) {
    std::string csv = "truth";
    for (const auto& s : specs) csv += "," + std::string(model_kind_name(s.kind));
    csv += '\n';
    const auto truth = split.test.targets();
    for (std::size_t i = 0; i < truth.size(); ++i) {
      csv += format_number(truth[i]);
      for (const auto& p : result.predictions) csv += ',' + format_number(p[i]);
      csv += '\n';
    }
    write_file(a.predictions_out, csv);
  }
  Summary sum("compare");
  sum.add("n_train", split.train.size());
  sum.add("n_test", split.test.size());
  sum.add("models", result.report.rows.size());
  const auto best = std::min_element(result.report.rows.begin(), result.report.rows.end(),
                                     [](const auto& x, const auto& y) { return x.mae < y.mae; });
  sum.add("best", best->name);
  sum.add("best_mae", best->mae);
  sum.add("out", a.out);
  return sum.str();
}

struct PredictGridArgs {
  std::string model, in, out;
};

std::string run_predict_grid(const PredictGridArgs& a) {
  const FittedModel model = load_model(read_file(a.model));
  const GridStack stack = read_stack(a.in);
  const GeoGrid pred = predict_grid(model, stack);
  write_file(a.out, write_grid(chl_stack(pred, stack)));
  Summary sum("predict-grid");
  sum.add("model", std::string(model_kind_name(model.spec.kind)));
  sum.add("pixels", pred.size());
  sum.add("predicted", count_present(pred));
  return sum.str();
}

struct CompositeArgs {
  std::vector<std::string> in;
  std::string out, band;
};

std::string run_composite(const CompositeArgs& a) {
  std::vector<GridStack> stacks;
  for (const auto& p : a.in) stacks.push_back(read_stack(p));
  std::vector<std::string> labels;
  if (!a.band.empty()) {
    labels.push_back(a.band);
  } else {
    for (const auto& [label, g] : stacks.front().bands) labels.push_back(label);
    if (stacks.front().chl) labels.emplace_back(kChlLabel);
  }
  GridStack out;
  std::size_t max_count = 0;
  for (const auto& label : labels) {
    std::vector<GeoGrid> planes;
    for (const auto& s : stacks) planes.push_back(plane(s, label));
    Composite c = composite_average(planes);
    for (auto n : c.counts) max_count = std::max(max_count, n);
    if (label == kChlLabel) {
      out.chl = std::move(c.mean);
    } else {
      out.bands[label] = std::move(c.mean);
    }
  }
  for (const auto& s : stacks) {
    if (s.time_start && (!out.time_start || *s.time_start < *out.time_start)) out.time_start = s.time_start;
    if (s.time_end && (!out.time_end || *s.time_end > *out.time_end)) out.time_end = s.time_end;
  }
  write_file(a.out, write_grid(out));
  Summary sum("composite");
  sum.add("inputs", stacks.size());
  sum.add("planes", labels.size());
  sum.add("max_count", max_count);
  return sum.str();
}

struct DiffArgs {
  std::string pred, truth, out, band = "chl";
};

std::string run_diff(const DiffArgs& a) {
  const GridStack pred = read_stack(a.pred);
  const GridStack truth = read_stack(a.truth);
  const GeoGrid rel = relative_error_grid(plane(pred, a.band), plane(truth, a.band));
  write_file(a.out, write_grid(chl_stack(rel, truth)));
  double abs_sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < rel.size(); ++i) {
    if (!rel.is_present(i)) continue;
    abs_sum += std::abs(rel.values[i]);
    ++n;
  }
  Summary sum("diff-grid");
  sum.add("pixels", n);
  if (n > 0) sum.add("mean_abs_rel_error", abs_sum / static_cast<double>(n));
  return sum.str();
}

struct KdeArgs {
  std::string in, out, column = "chl_a";
  std::size_t points = 512;
  std::optional<double> bandwidth;
};

std::string run_kde(const KdeArgs& a) {
  const NumericCsv csv = read_numeric_csv(read_file(a.in));
  std::vector<double> values;
  for (double v : csv.column(a.column)) {
    if (std::isfinite(v)) values.push_back(v);
  }
  if (values.empty()) throw ArgumentError("column '" + a.column + "' holds no values");
  const double h = a.bandwidth ? *a.bandwidth : silverman_bandwidth(values);
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const auto xs = linspace(*lo - 3.0 * h, *hi + 3.0 * h, std::max<std::size_t>(a.points, 2));
  const DensityCurve curve = kde_density(values, h, xs);
  write_file(a.out, curve.to_csv());
  Summary sum("kde");
  sum.add("n", values.size());
  sum.add("bandwidth", h);
  sum.add("points", xs.size());
  return sum.str();
}

struct Oc4Args {
  std::string in, out, coeffs = "paper";
};

std::string run_oc4(const Oc4Args& a) {
  const BandRatioCoeffs coeffs = load_coeffs(a.coeffs);
  const GridStack stack = read_stack(a.in);
  const GeoGrid chl = baseline_grid(stack, coeffs);
  write_file(a.out, write_grid(chl_stack(chl, stack)));
  Summary sum("oc4");
  sum.add("coeffs", a.coeffs);
  sum.add("pixels", chl.size());
  sum.add("retrieved", count_present(chl));
  return sum.str();
}

struct RenderArgs {
  std::string in, out, band = "chl", scale = "log10";
  double lo = 0.01, hi = 10.0;
};

std::string run_render(const RenderArgs& a) {
  const GridStack stack = read_stack(a.in);
  const GeoGrid& g = plane(stack, a.band);
  write_file(a.out, render_map(g, a.lo, a.hi, parse_scale(a.scale)));
  Summary sum("render");
  sum.add("width", g.n_cols);
  sum.add("height", g.n_rows);
  sum.add("scale", a.scale);
  return sum.str();
}

struct BenchArgs {
  std::size_t n = 50000;
  double noise = 0.02;
  std::uint64_t seed = 7;
  std::string out_dir = "bench-out", coeffs = "canonical";
  double train_frac = 0.5, test_frac = 0.2;
  unsigned threads = 0;
};

std::string run_bench(const BenchArgs& a) {
  SyntheticConfig cfg;
  cfg.n = a.n;
  cfg.noise = a.noise;
  cfg.seed = a.seed;
  cfg.coeffs = load_coeffs(a.coeffs);
  cfg.train_frac = a.train_frac;
  cfg.test_frac = a.test_frac;
  const SyntheticBenchmark b = run_synthetic_benchmark(cfg, {a.threads});

  const fs::path dir(a.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_file(dir / "train.csv", write_table(b.split.train));
  write_file(dir / "test.csv", write_table(b.split.test));
  EvaluationReport report = b.comparison.report;
  report.rows.insert(report.rows.begin(),
                     ReportRow{"oc4_baseline", b.baseline_mae, b.baseline_accuracy,
                               b.split.test.size()});
  write_file(dir / "report.csv", report.to_csv());
  write_file(dir / "report.txt", report.to_text());

  Summary sum("bench-synth");
  sum.add("n", a.n);
  sum.add("n_train", b.split.train.size());
  sum.add("n_test", b.split.test.size());
  sum.add("baseline_mae", b.baseline_mae);
  for (const auto& r : b.comparison.report.rows) {
    sum.add(r.name + "_mae", r.mae);
    sum.add(r.name + "_acc", r.accuracy);
  }
  if (!b.skipped.empty()) {
    std::string names;
    for (const auto& [name, why] : b.skipped) names += (names.empty() ? "" : ",") + name;
    sum.add("skipped", names);
  }
  return sum.str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"chlx: chlorophyll-a retrieval from six-band reflectance", "chlx"};
  app.require_subcommand(1, 1);
  app.allow_windows_style_options(false);

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "convert a grid to a sample table, or a pixel CSV to a grid");
  c_ingest->add_option("--in", ingest.in)->required();
  c_ingest->add_option("--out", ingest.out)->required();
  c_ingest->add_option("--index-out", ingest.index_out, "row,col of each table row");
  c_ingest->add_option("--rows", ingest.rows);
  c_ingest->add_option("--cols", ingest.cols);
  c_ingest->add_option("--lat-north", ingest.lat_north);
  c_ingest->add_option("--lat-south", ingest.lat_south);
  c_ingest->add_option("--lon-west", ingest.lon_west);
  c_ingest->add_option("--lon-east", ingest.lon_east);
  c_ingest->add_option("--fill", ingest.fill);
  c_ingest->add_option("--time-start", ingest.time_start);
  c_ingest->add_option("--time-end", ingest.time_end);

  SplitArgs split;
  auto* c_split = app.add_subcommand("split", "seeded train/test split of a sample table");
  c_split->add_option("--in", split.in, "one or more tables, pooled")->required()->expected(1, -1);
  c_split->add_option("--train-out", split.train_out);
  c_split->add_option("--test-out", split.test_out);
  c_split->add_option("--train-frac", split.train_frac);
  c_split->add_option("--test-frac", split.test_frac);
  c_split->add_option("--seed", split.seed);

  TrainArgs train;
  EstimatorFlags flags;
  auto* c_train = app.add_subcommand("train", "fit one estimator and save it");
  c_train->add_option("--in", train.in)->required();
  c_train->add_option("--out", train.out)->required();
  c_train->add_option("--threads", train.threads);
  add_estimator_flags(c_train, flags);

  CompareArgs compare;
  auto* c_compare = app.add_subcommand("compare", "fit and score several estimators");
  c_compare->add_option("--train", compare.train)->required();
  c_compare->add_option("--test", compare.test)->required();
  c_compare->add_option("--specs", compare.specs, "all-defaults or a comma list of model kinds");
  c_compare->add_option("--spec-file", compare.spec_file);
  c_compare->add_option("--out", compare.out);
  c_compare->add_option("--text-out", compare.text_out);
  c_compare->add_option("--predictions-out", compare.predictions_out);
  c_compare->add_option("--seed", compare.seed);
  c_compare->add_option("--threads", compare.threads);

  PredictGridArgs pg;
  auto* c_pg = app.add_subcommand("predict-grid", "apply a saved model to a grid stack");
  c_pg->add_option("--model", pg.model)->required();
  c_pg->add_option("--in", pg.in)->required();
  c_pg->add_option("--out", pg.out)->required();

  CompositeArgs comp;
  auto* c_comp = app.add_subcommand("composite", "per-pixel mean over several grids");
  c_comp->add_option("--in", comp.in)->required()->expected(1, -1);
  c_comp->add_option("--out", comp.out)->required();
  c_comp->add_option("--band", comp.band);

  DiffArgs diff;
  auto* c_diff = app.add_subcommand("diff-grid", "signed relative error of two grids");
  c_diff->add_option("--pred", diff.pred)->required();
  c_diff->add_option("--truth", diff.truth)->required();
  c_diff->add_option("--out", diff.out)->required();
  c_diff->add_option("--band", diff.band);

  KdeArgs kde;
  auto* c_kde = app.add_subcommand("kde", "Gaussian kernel density of a CSV column");
  c_kde->add_option("--in", kde.in)->required();
  c_kde->add_option("--out", kde.out)->required();
  c_kde->add_option("--column", kde.column);
  c_kde->add_option("--points", kde.points);
  c_kde->add_option("--bandwidth", kde.bandwidth);

  Oc4Args oc4;
  auto* c_oc4 = app.add_subcommand("oc4", "band-ratio baseline chlorophyll grid");
  c_oc4->add_option("--in", oc4.in)->required();
  c_oc4->add_option("--out", oc4.out)->required();
  c_oc4->add_option("--coeffs", oc4.coeffs, "paper, canonical or a JSON file");

  RenderArgs render;
  auto* c_render = app.add_subcommand("render", "colour-mapped PPM of a grid plane");
  c_render->add_option("--in", render.in)->required();
  c_render->add_option("--out", render.out)->required();
  c_render->add_option("--band", render.band);
  c_render->add_option("--lo", render.lo);
  c_render->add_option("--hi", render.hi);
  c_render->add_option("--scale", render.scale);

  BenchArgs bench;
  auto* c_bench = app.add_subcommand("bench-synth", "synthetic dataset and eight-model comparison");
  c_bench->add_option("--n", bench.n);
  c_bench->add_option("--noise", bench.noise);
  c_bench->add_option("--seed", bench.seed);
  c_bench->add_option("--out-dir", bench.out_dir);
  c_bench->add_option("--coeffs", bench.coeffs);
  c_bench->add_option("--train-frac", bench.train_frac);
  c_bench->add_option("--test-frac", bench.test_frac);
  c_bench->add_option("--threads", bench.threads);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: UsageError: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    std::string summary;
    if (c_ingest->parsed()) summary = run_ingest(ingest);
    else if (c_split->parsed()) summary = run_split(split);
    else if (c_train->parsed()) summary = run_train(train, flags);
    else if (c_compare->parsed()) summary = run_compare(compare);
    else if (c_pg->parsed()) summary = run_predict_grid(pg);
    else if (c_comp->parsed()) summary = run_composite(comp);
    else if (c_diff->parsed()) summary = run_diff(diff);
    else if (c_kde->parsed()) summary = run_kde(kde);
    else if (c_oc4->parsed()) summary = run_oc4(oc4);
    else if (c_render->parsed()) summary = run_render(render);
    else if (c_bench->parsed()) summary = run_bench(bench);
    out << summary << "\n";
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << error_kind_name(e.kind()) << ": " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    err << "error: Error: " << e.what() << "\n";
    return kExitDomain;
  }
}

}  // namespace chl::cli
