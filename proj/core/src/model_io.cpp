#include "chl/model_io.hpp"

#include <cmath>
#include <set>

#include "chl/error.hpp"
#include "json.hpp"

namespace chl {

namespace {

using nlohmann::json;

constexpr std::size_t kMaxTreeDepth = 4096;

std::string_view target_name(TargetSpace t) { return t == TargetSpace::linear ? "linear" : "log10"; }
std::string_view aggregation_name(Aggregation a) { return a == Aggregation::mean ? "mean" : "median"; }

json hyperparams_json(const EstimatorSpec& s) {
  json h = {{"seed", s.seed}, {"target_space", target_name(s.target)}};
  auto tree_params = [&] {
    h["max_depth"] = s.tree.max_depth ? json(*s.tree.max_depth) : json(nullptr);
    h["min_samples_split"] = s.tree.min_samples_split;
  };
  switch (s.kind) {
    case ModelKind::linear:
      break;
    case ModelKind::ridge:
      h["lambda"] = s.lambda;
      break;
    case ModelKind::tree:
      tree_params();
      break;
    case ModelKind::bagging:
    case ModelKind::forest:
    case ModelKind::extra_trees:
      tree_params();
      h["n_estimators"] = s.ensemble.n_estimators;
      h["max_features"] = s.ensemble.max_features;
      h["bootstrap"] = s.ensemble.bootstrap;
      break;
    case ModelKind::svr:
      h["C"] = s.svr.c;
      h["epsilon"] = s.svr.epsilon;
      h["gamma"] = s.svr.gamma ? json(*s.svr.gamma) : json("scale");
      h["tol"] = s.svr.tol;
      h["max_iter"] = s.svr.max_iter;
      break;
    case ModelKind::knn:
      h["k"] = s.knn.k;
      h["aggregation"] = aggregation_name(s.knn.aggregation);
      break;
  }
  return h;
}

std::size_t as_count(const json& v, const char* key) {
  if (!v.is_number_unsigned()) throw ArgumentError(std::string(key) + " must be a non-negative integer");
  return v.get<std::size_t>();
}

double as_number(const json& v, const char* key) {
  if (!v.is_number()) throw ArgumentError(std::string(key) + " must be a number");
  return v.get<double>();
}

// Applies the keys of `h` to the kind's defaults. Every key must be known
// for the kind.
EstimatorSpec spec_from_hyperparams(ModelKind kind, const json& h, bool allow_model_type) {
  if (!h.is_object()) throw ArgumentError("hyperparameters must be a JSON object");
  EstimatorSpec s = EstimatorSpec::defaults(kind);
  std::set<std::string> allowed = {"seed", "target_space"};
  if (allow_model_type) allowed.insert("model_type");
  const bool has_tree = kind == ModelKind::tree || is_ensemble(kind);
  if (has_tree) allowed.insert({"max_depth", "min_samples_split"});
  if (is_ensemble(kind)) allowed.insert({"n_estimators", "max_features", "bootstrap"});
  if (kind == ModelKind::ridge) allowed.insert("lambda");
  if (kind == ModelKind::svr) allowed.insert({"C", "epsilon", "gamma", "tol", "max_iter"});
  if (kind == ModelKind::knn) allowed.insert({"k", "aggregation"});

  for (const auto& [key, v] : h.items()) {
    if (!allowed.contains(key)) {
      throw ArgumentError("hyperparameter '" + key + "' does not apply to " +
                          std::string(model_kind_name(kind)));
    }
    if (key == "seed") {
      if (!v.is_number_unsigned()) throw ArgumentError("seed must be a non-negative integer");
      s.seed = v.get<std::uint64_t>();
    } else if (key == "target_space") {
      if (v == "linear") {
        s.target = TargetSpace::linear;
      } else if (v == "log10") {
        s.target = TargetSpace::log10;
      } else {
        throw ArgumentError("target_space must be 'linear' or 'log10'");
      }
    } else if (key == "max_depth") {
      s.tree.max_depth = v.is_null() ? std::nullopt : std::optional(as_count(v, "max_depth"));
    } else if (key == "min_samples_split") {
      s.tree.min_samples_split = as_count(v, "min_samples_split");
    } else if (key == "n_estimators") {
      s.ensemble.n_estimators = as_count(v, "n_estimators");
    } else if (key == "max_features") {
      s.ensemble.max_features = as_count(v, "max_features");
    } else if (key == "bootstrap") {
      if (!v.is_boolean()) throw ArgumentError("bootstrap must be a boolean");
      s.ensemble.bootstrap = v.get<bool>();
    } else if (key == "lambda") {
      s.lambda = as_number(v, "lambda");
    } else if (key == "C") {
      s.svr.c = as_number(v, "C");
    } else if (key == "epsilon") {
      s.svr.epsilon = as_number(v, "epsilon");
    } else if (key == "gamma") {
      if (v == "scale") {
        s.svr.gamma.reset();
      } else {
        s.svr.gamma = as_number(v, "gamma");
      }
    } else if (key == "tol") {
      s.svr.tol = as_number(v, "tol");
    } else if (key == "max_iter") {
      s.svr.max_iter = as_count(v, "max_iter");
    } else if (key == "k") {
      s.knn.k = as_count(v, "k");
    } else if (key == "aggregation") {
      if (v == "mean") {
        s.knn.aggregation = Aggregation::mean;
      } else if (v == "median") {
        s.knn.aggregation = Aggregation::median;
      } else {
        throw ArgumentError("aggregation must be 'mean' or 'median'");
      }
    }
  }
  s.validate();
  return s;
}

json six(const Reflectances& r) { return json(r); }

Reflectances read_six(const json& j) {
  if (!j.is_array() || j.size() != kNumBands) throw FormatError("expected an array of 6 numbers");
  Reflectances r{};
  for (std::size_t i = 0; i < kNumBands; ++i) {
    if (!j[i].is_number()) throw FormatError("expected an array of 6 numbers");
    r[i] = j[i].get<double>();
  }
  return r;
}

double read_number(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key) || !obj.at(key).is_number()) {
    throw FormatError(std::string("payload lacks numeric ") + key);
  }
  return obj.at(key).get<double>();
}

const json& read_array(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key) || !obj.at(key).is_array()) {
    throw FormatError(std::string("payload lacks array ") + key);
  }
  return obj.at(key);
}

json tree_json(const Tree& tree, std::size_t i) {
  const TreeNode& n = tree.nodes()[i];
  if (n.is_leaf()) return json{{"leaf_value", n.value}};
  return json{{"feature", n.feature},
              {"threshold", n.threshold},
              {"left", tree_json(tree, static_cast<std::size_t>(n.left))},
              {"right", tree_json(tree, static_cast<std::size_t>(n.right))}};
}

void read_tree_node(const json& j, std::vector<TreeNode>& nodes, std::size_t slot, std::size_t depth) {
  if (depth > kMaxTreeDepth) throw FormatError("tree nesting too deep");
  if (!j.is_object()) throw FormatError("tree node must be an object");
  if (j.contains("leaf_value")) {
    nodes[slot].value = read_number(j, "leaf_value");
    return;
  }
  if (!j.contains("feature") || !j.at("feature").is_number_integer()) {
    throw FormatError("tree node lacks an integer feature");
  }
  const auto feature = j.at("feature").get<std::int64_t>();
  if (feature < 0 || feature >= static_cast<std::int64_t>(kNumBands)) {
    throw FormatError("tree node feature out of range");
  }
  if (!j.contains("left") || !j.contains("right")) throw FormatError("tree node lacks children");
  const auto left = nodes.size();
  nodes.resize(nodes.size() + 2);
  nodes[slot].feature = static_cast<std::int32_t>(feature);
  nodes[slot].threshold = read_number(j, "threshold");
  nodes[slot].left = static_cast<std::int32_t>(left);
  nodes[slot].right = static_cast<std::int32_t>(left + 1);
  read_tree_node(j.at("left"), nodes, left, depth + 1);
  read_tree_node(j.at("right"), nodes, left + 1, depth + 1);
}

Tree read_tree(const json& j) {
  std::vector<TreeNode> nodes(1);
  read_tree_node(j, nodes, 0, 0);
  Tree t(std::move(nodes));
  t.validate();
  return t;
}

struct PayloadWriter {
  json operator()(const LinearPayload& p) const {
    return {{"intercept", p.intercept}, {"weights", six(p.weights)}};
  }
  json operator()(const Tree& t) const { return {{"tree", tree_json(t, 0)}}; }
  json operator()(const EnsemblePayload& p) const {
    json trees = json::array();
    for (const Tree& t : p.trees) trees.push_back(tree_json(t, 0));
    return {{"trees", trees}};
  }
  json operator()(const SvrPayload& p) const {
    json sv = json::array();
    for (const auto& v : p.support_vectors) sv.push_back(six(v));
    return {{"support_vectors", sv},  {"coefficients", p.coefficients},
            {"bias", p.bias},         {"gamma", p.gamma},
            {"converged", p.converged}, {"iterations", p.iterations}};
  }
  json operator()(const KnnPayload& p) const {
    json pts = json::array();
    for (const auto& v : p.index.points()) pts.push_back(six(v));
    return {{"points", pts}, {"targets", p.targets}};
  }
};

ModelPayload read_payload(ModelKind kind, const json& p) {
  if (!p.is_object()) throw FormatError("payload must be an object");
  switch (kind) {
    case ModelKind::linear:
    case ModelKind::ridge: {
      if (!p.contains("weights")) throw FormatError("payload lacks weights");
      return LinearPayload{read_number(p, "intercept"), read_six(p.at("weights"))};
    }
    case ModelKind::tree:
      if (!p.contains("tree")) throw FormatError("payload lacks tree");
      return read_tree(p.at("tree"));
    case ModelKind::bagging:
    case ModelKind::forest:
    case ModelKind::extra_trees: {
      EnsemblePayload e;
      for (const auto& t : read_array(p, "trees")) e.trees.push_back(read_tree(t));
      if (e.trees.empty()) throw FormatError("ensemble has no trees");
      return e;
    }
    case ModelKind::svr: {
      SvrPayload s;
      for (const auto& v : read_array(p, "support_vectors")) s.support_vectors.push_back(read_six(v));
      for (const auto& c : read_array(p, "coefficients")) {
        if (!c.is_number()) throw FormatError("coefficients must be numbers");
        s.coefficients.push_back(c.get<double>());
      }
      if (s.coefficients.size() != s.support_vectors.size()) {
        throw FormatError("coefficient count differs from support vector count");
      }
      s.bias = read_number(p, "bias");
      s.gamma = read_number(p, "gamma");
      if (!(s.gamma > 0.0)) throw FormatError("gamma must be > 0");
      if (!p.contains("converged") || !p.at("converged").is_boolean()) {
        throw FormatError("payload lacks converged flag");
      }
      s.converged = p.at("converged").get<bool>();
      if (!p.contains("iterations") || !p.at("iterations").is_number_unsigned()) {
        throw FormatError("payload lacks iterations");
      }
      s.iterations = p.at("iterations").get<std::uint64_t>();
      return s;
    }
    case ModelKind::knn: {
      std::vector<Reflectances> pts;
      for (const auto& v : read_array(p, "points")) pts.push_back(read_six(v));
      std::vector<double> targets;
      for (const auto& t : read_array(p, "targets")) {
        if (!t.is_number()) throw FormatError("targets must be numbers");
        targets.push_back(t.get<double>());
      }
      if (pts.size() != targets.size() || pts.empty()) {
        throw FormatError("k-NN points and targets must be non-empty and equal in count");
      }
      return KnnPayload{KdTree(std::move(pts)), std::move(targets)};
    }
  }
  throw FormatError("unknown model kind");
}

json stats_json(const TableStats& s) {
  json j;
  j["band_names"] = s.band_names;
  for (const char* key : {"mean", "sd", "min", "max"}) j[key] = json::array();
  for (const auto& c : s.features) {
    j["mean"].push_back(c.mean);
    j["sd"].push_back(c.sd);
    j["min"].push_back(c.min);
    j["max"].push_back(c.max);
  }
  return j;
}

TableStats read_stats(const json& j) {
  if (!j.is_object()) throw FormatError("preprocessing must be an object or null");
  TableStats s;
  const json& names = read_array(j, "band_names");
  s.band_names.clear();
  for (const auto& n : names) {
    if (!n.is_string()) throw FormatError("band_names entries must be strings");
    s.band_names.push_back(n.get<std::string>());
  }
  if (s.band_names != SampleTable::default_band_names()) {
    throw FormatError("preprocessing bands are not the canonical six");
  }
  const Reflectances mean = read_six(read_array(j, "mean"));
  const Reflectances sd = read_six(read_array(j, "sd"));
  const Reflectances lo = read_six(read_array(j, "min"));
  const Reflectances hi = read_six(read_array(j, "max"));
  for (std::size_t b = 0; b < kNumBands; ++b) {
    if (!(sd[b] >= 0.0)) throw FormatError("standard deviations must be >= 0");
    s.features[b] = {mean[b], sd[b], lo[b], hi[b]};
  }
  return s;
}

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

ModelKind kind_of(const json& v) {
  if (!v.is_string()) throw FormatError("model_type must be a string");
  const auto kind = parse_model_kind(v.get<std::string>());
  if (!kind) throw FormatError("unknown model_type '" + v.get<std::string>() + "'");
  return *kind;
}

}  // namespace

std::string save_model(const FittedModel& model) {
  json j;
  j["format_version"] = kModelFormatVersion;
  j["model_type"] = model_kind_name(model.spec.kind);
  j["hyperparams"] = hyperparams_json(model.spec);
  j["preprocessing"] = model.preprocessing ? stats_json(*model.preprocessing) : json(nullptr);
  j["payload"] = std::visit(PayloadWriter{}, model.payload);
  return j.dump();
}

FittedModel load_model(std::string_view text) {
  const json j = parse_json(text, "model file");
  if (!j.is_object()) throw FormatError("model file must be a JSON object");
  if (!j.contains("format_version") || !j.at("format_version").is_number_integer()) {
    throw FormatError("model file lacks format_version");
  }
  if (j.at("format_version").get<std::int64_t>() != kModelFormatVersion) {
    throw VersionError("unsupported model format_version " + j.at("format_version").dump());
  }
  if (!j.contains("model_type")) throw FormatError("model file lacks model_type");
  const ModelKind kind = kind_of(j.at("model_type"));
  if (!j.contains("hyperparams") || !j.contains("payload")) {
    throw FormatError("model file lacks hyperparams or payload");
  }

  FittedModel m;
  try {
    m.spec = spec_from_hyperparams(kind, j.at("hyperparams"), false);
  } catch (const ArgumentError& e) {
    throw FormatError(std::string("hyperparams: ") + e.what());
  }
  if (j.contains("preprocessing") && !j.at("preprocessing").is_null()) {
    m.preprocessing = read_stats(j.at("preprocessing"));
  }
  if ((kind == ModelKind::svr || kind == ModelKind::knn) && !m.preprocessing) {
    throw FormatError(std::string(model_kind_name(kind)) + " models need preprocessing statistics");
  }
  m.payload = read_payload(kind, j.at("payload"));
  return m;
}

EstimatorSpec parse_spec_json(std::string_view text) {
  const json j = parse_json(text, "spec");
  if (!j.is_object() || !j.contains("model_type")) {
    throw ArgumentError("spec must be an object with a model_type");
  }
  ModelKind kind;
  try {
    kind = kind_of(j.at("model_type"));
  } catch (const FormatError& e) {
    throw ArgumentError(e.what());
  }
  if (j.contains("hyperparams")) {
    if (j.size() != 2) throw ArgumentError("a spec with nested hyperparams takes no other keys");
    return spec_from_hyperparams(kind, j.at("hyperparams"), false);
  }
  return spec_from_hyperparams(kind, j, true);
}

std::vector<EstimatorSpec> parse_spec_list_json(std::string_view text) {
  const json j = parse_json(text, "spec file");
  std::vector<EstimatorSpec> specs;
  if (j.is_array()) {
    for (const auto& item : j) specs.push_back(parse_spec_json(item.dump()));
  } else {
    specs.push_back(parse_spec_json(text));
  }
  if (specs.empty()) throw ArgumentError("spec file lists no estimators");
  return specs;
}

std::string spec_to_json(const EstimatorSpec& spec) {
  json h = hyperparams_json(spec);
  h["model_type"] = model_kind_name(spec.kind);
  return h.dump();
}

}  // namespace chl
