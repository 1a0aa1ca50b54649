#include "config.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <thread>

#include "dirtybench/error.hpp"
#include "dirtybench/random.hpp"
#include "dirtybench/report_io.hpp"
#include "json.hpp"

namespace dirtybench::app {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& message) { throw Error(ErrorCode::configuration, message); }

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) fail(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) fail("unknown key '" + key + "' in " + where);
  }
}

template <class T>
T get(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    fail("'" + std::string(key) + "' in " + where + " has the wrong type");
  }
}

std::size_t get_count(const json& obj, const char* key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) fail("'" + std::string(key) + "' in " + where + " must be a non-negative integer");
  return v.get<std::size_t>();
}

struct HyperField {
  const char* name;
  std::function<json(const Hyperparameters&)> read;
  std::function<void(Hyperparameters&, const json&)> write;
};

template <class T>
HyperField field(const char* name, T Hyperparameters::*member) {
  return {name, [member](const Hyperparameters& h) { return json(h.*member); },
          [member](Hyperparameters& h, const json& v) { h.*member = v.get<T>(); }};
}

const std::vector<HyperField>& hyper_fields() {
  static const std::vector<HyperField> fields = [] {
    std::vector<HyperField> f;
    f.push_back({"tree_criterion", [](const Hyperparameters& h) { return json(std::string(to_string(h.tree_criterion))); },
                 [](Hyperparameters& h, const json& v) { h.tree_criterion = split_criterion_from_string(v.get<std::string>()); }});
    f.push_back({"tree_max_depth", [](const Hyperparameters& h) { return json(h.tree_limits.max_depth); },
                 [](Hyperparameters& h, const json& v) { h.tree_limits.max_depth = v.get<int>(); }});
    f.push_back({"tree_min_leaf_rows", [](const Hyperparameters& h) { return json(h.tree_limits.min_leaf_rows); },
                 [](Hyperparameters& h, const json& v) { h.tree_limits.min_leaf_rows = v.get<std::size_t>(); }});
    f.push_back(field("knn_k", &Hyperparameters::knn_k));
    f.push_back(field("nb_smoothing", &Hyperparameters::nb_smoothing));
    f.push_back(field("numeric_bins", &Hyperparameters::numeric_bins));
    f.push_back({"bn_max_parents", [](const Hyperparameters& h) { return json(h.bayes_net.max_parents); },
                 [](Hyperparameters& h, const json& v) { h.bayes_net.max_parents = v.get<int>(); }});
    f.push_back({"bn_smoothing", [](const Hyperparameters& h) { return json(h.bayes_net.smoothing); },
                 [](Hyperparameters& h, const json& v) { h.bayes_net.smoothing = v.get<double>(); }});
    f.push_back({"logistic_learning_rate", [](const Hyperparameters& h) { return json(h.logistic.learning_rate); },
                 [](Hyperparameters& h, const json& v) { h.logistic.learning_rate = v.get<double>(); }});
    f.push_back({"logistic_iterations", [](const Hyperparameters& h) { return json(h.logistic.iterations); },
                 [](Hyperparameters& h, const json& v) { h.logistic.iterations = v.get<std::size_t>(); }});
    f.push_back(field("forest_trees", &Hyperparameters::forest_trees));
    f.push_back(field("forest_feature_fraction", &Hyperparameters::forest_feature_fraction));
    f.push_back(field("forest_bootstrap", &Hyperparameters::forest_bootstrap));
    f.push_back(field("cluster_k", &Hyperparameters::cluster_k));
    f.push_back(field("kmeans_max_iters", &Hyperparameters::kmeans_max_iters));
    f.push_back(field("kmeans_n_init", &Hyperparameters::kmeans_n_init));
    f.push_back(field("lvq_learning_rate", &Hyperparameters::lvq_learning_rate));
    f.push_back(field("lvq_iterations", &Hyperparameters::lvq_iterations));
    f.push_back(field("lvq_prototypes", &Hyperparameters::lvq_prototypes));
    f.push_back(field("clarans_num_local", &Hyperparameters::clarans_num_local));
    f.push_back(field("clarans_max_neighbor", &Hyperparameters::clarans_max_neighbor));
    f.push_back(field("dbscan_eps", &Hyperparameters::dbscan_eps));
    f.push_back(field("dbscan_min_pts", &Hyperparameters::dbscan_min_pts));
    f.push_back(field("birch_branching", &Hyperparameters::birch_branching));
    f.push_back(field("birch_threshold", &Hyperparameters::birch_threshold));
    f.push_back(field("cure_n_rep", &Hyperparameters::cure_n_rep));
    f.push_back(field("cure_shrink", &Hyperparameters::cure_shrink));
    f.push_back(field("cure_sample_fraction", &Hyperparameters::cure_sample_fraction));
    f.push_back(field("poly_degree", &Hyperparameters::poly_degree));
    f.push_back({"stepwise_alpha_in", [](const Hyperparameters& h) { return json(h.stepwise.alpha_in); },
                 [](Hyperparameters& h, const json& v) { h.stepwise.alpha_in = v.get<double>(); }});
    f.push_back({"stepwise_alpha_out", [](const Hyperparameters& h) { return json(h.stepwise.alpha_out); },
                 [](Hyperparameters& h, const json& v) { h.stepwise.alpha_out = v.get<double>(); }});
    f.push_back({"mle_max_iterations", [](const Hyperparameters& h) { return json(h.mle.max_iterations); },
                 [](Hyperparameters& h, const json& v) { h.mle.max_iterations = v.get<std::size_t>(); }});
    f.push_back({"mle_tolerance", [](const Hyperparameters& h) { return json(h.mle.tolerance); },
                 [](Hyperparameters& h, const json& v) { h.mle.tolerance = v.get<double>(); }});
    f.push_back({"script",
                 [](const Hyperparameters& h) {
                   json a = json::array();
                   for (const auto& [r, v] : h.script) a.push_back({r, v});
                   return a;
                 },
                 [](Hyperparameters& h, const json& v) {
                   h.script.clear();
                   for (const auto& p : v) {
                     if (!p.is_array() || p.size() != 2) fail("script entries must be [rate, value] pairs");
                     h.script.emplace_back(p[0].get<double>(), p[1].get<double>());
                   }
                 }});
    return f;
  }();
  return fields;
}

std::vector<AlgorithmId> parse_algorithms(const json& v, const std::string& where) {
  if (v.is_string() && v.get<std::string>() == "all") return all_algorithms();
  if (!v.is_array()) fail("'algorithms' in " + where + " must be a list or \"all\"");
  std::vector<AlgorithmId> out;
  for (const auto& a : v) {
    const AlgorithmId id = algorithm_from_string(a.get<std::string>());
    if (std::find(out.begin(), out.end(), id) != out.end()) fail("algorithm listed twice in " + where);
    out.push_back(id);
  }
  return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) path = base / path;
  return path.lexically_normal();
}

DatasetConfig parse_dataset(const json& j, const std::filesystem::path& base, std::size_t index) {
  const std::string where = "datasets[" + std::to_string(index) + "]";
  check_keys(j, {"id", "path", "tasks", "target", "no_target", "categorical_target", "delimiter", "header", "rules",
                 "entity_key", "positive_class", "algorithms", "missing_tokens"},
             where);
  DatasetConfig d;
  if (!j.contains("path")) fail(where + " needs a 'path'");
  d.path = resolve(base, get<std::string>(j, "path", where));
  d.id = j.contains("id") ? get<std::string>(j, "id", where) : d.path.stem().string();
  if (d.id.empty()) fail(where + " has an empty id");
  if (j.contains("tasks")) {
    for (const auto& t : j.at("tasks")) d.tasks.push_back(task_from_string(t.get<std::string>()));
  }
  if (j.contains("target")) d.target = get<std::string>(j, "target", where);
  if (j.contains("no_target")) d.no_target = get<bool>(j, "no_target", where);
  if (j.contains("categorical_target")) d.categorical_target = get<bool>(j, "categorical_target", where);
  if (j.contains("delimiter")) {
    const auto s = get<std::string>(j, "delimiter", where);
    if (s.size() != 1) fail("delimiter in " + where + " must be one character");
    d.delimiter = s[0];
  }
  if (j.contains("header")) d.header = get<bool>(j, "header", where);
  if (j.contains("rules")) d.rules = resolve(base, get<std::string>(j, "rules", where));
  if (j.contains("entity_key")) d.entity_key = get<std::vector<std::string>>(j, "entity_key", where);
  if (j.contains("positive_class")) d.positive_class = get<std::string>(j, "positive_class", where);
  if (j.contains("algorithms")) d.algorithms = parse_algorithms(j.at("algorithms"), where);
  if (j.contains("missing_tokens")) d.missing_tokens = get<std::vector<std::string>>(j, "missing_tokens", where);
  return d;
}

json dataset_json(const DatasetConfig& d, bool for_hash) {
  json j;
  j["id"] = d.id;
  j["path"] = for_hash ? d.path.filename().string() : d.path.string();
  std::vector<std::string> tasks;
  for (Task t : d.tasks) tasks.emplace_back(to_string(t));
  j["tasks"] = tasks;
  if (d.target) j["target"] = *d.target;
  j["no_target"] = d.no_target;
  j["categorical_target"] = d.categorical_target;
  j["delimiter"] = std::string(1, d.delimiter);
  j["header"] = d.header;
  if (d.rules) j["rules"] = for_hash ? d.rules->filename().string() : d.rules->string();
  j["entity_key"] = d.entity_key;
  if (d.positive_class) j["positive_class"] = *d.positive_class;
  std::vector<std::string> algos;
  for (AlgorithmId a : d.algorithms) algos.emplace_back(to_string(a));
  j["algorithms"] = algos;
  j["missing_tokens"] = d.missing_tokens;
  return j;
}

json config_json(const RunConfig& c, bool for_hash) {
  json j;
  j["datasets"] = json::array();
  for (const auto& d : c.datasets) j["datasets"].push_back(dataset_json(d, for_hash));
  std::vector<std::string> algos;
  for (AlgorithmId a : c.algorithms) algos.emplace_back(to_string(a));
  j["algorithms"] = algos;
  std::vector<std::string> errors;
  for (ErrorType e : c.error_types) errors.emplace_back(to_string(e));
  j["error_types"] = errors;
  j["grid"] = {{"start", c.grid.start}, {"step", c.grid.step}, {"steps", c.grid.steps}};
  j["seed"] = c.seed;
  j["repetitions"] = c.repetitions;
  j["k"] = {{"prf", c.k_prf}, {"regression", c.k_regression}};
  j["folds"] = c.folds;
  j["timing"] = c.timing;
  j["timing_repeats"] = c.timing_repeats;
  j["size_thresholds"] = {{"small", c.small_rows}, {"large", c.large_rows}};
  j["corrupt_target_in_train"] = c.corrupt_target_in_train;
  json h;
  for (const auto& f : hyper_fields()) h[f.name] = f.read(c.hyper);
  j["hyperparameters"] = h;
  if (c.inject) {
    j["inject"] = {{"dataset", c.inject->dataset},
                   {"error_type", std::string(to_string(c.inject->error_type))},
                   {"rate", c.inject->rate},
                   {"seed", c.inject->seed},
                   {"columns", c.inject->columns},
                   {"output_dir", for_hash ? std::string() : c.inject->output_dir.string()}};
  }
  if (!for_hash) {
    j["output_dir"] = c.output_dir.string();
    j["jobs"] = c.jobs;
  }
  return j;
}

}  // namespace

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, std::string("config is not valid JSON: ") + e.what());
  }
  const std::string where = "config";
  check_keys(j, {"datasets", "algorithms", "error_types", "grid", "seed", "repetitions", "k", "folds", "timing",
                 "timing_repeats", "output_dir", "size_thresholds", "corrupt_target_in_train", "jobs",
                 "hyperparameters", "inject"},
             where);
  RunConfig c;
  try {
    if (j.contains("datasets")) {
      if (!j.at("datasets").is_array()) fail("'datasets' must be a list");
      std::size_t i = 0;
      for (const auto& d : j.at("datasets")) c.datasets.push_back(parse_dataset(d, base_dir, i++));
    }
    if (j.contains("algorithms")) c.algorithms = parse_algorithms(j.at("algorithms"), where);
    if (j.contains("error_types")) {
      c.error_types.clear();
      for (const auto& e : j.at("error_types")) c.error_types.push_back(error_type_from_string(e.get<std::string>()));
    }
    if (j.contains("grid")) {
      const json& g = j.at("grid");
      check_keys(g, {"start", "step", "steps"}, "grid");
      if (g.contains("start")) c.grid.start = get<double>(g, "start", "grid");
      if (g.contains("step")) c.grid.step = get<double>(g, "step", "grid");
      if (g.contains("steps")) c.grid.steps = get_count(g, "steps", "grid");
    }
    if (j.contains("seed")) c.seed = get<std::uint64_t>(j, "seed", where);
    if (j.contains("repetitions")) c.repetitions = get_count(j, "repetitions", where);
    if (j.contains("k")) {
      const json& k = j.at("k");
      check_keys(k, {"prf", "regression"}, "k");
      if (k.contains("prf")) c.k_prf = get<double>(k, "prf", "k");
      if (k.contains("regression")) c.k_regression = get<double>(k, "regression", "k");
    }
    if (j.contains("folds")) c.folds = get_count(j, "folds", where);
    if (j.contains("timing")) c.timing = get<bool>(j, "timing", where);
    if (j.contains("timing_repeats")) c.timing_repeats = get_count(j, "timing_repeats", where);
    if (j.contains("output_dir")) c.output_dir = resolve(base_dir, get<std::string>(j, "output_dir", where));
    if (j.contains("size_thresholds")) {
      const json& s = j.at("size_thresholds");
      check_keys(s, {"small", "large"}, "size_thresholds");
      if (s.contains("small")) c.small_rows = get_count(s, "small", "size_thresholds");
      if (s.contains("large")) c.large_rows = get_count(s, "large", "size_thresholds");
    }
    if (j.contains("corrupt_target_in_train")) c.corrupt_target_in_train = get<bool>(j, "corrupt_target_in_train", where);
    if (j.contains("jobs")) c.jobs = get_count(j, "jobs", where);
    if (j.contains("hyperparameters")) {
      const json& h = j.at("hyperparameters");
      std::set<std::string> names;
      for (const auto& f : hyper_fields()) names.insert(f.name);
      check_keys(h, names, "hyperparameters");
      for (const auto& f : hyper_fields()) {
        if (!h.contains(f.name)) continue;
        try {
          f.write(c.hyper, h.at(f.name));
        } catch (const json::exception&) {
          fail("hyperparameter '" + std::string(f.name) + "' has the wrong type");
        }
      }
    }
    if (j.contains("inject")) {
      const json& in = j.at("inject");
      check_keys(in, {"dataset", "error_type", "rate", "seed", "columns", "output_dir"}, "inject");
      InjectConfig ic;
      if (in.contains("dataset")) ic.dataset = get<std::string>(in, "dataset", "inject");
      if (in.contains("error_type")) ic.error_type = error_type_from_string(get<std::string>(in, "error_type", "inject"));
      if (in.contains("rate")) ic.rate = get<double>(in, "rate", "inject");
      if (in.contains("seed")) ic.seed = get<std::uint64_t>(in, "seed", "inject");
      if (in.contains("columns")) ic.columns = get<std::vector<std::string>>(in, "columns", "inject");
      if (in.contains("output_dir")) {
        const auto p = get<std::string>(in, "output_dir", "inject");
        if (!p.empty()) ic.output_dir = resolve(base_dir, p);
      } else {
        ic.output_dir = resolve(base_dir, "injected");
      }
      c.inject = ic;
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::configuration) throw;
    throw Error(ErrorCode::configuration, e.detail());
  } catch (const json::exception& e) {
    fail(std::string("invalid config value: ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_text_file(path), path.parent_path());
}

void validate(const RunConfig& c) {
  if (c.datasets.empty()) fail("no datasets configured");
  std::set<std::string> ids;
  for (const auto& d : c.datasets) {
    if (!ids.insert(d.id).second) fail("dataset id '" + d.id + "' is used twice");
  }
  bool any_algorithm = !c.algorithms.empty();
  for (const auto& d : c.datasets) any_algorithm = any_algorithm || !d.algorithms.empty();
  if (!any_algorithm) fail("the algorithm list is empty");
  if (c.error_types.empty()) fail("the error type list is empty");
  if (c.grid.start != 0.0) fail("the rate grid must start at 0");
  if (c.grid.steps > 0 && !(c.grid.step > 0.0)) fail("grid step must be positive");
  if (c.grid.start + static_cast<double>(c.grid.steps) * c.grid.step > 1.0 + 1e-9) fail("grid exceeds a rate of 1");
  if (c.repetitions == 0) fail("repetitions must be positive");
  if (c.folds < 2) fail("folds must be at least 2");
  if (!(c.k_prf > 0.0) || !(c.k_regression > 0.0)) fail("keeping-point thresholds must be positive");
  if (c.small_rows > c.large_rows) fail("small-data threshold exceeds the large-data threshold");
  if (c.inject) {
    if (!ids.count(c.inject->dataset)) fail("inject refers to unknown dataset '" + c.inject->dataset + "'");
    if (!(c.inject->rate >= 0.0 && c.inject->rate <= 1.0)) fail("inject rate must lie in [0, 1]");
  }
}

std::string resolved_json(const RunConfig& config) { return config_json(config, false).dump(2) + "\n"; }

std::string config_hash(const RunConfig& config) { return to_hex(fnv1a64(config_json(config, true).dump())); }

DatasetEntry load_dataset_entry(const DatasetConfig& c) {
  LoadOptions o;
  o.delimiter = c.delimiter;
  o.has_header = c.header;
  o.target = c.target;
  o.no_target = c.no_target;
  o.categorical_target = c.categorical_target || c.positive_class.has_value();
  o.entity_key = c.entity_key;
  o.missing_tokens = c.missing_tokens;
  Dataset data = load_dataset(c.path, o);

  if (c.positive_class) {
    const Schema& s = data.schema();
    const auto t = s.target_index();
    if (!t || s.column(*t).kind != ColumnKind::categorical) fail("positive_class needs a categorical target");
    if (!s.label_index(*c.positive_class)) fail("positive_class '" + *c.positive_class + "' is not a label of " + c.id);
    const std::string other = "not_" + *c.positive_class;
    std::vector<Column> cols(s.columns().begin(), s.columns().end());
    std::vector<Record> rows = data.rows();
    for (Record& r : rows) {
      if (is_missing(r.cells[*t])) continue;
      r.cells[*t] = format_cell(r.cells[*t]) == *c.positive_class ? *c.positive_class : other;
    }
    Dataset binary(Schema(cols, {other, *c.positive_class}), std::move(rows));
    data = Dataset(binary.schema(), binary.rows(), Provenance{c.path.string(), content_hash(binary)});
  }

  DatasetEntry e;
  e.id = c.id;
  e.data = std::move(data);
  e.tasks = c.tasks;
  if (c.rules) e.rules = load_fd_rules(*c.rules);
  e.entity_key = c.entity_key;
  e.algorithms = c.algorithms;
  return e;
}

std::vector<DatasetEntry> load_datasets(const RunConfig& config) {
  std::vector<DatasetEntry> out;
  for (const auto& d : config.datasets) out.push_back(load_dataset_entry(d));
  return out;
}

SweepConfig sweep_config(const RunConfig& c) {
  SweepConfig s;
  s.algorithms = c.algorithms;
  s.error_types = c.error_types;
  s.grid = c.grid;
  s.seed = c.seed;
  s.repetitions = c.repetitions;
  s.k_prf = c.k_prf;
  s.k_regression = c.k_regression;
  s.eval.folds = c.folds;
  s.eval.timing = c.timing;
  s.eval.timing_repeats = c.timing_repeats;
  s.hyper = c.hyper;
  s.corrupt_target_in_train = c.corrupt_target_in_train;
  s.jobs = c.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : c.jobs;
  s.config_hash = config_hash(c);
  return s;
}

}  // namespace dirtybench::app
