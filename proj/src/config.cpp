#include "assortify/config.hpp"

#include "assortify/compatibility.hpp"

#include <fstream>
#include <limits>

namespace assortify::config {

namespace fs = std::filesystem;

namespace {

json default_verticals() {
  json out = json::array();
  for (const char* name : {"Accent Table", "Entertainment Center", "Bookshelf",
                           "Ottoman", "Chair"}) {
    out.push_back({{"name", name}, {"min", 0}, {"max", 1}, {"i_size", 1}});
  }
  return out;
}

int to_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ConfigError(key + " must be an integer");
  return v.get<int>();
}

std::int64_t to_int64(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ConfigError(key + " must be an integer");
  return v.get<std::int64_t>();
}

std::uint64_t to_seed(const json& v, const std::string& key) {
  if (!v.is_number_integer() ||
      (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    throw ConfigError(key + " must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

double to_double(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key + " must be a number");
  return v.get<double>();
}

std::string to_string_value(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError(key + " must be a string");
  return v.get<std::string>();
}

void check(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

/// Recursive merge: objects merge key-wise, everything else is replaced.
/// Keys absent from the defaults are rejected.
void merge(json& base, const json& overlay, const std::string& prefix) {
  if (!overlay.is_object()) {
    throw ConfigError("config section " + (prefix.empty() ? "root" : prefix) +
                      " must be an object");
  }
  for (const auto& [key, value] : overlay.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!base.contains(key)) throw ConfigError("unknown config key: " + path);
    json& slot = base[key];
    if (slot.is_object() && value.is_object()) {
      merge(slot, value, path);
    } else {
      slot = value;
    }
  }
}

void apply_override(json& effective, const std::string& expr) {
  const auto eq = expr.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override must look like key=value: " + expr);
  }
  const std::string path = expr.substr(0, eq);
  const std::string raw = expr.substr(eq + 1);

  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;  // unparseable -> literal string

  json* cursor = &effective;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string segment = path.substr(start, dot - start);
    if (!cursor->is_object() || !cursor->contains(segment)) {
      throw ConfigError("unknown config key: " + path);
    }
    if (dot == std::string::npos) {
      (*cursor)[segment] = value;
      return;
    }
    cursor = &(*cursor)[segment];
    start = dot + 1;
  }
}

std::string get_path(const json& section, const char* key) {
  return to_string_value(section.at(key), std::string("paths.") + key);
}

PathsConfig parse_paths(const json& j) {
  PathsConfig p;
  p.out_dir = get_path(j, "out_dir");
  p.catalog = get_path(j, "catalog");
  p.activations = get_path(j, "activations");
  p.documents = get_path(j, "documents");
  p.vocabulary = get_path(j, "vocabulary");
  p.sessions = get_path(j, "sessions");
  p.purchases = get_path(j, "purchases");
  p.ground_truth = get_path(j, "ground_truth");
  p.model_dir = get_path(j, "model_dir");
  p.inferred = get_path(j, "inferred");
  p.metric = get_path(j, "metric");
  p.seeds = get_path(j, "seeds");
  p.assortments = get_path(j, "assortments");
  p.oracle = get_path(j, "oracle");
  p.report = get_path(j, "report");
  check(!p.out_dir.empty(), "paths.out_dir must not be empty");
  return p;
}

CorpusConfig parse_corpus(const json& j) {
  CorpusConfig c;
  c.quantile = to_double(j.at("quantile"), "corpus.quantile");
  c.min_token_frequency =
      to_int(j.at("min_token_frequency"), "corpus.min_token_frequency");
  c.v_img = to_int(j.at("v_img"), "corpus.v_img");
  c.stopword_file = to_string_value(j.at("stopword_file"), "corpus.stopword_file");
  const json& layers = j.at("layers");
  if (!layers.is_array()) throw ConfigError("corpus.layers must be an array");
  for (const auto& entry : layers) {
    if (!entry.is_object()) throw ConfigError("corpus.layers must contain objects");
    for (const auto& [key, value] : entry.items()) {
      (void)value;
      if (key != "layer" && key != "start" && key != "count") {
        throw ConfigError("unknown config key: corpus.layers." + key);
      }
    }
    corpus::LayerOffset offset;
    offset.layer = to_string_value(entry.at("layer"), "corpus.layers.layer");
    offset.start = to_int(entry.at("start"), "corpus.layers.start");
    offset.count = to_int(entry.at("count"), "corpus.layers.count");
    c.layers.push_back(std::move(offset));
  }
  check(c.quantile >= 0.0 && c.quantile <= 1.0,
        "corpus.quantile must be in [0, 1]");
  check(c.min_token_frequency >= 1, "corpus.min_token_frequency must be >= 1");
  check(c.v_img >= 1, "corpus.v_img must be >= 1");
  return c;
}

TopicModelConfig parse_topicmodel(const json& j) {
  TopicModelConfig t;
  t.variant = to_string_value(j.at("variant"), "topicmodel.variant");
  t.topics = to_int(j.at("topics"), "topicmodel.topics");
  t.alpha_sum = to_double(j.at("alpha_sum"), "topicmodel.alpha_sum");
  t.beta = to_double(j.at("beta"), "topicmodel.beta");
  t.iterations = to_int(j.at("iterations"), "topicmodel.iterations");
  t.seed = to_seed(j.at("seed"), "topicmodel.seed");
  t.infer_sweeps = to_int(j.at("infer_sweeps"), "topicmodel.infer_sweeps");
  check(t.variant == "visual" || t.variant == "multimodal",
        "topicmodel.variant must be \"visual\" or \"multimodal\"");
  check(t.topics >= 1, "topicmodel.topics must be >= 1");
  check(t.alpha_sum > 0.0, "topicmodel.alpha_sum must be > 0");
  check(t.beta > 0.0, "topicmodel.beta must be > 0");
  check(t.iterations >= 1, "topicmodel.iterations must be >= 1");
  check(t.infer_sweeps >= 1, "topicmodel.infer_sweeps must be >= 1");
  return t;
}

MetricConfig parse_metric(const json& j) {
  MetricConfig m;
  m.mode = to_string_value(j.at("mode"), "metric.mode");
  m.lambda = to_double(j.at("lambda"), "metric.lambda");
  m.window_days = to_int(j.at("window_days"), "metric.window_days");
  m.min_items = to_int(j.at("min_items"), "metric.min_items");
  m.max_items = to_int(j.at("max_items"), "metric.max_items");
  try {
    compatibility::metric_mode_from_string(m.mode);
  } catch (const std::invalid_argument&) {
    throw ConfigError(
        "metric.mode must be one of \"inverse_covariance\", \"covariance\", "
        "\"identity\"");
  }
  check(m.lambda >= 0.0, "metric.lambda must be >= 0");
  check(m.window_days >= 1, "metric.window_days must be >= 1");
  check(m.min_items >= 1, "metric.min_items must be >= 1");
  check(m.max_items >= m.min_items, "metric.max_items must be >= metric.min_items");
  return m;
}

AssortConfig parse_assort(const json& j) {
  AssortConfig a;
  a.solver = to_string_value(j.at("solver"), "assort.solver");
  a.budget_cents = to_int64(j.at("budget_cents"), "assort.budget_cents");
  a.epsilon = to_double(j.at("epsilon"), "assort.epsilon");
  a.max_iters = to_int(j.at("max_iters"), "assort.max_iters");
  a.max_passes = to_int(j.at("max_passes"), "assort.max_passes");
  a.top_n = to_int(j.at("top_n"), "assort.top_n");
  a.seed_vertical_a =
      to_string_value(j.at("seed_vertical_a"), "assort.seed_vertical_a");
  a.seed_vertical_b =
      to_string_value(j.at("seed_vertical_b"), "assort.seed_vertical_b");
  const json& verticals = j.at("verticals");
  if (!verticals.is_array()) throw ConfigError("assort.verticals must be an array");
  for (const auto& entry : verticals) {
    if (!entry.is_object()) {
      throw ConfigError("assort.verticals must contain objects");
    }
    for (const auto& [key, value] : entry.items()) {
      (void)value;
      if (key != "name" && key != "min" && key != "max" && key != "i_size") {
        throw ConfigError("unknown config key: assort.verticals." + key);
      }
    }
    assort::VerticalConstraint c;
    c.vertical = to_string_value(entry.at("name"), "assort.verticals.name");
    c.min_count = to_int(entry.at("min"), "assort.verticals.min");
    c.max_count = entry.at("max").is_null()
                      ? std::numeric_limits<int>::max()
                      : to_int(entry.at("max"), "assort.verticals.max");
    c.target_size = to_int(entry.at("i_size"), "assort.verticals.i_size");
    check(!c.vertical.empty(), "assort.verticals.name must not be empty");
    check(c.min_count >= 0, "assort.verticals.min must be >= 0");
    check(c.max_count >= c.min_count,
          "assort.verticals.max must be >= assort.verticals.min");
    check(c.target_size >= 1, "assort.verticals.i_size must be >= 1");
    check(c.vertical != a.seed_vertical_a && c.vertical != a.seed_vertical_b,
          "assort.verticals must not contain the seed verticals");
    a.verticals.push_back(std::move(c));
  }
  check(a.solver == "vertical_iter" || a.solver == "qkp",
        "assort.solver must be \"vertical_iter\" or \"qkp\"");
  check(a.budget_cents >= 0, "assort.budget_cents must be >= 0");
  check(a.epsilon > 0.0, "assort.epsilon must be > 0");
  check(a.max_iters >= 1, "assort.max_iters must be >= 1");
  check(a.max_passes >= 1, "assort.max_passes must be >= 1");
  check(a.top_n >= 1, "assort.top_n must be >= 1");
  check(!a.seed_vertical_a.empty(), "assort.seed_vertical_a must not be empty");
  check(!a.seed_vertical_b.empty(), "assort.seed_vertical_b must not be empty");
  check(a.seed_vertical_a != a.seed_vertical_b,
        "assort.seed_vertical_b must differ from assort.seed_vertical_a");
  check(!a.verticals.empty(), "assort.verticals must not be empty");
  return a;
}

EvalConfig parse_eval(const json& j) {
  EvalConfig e;
  e.tau = to_double(j.at("tau"), "eval.tau");
  check(e.tau >= 0.0 && e.tau <= 1.0, "eval.tau must be in [0, 1]");
  return e;
}

synth::GeneratorConfig parse_synth(const json& j) {
  synth::GeneratorConfig g;
  g.n_products = to_int(j.at("n_products"), "synth.n_products");
  g.k_true = to_int(j.at("k_true"), "synth.k_true");
  g.v_text = to_int(j.at("v_text"), "synth.v_text");
  g.v_img = to_int(j.at("v_img"), "synth.v_img");
  g.seed = to_seed(j.at("seed"), "synth.seed");
  g.phi_concentration =
      to_double(j.at("phi_concentration"), "synth.phi_concentration");
  g.theta_concentration =
      to_double(j.at("theta_concentration"), "synth.theta_concentration");
  g.text_length_mean = to_double(j.at("text_length_mean"), "synth.text_length_mean");
  g.visual_draws = to_int(j.at("visual_draws"), "synth.visual_draws");
  g.price_median_cents =
      to_double(j.at("price_median_cents"), "synth.price_median_cents");
  g.price_sigma = to_double(j.at("price_sigma"), "synth.price_sigma");
  g.n_sessions = to_int(j.at("n_sessions"), "synth.n_sessions");
  g.n_users = to_int(j.at("n_users"), "synth.n_users");
  g.gamma = to_double(j.at("gamma"), "synth.gamma");
  g.session_min = to_int(j.at("session_min"), "synth.session_min");
  g.session_max = to_int(j.at("session_max"), "synth.session_max");
  g.purchase_min = to_int(j.at("purchase_min"), "synth.purchase_min");
  g.purchase_max = to_int(j.at("purchase_max"), "synth.purchase_max");
  g.window_days = to_int(j.at("window_days"), "synth.window_days");
  check(g.n_products >= 1, "synth.n_products must be >= 1");
  check(g.k_true >= 1, "synth.k_true must be >= 1");
  check(g.v_text >= 1, "synth.v_text must be >= 1");
  check(g.v_img >= 1, "synth.v_img must be >= 1");
  check(g.phi_concentration > 0.0, "synth.phi_concentration must be > 0");
  check(g.theta_concentration > 0.0, "synth.theta_concentration must be > 0");
  check(g.text_length_mean > 0.0, "synth.text_length_mean must be > 0");
  check(g.visual_draws >= 0, "synth.visual_draws must be >= 0");
  check(g.price_median_cents > 0.0, "synth.price_median_cents must be > 0");
  check(g.price_sigma >= 0.0, "synth.price_sigma must be >= 0");
  check(g.n_sessions >= 0, "synth.n_sessions must be >= 0");
  check(g.n_users >= 0, "synth.n_users must be >= 0");
  check(g.gamma >= 0.0, "synth.gamma must be >= 0");
  check(g.session_min >= 1, "synth.session_min must be >= 1");
  check(g.session_max >= g.session_min,
        "synth.session_max must be >= synth.session_min");
  check(g.purchase_min >= 1, "synth.purchase_min must be >= 1");
  check(g.purchase_max >= g.purchase_min,
        "synth.purchase_max must be >= synth.purchase_min");
  check(g.window_days >= 1, "synth.window_days must be >= 1");
  return g;
}

fs::path resolve(const std::string& explicit_path, const std::string& out_dir,
                 const char* default_name) {
  if (!explicit_path.empty()) return explicit_path;
  return fs::path(out_dir) / default_name;
}

}  // namespace

fs::path PipelineConfig::catalog_path() const {
  return resolve(paths.catalog, paths.out_dir, "catalog.jsonl");
}
fs::path PipelineConfig::activations_path() const {
  return resolve(paths.activations, paths.out_dir, "activations.jsonl");
}
fs::path PipelineConfig::documents_path() const {
  return resolve(paths.documents, paths.out_dir, "documents.jsonl");
}
fs::path PipelineConfig::vocabulary_path() const {
  return resolve(paths.vocabulary, paths.out_dir, "vocab.json");
}
fs::path PipelineConfig::sessions_path() const {
  return resolve(paths.sessions, paths.out_dir, "sessions.jsonl");
}
fs::path PipelineConfig::purchases_path() const {
  return resolve(paths.purchases, paths.out_dir, "purchases.jsonl");
}
fs::path PipelineConfig::ground_truth_path() const {
  return resolve(paths.ground_truth, paths.out_dir, "ground_truth.json");
}
fs::path PipelineConfig::model_dir_path() const {
  return resolve(paths.model_dir, paths.out_dir, "model");
}
fs::path PipelineConfig::inferred_path() const {
  return resolve(paths.inferred, paths.out_dir, "inferred.jsonl");
}
fs::path PipelineConfig::metric_path() const {
  return resolve(paths.metric, paths.out_dir, "metric.json");
}
fs::path PipelineConfig::seeds_path() const {
  return resolve(paths.seeds, paths.out_dir, "seeds.jsonl");
}
fs::path PipelineConfig::assortments_path() const {
  return resolve(paths.assortments, paths.out_dir, "assortments.jsonl");
}
fs::path PipelineConfig::oracle_path() const {
  return resolve(paths.oracle, paths.out_dir, "oracle.jsonl");
}
fs::path PipelineConfig::report_path() const {
  return resolve(paths.report, paths.out_dir, "report.json");
}

json default_config_json() {
  return {
      {"paths",
       {{"out_dir", "out"},
        {"catalog", ""},
        {"activations", ""},
        {"documents", ""},
        {"vocabulary", ""},
        {"sessions", ""},
        {"purchases", ""},
        {"ground_truth", ""},
        {"model_dir", ""},
        {"inferred", ""},
        {"metric", ""},
        {"seeds", ""},
        {"assortments", ""},
        {"oracle", ""},
        {"report", ""}}},
      {"corpus",
       {{"quantile", 0.85},
        {"min_token_frequency", 2},
        {"v_img", 2816},
        {"stopword_file", ""},
        {"layers", json::array()}}},
      {"topicmodel",
       {{"variant", "multimodal"},
        {"topics", 30},
        {"alpha_sum", 5.0},
        {"beta", 0.01},
        {"iterations", 1000},
        {"seed", 13},
        {"infer_sweeps", 100}}},
      {"metric",
       {{"mode", "inverse_covariance"},
        {"lambda", 0.001},
        {"window_days", 90},
        {"min_items", 3},
        {"max_items", 10}}},
      {"assort",
       {{"solver", "vertical_iter"},
        {"budget_cents", 500000},
        {"epsilon", 0.0001},
        {"max_iters", 20},
        {"max_passes", 50},
        {"top_n", 50},
        {"seed_vertical_a", "Couch Set"},
        {"seed_vertical_b", "Coffee Table"},
        {"verticals", default_verticals()}}},
      {"eval", {{"tau", 0.02}}},
      {"synth",
       {{"n_products", 500},
        {"k_true", 10},
        {"v_text", 200},
        {"v_img", 200},
        {"seed", 7},
        {"phi_concentration", 0.1},
        {"theta_concentration", 0.5},
        {"text_length_mean", 50.0},
        {"visual_draws", 40},
        {"price_median_cents", 30000.0},
        {"price_sigma", 0.7},
        {"n_sessions", 2000},
        {"n_users", 300},
        {"gamma", 5.0},
        {"session_min", 2},
        {"session_max", 8},
        {"purchase_min", 3},
        {"purchase_max", 10},
        {"window_days", 90}}}};
}

PipelineConfig load_config(const std::optional<fs::path>& file,
                           const std::vector<std::string>& overrides) {
  json effective = default_config_json();
  if (file.has_value()) {
    std::ifstream in(*file);
    if (!in) throw ConfigError("cannot open config file: " + file->string());
    json loaded;
    try {
      loaded = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("config file " + file->string() + ": " + e.what());
    }
    merge(effective, loaded, "");
  }
  for (const auto& expr : overrides) apply_override(effective, expr);

  PipelineConfig out;
  out.paths = parse_paths(effective.at("paths"));
  out.corpus = parse_corpus(effective.at("corpus"));
  out.topicmodel = parse_topicmodel(effective.at("topicmodel"));
  out.metric = parse_metric(effective.at("metric"));
  out.assort = parse_assort(effective.at("assort"));
  out.eval = parse_eval(effective.at("eval"));
  out.synth = parse_synth(effective.at("synth"));
  out.effective = std::move(effective);
  out.hash = config_hash(out.effective);
  return out;
}

std::string config_hash(const json& effective) {
  const std::string dump = effective.dump();
  std::uint64_t hash = 14695981039346656037ULL;
  for (const unsigned char c : dump) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  static const char* kHex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = kHex[hash & 0xF];
    hash >>= 4;
  }
  return out;
}

}  // namespace assortify::config
