#include "assortify/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <utility>

namespace assortify::io {

namespace fs = std::filesystem;

namespace {

std::string format_error(const fs::path& path, int line, const std::string& reason) {
  std::ostringstream out;
  out << path.string() << ":" << line << ": " << reason;
  return out.str();
}

/// Field accessors that turn missing keys and type mismatches into IoError
/// with the offending file and line.
const json& require(const json& j, const char* key, const fs::path& path, int line) {
  const auto it = j.find(key);
  if (it == j.end()) {
    throw IoError(path, line, std::string("missing field \"") + key + "\"");
  }
  return *it;
}

std::string require_string(const json& j, const char* key, const fs::path& path,
                           int line) {
  const json& v = require(j, key, path, line);
  if (!v.is_string()) {
    throw IoError(path, line, std::string("field \"") + key + "\" must be a string");
  }
  return v.get<std::string>();
}

std::int64_t require_int(const json& j, const char* key, const fs::path& path,
                         int line) {
  const json& v = require(j, key, path, line);
  if (!v.is_number_integer()) {
    throw IoError(path, line,
                  std::string("field \"") + key + "\" must be an integer");
  }
  return v.get<std::int64_t>();
}

double require_number(const json& j, const char* key, const fs::path& path,
                      int line) {
  const json& v = require(j, key, path, line);
  if (!v.is_number()) {
    throw IoError(path, line, std::string("field \"") + key + "\" must be a number");
  }
  return v.get<double>();
}

const json& require_array(const json& j, const char* key, const fs::path& path,
                          int line) {
  const json& v = require(j, key, path, line);
  if (!v.is_array()) {
    throw IoError(path, line, std::string("field \"") + key + "\" must be an array");
  }
  return v;
}

std::vector<std::string> string_list(const json& arr, const char* key,
                                     const fs::path& path, int line) {
  std::vector<std::string> out;
  out.reserve(arr.size());
  for (const auto& v : arr) {
    if (!v.is_string()) {
      throw IoError(path, line,
                    std::string("field \"") + key + "\" must contain strings");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::vector<int> int_list(const json& arr, const char* key, const fs::path& path,
                          int line) {
  std::vector<int> out;
  out.reserve(arr.size());
  for (const auto& v : arr) {
    if (!v.is_number_integer()) {
      throw IoError(path, line,
                    std::string("field \"") + key + "\" must contain integers");
    }
    out.push_back(v.get<int>());
  }
  return out;
}

Vector number_vector(const json& arr, const char* key, const fs::path& path,
                     int line) {
  Vector out(arr.size());
  Eigen::Index i = 0;
  for (const auto& v : arr) {
    if (!v.is_number()) {
      throw IoError(path, line,
                    std::string("field \"") + key + "\" must contain numbers");
    }
    out[i++] = v.get<double>();
  }
  return out;
}

json vector_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    rows.push_back(vector_json(m.row(r).transpose()));
  }
  return rows;
}

Matrix matrix_from_json(const json& rows, const char* key, const fs::path& path,
                        int line) {
  if (!rows.is_array()) {
    throw IoError(path, line, std::string("field \"") + key + "\" must be an array");
  }
  if (rows.empty()) return Matrix(0, 0);
  Matrix m;
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    if (!row.is_array()) {
      throw IoError(path, line,
                    std::string("field \"") + key + "\" must contain arrays");
    }
    const Vector v = number_vector(row, key, path, line);
    if (r == 0) {
      m.resize(static_cast<Eigen::Index>(rows.size()), v.size());
    } else if (v.size() != m.cols()) {
      throw IoError(path, line, std::string("field \"") + key + "\" is ragged");
    }
    m.row(r++) = v.transpose();
  }
  return m;
}

bool is_meta_line(const json& j) {
  return j.is_object() && j.size() == 1 && j.contains("_meta");
}

/// Applies `fn(record, line_number)` to every data line of a JSONL file,
/// skipping one optional leading meta line.
template <typename Fn>
void for_each_record(const fs::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw IoError(path, 0, "cannot open file");
  std::string line;
  int lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw IoError(path, lineno, e.what());
    }
    if (first && is_meta_line(j)) {
      first = false;
      continue;
    }
    first = false;
    fn(j, lineno);
  }
}

json parse_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, 0, "cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError(path, 0, e.what());
  }
}

void write_jsonl(const fs::path& path, const json* meta,
                 const std::vector<json>& records) {
  std::string text;
  if (meta != nullptr) {
    text += json{{"_meta", *meta}}.dump();
    text += '\n';
  }
  for (const auto& record : records) {
    text += record.dump();
    text += '\n';
  }
  atomic_write(path, text);
}

void write_json_file(const fs::path& path, json body, const json* meta) {
  if (meta != nullptr) body["_meta"] = *meta;
  atomic_write(path, body.dump(2) + "\n");
}

}  // namespace

IoError::IoError(const fs::path& path, int line, const std::string& reason)
    : std::runtime_error(format_error(path, line, reason)) {}

void atomic_write(const fs::path& path, const std::string& text) {
  const fs::path parent = path.parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::optional<json> read_jsonl_meta(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, 0, "cannot open file");
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw IoError(path, 1, e.what());
    }
    if (is_meta_line(j)) return j.at("_meta");
    return std::nullopt;
  }
  return std::nullopt;
}

std::vector<Product> read_catalog(const fs::path& path) {
  std::vector<Product> out;
  for_each_record(path, [&](const json& j, int line) {
    Product p;
    p.id = require_string(j, "product_id", path, line);
    p.vertical = require_string(j, "vertical", path, line);
    p.price_cents = require_int(j, "price_cents", path, line);
    if (p.price_cents < 0) {
      throw IoError(path, line, "field \"price_cents\" must be non-negative");
    }
    if (j.contains("title")) p.title = require_string(j, "title", path, line);
    if (j.contains("attributes")) {
      p.attributes =
          string_list(require_array(j, "attributes", path, line), "attributes",
                      path, line);
    }
    out.push_back(std::move(p));
  });
  return out;
}

void write_catalog(const fs::path& path, const std::vector<Product>& products,
                   const json* meta) {
  std::vector<json> records;
  records.reserve(products.size());
  for (const auto& p : products) {
    records.push_back({{"product_id", p.id},
                       {"vertical", p.vertical},
                       {"price_cents", p.price_cents},
                       {"title", p.title},
                       {"attributes", p.attributes}});
  }
  write_jsonl(path, meta, records);
}

std::vector<corpus::ActivationSummary> read_activations(const fs::path& path) {
  std::vector<corpus::ActivationSummary> out;
  for_each_record(path, [&](const json& j, int line) {
    corpus::ActivationSummary s;
    s.product_id = require_string(j, "product_id", path, line);
    const json& images = require_array(j, "images", path, line);
    for (const auto& image : images) {
      if (!image.is_array()) {
        throw IoError(path, line, "field \"images\" must contain arrays");
      }
      s.images.push_back(number_vector(image, "images", path, line));
    }
    out.push_back(std::move(s));
  });
  return out;
}

void write_activations(const fs::path& path,
                       const std::vector<corpus::ActivationSummary>& activations,
                       const json* meta) {
  std::vector<json> records;
  records.reserve(activations.size());
  for (const auto& s : activations) {
    json images = json::array();
    for (const auto& image : s.images) images.push_back(vector_json(image));
    records.push_back({{"product_id", s.product_id}, {"images", images}});
  }
  write_jsonl(path, meta, records);
}

std::vector<DocumentTuple> read_documents(const fs::path& path) {
  std::vector<DocumentTuple> out;
  for_each_record(path, [&](const json& j, int line) {
    DocumentTuple t;
    t.product_id = require_string(j, "product_id", path, line);
    if (j.contains("visual") && !j.at("visual").is_null()) {
      VisualDocument v;
      v.word_ids = int_list(require_array(j, "visual", path, line), "visual",
                            path, line);
      if (!std::is_sorted(v.word_ids.begin(), v.word_ids.end()) ||
          std::adjacent_find(v.word_ids.begin(), v.word_ids.end()) !=
              v.word_ids.end()) {
        throw IoError(path, line,
                      "field \"visual\" must be sorted and duplicate-free");
      }
      t.visual = std::move(v);
    }
    if (j.contains("text") && !j.at("text").is_null()) {
      TextDocument d;
      d.tokens =
          int_list(require_array(j, "text", path, line), "text", path, line);
      t.text = std::move(d);
    }
    if (!t.visual.has_value() && !t.text.has_value()) {
      throw IoError(path, line, "document has no modality");
    }
    out.push_back(std::move(t));
  });
  return out;
}

void write_documents(const fs::path& path, const std::vector<DocumentTuple>& tuples,
                     const json* meta) {
  std::vector<json> records;
  records.reserve(tuples.size());
  for (const auto& t : tuples) {
    json j = {{"product_id", t.product_id}};
    j["visual"] = t.visual.has_value() ? json(t.visual->word_ids) : json();
    j["text"] = t.text.has_value() ? json(t.text->tokens) : json();
    records.push_back(std::move(j));
  }
  write_jsonl(path, meta, records);
}

std::vector<ClickSession> read_sessions(const fs::path& path) {
  std::vector<ClickSession> out;
  for_each_record(path, [&](const json& j, int line) {
    ClickSession s;
    s.session_id = require_string(j, "session_id", path, line);
    s.product_ids =
        string_list(require_array(j, "product_ids", path, line), "product_ids",
                    path, line);
    std::sort(s.product_ids.begin(), s.product_ids.end());
    s.product_ids.erase(std::unique(s.product_ids.begin(), s.product_ids.end()),
                        s.product_ids.end());
    out.push_back(std::move(s));
  });
  return out;
}

void write_sessions(const fs::path& path, const std::vector<ClickSession>& sessions,
                    const json* meta) {
  std::vector<json> records;
  records.reserve(sessions.size());
  for (const auto& s : sessions) {
    records.push_back({{"session_id", s.session_id}, {"product_ids", s.product_ids}});
  }
  write_jsonl(path, meta, records);
}

std::vector<PurchaseRecord> read_purchases(const fs::path& path) {
  std::vector<PurchaseRecord> out;
  for_each_record(path, [&](const json& j, int line) {
    PurchaseRecord r;
    r.user_id = require_string(j, "user_id", path, line);
    r.product_id = require_string(j, "product_id", path, line);
    r.ts = require_int(j, "ts", path, line);
    out.push_back(std::move(r));
  });
  return out;
}

void write_purchases(const fs::path& path,
                     const std::vector<PurchaseRecord>& purchases,
                     const json* meta) {
  std::vector<json> records;
  records.reserve(purchases.size());
  for (const auto& r : purchases) {
    records.push_back(
        {{"user_id", r.user_id}, {"product_id", r.product_id}, {"ts", r.ts}});
  }
  write_jsonl(path, meta, records);
}

std::vector<assort::Seed> read_seeds(const fs::path& path) {
  std::vector<assort::Seed> out;
  for_each_record(path, [&](const json& j, int line) {
    assort::Seed s;
    s.couch_set = require_string(j, "couch_set", path, line);
    s.coffee_table = require_string(j, "coffee_table", path, line);
    s.coclick_count = require_int(j, "count", path, line);
    out.push_back(std::move(s));
  });
  return out;
}

void write_seeds(const fs::path& path, const std::vector<assort::Seed>& seeds,
                 const json* meta) {
  std::vector<json> records;
  records.reserve(seeds.size());
  for (const auto& s : seeds) {
    records.push_back({{"couch_set", s.couch_set},
                       {"coffee_table", s.coffee_table},
                       {"count", s.coclick_count}});
  }
  write_jsonl(path, meta, records);
}

std::vector<assort::Assortment> read_assortments(const fs::path& path) {
  std::vector<assort::Assortment> out;
  for_each_record(path, [&](const json& j, int line) {
    assort::Assortment a;
    const json& seed = require(j, "seed", path, line);
    a.seed.couch_set = require_string(seed, "couch_set", path, line);
    a.seed.coffee_table = require_string(seed, "coffee_table", path, line);
    a.seed.coclick_count = require_int(seed, "count", path, line);
    const json& members = require(j, "members", path, line);
    if (!members.is_object()) {
      throw IoError(path, line, "field \"members\" must be an object");
    }
    for (const auto& [vertical, ids] : members.items()) {
      if (!ids.is_array()) {
        throw IoError(path, line, "field \"members\" must map to arrays");
      }
      a.members[vertical] = string_list(ids, "members", path, line);
    }
    a.objective = require_number(j, "objective", path, line);
    a.total_cost_cents = require_int(j, "total_cost_cents", path, line);
    const json& feasible = require(j, "feasible", path, line);
    if (!feasible.is_boolean()) {
      throw IoError(path, line, "field \"feasible\" must be a boolean");
    }
    a.budget_feasible = feasible.get<bool>();
    a.bounds_feasible = feasible.get<bool>();
    a.solver = require_string(j, "solver", path, line);
    out.push_back(std::move(a));
  });
  return out;
}

void write_assortments(const fs::path& path,
                       const std::vector<assort::Assortment>& assortments,
                       const json* meta) {
  std::vector<json> records;
  records.reserve(assortments.size());
  for (const auto& a : assortments) {
    records.push_back({{"seed",
                        {{"couch_set", a.seed.couch_set},
                         {"coffee_table", a.seed.coffee_table},
                         {"count", a.seed.coclick_count}}},
                       {"members", a.members},
                       {"objective", a.objective},
                       {"total_cost_cents", a.total_cost_cents},
                       {"feasible", a.feasible()},
                       {"solver", a.solver}});
  }
  write_jsonl(path, meta, records);
}

void write_metric(const fs::path& path,
                  const compatibility::CompatibilityMetric& metric,
                  const json* meta) {
  json body = {{"mode", compatibility::to_string(metric.mode)},
               {"lambda", metric.lambda},
               {"m", matrix_json(metric.m)}};
  write_json_file(path, std::move(body), meta);
}

compatibility::CompatibilityMetric read_metric(const fs::path& path) {
  const json j = parse_json_file(path);
  compatibility::CompatibilityMetric metric;
  try {
    metric.mode =
        compatibility::metric_mode_from_string(require_string(j, "mode", path, 0));
  } catch (const std::invalid_argument& e) {
    throw IoError(path, 0, e.what());
  }
  metric.lambda = require_number(j, "lambda", path, 0);
  metric.m = matrix_from_json(require(j, "m", path, 0), "m", path, 0);
  if (metric.m.rows() != metric.m.cols()) {
    throw IoError(path, 0, "field \"m\" must be square");
  }
  return metric;
}

void write_vocabulary(const fs::path& path, const VocabularySidecar& vocab,
                      const json* meta) {
  json body = {{"text_tokens", vocab.text_tokens},
               {"visual_labels", vocab.visual_labels},
               {"quantile", vocab.quantile},
               {"thresholds", vector_json(vocab.thresholds)}};
  write_json_file(path, std::move(body), meta);
}

VocabularySidecar read_vocabulary(const fs::path& path) {
  const json j = parse_json_file(path);
  VocabularySidecar vocab;
  vocab.text_tokens = string_list(require_array(j, "text_tokens", path, 0),
                                  "text_tokens", path, 0);
  vocab.visual_labels = string_list(require_array(j, "visual_labels", path, 0),
                                    "visual_labels", path, 0);
  vocab.quantile = require_number(j, "quantile", path, 0);
  vocab.thresholds =
      number_vector(require_array(j, "thresholds", path, 0), "thresholds", path, 0);
  return vocab;
}

void save_model(const fs::path& dir, const topicmodel::PolyTopicModel& model,
                const json* meta) {
  fs::create_directories(dir);
  json body = {{"topics", model.num_topics},
               {"languages", model.languages},
               {"vocab_sizes", model.vocab_sizes},
               {"alpha", vector_json(model.alpha)},
               {"beta", model.beta},
               {"iterations", model.iterations},
               {"seed", model.seed}};
  write_json_file(dir / "meta.json", std::move(body), meta);
  for (int l = 0; l < model.num_languages; ++l) {
    std::vector<json> records;
    records.reserve(model.num_topics);
    for (int k = 0; k < model.num_topics; ++k) {
      records.push_back(
          {{"topic", k}, {"p", vector_json(model.phi[l].row(k).transpose())}});
    }
    write_jsonl(dir / ("phi_" + model.languages[l] + ".jsonl"), meta, records);
  }
  write_thetas(dir / "theta.jsonl", model.product_ids, model.theta, meta);
}

topicmodel::PolyTopicModel load_model(const fs::path& dir) {
  const fs::path meta_path = dir / "meta.json";
  const json j = parse_json_file(meta_path);
  topicmodel::PolyTopicModel model;
  model.num_topics = static_cast<int>(require_int(j, "topics", meta_path, 0));
  model.languages = string_list(require_array(j, "languages", meta_path, 0),
                                "languages", meta_path, 0);
  model.vocab_sizes = int_list(require_array(j, "vocab_sizes", meta_path, 0),
                               "vocab_sizes", meta_path, 0);
  model.num_languages = static_cast<int>(model.languages.size());
  model.alpha = number_vector(require_array(j, "alpha", meta_path, 0), "alpha",
                              meta_path, 0);
  model.beta = require_number(j, "beta", meta_path, 0);
  model.iterations = static_cast<int>(require_int(j, "iterations", meta_path, 0));
  model.seed = static_cast<std::uint64_t>(require_int(j, "seed", meta_path, 0));
  if (model.num_topics < 1 || model.num_languages < 1 ||
      model.vocab_sizes.size() != model.languages.size() ||
      model.alpha.size() != model.num_topics) {
    throw IoError(meta_path, 0, "inconsistent model metadata");
  }

  for (int l = 0; l < model.num_languages; ++l) {
    const fs::path phi_path = dir / ("phi_" + model.languages[l] + ".jsonl");
    Matrix phi = Matrix::Zero(model.num_topics, model.vocab_sizes[l]);
    std::vector<bool> seen(model.num_topics, false);
    for_each_record(phi_path, [&](const json& row, int line) {
      const int k = static_cast<int>(require_int(row, "topic", phi_path, line));
      if (k < 0 || k >= model.num_topics || seen[k]) {
        throw IoError(phi_path, line, "bad or repeated topic index");
      }
      const Vector p =
          number_vector(require_array(row, "p", phi_path, line), "p", phi_path, line);
      if (p.size() != model.vocab_sizes[l]) {
        throw IoError(phi_path, line, "field \"p\" has the wrong length");
      }
      phi.row(k) = p.transpose();
      seen[k] = true;
    });
    if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) {
      throw IoError(phi_path, 0, "missing topic rows");
    }
    model.phi.push_back(std::move(phi));
  }

  const fs::path theta_path = dir / "theta.jsonl";
  std::vector<Vector> rows;
  for_each_record(theta_path, [&](const json& row, int line) {
    model.product_ids.push_back(require_string(row, "product_id", theta_path, line));
    const Vector t = number_vector(require_array(row, "theta", theta_path, line),
                                   "theta", theta_path, line);
    if (t.size() != model.num_topics) {
      throw IoError(theta_path, line, "field \"theta\" has the wrong length");
    }
    rows.push_back(t);
  });
  model.theta = Matrix(rows.size(), model.num_topics);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    model.theta.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
  }
  return model;
}

void write_ground_truth(const fs::path& path, const synth::GroundTruth& truth,
                        const json* meta) {
  const auto& c = truth.config;
  json phi = json::array();
  for (const auto& m : truth.phi_true) phi.push_back(matrix_json(m));
  json body = {{"k_true", truth.k_true},
               {"languages", truth.languages},
               {"phi_true", phi},
               {"theta_true", matrix_json(truth.theta_true)},
               {"product_ids", truth.product_ids},
               {"config",
                {{"n_products", c.n_products},
                 {"k_true", c.k_true},
                 {"v_text", c.v_text},
                 {"v_img", c.v_img},
                 {"seed", c.seed},
                 {"phi_concentration", c.phi_concentration},
                 {"theta_concentration", c.theta_concentration},
                 {"text_length_mean", c.text_length_mean},
                 {"visual_draws", c.visual_draws},
                 {"price_median_cents", c.price_median_cents},
                 {"price_sigma", c.price_sigma},
                 {"n_sessions", c.n_sessions},
                 {"n_users", c.n_users},
                 {"gamma", c.gamma},
                 {"session_min", c.session_min},
                 {"session_max", c.session_max},
                 {"purchase_min", c.purchase_min},
                 {"purchase_max", c.purchase_max},
                 {"window_days", c.window_days}}}};
  write_json_file(path, std::move(body), meta);
}

synth::GroundTruth read_ground_truth(const fs::path& path) {
  const json j = parse_json_file(path);
  synth::GroundTruth truth;
  truth.k_true = static_cast<int>(require_int(j, "k_true", path, 0));
  truth.languages =
      string_list(require_array(j, "languages", path, 0), "languages", path, 0);
  for (const auto& m : require_array(j, "phi_true", path, 0)) {
    truth.phi_true.push_back(matrix_from_json(m, "phi_true", path, 0));
  }
  truth.theta_true =
      matrix_from_json(require(j, "theta_true", path, 0), "theta_true", path, 0);
  truth.product_ids = string_list(require_array(j, "product_ids", path, 0),
                                  "product_ids", path, 0);
  const json& c = require(j, "config", path, 0);
  auto& g = truth.config;
  g.n_products = static_cast<int>(require_int(c, "n_products", path, 0));
  g.k_true = static_cast<int>(require_int(c, "k_true", path, 0));
  g.v_text = static_cast<int>(require_int(c, "v_text", path, 0));
  g.v_img = static_cast<int>(require_int(c, "v_img", path, 0));
  g.seed = static_cast<std::uint64_t>(require_int(c, "seed", path, 0));
  g.phi_concentration = require_number(c, "phi_concentration", path, 0);
  g.theta_concentration = require_number(c, "theta_concentration", path, 0);
  g.text_length_mean = require_number(c, "text_length_mean", path, 0);
  g.visual_draws = static_cast<int>(require_int(c, "visual_draws", path, 0));
  g.price_median_cents = require_number(c, "price_median_cents", path, 0);
  g.price_sigma = require_number(c, "price_sigma", path, 0);
  g.n_sessions = static_cast<int>(require_int(c, "n_sessions", path, 0));
  g.n_users = static_cast<int>(require_int(c, "n_users", path, 0));
  g.gamma = require_number(c, "gamma", path, 0);
  g.session_min = static_cast<int>(require_int(c, "session_min", path, 0));
  g.session_max = static_cast<int>(require_int(c, "session_max", path, 0));
  g.purchase_min = static_cast<int>(require_int(c, "purchase_min", path, 0));
  g.purchase_max = static_cast<int>(require_int(c, "purchase_max", path, 0));
  g.window_days = static_cast<int>(require_int(c, "window_days", path, 0));
  return truth;
}

void write_report(const fs::path& path, const eval::EvalReport& report,
                  const json* meta) {
  json assortments = json::array();
  for (const auto& a : report.assortments) {
    assortments.push_back({{"seed_a", a.seed_a},
                           {"seed_b", a.seed_b},
                           {"jaccard", a.jaccard},
                           {"diversity", a.diversity}});
  }
  json histogram = json::array();
  for (const auto& [topics, count] : report.diversity_histogram) {
    histogram.push_back(json::array({topics, count}));
  }
  json body = {{"tau", report.tau},
               {"jaccard_mean", report.jaccard_mean},
               {"jaccard_max", report.jaccard_max},
               {"diversity_mean", report.diversity_mean},
               {"diversity_histogram", histogram},
               {"assortments", assortments}};
  write_json_file(path, std::move(body), meta);
}

void write_thetas(const fs::path& path, const std::vector<std::string>& product_ids,
                  const Matrix& theta, const json* meta) {
  if (static_cast<Eigen::Index>(product_ids.size()) != theta.rows()) {
    throw std::invalid_argument("dimension mismatch: ids vs theta rows");
  }
  std::vector<json> records;
  records.reserve(product_ids.size());
  for (std::size_t i = 0; i < product_ids.size(); ++i) {
    records.push_back(
        {{"product_id", product_ids[i]},
         {"theta", vector_json(theta.row(static_cast<Eigen::Index>(i)).transpose())}});
  }
  write_jsonl(path, meta, records);
}

std::map<std::string, Vector> read_thetas(const fs::path& path) {
  std::map<std::string, Vector> out;
  for_each_record(path, [&](const json& j, int line) {
    const std::string id = require_string(j, "product_id", path, line);
    if (out.count(id)) throw IoError(path, line, "repeated product_id");
    out[id] = number_vector(require_array(j, "theta", path, line), "theta", path,
                            line);
  });
  return out;
}

}  // namespace assortify::io
