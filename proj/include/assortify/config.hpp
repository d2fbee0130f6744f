#pragma once

#include "assortify/assort.hpp"
#include "assortify/corpus.hpp"
#include "assortify/synth.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace assortify::config {

using json = nlohmann::json;

/// Invalid configuration or usage; the message names the offending key.
/// Commands exit with status 2 on this.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& message) : std::runtime_error(message) {}
};

/// Artifact locations. Empty entries resolve to defaults under out_dir.
struct PathsConfig {
  std::string out_dir = "out";
  std::string catalog;
  std::string activations;
  std::string documents;
  std::string vocabulary;
  std::string sessions;
  std::string purchases;
  std::string ground_truth;
  std::string model_dir;
  std::string inferred;
  std::string metric;
  std::string seeds;
  std::string assortments;
  std::string oracle;
  std::string report;
};

struct CorpusConfig {
  double quantile = 0.85;
  int min_token_frequency = 2;
  int v_img = 2816;
  std::string stopword_file;  // empty -> bundled default list
  std::vector<corpus::LayerOffset> layers;  // empty -> one block over all channels
};

struct TopicModelConfig {
  std::string variant = "multimodal";  // or "visual"
  int topics = 30;
  double alpha_sum = 5.0;
  double beta = 0.01;
  int iterations = 1000;
  std::uint64_t seed = 13;
  int infer_sweeps = 100;
};

struct MetricConfig {
  std::string mode = "inverse_covariance";
  double lambda = 1e-3;
  int window_days = 90;
  int min_items = 3;
  int max_items = 10;
};

struct AssortConfig {
  std::string solver = "vertical_iter";  // or "qkp"
  std::int64_t budget_cents = 500000;
  double epsilon = 1e-4;
  int max_iters = 20;
  int max_passes = 50;
  int top_n = 50;
  std::string seed_vertical_a = "Couch Set";
  std::string seed_vertical_b = "Coffee Table";
  std::vector<assort::VerticalConstraint> verticals;  // visit order = list order
};

struct EvalConfig {
  double tau = 0.02;
};

/// The full pipeline configuration: defaults, overlaid by the config file,
/// overlaid by --set overrides. `effective` is the merged JSON the hash is
/// computed from.
struct PipelineConfig {
  PathsConfig paths;
  CorpusConfig corpus;
  TopicModelConfig topicmodel;
  MetricConfig metric;
  AssortConfig assort;
  EvalConfig eval;
  synth::GeneratorConfig synth;
  json effective;
  std::string hash;

  std::filesystem::path catalog_path() const;
  std::filesystem::path activations_path() const;
  std::filesystem::path documents_path() const;
  std::filesystem::path vocabulary_path() const;
  std::filesystem::path sessions_path() const;
  std::filesystem::path purchases_path() const;
  std::filesystem::path ground_truth_path() const;
  std::filesystem::path model_dir_path() const;
  std::filesystem::path inferred_path() const;
  std::filesystem::path metric_path() const;
  std::filesystem::path seeds_path() const;
  std::filesystem::path assortments_path() const;
  std::filesystem::path oracle_path() const;
  std::filesystem::path report_path() const;
};

/// The complete default configuration as JSON; the single source of the known
/// key set.
json default_config_json();

/// Loads defaults, merges the optional config file (recursively for objects;
/// unknown keys are rejected), applies dotted-path overrides, validates all
/// ranges, and computes the config hash. Throws ConfigError naming the
/// offending key.
PipelineConfig load_config(const std::optional<std::filesystem::path>& file,
                           const std::vector<std::string>& overrides);

/// FNV-1a 64-bit over the canonical (sorted-key) dump, as 16 hex digits.
std::string config_hash(const json& effective);

}  // namespace assortify::config
