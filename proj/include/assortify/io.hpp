#pragma once

#include "assortify/assort.hpp"
#include "assortify/compatibility.hpp"
#include "assortify/corpus.hpp"
#include "assortify/eval.hpp"
#include "assortify/synth.hpp"
#include "assortify/topicmodel.hpp"
#include "assortify/types.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace assortify::io {

using json = nlohmann::json;

/// Parse or schema failure in an input file; the message carries
/// "<path>:<line>: <reason>" (line 0 for whole-file problems).
class IoError : public std::runtime_error {
 public:
  IoError(const std::filesystem::path& path, int line, const std::string& reason);
};

/// Writes `text` to `path` atomically: a sibling temp file is written,
/// flushed, and renamed over the target.
void atomic_write(const std::filesystem::path& path, const std::string& text);

/// Every JSONL artifact may start with one line {"_meta": {...}} recording
/// the config hash and seeds; readers skip it. Returns that object when
/// present.
std::optional<json> read_jsonl_meta(const std::filesystem::path& path);

// --- JSONL artifacts. Writers emit the records in the given order, with a
// leading meta line when `meta` is non-null. Readers validate the schema and
// report the offending file and line.

std::vector<Product> read_catalog(const std::filesystem::path& path);
void write_catalog(const std::filesystem::path& path,
                   const std::vector<Product>& products, const json* meta);

std::vector<corpus::ActivationSummary> read_activations(
    const std::filesystem::path& path);
void write_activations(const std::filesystem::path& path,
                       const std::vector<corpus::ActivationSummary>& activations,
                       const json* meta);

std::vector<DocumentTuple> read_documents(const std::filesystem::path& path);
void write_documents(const std::filesystem::path& path,
                     const std::vector<DocumentTuple>& tuples, const json* meta);

std::vector<ClickSession> read_sessions(const std::filesystem::path& path);
void write_sessions(const std::filesystem::path& path,
                    const std::vector<ClickSession>& sessions, const json* meta);

std::vector<PurchaseRecord> read_purchases(const std::filesystem::path& path);
void write_purchases(const std::filesystem::path& path,
                     const std::vector<PurchaseRecord>& purchases,
                     const json* meta);

std::vector<assort::Seed> read_seeds(const std::filesystem::path& path);
void write_seeds(const std::filesystem::path& path,
                 const std::vector<assort::Seed>& seeds, const json* meta);

std::vector<assort::Assortment> read_assortments(
    const std::filesystem::path& path);
void write_assortments(const std::filesystem::path& path,
                       const std::vector<assort::Assortment>& assortments,
                       const json* meta);

// --- JSON artifacts. `meta` lands under a top-level "_meta" key.

void write_metric(const std::filesystem::path& path,
                  const compatibility::CompatibilityMetric& metric,
                  const json* meta);
compatibility::CompatibilityMetric read_metric(const std::filesystem::path& path);

/// Vocabulary sidecar of build-docs: frozen text tokens (position = word id),
/// visual channel labels, and the fitted binarization thresholds.
struct VocabularySidecar {
  std::vector<std::string> text_tokens;
  std::vector<std::string> visual_labels;
  double quantile = 0.0;
  Vector thresholds;
};

void write_vocabulary(const std::filesystem::path& path,
                      const VocabularySidecar& vocab, const json* meta);
VocabularySidecar read_vocabulary(const std::filesystem::path& path);

/// Model directory layout: meta.json, phi_<language>.jsonl (one line per
/// topic), theta.jsonl (one line per training document).
void save_model(const std::filesystem::path& dir,
                const topicmodel::PolyTopicModel& model, const json* meta);
topicmodel::PolyTopicModel load_model(const std::filesystem::path& dir);

void write_ground_truth(const std::filesystem::path& path,
                        const synth::GroundTruth& truth, const json* meta);
synth::GroundTruth read_ground_truth(const std::filesystem::path& path);

void write_report(const std::filesystem::path& path,
                  const eval::EvalReport& report, const json* meta);

/// Inferred per-product topic vectors (fold-in output): JSONL lines
/// {"product_id", "theta"}.
void write_thetas(const std::filesystem::path& path,
                  const std::vector<std::string>& product_ids,
                  const Matrix& theta, const json* meta);
std::map<std::string, Vector> read_thetas(const std::filesystem::path& path);

}  // namespace assortify::io
