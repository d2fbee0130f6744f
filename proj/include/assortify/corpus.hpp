#pragma once

#include "assortify/corpus_types.hpp"
#include "assortify/types.hpp"

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace assortify::corpus {

/// Fits threshold[c] as the nearest-rank q-quantile of channel c's values
/// across all image records.
ThresholdVector compute_channel_thresholds(
    std::span<const ActivationSummary> summaries, double q);

/// Word ids of channels strictly above their threshold.
std::vector<int> binarize_image(const Vector& image_values,
                                const ThresholdVector& thresholds);

/// Union of the per-image word sets; an empty list means the product has no
/// visual modality.
std::optional<VisualDocument> build_visual_document(
    const std::vector<std::vector<int>>& image_word_sets);

/// Lower-cases and splits on non-alphanumeric runs.
std::vector<std::string> tokenize(const std::string& text);

const std::set<std::string>& default_stopwords();
std::set<std::string> load_stopwords(const std::string& path);

/// Frozen corpus-wide text vocabulary; ids are assigned in lexicographic
/// token order so rebuilding from the same corpus is bit-identical.
struct TextVocabulary {
  std::map<std::string, int> id_of;
  std::vector<std::string> token_of;

  int size() const { return static_cast<int>(token_of.size()); }
};

/// Counts case-folded non-stopword tokens across titles and attributes and
/// keeps those occurring at least min_frequency times.
TextVocabulary build_text_vocabulary(const std::vector<Product>& products,
                                     const std::set<std::string>& stopwords,
                                     int min_frequency);

/// Title tokens concatenated with attribute tokens, stopwords removed,
/// mapped through the frozen vocabulary. All tokens filtered away means the
/// text modality is missing.
std::optional<TextDocument> build_text_document(
    const std::vector<std::string>& title_tokens,
    const std::vector<std::string>& attribute_tokens,
    const std::set<std::string>& stopwords, const TextVocabulary& vocab);

struct CorpusOptions {
  double quantile = 0.85;
  int min_token_frequency = 2;
  int v_img = 2816;
  std::vector<LayerOffset> layer_offsets;  // empty: one block labeled "all"
  std::set<std::string> stopwords = default_stopwords();
};

struct CorpusBuildResult {
  std::vector<DocumentTuple> tuples;  // products with >= 1 modality, catalog order
  TextVocabulary text_vocab;
  ThresholdVector thresholds;
  std::vector<std::string> visual_labels;  // channel label per visual word id
};

/// Two-pass build: fits thresholds and the text vocabulary corpus-wide, then
/// assembles one document tuple per product.
CorpusBuildResult build_documents(
    const std::vector<Product>& products,
    const std::vector<ActivationSummary>& activations,
    const CorpusOptions& options);

}  // namespace assortify::corpus
