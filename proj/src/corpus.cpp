#include "assortify/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace assortify::corpus {

ThresholdVector compute_channel_thresholds(
    std::span<const ActivationSummary> summaries, double q) {
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile must be in [0, 1]");

  std::size_t n_images = 0;
  Eigen::Index v = -1;
  for (const auto& s : summaries) {
    for (const auto& img : s.images) {
      if (v < 0) v = img.size();
      if (img.size() != v) throw std::invalid_argument("dimension mismatch");
      ++n_images;
    }
  }
  if (n_images == 0) throw std::invalid_argument("no activation data");

  // Nearest-rank quantile: the ceil(q * n)-th smallest, floored at rank 1.
  const std::size_t rank = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::ceil(q * static_cast<double>(n_images))));

  ThresholdVector out;
  out.quantile = q;
  out.threshold = Vector::Zero(v);
  std::vector<double> column(n_images);
  for (Eigen::Index c = 0; c < v; ++c) {
    std::size_t i = 0;
    for (const auto& s : summaries) {
      for (const auto& img : s.images) column[i++] = img[c];
    }
    std::nth_element(column.begin(), column.begin() + (rank - 1), column.end());
    out.threshold[c] = column[rank - 1];
  }
  return out;
}

std::vector<int> binarize_image(const Vector& image_values,
                                const ThresholdVector& thresholds) {
  if (image_values.size() != thresholds.threshold.size()) {
    throw std::invalid_argument("dimension mismatch");
  }
  std::vector<int> words;
  for (Eigen::Index c = 0; c < image_values.size(); ++c) {
    if (image_values[c] > thresholds.threshold[c]) {
      words.push_back(static_cast<int>(c));
    }
  }
  return words;
}

std::optional<VisualDocument> build_visual_document(
    const std::vector<std::vector<int>>& image_word_sets) {
  if (image_word_sets.empty()) return std::nullopt;
  std::vector<int> merged;
  for (const auto& set : image_word_sets) {
    merged.insert(merged.end(), set.begin(), set.end());
  }
  std::sort(merged.begin(), merged.end());
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
  return VisualDocument{std::move(merged)};
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  for (const char ch : text) {
    const unsigned char c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

const std::set<std::string>& default_stopwords() {
  static const std::set<std::string> kStopwords = {
      "a",    "an",   "and",  "are",  "as",   "at",   "be",   "by",
      "for",  "from", "has",  "have", "in",   "is",   "it",   "its",
      "of",   "on",   "or",   "that", "the",  "their", "this", "to",
      "was",  "were", "will", "with"};
  return kStopwords;
}

std::set<std::string> load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open stopword file: " + path);
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    for (auto& token : tokenize(line)) words.insert(std::move(token));
  }
  return words;
}

TextVocabulary build_text_vocabulary(const std::vector<Product>& products,
                                     const std::set<std::string>& stopwords,
                                     int min_frequency) {
  std::map<std::string, int> counts;
  auto tally = [&](const std::string& text) {
    for (auto& token : tokenize(text)) {
      if (stopwords.count(token)) continue;
      counts[token] += 1;
    }
  };
  for (const auto& p : products) {
    tally(p.title);
    for (const auto& attr : p.attributes) tally(attr);
  }

  TextVocabulary vocab;
  for (const auto& [token, count] : counts) {
    if (count < min_frequency) continue;
    vocab.id_of.emplace(token, static_cast<int>(vocab.token_of.size()));
    vocab.token_of.push_back(token);
  }
  return vocab;
}

std::optional<TextDocument> build_text_document(
    const std::vector<std::string>& title_tokens,
    const std::vector<std::string>& attribute_tokens,
    const std::set<std::string>& stopwords, const TextVocabulary& vocab) {
  TextDocument doc;
  auto add = [&](const std::string& raw) {
    std::string token;
    token.reserve(raw.size());
    for (const char c : raw) {
      token.push_back(
          static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    if (stopwords.count(token)) return;
    const auto it = vocab.id_of.find(token);
    if (it != vocab.id_of.end()) doc.tokens.push_back(it->second);
  };
  for (const auto& t : title_tokens) add(t);
  for (const auto& t : attribute_tokens) add(t);
  if (doc.tokens.empty()) return std::nullopt;
  return doc;
}

CorpusBuildResult build_documents(
    const std::vector<Product>& products,
    const std::vector<ActivationSummary>& activations,
    const CorpusOptions& options) {
  std::vector<LayerOffset> offsets = options.layer_offsets;
  if (offsets.empty()) offsets.push_back(LayerOffset{"all", 0, options.v_img});
  int expected = 0;
  for (const auto& o : offsets) {
    if (o.start != expected || o.count < 0) {
      throw std::invalid_argument("layer offsets must be contiguous");
    }
    expected += o.count;
  }
  if (expected != options.v_img) {
    throw std::invalid_argument("layer offsets must cover the visual vocabulary");
  }

  for (const auto& s : activations) {
    for (const auto& img : s.images) {
      if (img.size() != options.v_img) {
        throw std::invalid_argument("dimension mismatch in activations for " +
                                    s.product_id);
      }
      if ((img.array() < 0.0).any()) {
        throw std::invalid_argument("negative activation for " + s.product_id);
      }
    }
  }

  CorpusBuildResult result;
  result.thresholds = compute_channel_thresholds(activations, options.quantile);
  result.text_vocab =
      build_text_vocabulary(products, options.stopwords, options.min_token_frequency);

  result.visual_labels.reserve(options.v_img);
  for (const auto& o : offsets) {
    for (int c = 0; c < o.count; ++c) {
      result.visual_labels.push_back(o.layer + ":" + std::to_string(c));
    }
  }

  std::map<std::string, const ActivationSummary*> activation_of;
  for (const auto& s : activations) activation_of[s.product_id] = &s;

  for (const auto& p : products) {
    DocumentTuple tuple;
    tuple.product_id = p.id;

    const auto act = activation_of.find(p.id);
    if (act != activation_of.end()) {
      std::vector<std::vector<int>> sets;
      sets.reserve(act->second->images.size());
      for (const auto& img : act->second->images) {
        sets.push_back(binarize_image(img, result.thresholds));
      }
      tuple.visual = build_visual_document(sets);
    }

    std::vector<std::string> title_tokens = tokenize(p.title);
    std::vector<std::string> attr_tokens;
    for (const auto& attr : p.attributes) {
      for (auto& t : tokenize(attr)) attr_tokens.push_back(std::move(t));
    }
    tuple.text = build_text_document(title_tokens, attr_tokens,
                                     options.stopwords, result.text_vocab);

    if (tuple.visual || tuple.text) result.tuples.push_back(std::move(tuple));
  }
  return result;
}

}  // namespace assortify::corpus
