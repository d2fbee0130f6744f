#pragma once

#include "assortify/rng.hpp"
#include "assortify/types.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace assortify::topicmodel {

/// One tuple as the sampler sees it: token ids per language. A missing
/// modality is an empty token list for that language.
struct TupleTokens {
  std::string product_id;
  std::vector<std::vector<int>> tokens;
};

struct TupleCorpus {
  std::vector<std::string> languages;
  std::vector<int> vocab_sizes;
  std::vector<TupleTokens> tuples;

  int num_languages() const { return static_cast<int>(languages.size()); }
  std::size_t total_tokens() const;
};

/// Builds a sampler corpus from document tuples. `variant` selects the
/// languages: "visual" uses only the visual documents (single-language
/// model), "multimodal" pairs visual and text. Visual documents contribute
/// one token per present word id; tuples with no tokens in any selected
/// language are skipped.
TupleCorpus make_corpus(const std::vector<DocumentTuple>& tuples,
                        const std::string& variant, int v_img, int v_text);

struct TrainConfig {
  int topics = 30;
  double alpha_sum = 5.0;  // symmetric prior, alpha_k = alpha_sum / topics
  double beta = 0.01;
  int iterations = 1000;
  std::uint64_t seed = 13;
};

/// A trained polylingual topic model. Single-modality LDA is the L = 1 case.
/// Rows of every phi matrix and of theta are probability distributions.
struct PolyTopicModel {
  int num_topics = 0;
  int num_languages = 0;
  Vector alpha;
  double beta = 0.0;
  std::vector<std::string> languages;
  std::vector<int> vocab_sizes;
  std::vector<Matrix> phi;  // per language: K x V_l
  Matrix theta;             // M x K, training documents
  std::vector<std::string> product_ids;
  int iterations = 0;
  std::uint64_t seed = 0;
};

/// Collapsed Gibbs state over a tuple corpus. All language documents of a
/// tuple share one topic-count row; each language keeps its own topic-word
/// table. Count tables are exact tallies of the current assignments.
class GibbsSampler {
 public:
  GibbsSampler(const TupleCorpus& corpus, int topics, const Vector& alpha,
               double beta, std::uint64_t seed);

  /// One full pass over every token of every tuple.
  void sweep();
  int sweeps_run() const { return sweeps_; }

  /// Recounts every assignment from scratch and compares with the
  /// incremental tables.
  bool counts_consistent() const;

  /// Token log-likelihood under the smoothed point estimates of the current
  /// state: sum over tokens of log sum_k theta_hat[d][k] * phi_hat[l][k][w].
  double log_likelihood() const;

  Matrix theta_estimate() const;
  std::vector<Matrix> phi_estimate() const;

  PolyTopicModel finalize(int iterations, std::uint64_t seed) const;

  const IntMatrix& doc_topic_counts() const { return doc_topic_; }
  const std::vector<IntMatrix>& topic_word_counts() const { return topic_word_; }

 private:
  void resample(int d, int l, std::size_t pos);

  const TupleCorpus* corpus_;
  int topics_;
  Vector alpha_;
  double beta_;
  Rng rng_;
  std::vector<std::vector<std::vector<int>>> z_;  // [tuple][language][pos]
  IntMatrix doc_topic_;                           // M x K
  std::vector<IntMatrix> topic_word_;             // per language: K x V_l
  std::vector<IntVector> topic_total_;            // per language: K
  int sweeps_ = 0;
  std::vector<double> weights_;  // scratch
};

/// Runs `config.iterations` collapsed Gibbs sweeps and returns the smoothed
/// point estimates from the final state. Deterministic given the seed.
PolyTopicModel train(const TupleCorpus& corpus, const TrainConfig& config);

/// Fold-in: resamples only the given tuple's assignments with phi frozen at
/// the trained estimates. Out-of-vocabulary tokens are dropped; an empty
/// tuple yields the prior alpha / sum(alpha).
Vector infer_theta(const PolyTopicModel& model,
                   const std::vector<std::vector<int>>& tokens, int sweeps,
                   std::uint64_t seed);

/// The n highest-probability words of phi[language].row(topic), descending,
/// ties broken by ascending word id.
std::vector<std::pair<int, double>> top_words(const PolyTopicModel& model,
                                              int language, int topic, int n);

}  // namespace assortify::topicmodel
