#include "assortify/topicmodel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace assortify::topicmodel {

std::size_t TupleCorpus::total_tokens() const {
  std::size_t n = 0;
  for (const auto& t : tuples) {
    for (const auto& lang : t.tokens) n += lang.size();
  }
  return n;
}

TupleCorpus make_corpus(const std::vector<DocumentTuple>& tuples,
                        const std::string& variant, int v_img, int v_text) {
  TupleCorpus corpus;
  if (variant == "visual") {
    corpus.languages = {"visual"};
    corpus.vocab_sizes = {v_img};
  } else if (variant == "multimodal") {
    corpus.languages = {"visual", "text"};
    corpus.vocab_sizes = {v_img, v_text};
  } else {
    throw std::invalid_argument("unknown variant: " + variant);
  }

  for (const auto& tuple : tuples) {
    TupleTokens t;
    t.product_id = tuple.product_id;
    t.tokens.resize(corpus.languages.size());
    if (tuple.visual) t.tokens[0] = tuple.visual->word_ids;
    if (variant == "multimodal" && tuple.text) t.tokens[1] = tuple.text->tokens;
    std::size_t total = 0;
    for (const auto& lang : t.tokens) total += lang.size();
    if (total == 0) continue;
    corpus.tuples.push_back(std::move(t));
  }
  return corpus;
}

GibbsSampler::GibbsSampler(const TupleCorpus& corpus, int topics,
                           const Vector& alpha, double beta,
                           std::uint64_t seed)
    : corpus_(&corpus),
      topics_(topics),
      alpha_(alpha),
      beta_(beta),
      rng_(seed),
      weights_(static_cast<std::size_t>(topics)) {
  if (topics < 1) throw std::invalid_argument("topic count must be >= 1");
  if (alpha.size() != topics || (alpha.array() <= 0.0).any()) {
    throw std::invalid_argument("alpha must be positive and of length K");
  }
  if (beta <= 0.0) throw std::invalid_argument("beta must be positive");

  const int num_tuples = static_cast<int>(corpus.tuples.size());
  const int num_langs = corpus.num_languages();
  doc_topic_ = IntMatrix::Zero(num_tuples, topics_);
  topic_word_.reserve(num_langs);
  topic_total_.reserve(num_langs);
  for (int l = 0; l < num_langs; ++l) {
    topic_word_.push_back(IntMatrix::Zero(topics_, corpus.vocab_sizes[l]));
    topic_total_.push_back(IntVector::Zero(topics_));
  }

  z_.resize(num_tuples);
  for (int d = 0; d < num_tuples; ++d) {
    z_[d].resize(num_langs);
    for (int l = 0; l < num_langs; ++l) {
      const auto& words = corpus.tuples[d].tokens[l];
      z_[d][l].resize(words.size());
      for (std::size_t i = 0; i < words.size(); ++i) {
        const int w = words[i];
        if (w < 0 || w >= corpus.vocab_sizes[l]) {
          throw std::invalid_argument("word id out of vocabulary range");
        }
        const int k = static_cast<int>(rng_.uniform_int(topics_));
        z_[d][l][i] = k;
        doc_topic_(d, k) += 1;
        topic_word_[l](k, w) += 1;
        topic_total_[l](k) += 1;
      }
    }
  }
}

void GibbsSampler::resample(int d, int l, std::size_t pos) {
  const int w = corpus_->tuples[d].tokens[l][pos];
  const int old_k = z_[d][l][pos];
  doc_topic_(d, old_k) -= 1;
  topic_word_[l](old_k, w) -= 1;
  topic_total_[l](old_k) -= 1;

  const double vbeta = corpus_->vocab_sizes[l] * beta_;
  double total = 0.0;
  for (int k = 0; k < topics_; ++k) {
    total += (doc_topic_(d, k) + alpha_[k]) * (topic_word_[l](k, w) + beta_) /
             (topic_total_[l](k) + vbeta);
    weights_[k] = total;
  }
  const double u = rng_.uniform() * total;
  int new_k = topics_ - 1;
  for (int k = 0; k < topics_; ++k) {
    if (u < weights_[k]) {
      new_k = k;
      break;
    }
  }

  z_[d][l][pos] = new_k;
  doc_topic_(d, new_k) += 1;
  topic_word_[l](new_k, w) += 1;
  topic_total_[l](new_k) += 1;
}

void GibbsSampler::sweep() {
  const int num_tuples = static_cast<int>(corpus_->tuples.size());
  const int num_langs = corpus_->num_languages();
  for (int d = 0; d < num_tuples; ++d) {
    for (int l = 0; l < num_langs; ++l) {
      const std::size_t n = corpus_->tuples[d].tokens[l].size();
      for (std::size_t i = 0; i < n; ++i) resample(d, l, i);
    }
  }
  ++sweeps_;
}

bool GibbsSampler::counts_consistent() const {
  const int num_tuples = static_cast<int>(corpus_->tuples.size());
  const int num_langs = corpus_->num_languages();
  IntMatrix dt = IntMatrix::Zero(num_tuples, topics_);
  std::vector<IntMatrix> tw;
  std::vector<IntVector> tt;
  for (int l = 0; l < num_langs; ++l) {
    tw.push_back(IntMatrix::Zero(topics_, corpus_->vocab_sizes[l]));
    tt.push_back(IntVector::Zero(topics_));
  }
  for (int d = 0; d < num_tuples; ++d) {
    for (int l = 0; l < num_langs; ++l) {
      const auto& words = corpus_->tuples[d].tokens[l];
      for (std::size_t i = 0; i < words.size(); ++i) {
        const int k = z_[d][l][i];
        dt(d, k) += 1;
        tw[l](k, words[i]) += 1;
        tt[l](k) += 1;
      }
    }
  }
  if (dt != doc_topic_) return false;
  if ((doc_topic_.array() < 0).any()) return false;
  for (int l = 0; l < num_langs; ++l) {
    if (tw[l] != topic_word_[l]) return false;
    if (tt[l] != topic_total_[l]) return false;
    if (topic_word_[l].colwise().sum().sum() != topic_total_[l].sum()) return false;
  }
  return true;
}

Matrix GibbsSampler::theta_estimate() const {
  const int num_tuples = static_cast<int>(corpus_->tuples.size());
  const double alpha_sum = alpha_.sum();
  Matrix theta(num_tuples, topics_);
  for (int d = 0; d < num_tuples; ++d) {
    const double n = doc_topic_.row(d).sum();
    for (int k = 0; k < topics_; ++k) {
      theta(d, k) = (doc_topic_(d, k) + alpha_[k]) / (n + alpha_sum);
    }
  }
  return theta;
}

std::vector<Matrix> GibbsSampler::phi_estimate() const {
  std::vector<Matrix> phi;
  const int num_langs = corpus_->num_languages();
  phi.reserve(num_langs);
  for (int l = 0; l < num_langs; ++l) {
    const int v = corpus_->vocab_sizes[l];
    Matrix p(topics_, v);
    for (int k = 0; k < topics_; ++k) {
      const double denom = topic_total_[l](k) + v * beta_;
      for (int w = 0; w < v; ++w) {
        p(k, w) = (topic_word_[l](k, w) + beta_) / denom;
      }
    }
    phi.push_back(std::move(p));
  }
  return phi;
}

double GibbsSampler::log_likelihood() const {
  const Matrix theta = theta_estimate();
  const std::vector<Matrix> phi = phi_estimate();
  double ll = 0.0;
  const int num_tuples = static_cast<int>(corpus_->tuples.size());
  for (int d = 0; d < num_tuples; ++d) {
    for (int l = 0; l < corpus_->num_languages(); ++l) {
      for (const int w : corpus_->tuples[d].tokens[l]) {
        double p = 0.0;
        for (int k = 0; k < topics_; ++k) p += theta(d, k) * phi[l](k, w);
        ll += std::log(p);
      }
    }
  }
  return ll;
}

PolyTopicModel GibbsSampler::finalize(int iterations, std::uint64_t seed) const {
  PolyTopicModel model;
  model.num_topics = topics_;
  model.num_languages = corpus_->num_languages();
  model.alpha = alpha_;
  model.beta = beta_;
  model.languages = corpus_->languages;
  model.vocab_sizes = corpus_->vocab_sizes;
  model.phi = phi_estimate();
  model.theta = theta_estimate();
  model.product_ids.reserve(corpus_->tuples.size());
  for (const auto& t : corpus_->tuples) model.product_ids.push_back(t.product_id);
  model.iterations = iterations;
  model.seed = seed;
  return model;
}

PolyTopicModel train(const TupleCorpus& corpus, const TrainConfig& config) {
  if (config.iterations < 1) {
    throw std::invalid_argument("iterations must be >= 1");
  }
  if (config.topics < 1) throw std::invalid_argument("topic count must be >= 1");
  if (config.alpha_sum <= 0.0) {
    throw std::invalid_argument("alpha_sum must be positive");
  }
  if (corpus.tuples.empty() || corpus.total_tokens() == 0) {
    throw std::invalid_argument("empty corpus");
  }
  Vector alpha = Vector::Constant(config.topics, config.alpha_sum / config.topics);
  GibbsSampler sampler(corpus, config.topics, alpha, config.beta, config.seed);
  for (int it = 0; it < config.iterations; ++it) sampler.sweep();
  return sampler.finalize(config.iterations, config.seed);
}

Vector infer_theta(const PolyTopicModel& model,
                   const std::vector<std::vector<int>>& tokens, int sweeps,
                   std::uint64_t seed) {
  if (static_cast<int>(tokens.size()) > model.num_languages) {
    throw std::invalid_argument("more languages than the model defines");
  }
  const int K = model.num_topics;
  const double alpha_sum = model.alpha.sum();

  // In-vocabulary tokens only, flattened to (language, word) pairs.
  std::vector<std::pair<int, int>> words;
  for (int l = 0; l < static_cast<int>(tokens.size()); ++l) {
    for (const int w : tokens[l]) {
      if (w >= 0 && w < model.vocab_sizes[l]) words.emplace_back(l, w);
    }
  }

  Vector counts = Vector::Zero(K);
  if (words.empty()) {
    return model.alpha / alpha_sum;
  }

  Rng rng(seed);
  std::vector<int> z(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    const int k = static_cast<int>(rng.uniform_int(K));
    z[i] = k;
    counts[k] += 1.0;
  }

  std::vector<double> cum(K);
  for (int s = 0; s < sweeps; ++s) {
    for (std::size_t i = 0; i < words.size(); ++i) {
      const auto [l, w] = words[i];
      counts[z[i]] -= 1.0;
      double total = 0.0;
      for (int k = 0; k < K; ++k) {
        total += (counts[k] + model.alpha[k]) * model.phi[l](k, w);
        cum[k] = total;
      }
      const double u = rng.uniform() * total;
      int new_k = K - 1;
      for (int k = 0; k < K; ++k) {
        if (u < cum[k]) {
          new_k = k;
          break;
        }
      }
      z[i] = new_k;
      counts[new_k] += 1.0;
    }
  }

  const double n = static_cast<double>(words.size());
  Vector theta(K);
  for (int k = 0; k < K; ++k) theta[k] = (counts[k] + model.alpha[k]) / (n + alpha_sum);
  return theta;
}

std::vector<std::pair<int, double>> top_words(const PolyTopicModel& model,
                                              int language, int topic, int n) {
  if (language < 0 || language >= model.num_languages) {
    throw std::out_of_range("language index out of range");
  }
  if (topic < 0 || topic >= model.num_topics) {
    throw std::out_of_range("topic index out of range");
  }
  const auto& row = model.phi[language];
  const int v = model.vocab_sizes[language];
  std::vector<std::pair<int, double>> items;
  items.reserve(v);
  for (int w = 0; w < v; ++w) items.emplace_back(w, row(topic, w));
  const int take = std::min(n, v);
  std::partial_sort(items.begin(), items.begin() + take, items.end(),
                    [](const auto& a, const auto& b) {
                      if (a.second != b.second) return a.second > b.second;
                      return a.first < b.first;
                    });
  items.resize(std::max(take, 0));
  return items;
}

}  // namespace assortify::topicmodel
