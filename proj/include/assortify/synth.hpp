#pragma once

#include "assortify/assort.hpp"
#include "assortify/corpus_types.hpp"
#include "assortify/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace assortify::synth {

/// Generator knobs. The distribution constants are test-harness choices,
/// recorded alongside the ground truth for reproducibility.
struct GeneratorConfig {
  int n_products = 500;
  int k_true = 10;
  int v_text = 200;
  int v_img = 200;
  std::uint64_t seed = 7;

  double phi_concentration = 0.1;    // Dirichlet prior over words per topic
  double theta_concentration = 0.5;  // Dirichlet prior over topics per product
  double text_length_mean = 50.0;    // Poisson mean, floored at one token
  int visual_draws = 40;             // draws deduplicated into the word set
  double price_median_cents = 30000.0;  // log-normal median
  double price_sigma = 0.7;

  int n_sessions = 2000;
  int n_users = 300;
  double gamma = 5.0;  // co-click weight exp(-gamma * euclidean theta dist)
  int session_min = 2;
  int session_max = 8;
  int purchase_min = 3;
  int purchase_max = 10;
  int window_days = 90;
};

struct GroundTruth {
  int k_true = 0;
  std::vector<std::string> languages;  // {"visual", "text"}
  std::vector<Matrix> phi_true;        // per language: K x V_l
  Matrix theta_true;                   // n_products x K
  std::vector<std::string> product_ids;
  GeneratorConfig config;
};

struct SyntheticCatalog {
  std::vector<Product> products;
  std::vector<corpus::ActivationSummary> activations;
  std::vector<DocumentTuple> documents;  // the intended documents
  GroundTruth truth;
};

/// Samples a catalog with known topic structure. Titles carry the sampled
/// text tokens (zero-padded so lexicographic vocabulary order matches the
/// generator's word ids); activations carry one image per product with a
/// positive response exactly on the visual words present, so a zero-quantile
/// threshold pass reproduces the intended sets.
SyntheticCatalog generate_catalog(const GeneratorConfig& config);

struct Feedback {
  std::vector<ClickSession> sessions;
  std::vector<PurchaseRecord> purchases;
};

/// Samples click sessions and purchase groups around anchor products, with
/// companions drawn without replacement proportional to
/// exp(-gamma * ||theta_a - theta_c||). Purchase timestamps for one user stay
/// inside one window so the chronological chunker keeps the group intact.
Feedback generate_feedback(const GroundTruth& truth, int n_sessions,
                           int n_users, std::uint64_t seed);

/// Exhaustive 0-1 QKP reference. Enumerates every subset of at most 20
/// candidates that satisfies the budget and vertical bounds and returns the
/// maximum-objective one, ties broken by lexicographic member-id list.
assort::Assortment brute_force_qkp(
    const assort::SeedPair& seed,
    const std::vector<assort::Candidate>& candidates,
    const compatibility::CompatibilityMetric& metric, std::int64_t budget_cents,
    const std::vector<assort::VerticalConstraint>& constraints);

/// Greedy one-to-one topic matching by descending cosine similarity averaged
/// across languages; returns the mean cosine over matched pairs. Invariant
/// under topic reordering of either argument.
double matching_score(const std::vector<Matrix>& phi_learned,
                      const std::vector<Matrix>& phi_true);

}  // namespace assortify::synth
