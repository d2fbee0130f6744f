#include "assortify/synth.hpp"

#include "assortify/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace assortify::synth {

namespace {

const std::vector<std::string>& living_room_verticals() {
  static const std::vector<std::string> kVerticals = {
      "Couch Set",     "Coffee Table", "Accent Table", "Entertainment Center",
      "Bookshelf",     "Ottoman",      "Chair"};
  return kVerticals;
}

std::string padded(const std::string& prefix, int value, int width) {
  std::string digits = std::to_string(value);
  if (static_cast<int>(digits.size()) < width) {
    digits.insert(0, width - digits.size(), '0');
  }
  return prefix + digits;
}

int digits_for(int n) {
  int width = 1;
  for (int v = n - 1; v >= 10; v /= 10) ++width;
  return width;
}

/// Draws `take` distinct indices (anchor excluded) with probability
/// proportional to exp(-gamma * ||theta_anchor - theta_i||).
std::vector<int> draw_companions(const Matrix& theta, int anchor, int take,
                                 double gamma, Rng& rng) {
  const int n = static_cast<int>(theta.rows());
  Vector weights(n);
  for (int i = 0; i < n; ++i) {
    const double d = (theta.row(i) - theta.row(anchor)).norm();
    weights[i] = std::exp(-gamma * d);
  }
  weights[anchor] = 0.0;
  std::vector<int> picked;
  for (int t = 0; t < take; ++t) {
    if (weights.sum() <= 0.0) break;
    const int i = rng.categorical(weights);
    picked.push_back(i);
    weights[i] = 0.0;
  }
  return picked;
}

}  // namespace

SyntheticCatalog generate_catalog(const GeneratorConfig& config) {
  if (config.n_products < 1 || config.k_true < 1 || config.v_text < 1 ||
      config.v_img < 1 || config.visual_draws < 0) {
    throw std::invalid_argument("invalid generator config");
  }

  Rng rng(config.seed);
  const int K = config.k_true;

  SyntheticCatalog out;
  out.truth.k_true = K;
  out.truth.languages = {"visual", "text"};
  out.truth.config = config;

  Matrix phi_visual(K, config.v_img);
  Matrix phi_text(K, config.v_text);
  for (int k = 0; k < K; ++k) {
    phi_visual.row(k) = rng.dirichlet(config.phi_concentration, config.v_img).transpose();
    phi_text.row(k) = rng.dirichlet(config.phi_concentration, config.v_text).transpose();
  }
  out.truth.phi_true = {phi_visual, phi_text};
  out.truth.theta_true = Matrix(config.n_products, K);

  const auto& verticals = living_room_verticals();
  const int id_width = digits_for(config.n_products);
  const int token_width = digits_for(config.v_text);
  const double price_mu = std::log(config.price_median_cents);

  for (int i = 0; i < config.n_products; ++i) {
    const Vector theta = rng.dirichlet(config.theta_concentration, K);
    out.truth.theta_true.row(i) = theta.transpose();

    Product product;
    product.id = padded("p", i, id_width);
    product.vertical = verticals[i % verticals.size()];
    product.price_cents = std::max<std::int64_t>(
        1, std::llround(rng.lognormal(price_mu, config.price_sigma)));
    out.truth.product_ids.push_back(product.id);

    // Text: token count Poisson(mean), floored at one.
    const int text_len = std::max(1, rng.poisson(config.text_length_mean));
    TextDocument text;
    text.tokens.reserve(text_len);
    for (int t = 0; t < text_len; ++t) {
      const int z = rng.categorical(theta);
      const int w = rng.categorical(phi_text.row(z).transpose());
      text.tokens.push_back(w);
      if (t > 0) product.title.push_back(' ');
      product.title += padded("w", w, token_width);
    }

    // Visual: fixed draw count deduplicated to a set.
    std::vector<int> draws;
    draws.reserve(config.visual_draws);
    for (int t = 0; t < config.visual_draws; ++t) {
      const int z = rng.categorical(theta);
      draws.push_back(rng.categorical(phi_visual.row(z).transpose()));
    }
    std::sort(draws.begin(), draws.end());
    draws.erase(std::unique(draws.begin(), draws.end()), draws.end());

    // One image whose response is positive exactly on the present words.
    corpus::ActivationSummary summary;
    summary.product_id = product.id;
    Vector image = Vector::Zero(config.v_img);
    for (const int w : draws) image[w] = rng.uniform(0.5, 1.5);
    summary.images.push_back(std::move(image));

    DocumentTuple tuple;
    tuple.product_id = product.id;
    tuple.visual = VisualDocument{std::move(draws)};
    tuple.text = std::move(text);

    out.products.push_back(std::move(product));
    out.activations.push_back(std::move(summary));
    out.documents.push_back(std::move(tuple));
  }
  return out;
}

Feedback generate_feedback(const GroundTruth& truth, int n_sessions,
                           int n_users, std::uint64_t seed) {
  if (truth.product_ids.empty()) throw std::invalid_argument("empty catalog");
  const auto& config = truth.config;
  Rng rng(seed);
  const int n = static_cast<int>(truth.product_ids.size());

  Feedback feedback;
  const int session_width = digits_for(std::max(n_sessions, 1));
  for (int s = 0; s < n_sessions; ++s) {
    const int anchor = static_cast<int>(rng.uniform_int(n));
    const int size =
        config.session_min +
        static_cast<int>(rng.uniform_int(config.session_max - config.session_min + 1));
    std::vector<int> members = {anchor};
    for (const int i :
         draw_companions(truth.theta_true, anchor, size - 1, config.gamma, rng)) {
      members.push_back(i);
    }
    ClickSession session;
    session.session_id = padded("s", s, session_width);
    for (const int i : members) session.product_ids.push_back(truth.product_ids[i]);
    std::sort(session.product_ids.begin(), session.product_ids.end());
    feedback.sessions.push_back(std::move(session));
  }

  const std::int64_t window_seconds =
      static_cast<std::int64_t>(config.window_days) * 86400;
  const int user_width = digits_for(std::max(n_users, 1));
  for (int u = 0; u < n_users; ++u) {
    const int anchor = static_cast<int>(rng.uniform_int(n));
    const int size =
        config.purchase_min +
        static_cast<int>(rng.uniform_int(config.purchase_max - config.purchase_min + 1));
    std::vector<int> items = {anchor};
    for (const int i :
         draw_companions(truth.theta_true, anchor, size - 1, config.gamma, rng)) {
      items.push_back(i);
    }
    // All of one user's purchases land inside one window.
    const std::int64_t base =
        1'600'000'000 + static_cast<std::int64_t>(u) * 2 * window_seconds;
    for (const int i : items) {
      PurchaseRecord record;
      record.user_id = padded("u", u, user_width);
      record.product_id = truth.product_ids[i];
      record.ts = base + static_cast<std::int64_t>(rng.uniform_int(window_seconds));
      feedback.purchases.push_back(std::move(record));
    }
  }
  return feedback;
}

assort::Assortment brute_force_qkp(
    const assort::SeedPair& seed,
    const std::vector<assort::Candidate>& candidates,
    const compatibility::CompatibilityMetric& metric, std::int64_t budget_cents,
    const std::vector<assort::VerticalConstraint>& constraints) {
  if (candidates.size() > 20) {
    throw std::invalid_argument("refusing to enumerate more than 20 candidates");
  }
  if (budget_cents < 0) throw std::invalid_argument("budget must be >= 0");

  std::vector<assort::Candidate> sorted = candidates;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  const int n = static_cast<int>(sorted.size());

  const Vector thetas[2] = {seed.first.theta, seed.second.theta};
  const Vector seed_vec = compatibility::aggregate_topic_vector(thetas);

  Vector score(n);
  Matrix profit = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    score[i] = assort::candidate_score(sorted[i].theta, seed_vec, metric);
    for (int j = i + 1; j < n; ++j) {
      profit(i, j) =
          1.0 / (compatibility::distance(metric, sorted[i].theta, sorted[j].theta) +
                 assort::kDistanceEpsilon);
    }
  }

  std::map<std::string, std::pair<int, int>> bounds;  // vertical -> (min, max)
  for (const auto& c : constraints) {
    bounds[c.vertical] = {c.min_count, c.max_count};
  }

  bool found = false;
  double best_obj = 0.0;
  std::uint32_t best_mask = 0;
  std::vector<std::string> best_ids;

  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    std::int64_t cost = 0;
    std::map<std::string, int> counts;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        cost += sorted[i].price_cents;
        counts[sorted[i].vertical] += 1;
      }
    }
    if (cost > budget_cents) continue;
    bool ok = true;
    for (const auto& [vertical, b] : bounds) {
      const int c = counts.count(vertical) ? counts.at(vertical) : 0;
      if (c < b.first || c > b.second) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;

    double obj = 0.0;
    for (int i = 0; i < n; ++i) {
      if (!(mask & (1u << i))) continue;
      obj += score[i];
      for (int j = i + 1; j < n; ++j) {
        if (mask & (1u << j)) obj += profit(i, j);
      }
    }

    std::vector<std::string> ids;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) ids.push_back(sorted[i].id);
    }
    if (!found || obj > best_obj || (obj == best_obj && ids < best_ids)) {
      found = true;
      best_obj = obj;
      best_mask = mask;
      best_ids = std::move(ids);
    }
  }

  assort::Assortment result;
  result.seed = assort::Seed{seed.first.id, seed.second.id, seed.coclick_count};
  result.solver = "oracle";
  result.members[seed.first.vertical].push_back(seed.first.id);
  result.members[seed.second.vertical].push_back(seed.second.id);
  result.total_cost_cents = seed.first.price_cents + seed.second.price_cents;
  if (!found) {
    result.objective = 0.0;
    result.bounds_feasible = false;
    return result;
  }
  result.objective = best_obj;
  for (int i = 0; i < n; ++i) {
    if (best_mask & (1u << i)) {
      result.members[sorted[i].vertical].push_back(sorted[i].id);
      result.total_cost_cents += sorted[i].price_cents;
    }
  }
  result.budget_feasible = true;
  result.bounds_feasible = true;
  return result;
}

double matching_score(const std::vector<Matrix>& phi_learned,
                      const std::vector<Matrix>& phi_true) {
  if (phi_learned.size() != phi_true.size() || phi_learned.empty()) {
    throw std::invalid_argument("dimension mismatch: language counts differ");
  }
  const int L = static_cast<int>(phi_learned.size());
  for (int l = 0; l < L; ++l) {
    if (phi_learned[l].cols() != phi_true[l].cols()) {
      throw std::invalid_argument("dimension mismatch: vocabulary sizes differ");
    }
  }
  const int k_learned = static_cast<int>(phi_learned[0].rows());
  const int k_true = static_cast<int>(phi_true[0].rows());
  const int k_use = std::min(k_learned, k_true);
  if (k_use == 0) return 0.0;

  Matrix sim = Matrix::Zero(k_learned, k_true);
  for (int l = 0; l < L; ++l) {
    for (int a = 0; a < k_learned; ++a) {
      for (int b = 0; b < k_true; ++b) {
        const double na = phi_learned[l].row(a).norm();
        const double nb = phi_true[l].row(b).norm();
        const double cos =
            na > 0.0 && nb > 0.0
                ? phi_learned[l].row(a).dot(phi_true[l].row(b)) / (na * nb)
                : 0.0;
        sim(a, b) += cos / L;
      }
    }
  }

  struct Entry {
    double sim;
    int a;
    int b;
  };
  std::vector<Entry> entries;
  entries.reserve(static_cast<std::size_t>(k_learned) * k_true);
  for (int a = 0; a < k_learned; ++a) {
    for (int b = 0; b < k_true; ++b) entries.push_back({sim(a, b), a, b});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
    if (x.sim != y.sim) return x.sim > y.sim;
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
  });

  std::vector<bool> used_a(k_learned, false), used_b(k_true, false);
  double total = 0.0;
  int matched = 0;
  for (const auto& e : entries) {
    if (matched == k_use) break;
    if (used_a[e.a] || used_b[e.b]) continue;
    used_a[e.a] = true;
    used_b[e.b] = true;
    total += e.sim;
    ++matched;
  }
  return total / k_use;
}

}  // namespace assortify::synth
