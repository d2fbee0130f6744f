#include "assortify/assort.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace assortify::assort {

namespace {

using compatibility::CompatibilityMetric;
using compatibility::aggregate_topic_vector;
using compatibility::distance;

Vector seed_vector_of(const SeedPair& seed) {
  const Vector thetas[2] = {seed.first.theta, seed.second.theta};
  return aggregate_topic_vector(thetas);
}

struct Bounds {
  int min_count = 0;
  int max_count = std::numeric_limits<int>::max();
};

std::map<std::string, Bounds> bounds_by_vertical(
    const std::vector<VerticalConstraint>& constraints) {
  std::map<std::string, Bounds> out;
  for (const auto& c : constraints) {
    if (c.min_count < 0 || c.min_count > c.max_count) {
      throw std::invalid_argument("vertical bounds must satisfy 0 <= min <= max");
    }
    out[c.vertical] = Bounds{c.min_count, c.max_count};
  }
  return out;
}

Bounds bounds_for(const std::map<std::string, Bounds>& bounds,
                  const std::string& vertical) {
  const auto it = bounds.find(vertical);
  return it == bounds.end() ? Bounds{} : it->second;
}

void check_candidates(const SeedPair& seed,
                      const std::vector<Candidate>& candidates, int dim) {
  std::set<std::string> ids;
  for (const auto& c : candidates) {
    if (c.id == seed.first.id || c.id == seed.second.id) {
      throw std::invalid_argument("candidates must exclude the seed products");
    }
    if (!ids.insert(c.id).second) {
      throw std::invalid_argument("duplicate candidate id: " + c.id);
    }
    if (c.theta.size() != dim) throw std::invalid_argument("dimension mismatch");
  }
}

/// Pairwise quadratic-form distances via the Gram matrix of T M T^T.
Matrix pairwise_distances(const Matrix& thetas, const CompatibilityMetric& metric) {
  const Matrix gram = thetas * metric.m * thetas.transpose();
  const Vector diag = gram.diagonal();
  Matrix dist = (-2.0 * gram).colwise() + diag;
  dist.rowwise() += diag.transpose();
  return dist.cwiseMax(0.0);
}

std::map<std::string, std::vector<std::string>> seed_members(const SeedPair& seed) {
  std::map<std::string, std::vector<std::string>> members;
  members[seed.first.vertical].push_back(seed.first.id);
  members[seed.second.vertical].push_back(seed.second.id);
  return members;
}

}  // namespace

std::vector<Seed> generate_seeds(
    const std::vector<ClickSession>& sessions,
    const std::map<std::string, std::string>& vertical_of,
    const std::string& vertical_a, const std::string& vertical_b, int top_n) {
  std::map<std::pair<std::string, std::string>, std::int64_t> counts;
  std::vector<std::string> in_a, in_b;
  for (const auto& session : sessions) {
    in_a.clear();
    in_b.clear();
    for (const auto& id : session.product_ids) {
      const auto it = vertical_of.find(id);
      if (it == vertical_of.end()) continue;
      if (it->second == vertical_a) in_a.push_back(id);
      if (it->second == vertical_b) in_b.push_back(id);
    }
    for (const auto& a : in_a) {
      for (const auto& b : in_b) {
        if (a == b) continue;
        if (vertical_a == vertical_b && a > b) continue;  // unordered within one vertical
        counts[{a, b}] += 1;
      }
    }
  }

  std::vector<Seed> seeds;
  seeds.reserve(counts.size());
  for (const auto& [pair, count] : counts) {
    seeds.push_back(Seed{pair.first, pair.second, count});
  }
  std::sort(seeds.begin(), seeds.end(), [](const Seed& x, const Seed& y) {
    if (x.coclick_count != y.coclick_count) return x.coclick_count > y.coclick_count;
    if (x.couch_set != y.couch_set) return x.couch_set < y.couch_set;
    return x.coffee_table < y.coffee_table;
  });
  if (top_n >= 0 && seeds.size() > static_cast<std::size_t>(top_n)) {
    seeds.resize(top_n);
  }
  return seeds;
}

double candidate_score(const Vector& candidate_theta, const Vector& seed_vector,
                       const CompatibilityMetric& metric) {
  return 1.0 / (distance(metric, candidate_theta, seed_vector) + kDistanceEpsilon);
}

double objective_value(std::span<const Candidate> members,
                       const CompatibilityMetric& metric,
                       const Vector& seed_vector) {
  double total = 0.0;
  const std::size_t n = members.size();
  for (std::size_t i = 0; i < n; ++i) {
    total += candidate_score(members[i].theta, seed_vector, metric);
    for (std::size_t j = i + 1; j < n; ++j) {
      total += 1.0 / (distance(metric, members[i].theta, members[j].theta) +
                      kDistanceEpsilon);
    }
  }
  return total;
}

Assortment greedy_qkp(const SeedPair& seed, std::vector<Candidate> candidates,
                      const CompatibilityMetric& metric,
                      std::int64_t budget_cents,
                      const std::vector<VerticalConstraint>& constraints,
                      int max_passes, GreedyTrace* trace) {
  if (budget_cents < 0) throw std::invalid_argument("budget must be >= 0");
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) { return a.id < b.id; });
  check_candidates(seed, candidates, metric.dim());
  const auto bounds = bounds_by_vertical(constraints);
  const Vector seed_vec = seed_vector_of(seed);
  const int n = static_cast<int>(candidates.size());

  Matrix thetas(n, metric.dim());
  for (int i = 0; i < n; ++i) thetas.row(i) = candidates[i].theta.transpose();
  Matrix pair_profit;
  Vector score = Vector::Zero(n);
  if (n > 0) {
    pair_profit =
        (pairwise_distances(thetas, metric).array() + kDistanceEpsilon).inverse();
    for (int i = 0; i < n; ++i) {
      score[i] = candidate_score(candidates[i].theta, seed_vec, metric);
    }
  }

  // Ratio of total compatibility potential (seed score plus all pairwise
  // profits) to price.
  std::vector<int> order(n);
  Vector ratio = Vector::Zero(n);
  for (int i = 0; i < n; ++i) {
    double potential = score[i] + pair_profit.row(i).sum() - pair_profit(i, i);
    ratio[i] = potential / static_cast<double>(std::max<std::int64_t>(
                               candidates[i].price_cents, 1));
    order[i] = i;
  }
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (ratio[a] != ratio[b]) return ratio[a] > ratio[b];
    return candidates[a].id < candidates[b].id;
  });

  std::vector<bool> selected(n, false);
  std::map<std::string, int> counts;
  std::int64_t cost = 0;
  bool bounds_feasible = true;

  auto can_add = [&](int i) {
    const Bounds b = bounds_for(bounds, candidates[i].vertical);
    return !selected[i] && cost + candidates[i].price_cents <= budget_cents &&
           counts[candidates[i].vertical] < b.max_count;
  };
  auto add = [&](int i) {
    selected[i] = true;
    cost += candidates[i].price_cents;
    counts[candidates[i].vertical] += 1;
  };

  // Satisfy minimum bounds first, best ratio per deficient vertical.
  for (const auto& c : constraints) {
    while (counts[c.vertical] < c.min_count) {
      int pick = -1;
      for (const int i : order) {
        if (candidates[i].vertical == c.vertical && can_add(i)) {
          pick = i;
          break;
        }
      }
      if (pick < 0) {
        bounds_feasible = false;
        break;
      }
      add(pick);
    }
  }
  // Then fill by descending ratio while the budget and max bounds permit.
  for (const int i : order) {
    if (can_add(i)) add(i);
  }

  auto selected_members = [&]() {
    std::vector<Candidate> members;
    for (int i = 0; i < n; ++i) {
      if (selected[i]) members.push_back(candidates[i]);
    }
    return members;
  };
  auto record = [&](double objective) {
    if (trace == nullptr) return;
    GreedyState state;
    state.objective = objective;
    state.cost_cents = cost;
    for (int i = 0; i < n; ++i) {
      if (selected[i]) state.member_ids.push_back(candidates[i].id);
    }
    trace->accepted.push_back(std::move(state));
  };

  double objective = objective_value(selected_members(), metric, seed_vec);
  record(objective);

  int passes = 0;
  for (; passes < max_passes; ++passes) {
    double best_delta = 0.0;
    int best_out = -1, best_in = -1;
    for (int out = 0; out < n; ++out) {
      if (!selected[out]) continue;
      const Bounds out_b = bounds_for(bounds, candidates[out].vertical);
      for (int in = 0; in < n; ++in) {
        if (selected[in]) continue;
        if (cost - candidates[out].price_cents + candidates[in].price_cents >
            budget_cents) {
          continue;
        }
        if (candidates[in].vertical != candidates[out].vertical) {
          const Bounds in_b = bounds_for(bounds, candidates[in].vertical);
          if (counts[candidates[out].vertical] - 1 < out_b.min_count) continue;
          if (counts[candidates[in].vertical] + 1 > in_b.max_count) continue;
        }
        double delta = score[in] - score[out];
        for (int m = 0; m < n; ++m) {
          if (!selected[m] || m == out) continue;
          delta += pair_profit(in, m) - pair_profit(out, m);
        }
        if (delta > best_delta) {
          best_delta = delta;
          best_out = out;
          best_in = in;
        }
      }
    }
    if (best_out < 0) break;
    selected[best_out] = false;
    selected[best_in] = true;
    cost += candidates[best_in].price_cents - candidates[best_out].price_cents;
    counts[candidates[best_out].vertical] -= 1;
    counts[candidates[best_in].vertical] += 1;
    objective += best_delta;
    record(objective);
  }

  Assortment result;
  result.seed = Seed{seed.first.id, seed.second.id, seed.coclick_count};
  result.solver = "qkp";
  result.members = seed_members(seed);
  for (int i = 0; i < n; ++i) {
    if (selected[i]) result.members[candidates[i].vertical].push_back(candidates[i].id);
  }
  result.objective = objective_value(selected_members(), metric, seed_vec);
  result.total_cost_cents = cost + seed.first.price_cents + seed.second.price_cents;
  result.budget_feasible = cost <= budget_cents;
  result.bounds_feasible = bounds_feasible;
  result.iterations = passes;
  result.converged = passes < max_passes;
  return result;
}

Assortment generate_assortment(const SeedPair& seed,
                               const std::vector<Candidate>& candidates,
                               const CompatibilityMetric& metric,
                               const std::vector<VerticalConstraint>& constraints,
                               double epsilon, int max_iters) {
  check_candidates(seed, candidates, metric.dim());
  const Vector seed_vec = seed_vector_of(seed);
  const Vector zero = Vector::Zero(metric.dim());

  // Non-seed verticals in declared order; seed verticals never iterate.
  std::vector<const VerticalConstraint*> verticals;
  for (const auto& c : constraints) {
    if (c.vertical == seed.first.vertical || c.vertical == seed.second.vertical) {
      continue;
    }
    if (c.target_size < 0) throw std::invalid_argument("target size must be >= 0");
    verticals.push_back(&c);
  }

  std::map<std::string, std::vector<const Candidate*>> pool;
  for (const auto& c : candidates) pool[c.vertical].push_back(&c);
  for (auto& [vertical, list] : pool) {
    std::sort(list.begin(), list.end(),
              [](const Candidate* a, const Candidate* b) { return a->id < b->id; });
  }

  auto aggregate_or_zero = [&](const std::vector<const Candidate*>& set) {
    if (set.empty()) return zero;
    std::vector<Vector> thetas;
    thetas.reserve(set.size());
    for (const auto* c : set) thetas.push_back(c->theta);
    return aggregate_topic_vector(thetas);
  };

  std::map<std::string, std::vector<const Candidate*>> prev;
  for (const auto* v : verticals) prev[v->vertical] = {};

  bool converged = false;
  bool bounds_feasible = true;
  int sweeps = 0;
  while (sweeps < max_iters) {
    double delta = 0.0;
    std::map<std::string, std::vector<const Candidate*>> next;
    for (const auto* v : verticals) {
      // Aggregate over every other vertical's previous-state set, seed
      // products included.
      std::vector<Vector> context = {seed.first.theta, seed.second.theta};
      for (const auto* other : verticals) {
        if (other == v) continue;
        for (const auto* c : prev[other->vertical]) context.push_back(c->theta);
      }
      const Vector target = aggregate_topic_vector(context);

      auto& chosen = next[v->vertical];
      const auto pool_it = pool.find(v->vertical);
      if (pool_it != pool.end()) {
        std::vector<std::pair<double, const Candidate*>> ranked;
        ranked.reserve(pool_it->second.size());
        for (const auto* c : pool_it->second) {
          ranked.emplace_back(distance(metric, c->theta, target), c);
        }
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const auto& a, const auto& b) {
                           if (a.first != b.first) return a.first < b.first;
                           return a.second->id < b.second->id;
                         });
        const int take =
            std::min<int>(v->target_size, static_cast<int>(ranked.size()));
        for (int i = 0; i < take; ++i) chosen.push_back(ranked[i].second);
      }
      if (static_cast<int>(chosen.size()) < v->target_size) bounds_feasible = false;

      delta += distance(metric, aggregate_or_zero(chosen),
                        aggregate_or_zero(prev[v->vertical]));
    }
    prev = std::move(next);
    ++sweeps;
    if (delta < epsilon) {
      converged = true;
      break;
    }
  }

  Assortment result;
  result.seed = Seed{seed.first.id, seed.second.id, seed.coclick_count};
  result.solver = "vertical_iter";
  result.members = seed_members(seed);
  std::vector<Candidate> non_seed;
  std::int64_t cost = seed.first.price_cents + seed.second.price_cents;
  for (const auto* v : verticals) {
    auto& ids = result.members[v->vertical];
    for (const auto* c : prev[v->vertical]) {
      ids.push_back(c->id);
      non_seed.push_back(*c);
      cost += c->price_cents;
    }
  }
  result.objective = objective_value(non_seed, metric, seed_vec);
  result.total_cost_cents = cost;
  result.budget_feasible = true;  // budget-relaxed by construction
  result.bounds_feasible = bounds_feasible;
  result.iterations = sweeps;
  result.converged = converged;
  return result;
}

}  // namespace assortify::assort
