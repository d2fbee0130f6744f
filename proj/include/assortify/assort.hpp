#pragma once

#include "assortify/compatibility.hpp"
#include "assortify/types.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace assortify::assort {

/// Guards 1/d when two topic vectors coincide; caps a pair profit at 1e6.
inline constexpr double kDistanceEpsilon = 1e-6;

struct VerticalConstraint {
  std::string vertical;
  int min_count = 0;
  int max_count = std::numeric_limits<int>::max();
  int target_size = 1;  // per-vertical fill size for the budget-relaxed solver
};

/// A mined seed pair, named after the two seed verticals' wire fields.
struct Seed {
  std::string couch_set;
  std::string coffee_table;
  std::int64_t coclick_count = 0;
};

struct Candidate {
  std::string id;
  std::string vertical;
  std::int64_t price_cents = 0;
  Vector theta;
};

/// The two fixed seed products an assortment is built around.
struct SeedPair {
  Candidate first;
  Candidate second;
  std::int64_t coclick_count = 0;
};

struct Assortment {
  Seed seed;
  std::map<std::string, std::vector<std::string>> members;  // vertical -> ids
  double objective = 0.0;
  std::int64_t total_cost_cents = 0;  // includes the seed products
  bool budget_feasible = true;
  bool bounds_feasible = true;
  std::string solver;
  int iterations = 0;
  bool converged = true;

  bool feasible() const { return budget_feasible && bounds_feasible; }
};

/// Counts unordered co-clicked (a, b) pairs with a in vertical_a and b in
/// vertical_b across sessions; returns the top_n by count, ties broken by
/// ascending (a id, b id).
std::vector<Seed> generate_seeds(
    const std::vector<ClickSession>& sessions,
    const std::map<std::string, std::string>& vertical_of,
    const std::string& vertical_a, const std::string& vertical_b, int top_n);

/// q = 1 / (d_M(candidate, seed_vector) + kDistanceEpsilon).
double candidate_score(const Vector& candidate_theta, const Vector& seed_vector,
                       const compatibility::CompatibilityMetric& metric);

/// Knapsack objective over the non-seed members: sum of per-member seed
/// scores plus 1/(d + eps) over unordered member pairs, each counted once.
double objective_value(std::span<const Candidate> members,
                       const compatibility::CompatibilityMetric& metric,
                       const Vector& seed_vector);

/// Snapshot of an accepted solver state, for invariant auditing.
struct GreedyState {
  std::vector<std::string> member_ids;  // non-seed, sorted
  double objective = 0.0;
  std::int64_t cost_cents = 0;  // non-seed cost, compared against the budget
};

struct GreedyTrace {
  std::vector<GreedyState> accepted;  // initial state, then one per swap
};

/// Budget-constrained greedy for the 0-1 quadratic knapsack: ratio-ordered
/// initialization (min bounds first), then best-improvement single swaps that
/// preserve feasibility, accepting only strict objective gains, until no
/// improving swap exists or max_passes is hit. The budget excludes the seed
/// cost; candidates must not contain the seed products.
Assortment greedy_qkp(const SeedPair& seed, std::vector<Candidate> candidates,
                      const compatibility::CompatibilityMetric& metric,
                      std::int64_t budget_cents,
                      const std::vector<VerticalConstraint>& constraints,
                      int max_passes = 50, GreedyTrace* trace = nullptr);

/// Budget-relaxed vertical iteration: each sweep refills every non-seed
/// vertical with the target_size candidates nearest the aggregate vector of
/// all other verticals' previous-state sets (seed included), until the
/// accumulated aggregate movement drops below epsilon or max_iters sweeps.
Assortment generate_assortment(const SeedPair& seed,
                               const std::vector<Candidate>& candidates,
                               const compatibility::CompatibilityMetric& metric,
                               const std::vector<VerticalConstraint>& constraints,
                               double epsilon = 1e-4, int max_iters = 20);

}  // namespace assortify::assort
