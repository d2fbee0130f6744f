#pragma once

#include "assortify/types.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace assortify::eval {

/// Immutable product -> session-ordinal index built once over the session
/// log; all scoring reads from it.
class SessionIndex {
 public:
  explicit SessionIndex(const std::vector<ClickSession>& sessions);

  std::size_t num_sessions() const { return num_sessions_; }

  /// (|S_a intersect S_b|, |S_a union S_b|) as exact counts.
  std::pair<std::int64_t, std::int64_t> jaccard_counts(
      const std::string& a, const std::string& b) const;

 private:
  std::map<std::string, std::vector<int>> sessions_of_;  // sorted ordinals
  std::size_t num_sessions_ = 0;
};

/// Click Jaccard J(a, b) = |S_a intersect S_b| / |S_a union S_b|, defined as
/// 0 when the union is empty so never-co-visited products do not score as
/// perfectly compatible.
double jaccard(const SessionIndex& index, const std::string& a,
               const std::string& b);

/// Mean pairwise Jaccard over all unordered member pairs except the pair of
/// the two seeds. Errors when the assortment has no non-seed member.
double assortment_jaccard(std::span<const std::string> member_ids,
                          const std::string& seed_a, const std::string& seed_b,
                          const SessionIndex& index);

/// Number of topics holding at least tau of the L1-normalized sum of the
/// member topic vectors; zero-mass topics never count.
int topic_diversity(std::span<const Vector> member_thetas, double tau = 0.02);

struct AssortmentScore {
  std::string seed_a;
  std::string seed_b;
  double jaccard = 0.0;
  int diversity = 0;
};

struct EvalReport {
  double tau = 0.02;
  std::vector<AssortmentScore> assortments;
  double jaccard_mean = 0.0;
  double jaccard_max = 0.0;
  double diversity_mean = 0.0;
  std::map<int, int> diversity_histogram;  // topic count -> assortments
};

EvalReport make_report(std::vector<AssortmentScore> scores, double tau);

}  // namespace assortify::eval
