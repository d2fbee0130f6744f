#include "assortify/eval.hpp"

#include <algorithm>
#include <stdexcept>

namespace assortify::eval {

SessionIndex::SessionIndex(const std::vector<ClickSession>& sessions) {
  num_sessions_ = sessions.size();
  for (std::size_t s = 0; s < sessions.size(); ++s) {
    for (const auto& id : sessions[s].product_ids) {
      sessions_of_[id].push_back(static_cast<int>(s));
    }
  }
  for (auto& [id, ordinals] : sessions_of_) {
    std::sort(ordinals.begin(), ordinals.end());
    ordinals.erase(std::unique(ordinals.begin(), ordinals.end()), ordinals.end());
  }
}

std::pair<std::int64_t, std::int64_t> SessionIndex::jaccard_counts(
    const std::string& a, const std::string& b) const {
  static const std::vector<int> kEmpty;
  const auto ita = sessions_of_.find(a);
  const auto itb = sessions_of_.find(b);
  const auto& sa = ita == sessions_of_.end() ? kEmpty : ita->second;
  const auto& sb = itb == sessions_of_.end() ? kEmpty : itb->second;

  std::int64_t inter = 0;
  std::size_t i = 0, j = 0;
  while (i < sa.size() && j < sb.size()) {
    if (sa[i] == sb[j]) {
      ++inter;
      ++i;
      ++j;
    } else if (sa[i] < sb[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  const std::int64_t uni =
      static_cast<std::int64_t>(sa.size() + sb.size()) - inter;
  return {inter, uni};
}

double jaccard(const SessionIndex& index, const std::string& a,
               const std::string& b) {
  const auto [inter, uni] = index.jaccard_counts(a, b);
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double assortment_jaccard(std::span<const std::string> member_ids,
                          const std::string& seed_a, const std::string& seed_b,
                          const SessionIndex& index) {
  double total = 0.0;
  std::int64_t pairs = 0;
  for (std::size_t i = 0; i < member_ids.size(); ++i) {
    for (std::size_t j = i + 1; j < member_ids.size(); ++j) {
      const bool is_seed_pair =
          (member_ids[i] == seed_a && member_ids[j] == seed_b) ||
          (member_ids[i] == seed_b && member_ids[j] == seed_a);
      if (is_seed_pair) continue;
      total += jaccard(index, member_ids[i], member_ids[j]);
      ++pairs;
    }
  }
  if (pairs == 0) throw std::invalid_argument("degenerate assortment");
  return total / static_cast<double>(pairs);
}

int topic_diversity(std::span<const Vector> member_thetas, double tau) {
  if (member_thetas.empty()) return 0;
  Vector sum = Vector::Zero(member_thetas.front().size());
  for (const auto& t : member_thetas) {
    if (t.size() != sum.size()) throw std::invalid_argument("dimension mismatch");
    sum += t;
  }
  const double mass = sum.lpNorm<1>();
  if (mass <= 0.0) return 0;
  sum /= mass;
  int count = 0;
  for (int k = 0; k < sum.size(); ++k) {
    if (sum[k] > 0.0 && sum[k] >= tau) ++count;
  }
  return count;
}

EvalReport make_report(std::vector<AssortmentScore> scores, double tau) {
  EvalReport report;
  report.tau = tau;
  report.assortments = std::move(scores);
  if (report.assortments.empty()) return report;

  double j_sum = 0.0, d_sum = 0.0;
  for (const auto& s : report.assortments) {
    j_sum += s.jaccard;
    report.jaccard_max = std::max(report.jaccard_max, s.jaccard);
    d_sum += s.diversity;
    report.diversity_histogram[s.diversity] += 1;
  }
  const double n = static_cast<double>(report.assortments.size());
  report.jaccard_mean = j_sum / n;
  report.diversity_mean = d_sum / n;
  return report;
}

}  // namespace assortify::eval
