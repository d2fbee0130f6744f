#include "assortify/compatibility.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <stdexcept>

namespace assortify::compatibility {

MetricMode metric_mode_from_string(const std::string& name) {
  if (name == "inverse_covariance") return MetricMode::inverse_covariance;
  if (name == "covariance") return MetricMode::covariance;
  if (name == "identity") return MetricMode::identity;
  throw std::invalid_argument("unknown metric mode: " + name);
}

std::string to_string(MetricMode mode) {
  switch (mode) {
    case MetricMode::inverse_covariance: return "inverse_covariance";
    case MetricMode::covariance: return "covariance";
    case MetricMode::identity: return "identity";
  }
  return "";
}

Vector aggregate_topic_vector(std::span<const Vector> thetas) {
  if (thetas.empty()) throw std::invalid_argument("empty topic vector list");
  const auto dim = thetas.front().size();
  Vector sum = Vector::Zero(dim);
  for (const auto& t : thetas) {
    if (t.size() != dim) throw std::invalid_argument("dimension mismatch");
    sum += t;
  }
  const double norm = sum.norm();
  if (norm <= 0.0) throw std::invalid_argument("all-zero sum");
  return sum / norm;
}

std::vector<Vector> build_purchase_vectors(
    std::vector<PurchaseRecord> purchases,
    const std::map<std::string, Vector>& theta_table, int window_days,
    int min_items, int max_items) {
  // Records without a topic vector never enter a group.
  std::erase_if(purchases, [&](const PurchaseRecord& r) {
    return theta_table.find(r.product_id) == theta_table.end();
  });
  std::sort(purchases.begin(), purchases.end(),
            [](const PurchaseRecord& a, const PurchaseRecord& b) {
              if (a.user_id != b.user_id) return a.user_id < b.user_id;
              if (a.ts != b.ts) return a.ts < b.ts;
              return a.product_id < b.product_id;
            });

  const std::int64_t window_seconds =
      static_cast<std::int64_t>(window_days) * 86400;
  std::vector<Vector> out;
  std::vector<Vector> group;
  std::int64_t group_start = 0;
  std::string current_user;

  auto flush = [&]() {
    const int n = static_cast<int>(group.size());
    if (n >= min_items && n <= max_items) {
      out.push_back(aggregate_topic_vector(group));
    }
    group.clear();
  };

  for (const auto& r : purchases) {
    const bool new_group = group.empty() || r.user_id != current_user ||
                           r.ts - group_start > window_seconds;
    if (new_group && !group.empty()) flush();
    if (new_group) {
      current_user = r.user_id;
      group_start = r.ts;
    }
    group.push_back(theta_table.at(r.product_id));
  }
  if (!group.empty()) flush();
  return out;
}

CompatibilityMetric fit_metric(std::span<const Vector> vectors, MetricMode mode,
                               double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("lambda must be >= 0");
  if (vectors.empty()) throw std::invalid_argument("no purchase vectors");
  const int dim = static_cast<int>(vectors.front().size());

  CompatibilityMetric metric;
  metric.mode = mode;
  metric.lambda = lambda;

  if (mode == MetricMode::identity) {
    metric.m = Matrix::Identity(dim, dim);
    return metric;
  }

  const int n = static_cast<int>(vectors.size());
  if (n < 2) {
    throw std::invalid_argument("covariance modes need at least 2 vectors");
  }
  Matrix rows(n, dim);
  for (int i = 0; i < n; ++i) {
    if (vectors[i].size() != dim) throw std::invalid_argument("dimension mismatch");
    rows.row(i) = vectors[i].transpose();
  }
  const Vector mean = rows.colwise().mean();
  rows.rowwise() -= mean.transpose();
  Matrix sigma = (rows.transpose() * rows) / static_cast<double>(n);
  sigma += lambda * Matrix::Identity(dim, dim);

  if (mode == MetricMode::covariance) {
    metric.m = 0.5 * (sigma + sigma.transpose());
    return metric;
  }

  Eigen::SelfAdjointEigenSolver<Matrix> solver(sigma);
  const Vector eigs = solver.eigenvalues();
  const double scale = std::max(1.0, eigs.cwiseAbs().maxCoeff());
  if (eigs.minCoeff() <= 1e-12 * scale) {
    throw std::runtime_error("singular covariance; increase lambda");
  }
  Matrix inv = solver.eigenvectors() *
               eigs.cwiseInverse().asDiagonal() *
               solver.eigenvectors().transpose();
  metric.m = 0.5 * (inv + inv.transpose());
  return metric;
}

double distance(const CompatibilityMetric& metric, const Vector& x,
                const Vector& y) {
  if (x.size() != metric.dim() || y.size() != metric.dim()) {
    throw std::invalid_argument("dimension mismatch");
  }
  const Vector diff = x - y;
  const double d = diff.dot(metric.m * diff);
  return d > 0.0 ? d : 0.0;
}

}  // namespace assortify::compatibility
