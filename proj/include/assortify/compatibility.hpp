#pragma once

#include "assortify/types.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace assortify::compatibility {

enum class MetricMode { inverse_covariance, covariance, identity };

MetricMode metric_mode_from_string(const std::string& name);
std::string to_string(MetricMode mode);

/// Quadratic-form distance matrix. Symmetric positive semidefinite by
/// construction; see fit_metric.
struct CompatibilityMetric {
  Matrix m;
  MetricMode mode = MetricMode::inverse_covariance;
  double lambda = 0.0;

  int dim() const { return static_cast<int>(m.rows()); }
};

/// L2-normalized sum of topic distributions. Errors on an empty list or an
/// all-zero sum.
Vector aggregate_topic_vector(std::span<const Vector> thetas);

/// Groups purchases per user with greedy chronological chunking (a record
/// more than `window_days` after its group's first record starts a new
/// group), drops records without a topic vector first, keeps groups sized
/// within [min_items, max_items], and aggregates each into a unit vector.
std::vector<Vector> build_purchase_vectors(
    std::vector<PurchaseRecord> purchases,
    const std::map<std::string, Vector>& theta_table, int window_days = 90,
    int min_items = 3, int max_items = 10);

/// Fits the metric from purchase vectors. Sigma is the population covariance
/// of the vectors; inverse_covariance mode gives M = (Sigma + lambda I)^-1,
/// covariance mode M = Sigma + lambda I, identity mode M = I.
CompatibilityMetric fit_metric(std::span<const Vector> vectors, MetricMode mode,
                               double lambda);

/// d_M(x, y) = (x - y)^T M (x - y), clamped to be non-negative. No square
/// root: squared-distance semantics.
double distance(const CompatibilityMetric& metric, const Vector& x,
                const Vector& y);

}  // namespace assortify::compatibility
