#include "assortify/compatibility.hpp"

#include "assortify/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

namespace {

using namespace assortify;
namespace compat = assortify::compatibility;

Vector vec(std::vector<double> values) {
  Vector v(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) v[static_cast<Eigen::Index>(i)] = values[i];
  return v;
}

Vector random_simplex(Rng& rng, int dim) {
  return rng.dirichlet(0.5, dim);
}

}  // namespace

TEST_SUITE("compatibility") {

TEST_CASE("aggregation normalizes the sum to unit length") {
  const Vector e1 = vec({1.0, 0.0, 0.0});
  const Vector e2 = vec({0.0, 1.0, 0.0});

  std::vector<Vector> one = {e1};
  CHECK(compat::aggregate_topic_vector(one).isApprox(e1));

  std::vector<Vector> mix = {e1, e1, e2};
  const Vector agg = compat::aggregate_topic_vector(mix);
  const double inv = 1.0 / std::sqrt(5.0);
  CHECK(agg.isApprox(vec({2.0 * inv, 1.0 * inv, 0.0})));
  CHECK(agg.norm() == doctest::Approx(1.0));
}

TEST_CASE("aggregation is order-invariant") {
  Rng rng(3);
  std::vector<Vector> thetas;
  for (int i = 0; i < 6; ++i) thetas.push_back(random_simplex(rng, 5));
  const Vector forward = compat::aggregate_topic_vector(thetas);
  std::reverse(thetas.begin(), thetas.end());
  const Vector backward = compat::aggregate_topic_vector(thetas);
  CHECK(forward.isApprox(backward, 1e-12));
}

TEST_CASE("aggregation rejects empty and zero input") {
  CHECK_THROWS_AS(compat::aggregate_topic_vector({}), std::invalid_argument);
  std::vector<Vector> zeros = {vec({0.0, 0.0})};
  CHECK_THROWS_AS(compat::aggregate_topic_vector(zeros), std::invalid_argument);
  std::vector<Vector> ragged = {vec({1.0, 0.0}), vec({1.0})};
  CHECK_THROWS_AS(compat::aggregate_topic_vector(ragged), std::invalid_argument);
}

TEST_CASE("purchase groups respect the size window") {
  std::map<std::string, Vector> thetas;
  thetas["x"] = vec({1.0, 0.0});

  auto purchase = [](std::string user, std::int64_t ts) {
    return PurchaseRecord{std::move(user), "x", ts};
  };

  SUBCASE("too few records yields nothing") {
    std::vector<PurchaseRecord> p = {purchase("u1", 0), purchase("u1", 10)};
    CHECK(compat::build_purchase_vectors(p, thetas, 90, 3, 10).empty());
  }
  SUBCASE("too many records in one window yields nothing") {
    std::vector<PurchaseRecord> p;
    for (int i = 0; i < 11; ++i) p.push_back(purchase("u1", i));
    CHECK(compat::build_purchase_vectors(p, thetas, 90, 3, 10).empty());
  }
  SUBCASE("a window-splitting gap produces one valid group") {
    // Days 0, 10 land in the first window; day 200 starts a new group of 1.
    std::vector<PurchaseRecord> p = {purchase("u1", 0),
                                     purchase("u1", 10 * 86400),
                                     purchase("u1", 200 * 86400)};
    const auto vectors = compat::build_purchase_vectors(p, thetas, 90, 2, 10);
    REQUIRE(vectors.size() == 1);
    CHECK(vectors[0].isApprox(vec({1.0, 0.0})));
  }
}

TEST_CASE("window boundary is inclusive") {
  std::map<std::string, Vector> thetas;
  thetas["x"] = vec({1.0, 0.0});
  const std::int64_t window = 90LL * 86400;

  std::vector<PurchaseRecord> same = {{"u1", "x", 0}, {"u1", "x", window}};
  CHECK(compat::build_purchase_vectors(same, thetas, 90, 2, 10).size() == 1);

  std::vector<PurchaseRecord> split = {{"u1", "x", 0}, {"u1", "x", window + 1}};
  // Each singleton group fails min_items = 2.
  CHECK(compat::build_purchase_vectors(split, thetas, 90, 2, 10).empty());
}

TEST_CASE("records without a topic vector are dropped before grouping") {
  std::map<std::string, Vector> thetas;
  thetas["known"] = vec({0.0, 1.0});
  std::vector<PurchaseRecord> p = {{"u1", "known", 0},
                                   {"u1", "unknown", 1},
                                   {"u1", "known", 2}};
  const auto vectors = compat::build_purchase_vectors(p, thetas, 90, 2, 10);
  REQUIRE(vectors.size() == 1);
  CHECK(vectors[0].isApprox(vec({0.0, 1.0})));
  // With min_items = 3 the surviving pair is too small.
  CHECK(compat::build_purchase_vectors(p, thetas, 90, 3, 10).empty());
}

TEST_CASE("users are grouped independently") {
  std::map<std::string, Vector> thetas;
  thetas["x"] = vec({1.0, 0.0});
  std::vector<PurchaseRecord> p = {
      {"u2", "x", 5}, {"u1", "x", 0}, {"u1", "x", 1}, {"u2", "x", 6}};
  CHECK(compat::build_purchase_vectors(p, thetas, 90, 2, 10).size() == 2);
}

TEST_CASE("identity-covariance vectors at lambda zero give the identity metric") {
  const double r = std::sqrt(2.0);
  std::vector<Vector> vs = {vec({r, 0.0}), vec({-r, 0.0}), vec({0.0, r}),
                            vec({0.0, -r})};
  // Population covariance: mean 0, diag(2*2/4, 2*2/4) = I.
  const auto metric =
      compat::fit_metric(vs, compat::MetricMode::inverse_covariance, 0.0);
  CHECK(metric.m.isApprox(Matrix::Identity(2, 2), 1e-9));
}

TEST_CASE("hand-computed inverse covariance with regularization") {
  // Points (1,0), (-1,0), (0,0): mean 0, population covariance diag(2/3, 0).
  // With lambda = 1/3: Sigma + lambda I = diag(1, 1/3), inverse diag(1, 3).
  std::vector<Vector> vs = {vec({1.0, 0.0}), vec({-1.0, 0.0}), vec({0.0, 0.0})};
  const auto metric =
      compat::fit_metric(vs, compat::MetricMode::inverse_covariance, 1.0 / 3.0);
  Matrix expected(2, 2);
  expected << 1.0, 0.0, 0.0, 3.0;
  CHECK((metric.m - expected).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(metric.lambda == doctest::Approx(1.0 / 3.0));
  CHECK(metric.mode == compat::MetricMode::inverse_covariance);
}

TEST_CASE("covariance mode returns the regularized covariance itself") {
  std::vector<Vector> vs = {vec({1.0, 0.0}), vec({-1.0, 0.0}), vec({0.0, 0.0})};
  const auto metric = compat::fit_metric(vs, compat::MetricMode::covariance, 0.25);
  Matrix expected(2, 2);
  expected << 2.0 / 3.0 + 0.25, 0.0, 0.0, 0.25;
  CHECK((metric.m - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("identity mode is squared euclidean distance") {
  std::vector<Vector> vs = {vec({0.3, 0.7})};
  const auto metric = compat::fit_metric(vs, compat::MetricMode::identity, 0.0);
  CHECK(metric.m.isApprox(Matrix::Identity(2, 2)));
  const Vector x = vec({1.0, 2.0});
  const Vector y = vec({4.0, 6.0});
  CHECK(compat::distance(metric, x, y) == doctest::Approx(25.0));
}

TEST_CASE("fit_metric input validation") {
  std::vector<Vector> one = {vec({1.0, 0.0})};
  CHECK_THROWS_AS(
      compat::fit_metric(one, compat::MetricMode::inverse_covariance, 0.1),
      std::invalid_argument);
  CHECK_THROWS_AS(compat::fit_metric({}, compat::MetricMode::identity, 0.0),
                  std::invalid_argument);
  std::vector<Vector> vs = {vec({1.0, 0.0}), vec({0.0, 1.0})};
  CHECK_THROWS_AS(
      compat::fit_metric(vs, compat::MetricMode::inverse_covariance, -1.0),
      std::invalid_argument);
}

TEST_CASE("a singular covariance without regularization is rejected") {
  // All mass on the first axis: second eigenvalue is exactly zero.
  std::vector<Vector> vs = {vec({1.0, 0.0}), vec({-1.0, 0.0})};
  CHECK_THROWS_WITH_AS(
      compat::fit_metric(vs, compat::MetricMode::inverse_covariance, 0.0),
      "singular covariance; increase lambda", std::runtime_error);
  // A positive lambda repairs it.
  CHECK_NOTHROW(
      compat::fit_metric(vs, compat::MetricMode::inverse_covariance, 0.1));
}

TEST_CASE("fitted metrics are symmetric and positive definite on random data") {
  Rng rng(17);
  const int dim = 6;
  std::vector<Vector> vs;
  for (int i = 0; i < 40; ++i) vs.push_back(random_simplex(rng, dim));
  const auto metric =
      compat::fit_metric(vs, compat::MetricMode::inverse_covariance, 1e-3);

  CHECK((metric.m - metric.m.transpose()).cwiseAbs().maxCoeff() <= 1e-9);
  for (int probe = 0; probe < 100; ++probe) {
    Vector z(dim);
    for (int c = 0; c < dim; ++c) z[c] = rng.normal();
    CHECK(z.dot(metric.m * z) >= 0.0);
  }
}

TEST_CASE("distance axioms") {
  Rng rng(29);
  const int dim = 5;
  std::vector<Vector> vs;
  for (int i = 0; i < 30; ++i) vs.push_back(random_simplex(rng, dim));
  const auto metric =
      compat::fit_metric(vs, compat::MetricMode::inverse_covariance, 1e-2);

  for (int trial = 0; trial < 200; ++trial) {
    const Vector x = random_simplex(rng, dim);
    const Vector y = random_simplex(rng, dim);
    CHECK(compat::distance(metric, x, x) == 0.0);
    CHECK(compat::distance(metric, x, y) ==
          doctest::Approx(compat::distance(metric, y, x)).epsilon(1e-12));
    CHECK(compat::distance(metric, x, y) >= 0.0);
  }
}

TEST_CASE("distance validates dimensions") {
  compat::CompatibilityMetric metric;
  metric.m = Matrix::Identity(3, 3);
  CHECK_THROWS_AS(compat::distance(metric, vec({1.0, 2.0}), vec({1.0, 2.0, 3.0})),
                  std::invalid_argument);
}

TEST_CASE("mode names round-trip") {
  for (const auto mode :
       {compat::MetricMode::inverse_covariance, compat::MetricMode::covariance,
        compat::MetricMode::identity}) {
    CHECK(compat::metric_mode_from_string(compat::to_string(mode)) == mode);
  }
  CHECK_THROWS_AS(compat::metric_mode_from_string("euclidean"),
                  std::invalid_argument);
}

}  // TEST_SUITE
