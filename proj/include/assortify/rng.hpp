#pragma once

#include <Eigen/Core>

#include <cassert>
#include <cmath>
#include <cstdint>
#include <random>

namespace assortify {

/// Deterministic random source. The engine is std::mt19937_64 (fully
/// specified by the standard); all variate transforms are implemented here
/// instead of with <random> distribution adaptors, whose algorithms are
/// implementation-defined, so sampled streams are stable across standard
/// libraries and frozen test values stay valid.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * (1.0 / 9007199254740992.0);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer on [0, n). Rejection sampling, no modulo bias.
  std::uint64_t uniform_int(std::uint64_t n) {
    assert(n > 0);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  /// Standard normal via the Marsaglia polar method.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  double lognormal(double mu, double sigma) { return std::exp(normal(mu, sigma)); }

  /// Gamma(shape, 1) via Marsaglia-Tsang, with the standard boost for
  /// shape < 1.
  double gamma(double shape) {
    assert(shape > 0.0);
    if (shape < 1.0) {
      const double u = uniform();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  /// Symmetric Dirichlet draw of dimension `dim`.
  Eigen::VectorXd dirichlet(double concentration, int dim) {
    Eigen::VectorXd out(dim);
    double total = 0.0;
    for (int i = 0; i < dim; ++i) {
      out[i] = gamma(concentration);
      total += out[i];
    }
    if (total <= 0.0) {
      out.setConstant(1.0 / dim);
    } else {
      out /= total;
    }
    return out;
  }

  /// Poisson via Knuth's product-of-uniforms. Adequate for the moderate
  /// means used here.
  int poisson(double mean) {
    assert(mean >= 0.0);
    const double limit = std::exp(-mean);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }

  /// Index draw proportional to non-negative weights.
  int categorical(const Eigen::VectorXd& weights) {
    const double total = weights.sum();
    assert(total > 0.0);
    const double u = uniform() * total;
    double cum = 0.0;
    const int n = static_cast<int>(weights.size());
    for (int i = 0; i < n; ++i) {
      cum += weights[i];
      if (u < cum) return i;
    }
    return n - 1;
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace assortify
