#pragma once

/**
 * \file quadrature.hpp
 * \brief Gauss-Legendre rules and a refinement-checked panel integrator.
 */

#include <prestress/errors.hpp>

#include <cmath>
#include <deque>
#include <numbers>
#include <string>
#include <vector>

namespace prestress {

/// n-point Gauss-Legendre rule on [-1, 1]. Nodes come from Newton iteration
/// on P_n started at the Chebyshev-like guess cos(pi (i - 1/4) / (n + 1/2)).
class GaussLegendreRule {
 public:
  explicit GaussLegendreRule(int n) : nodes_(n), weights_(n) {
    if (n < 1) throw InvalidInput("Gauss-Legendre rule needs at least one point");
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
      double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1);
        }
        dp = n * (z * p0 - p1) / (z * z - 1.0);
        const double dz = p0 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      nodes_[i] = -z;
      nodes_[n - 1 - i] = z;
      weights_[i] = weights_[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
  }

  int size() const noexcept { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  /// Integral of f over [a, b] split into `panels` equal panels.
  template <class F>
  double integrate(F&& f, double a, double b, int panels = 1) const {
    const double h = (b - a) / panels;
    double sum = 0.0;
    for (int k = 0; k < panels; ++k) {
      const double lo = a + k * h;
      const double half = 0.5 * h;
      const double mid = lo + half;
      double s = 0.0;
      for (std::size_t i = 0; i < nodes_.size(); ++i) s += weights_[i] * f(mid + half * nodes_[i]);
      sum += half * s;
    }
    return sum;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

struct QuadratureOptions {
  int points = 32;
  /// Compare against a two-panel rule and fail when they disagree.
  bool refinement_check = true;
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// Thread-safe cache of the rules the library uses.
inline const GaussLegendreRule& gauss_legendre(int n) {
  static const GaussLegendreRule r32(32);
  static const GaussLegendreRule r64(64);
  if (n == 32) return r32;
  if (n == 64) return r64;
  thread_local std::deque<GaussLegendreRule> extra;
  for (const auto& r : extra)
    if (r.size() == n) return r;
  extra.emplace_back(n);
  return extra.back();
}

/// Integral on [a, b] with a one-refinement check (single panel vs. two
/// panels); returns the refined value.
template <class F>
QuadratureResult integrate_checked(F&& f, double a, double b, const QuadratureOptions& opt = {}) {
  const GaussLegendreRule& rule = gauss_legendre(opt.points);
  QuadratureResult out;
  if (!opt.refinement_check) {
    out.value = rule.integrate(f, a, b, 1);
  } else {
    const double coarse = rule.integrate(f, a, b, 1);
    out.value = rule.integrate(f, a, b, 2);
    out.error_estimate = std::abs(out.value - coarse);
    if (out.error_estimate > opt.abs_tol + opt.rel_tol * std::abs(out.value))
      throw QuadratureFailure("refinement check failed on [" + format_sci(a) + ", " + format_sci(b) +
                              "]: estimate " + format_sci(out.error_estimate));
  }
  if (!std::isfinite(out.value)) throw QuadratureFailure("non-finite integrand");
  return out;
}

}  // namespace prestress
