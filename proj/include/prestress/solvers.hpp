#pragma once

/**
 * \file solvers.hpp
 * \brief Small fixed-size nonlinear solvers: damped Newton-Raphson with a
 * finite-difference Jacobian, Nelder-Mead, and golden-section search.
 */

#include <prestress/errors.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace prestress {

template <std::size_t N>
using VecN = std::array<double, N>;

template <std::size_t N>
double inf_norm(const VecN<N>& v) noexcept {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// Solves A x = b by Gaussian elimination with partial pivoting.
template <std::size_t N>
VecN<N> solve_dense(std::array<VecN<N>, N> a, VecN<N> b) {
  for (std::size_t k = 0; k < N; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < N; ++i)
      if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
    if (!(std::abs(a[piv][k]) > 0.0) || !std::isfinite(a[piv][k]))
      throw NumericalError("singular Jacobian");
    std::swap(a[k], a[piv]);
    std::swap(b[k], b[piv]);
    for (std::size_t i = k + 1; i < N; ++i) {
      const double m = a[i][k] / a[k][k];
      for (std::size_t j = k; j < N; ++j) a[i][j] -= m * a[k][j];
      b[i] -= m * b[k];
    }
  }
  VecN<N> x{};
  for (std::size_t i = N; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < N; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

struct NewtonOptions {
  double tol = 1e-10;          ///< on the residual inf-norm
  int max_iter = 50;
  double fd_rel_step = 1e-7;   ///< forward-difference Jacobian step
  int max_halvings = 8;
};

template <std::size_t N>
struct NewtonReport {
  VecN<N> x{};
  VecN<N> residual{};
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;  ///< residual inf-norm per iterate, starting at x0
};

/// Damped Newton-Raphson. The residual callable may throw DomainError for
/// inadmissible iterates; the line search treats that as a rejected step.
template <std::size_t N, class Residual>
NewtonReport<N> newton_solve(Residual&& residual, VecN<N> x0, const NewtonOptions& opt = {}) {
  NewtonReport<N> rep;
  rep.x = x0;
  rep.residual = residual(x0);
  double norm = inf_norm(rep.residual);
  rep.history.push_back(norm);

  for (int it = 0; it < opt.max_iter; ++it) {
    if (norm < opt.tol) {
      rep.converged = true;
      return rep;
    }
    std::array<VecN<N>, N> jac{};
    for (std::size_t j = 0; j < N; ++j) {
      VecN<N> xp = rep.x;
      double h = opt.fd_rel_step * std::max(std::abs(rep.x[j]), 1.0);
      xp[j] += h;
      VecN<N> rp;
      try {
        rp = residual(xp);
      } catch (const DomainError&) {
        h = -h;  // at the edge of the admissible region; difference backwards
        xp[j] = rep.x[j] + h;
        rp = residual(xp);
      }
      for (std::size_t i = 0; i < N; ++i) jac[i][j] = (rp[i] - rep.residual[i]) / h;
    }
    VecN<N> minus_r;
    for (std::size_t i = 0; i < N; ++i) minus_r[i] = -rep.residual[i];
    const VecN<N> dx = solve_dense<N>(jac, minus_r);

    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h <= opt.max_halvings; ++h, t *= 0.5) {
      VecN<N> xt = rep.x;
      for (std::size_t i = 0; i < N; ++i) xt[i] += t * dx[i];
      VecN<N> rt;
      try {
        rt = residual(xt);
      } catch (const DomainError&) {
        continue;
      }
      const double nt = inf_norm(rt);
      if (std::isfinite(nt) && nt < norm) {
        rep.x = xt;
        rep.residual = rt;
        norm = nt;
        accepted = true;
        break;
      }
    }
    rep.iterations = it + 1;
    if (!accepted) break;
    rep.history.push_back(norm);
  }
  rep.converged = norm < opt.tol;
  return rep;
}

struct NelderMeadOptions {
  double simplex_tol = 1e-10;  ///< max vertex distance from the best vertex
  int max_iter = 20000;
  double initial_step = 0.05;  ///< relative
};

template <std::size_t N>
struct MinimizeReport {
  VecN<N> x{};
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Standard Nelder-Mead (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
/// Non-finite values count as +inf.
template <std::size_t N, class Objective>
MinimizeReport<N> nelder_mead(Objective&& fn, VecN<N> x0, const NelderMeadOptions& opt = {}) {
  auto eval = [&](const VecN<N>& x) {
    const double v = fn(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };
  std::array<VecN<N>, N + 1> pts;
  std::array<double, N + 1> val;
  pts[0] = x0;
  for (std::size_t i = 0; i < N; ++i) {
    pts[i + 1] = x0;
    pts[i + 1][i] += opt.initial_step * std::max(std::abs(x0[i]), 1e-3);
  }
  for (std::size_t i = 0; i <= N; ++i) val[i] = eval(pts[i]);

  MinimizeReport<N> rep;
  std::array<std::size_t, N + 1> order;
  for (int it = 0; it < opt.max_iter; ++it) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return val[a] < val[b]; });
    const std::size_t best = order[0], worst = order[N], second = order[N - 1];

    double size = 0.0;
    for (std::size_t i = 0; i <= N; ++i)
      for (std::size_t k = 0; k < N; ++k) size = std::max(size, std::abs(pts[i][k] - pts[best][k]));
    rep.iterations = it;
    if (size < opt.simplex_tol) {
      rep.converged = true;
      break;
    }

    VecN<N> centroid{};
    for (std::size_t i = 0; i <= N; ++i)
      if (i != worst)
        for (std::size_t k = 0; k < N; ++k) centroid[k] += pts[i][k] / N;
    auto along = [&](double t) {
      VecN<N> p;
      for (std::size_t k = 0; k < N; ++k) p[k] = centroid[k] + t * (pts[worst][k] - centroid[k]);
      return p;
    };

    const VecN<N> xr = along(-1.0);
    const double fr = eval(xr);
    if (fr < val[best]) {
      const VecN<N> xe = along(-2.0);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = xe;
        val[worst] = fe;
      } else {
        pts[worst] = xr;
        val[worst] = fr;
      }
      continue;
    }
    if (fr < val[second]) {
      pts[worst] = xr;
      val[worst] = fr;
      continue;
    }
    const bool outside = fr < val[worst];
    const VecN<N> xc = along(outside ? -0.5 : 0.5);
    const double fc = eval(xc);
    if (fc < (outside ? fr : val[worst])) {
      pts[worst] = xc;
      val[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= N; ++i) {
      if (i == best) continue;
      for (std::size_t k = 0; k < N; ++k) pts[i][k] = pts[best][k] + 0.5 * (pts[i][k] - pts[best][k]);
      val[i] = eval(pts[i]);
    }
  }
  const auto best_it = std::min_element(val.begin(), val.end());
  rep.x = pts[static_cast<std::size_t>(best_it - val.begin())];
  rep.value = *best_it;
  return rep;
}

struct ScalarMinimum {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section search for a minimum of a unimodal function on [a, b].
template <class F>
ScalarMinimum golden_section(F&& f, double a, double b, double x_tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > x_tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? ScalarMinimum{c, fc} : ScalarMinimum{d, fd};
}

}  // namespace prestress
