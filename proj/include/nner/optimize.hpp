#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nner/error.hpp"

namespace nner {

/// Objective callback: returns the objective at `w` and fills `grad` with
/// its gradient. Both are in maximization convention.
using ObjectiveFn = std::function<double(std::span<const double>, std::vector<double>&)>;

struct OptimOptions {
  int max_iterations = 200;
  double convergence_tol = 1e-6;  // relative objective change
  int history = 10;               // L-BFGS memory
  double learning_rate = 0.1;     // fixed step for gradient ascent
};

struct OptimResult {
  std::vector<double> weights;
  int iterations = 0;
  double objective = 0.0;
  bool converged = false;
  std::vector<double> trace;  // objective after each accepted step
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline bool relative_change_below(double prev, double cur, double tol) {
  double denom = std::max({1.0, std::fabs(prev), std::fabs(cur)});
  return std::fabs(cur - prev) / denom < tol;
}

// Textbook limited-memory BFGS minimization with backtracking Armijo line
// search. `fn` here is already in minimization convention.
inline OptimResult minimize_lbfgs(const ObjectiveFn& fn, std::vector<double> w,
                                  const OptimOptions& opts) {
  const size_t n = w.size();
  std::vector<double> grad(n, 0.0);
  double f = fn(w, grad);
  if (!std::isfinite(f)) fail(ErrorKind::non_finite_objective, "objective is not finite");

  OptimResult result;
  result.trace.push_back(f);

  std::vector<std::vector<double>> s_hist, y_hist;
  std::vector<double> rho_hist;
  std::vector<double> q(n), w_new(n), grad_new(n), alpha_buf;

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    // Two-loop recursion: q ends up as H * grad.
    q = grad;
    const size_t m = s_hist.size();
    alpha_buf.assign(m, 0.0);
    for (size_t k = m; k-- > 0;) {
      double a = rho_hist[k] * dot(s_hist[k], q);
      alpha_buf[k] = a;
      for (size_t j = 0; j < n; ++j) q[j] -= a * y_hist[k][j];
    }
    if (m > 0) {
      double gamma = dot(s_hist[m - 1], y_hist[m - 1]) / dot(y_hist[m - 1], y_hist[m - 1]);
      for (size_t j = 0; j < n; ++j) q[j] *= gamma;
    }
    for (size_t k = 0; k < m; ++k) {
      double b = rho_hist[k] * dot(y_hist[k], q);
      for (size_t j = 0; j < n; ++j) q[j] += (alpha_buf[k] - b) * s_hist[k][j];
    }

    // Descent direction and directional derivative.
    double slope = -dot(grad, q);  // d = -q
    if (slope >= 0) {
      q = grad;  // fall back to steepest descent
      slope = -dot(grad, grad);
      if (slope == 0) {
        result.converged = true;
        break;
      }
    }

    double step = 1.0;
    if (m == 0) step = 1.0 / std::max(1.0, std::sqrt(dot(grad, grad)));
    const double c1 = 1e-4;
    bool accepted = false;
    double f_new = f;
    for (int trial = 0; trial < 60; ++trial) {
      for (size_t j = 0; j < n; ++j) w_new[j] = w[j] - step * q[j];
      f_new = fn(w_new, grad_new);
      if (std::isfinite(f_new) && f_new <= f + c1 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // line search exhausted; no further progress

    std::vector<double> s(n), y(n);
    for (size_t j = 0; j < n; ++j) {
      s[j] = w_new[j] - w[j];
      y[j] = grad_new[j] - grad[j];
    }
    double sy = dot(s, y);
    if (sy > 1e-12) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > opts.history) {
        s_hist.erase(s_hist.begin());
        y_hist.erase(y_hist.begin());
        rho_hist.erase(rho_hist.begin());
      }
    }

    double f_prev = f;
    w.swap(w_new);
    grad.swap(grad_new);
    f = f_new;
    ++result.iterations;
    result.trace.push_back(f);
    if (relative_change_below(f_prev, f, opts.convergence_tol)) {
      result.converged = true;
      break;
    }
  }

  result.weights = std::move(w);
  result.objective = f;
  return result;
}

}  // namespace detail

/// L-BFGS ascent on a maximization objective.
inline OptimResult maximize_lbfgs(const ObjectiveFn& fn, std::vector<double> w0,
                                  const OptimOptions& opts) {
  ObjectiveFn negated = [&fn](std::span<const double> w, std::vector<double>& grad) {
    double f = fn(w, grad);
    for (double& g : grad) g = -g;
    return -f;
  };
  OptimResult r = detail::minimize_lbfgs(negated, std::move(w0), opts);
  r.objective = -r.objective;
  for (double& t : r.trace) t = -t;
  return r;
}

/// Plain gradient ascent with a fixed step size.
inline OptimResult maximize_gradient_descent(const ObjectiveFn& fn, std::vector<double> w,
                                             const OptimOptions& opts) {
  const size_t n = w.size();
  std::vector<double> grad(n, 0.0);
  double f = fn(w, grad);
  if (!std::isfinite(f)) fail(ErrorKind::non_finite_objective, "objective is not finite");
  OptimResult result;
  result.trace.push_back(f);
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    for (size_t j = 0; j < n; ++j) w[j] += opts.learning_rate * grad[j];
    double f_prev = f;
    f = fn(w, grad);
    if (!std::isfinite(f))
      fail(ErrorKind::non_finite_objective,
           "objective diverged at iteration " + std::to_string(iter + 1));
    ++result.iterations;
    result.trace.push_back(f);
    if (detail::relative_change_below(f_prev, f, opts.convergence_tol)) {
      result.converged = true;
      break;
    }
  }
  result.weights = std::move(w);
  result.objective = f;
  return result;
}

}  // namespace nner
