// Copyright 2026 The uccmc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Limited-memory BFGS with a strong-Wolfe line search.

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace uccmc {

struct LbfgsOptions {
  int memory = 10;
  int max_iterations = 10000;
  double grad_tol = 1e-8;  // on the infinity norm
  double c1 = 1e-4;
  double c2 = 0.9;
  int max_line_search = 40;
};

struct LbfgsResult {
  std::vector<double> x;
  double f = 0.0;
  double grad_inf = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::string message;
};

/// f(x, grad) returns the objective and writes the gradient.
using Objective = std::function<double(const std::vector<double>&, std::vector<double>&)>;

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double inf_norm(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

/// Minimiser of the cubic through (a, fa, da) and (b, fb, db), kept inside the
/// central 80% of the bracket.
inline double cubic_step(double a, double fa, double da, double b, double fb, double db) {
  const double lo = std::min(a, b), hi = std::max(a, b), w = hi - lo;
  const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - da * db;
  double x = 0.5 * (a + b);
  if (disc >= 0.0) {
    const double d2 = std::copysign(std::sqrt(disc), b - a);
    const double denom = db - da + 2.0 * d2;
    if (denom != 0.0) x = b - (b - a) * (db + d2 - d1) / denom;
  }
  if (!std::isfinite(x)) x = 0.5 * (a + b);
  return std::clamp(x, lo + 0.1 * w, hi - 0.1 * w);
}

struct LinePoint {
  double alpha = 0.0;
  double f = 0.0;
  double d = 0.0;  // directional derivative
  std::vector<double> x, g;
};

}  // namespace detail

inline LbfgsResult lbfgs_minimize(const Objective& fn, std::vector<double> x0, const LbfgsOptions& opt = {}) {
  using detail::dot;
  const std::size_t n = x0.size();
  LbfgsResult res;
  std::vector<double> g(n);
  double f = fn(x0, g);
  res.evaluations = 1;
  std::vector<double> x = std::move(x0);
  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;

  auto finish = [&](bool ok, std::string msg) {
    res.x = x;
    res.f = f;
    res.grad_inf = detail::inf_norm(g);
    res.converged = ok;
    res.message = std::move(msg);
    return res;
  };
  if (n == 0) return finish(true, "no parameters");

  bool steepest = true;
  for (int it = 0;; ++it) {
    res.iterations = it;
    if (detail::inf_norm(g) < opt.grad_tol) return finish(true, "gradient tolerance reached");
    if (it >= opt.max_iterations) return finish(false, "iteration limit reached");

    // Two-loop recursion.
    std::vector<double> q = g;
    std::vector<double> alpha(s_hist.size());
    for (int k = static_cast<int>(s_hist.size()) - 1; k >= 0; --k) {
      alpha[k] = rho_hist[k] * dot(s_hist[k], q);
      for (std::size_t i = 0; i < n; ++i) q[i] -= alpha[k] * y_hist[k][i];
    }
    double gamma = 1.0;
    if (!s_hist.empty()) gamma = dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
    for (auto& v : q) v *= gamma;
    for (std::size_t k = 0; k < s_hist.size(); ++k) {
      const double beta = rho_hist[k] * dot(y_hist[k], q);
      for (std::size_t i = 0; i < n; ++i) q[i] += (alpha[k] - beta) * s_hist[k][i];
    }
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = -q[i];
    double d0 = dot(g, d);
    if (!(d0 < 0.0)) {
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
      d0 = dot(g, d);
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      steepest = true;
    }

    // Strong-Wolfe line search; the approximate-Wolfe test accepts steps whose
    // energy change is below round-off.
    const double f0 = f;
    const double f_slack = 1e-13 * std::max(1.0, std::abs(f0));
    auto eval = [&](double a) {
      detail::LinePoint p;
      p.alpha = a;
      p.x.resize(n);
      for (std::size_t i = 0; i < n; ++i) p.x[i] = x[i] + a * d[i];
      p.g.resize(n);
      p.f = fn(p.x, p.g);
      ++res.evaluations;
      p.d = dot(p.g, d);
      return p;
    };
    auto armijo = [&](const detail::LinePoint& p) { return p.f <= f0 + opt.c1 * p.alpha * d0; };
    auto curvature = [&](const detail::LinePoint& p) { return std::abs(p.d) <= -opt.c2 * d0; };
    auto approx_wolfe = [&](const detail::LinePoint& p) {
      return p.f <= f0 + f_slack && p.d >= opt.c2 * d0 && p.d <= -0.8 * d0;
    };
    auto acceptable = [&](const detail::LinePoint& p) { return (armijo(p) && curvature(p)) || approx_wolfe(p); };

    double a1 = 1.0;
    if (steepest && s_hist.empty()) a1 = std::min(1.0, 1.0 / std::max(detail::inf_norm(g), 1e-300));
    detail::LinePoint prev{0.0, f0, d0, x, g};
    detail::LinePoint accepted;
    bool found = false;
    int budget = opt.max_line_search;

    auto zoom = [&](detail::LinePoint lo, detail::LinePoint hi) {
      while (budget-- > 0) {
        const double a = detail::cubic_step(lo.alpha, lo.f, lo.d, hi.alpha, hi.f, hi.d);
        auto p = eval(a);
        if (acceptable(p)) {
          accepted = std::move(p);
          return true;
        }
        if (!armijo(p) || p.f >= lo.f) {
          hi = std::move(p);
        } else {
          if (p.d * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
          lo = std::move(p);
        }
        if (std::abs(hi.alpha - lo.alpha) < 1e-16 * std::max(1.0, lo.alpha)) break;
      }
      // Fall back to the best decreasing point seen in the bracket.
      if (lo.alpha > 0.0 && lo.f < f0) {
        accepted = std::move(lo);
        return true;
      }
      return false;
    };

    double a = a1;
    for (int i = 0; budget-- > 0; ++i) {
      auto p = eval(a);
      if (acceptable(p)) {
        accepted = std::move(p);
        found = true;
        break;
      }
      if (!armijo(p) || (i > 0 && p.f >= prev.f)) {
        found = zoom(prev, std::move(p));
        break;
      }
      if (p.d >= 0.0) {
        found = zoom(std::move(p), prev);
        break;
      }
      prev = std::move(p);
      a *= 2.0;
    }

    if (!found) {
      if (steepest) return finish(false, "line search failed along steepest descent");
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      steepest = true;
      continue;
    }
    steepest = false;

    std::vector<double> s(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = accepted.x[i] - x[i];
      y[i] = accepted.g[i] - g[i];
    }
    const double sy = dot(s, y);
    x = std::move(accepted.x);
    g = std::move(accepted.g);
    f = accepted.f;
    if (sy > 1e-16 * std::sqrt(dot(s, s) * dot(y, y))) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > opt.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
  }
}

}  // namespace uccmc
