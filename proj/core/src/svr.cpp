#include "chl/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <unordered_map>

#include "chl/error.hpp"

namespace chl {

double rbf_kernel(const Reflectances& u, const Reflectances& v, double gamma) noexcept {
  double d2 = 0.0;
  for (std::size_t j = 0; j < kNumBands; ++j) d2 += (u[j] - v[j]) * (u[j] - v[j]);
  return std::exp(-gamma * d2);
}

double svr_dual_objective(std::span<const Reflectances> x, std::span<const double> y,
                          std::span<const double> beta, double gamma, double epsilon) {
  double value = 0.0;
  for (std::size_t i = 0; i < beta.size(); ++i) {
    if (beta[i] == 0.0) continue;
    value += beta[i] * y[i] - epsilon * std::abs(beta[i]);
    double quad = 0.0;
    for (std::size_t j = 0; j < beta.size(); ++j) {
      if (beta[j] != 0.0) quad += beta[j] * rbf_kernel(x[i], x[j], gamma);
    }
    value -= 0.5 * beta[i] * quad;
  }
  return value;
}

namespace {

/// LRU cache of kernel matrix rows.
class KernelRows {
 public:
  KernelRows(std::span<const Reflectances> x, double gamma, std::size_t budget_bytes)
      : x_(x), gamma_(gamma) {
    const std::size_t row_bytes = std::max<std::size_t>(1, x.size() * sizeof(double));
    capacity_ = std::max<std::size_t>(2, budget_bytes / row_bytes);
  }

  const std::vector<double>& row(std::size_t i) {
    if (auto it = index_.find(i); it != index_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second);
      return it->second->second;
    }
    std::vector<double> values;
    if (lru_.size() >= capacity_) {
      values = std::move(lru_.back().second);
      index_.erase(lru_.back().first);
      lru_.pop_back();
    }
    values.resize(x_.size());
    for (std::size_t k = 0; k < x_.size(); ++k) values[k] = rbf_kernel(x_[i], x_[k], gamma_);
    lru_.emplace_front(i, std::move(values));
    index_[i] = lru_.begin();
    return lru_.front().second;
  }

 private:
  std::span<const Reflectances> x_;
  double gamma_;
  std::size_t capacity_;
  std::list<std::pair<std::size_t, std::vector<double>>> lru_;
  std::unordered_map<std::size_t, decltype(lru_)::iterator> index_;
};

constexpr std::size_t kKernelCacheBytes = std::size_t{256} << 20;

// Gain of the dual along beta_i += t, beta_j -= t, relative to t = 0:
//   t (g_i - g_j) - t^2 eta / 2 - eps (|b_i + t| - |b_i| + |b_j - t| - |b_j|)
double pair_gain(double t, double gi, double gj, double eta, double bi, double bj, double eps) {
  return t * (gi - gj) - 0.5 * t * t * eta -
         eps * (std::abs(bi + t) - std::abs(bi) + std::abs(bj - t) - std::abs(bj));
}

// Exact maximizer of pair_gain over [lo, hi]. The gain is concave and
// piecewise quadratic with kinks at t = -b_i and t = b_j.
double best_step(double gi, double gj, double eta, double bi, double bj, double eps, double lo,
                 double hi) {
  std::array<double, 4> cuts{lo, -bi, bj, hi};
  std::sort(cuts.begin(), cuts.end());
  double best_t = 0.0;
  double best_g = 0.0;
  auto consider = [&](double t) {
    t = std::clamp(t, lo, hi);
    const double g = pair_gain(t, gi, gj, eta, bi, bj, eps);
    if (g > best_g) {
      best_g = g;
      best_t = t;
    }
  };
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double a = std::max(cuts[s], lo);
    const double b = std::min(cuts[s + 1], hi);
    if (a > b) continue;
    consider(a);
    consider(b);
    if (eta <= 0.0) continue;
    // Inside the segment the signs of b_i + t and b_j - t are fixed.
    const double mid = 0.5 * (a + b);
    const double si = (bi + mid) > 0.0 ? 1.0 : ((bi + mid) < 0.0 ? -1.0 : 0.0);
    const double sj = (bj - mid) > 0.0 ? 1.0 : ((bj - mid) < 0.0 ? -1.0 : 0.0);
    consider((gi - gj - eps * (si - sj)) / eta);
  }
  return best_t;
}

}  // namespace

SvrSolution solve_svr_dual(std::span<const Reflectances> x, std::span<const double> y,
                           const SvrParams& params, double gamma) {
  if (x.size() != y.size() || x.empty()) throw ArgumentError("SVR needs matching, non-empty x and y");
  if (!(params.c > 0.0)) throw ArgumentError("SVR C must be > 0");
  if (!(params.epsilon >= 0.0)) throw ArgumentError("SVR epsilon must be >= 0");
  if (!(params.tol > 0.0)) throw ArgumentError("SVR tol must be > 0");
  if (!(gamma > 0.0)) throw ArgumentError("SVR gamma must be > 0");

  const std::size_t n = x.size();
  const double c = params.c;
  const double eps = params.epsilon;
  SvrSolution sol;
  sol.beta.assign(n, 0.0);
  // g_k = y_k - sum_l beta_l K_kl
  std::vector<double> g(y.begin(), y.end());
  KernelRows kernel(x, gamma, kKernelCacheBytes);

  // Objective slope for raising beta_k (right derivative) and for lowering
  // it (left derivative). Optimality: max up <= min down.
  auto up = [&](std::size_t k) { return g[k] - (sol.beta[k] >= 0.0 ? eps : -eps); };
  auto down = [&](std::size_t k) { return g[k] - (sol.beta[k] > 0.0 ? eps : -eps); };

  double max_up = 0.0;
  double min_down = 0.0;
  for (;;) {
    std::size_t i = n;
    std::size_t j = n;
    max_up = -std::numeric_limits<double>::infinity();
    min_down = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
      if (sol.beta[k] < c) {
        const double u = up(k);
        if (u > max_up) {
          max_up = u;
          i = k;
        }
      }
      if (sol.beta[k] > -c) {
        const double d = down(k);
        if (d < min_down) {
          min_down = d;
          j = k;
        }
      }
    }
    sol.violation = (i == n || j == n) ? 0.0 : std::max(0.0, max_up - min_down);
    if (sol.violation <= params.tol) {
      sol.converged = true;
      break;
    }
    if (sol.iterations >= params.max_iter) break;

    const std::vector<double>& ki = kernel.row(i);
    const double kii = ki[i];
    const double kij = ki[j];
    const double kjj = kernel.row(j)[j];
    const double eta = std::max(kii + kjj - 2.0 * kij, 1e-12);
    const double lo = std::max(-c - sol.beta[i], sol.beta[j] - c);
    const double hi = std::min(c - sol.beta[i], sol.beta[j] + c);
    double t = best_step(g[i], g[j], eta, sol.beta[i], sol.beta[j], eps, lo, hi);
    ++sol.iterations;
    if (t == 0.0) {
      // No progress along the steepest pair; the remaining violation is
      // below floating resolution.
      sol.converged = true;
      break;
    }
    sol.beta[i] += t;
    sol.beta[j] -= t;
    // Snap values that land on the box within rounding.
    for (std::size_t k : {i, j}) {
      if (std::abs(sol.beta[k] - c) <= 1e-12 * c) sol.beta[k] = c;
      if (std::abs(sol.beta[k] + c) <= 1e-12 * c) sol.beta[k] = -c;
    }
    const std::vector<double>& row_i = kernel.row(i);
    const std::vector<double>& row_j = kernel.row(j);
    for (std::size_t k = 0; k < n; ++k) g[k] -= t * (row_i[k] - row_j[k]);
  }

  // Bias: average over free coefficients, else the midpoint of the
  // feasible interval [max_up, min_down].
  double sum = 0.0;
  std::size_t free = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double b = sol.beta[k];
    if (b != 0.0 && b > -c && b < c) {
      sum += g[k] - (b > 0.0 ? eps : -eps);
      ++free;
    }
  }
  if (free > 0) {
    sol.bias = sum / static_cast<double>(free);
  } else if (std::isfinite(max_up) && std::isfinite(min_down)) {
    sol.bias = 0.5 * (max_up + min_down);
  } else {
    sol.bias = std::isfinite(max_up) ? max_up : min_down;
  }
  return sol;
}

}  // namespace chl
