#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "chl/types.hpp"

namespace chl {

struct SvrParams {
  double c = 1.0;
  double epsilon = 0.1;
  /// nullopt selects the "scale" rule: 1 / (6 * mean feature variance).
  std::optional<double> gamma;
  double tol = 1e-3;
  std::uint64_t max_iter = 1'000'000;

  bool operator==(const SvrParams&) const = default;
};

double rbf_kernel(const Reflectances& u, const Reflectances& v, double gamma) noexcept;

/// Solution of the epsilon-insensitive SVR dual over beta_i = alpha_i - alpha_i*.
struct SvrSolution {
  std::vector<double> beta;
  double bias = 0.0;
  bool converged = false;
  std::uint64_t iterations = 0;
  /// Largest KKT violation at exit.
  double violation = 0.0;
};

/// Pairwise coordinate ascent (SMO) on
///   max  sum_i beta_i y_i - eps sum_i |beta_i| - 1/2 beta^T K beta
///   s.t. sum_i beta_i = 0,  -C <= beta_i <= C.
/// Each step takes the maximal-violating pair and maximizes the dual exactly
/// along that pair's feasible direction.
SvrSolution solve_svr_dual(std::span<const Reflectances> x, std::span<const double> y,
                           const SvrParams& params, double gamma);

/// Dual objective value at beta (the quantity the solver maximizes).
double svr_dual_objective(std::span<const Reflectances> x, std::span<const double> y,
                          std::span<const double> beta, double gamma, double epsilon);

}  // namespace chl
