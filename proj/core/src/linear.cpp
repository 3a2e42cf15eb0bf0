#include <cmath>
#include <string>

#include "chl/error.hpp"
#include "chl/estimators.hpp"
#include "detail.hpp"

namespace chl {

namespace {

using Matrix6 = std::array<std::array<double, kNumBands>, kNumBands>;

// Relative pivot floor of the Cholesky factorization: a column whose
// residual variance after projecting out the preceding columns is below
// this fraction of its own variance is treated as collinear.
constexpr double kPivotFloor = 1e-12;

struct CenteredSystem {
  Matrix6 gram{};   // Xc^T Xc
  Reflectances rhs{};  // Xc^T yc
  Reflectances x_mean{};
  double y_mean = 0.0;
};

CenteredSystem centered_system(const detail::Design& d) {
  CenteredSystem s;
  const auto n = static_cast<double>(d.y.size());
  for (std::size_t i = 0; i < d.y.size(); ++i) {
    for (std::size_t j = 0; j < kNumBands; ++j) s.x_mean[j] += d.x[i][j];
    s.y_mean += d.y[i];
  }
  for (auto& m : s.x_mean) m /= n;
  s.y_mean /= n;
  // A rounded mean of a constant column would leave tiny nonzero residuals.
  for (std::size_t j = 0; j < kNumBands; ++j) {
    bool constant = true;
    for (std::size_t i = 1; i < d.y.size() && constant; ++i) constant = d.x[i][j] == d.x[0][j];
    if (constant && !d.y.empty()) s.x_mean[j] = d.x[0][j];
  }
  for (std::size_t i = 0; i < d.y.size(); ++i) {
    Reflectances xc{};
    for (std::size_t j = 0; j < kNumBands; ++j) xc[j] = d.x[i][j] - s.x_mean[j];
    const double yc = d.y[i] - s.y_mean;
    for (std::size_t j = 0; j < kNumBands; ++j) {
      s.rhs[j] += xc[j] * yc;
      for (std::size_t k = 0; k <= j; ++k) s.gram[j][k] += xc[j] * xc[k];
    }
  }
  for (std::size_t j = 0; j < kNumBands; ++j) {
    for (std::size_t k = j + 1; k < kNumBands; ++k) s.gram[j][k] = s.gram[k][j];
  }
  return s;
}

std::string collinearity_message(const Matrix6& gram, std::size_t col) {
  // Name the preceding feature with the strongest correlation.
  std::string partner = "the intercept";
  double best = -1.0;
  for (std::size_t k = 0; k < col; ++k) {
    const double denom = std::sqrt(gram[col][col] * gram[k][k]);
    if (denom <= 0.0) continue;
    const double r = std::abs(gram[col][k]) / denom;
    if (r > best) {
      best = r;
      partner = feature_name(k);
    }
  }
  if (gram[col][col] <= 0.0) {
    return "singular normal matrix: " + feature_name(col) +
           " is constant (collinear with the intercept)";
  }
  return "singular normal matrix: " + feature_name(col) + " is collinear with " + partner +
         (col > 0 ? " and the preceding features" : "");
}

// Solves A w = b for symmetric positive definite A by Cholesky, followed by
// one step of iterative refinement.
Reflectances solve_spd(const Matrix6& a, const Reflectances& b, const Matrix6& gram_for_errors) {
  Matrix6 l{};
  for (std::size_t j = 0; j < kNumBands; ++j) {
    double d = a[j][j];
    for (std::size_t k = 0; k < j; ++k) d -= l[j][k] * l[j][k];
    if (!(d > kPivotFloor * a[j][j]) || !(d > 0.0)) {
      throw RankError(collinearity_message(gram_for_errors, j));
    }
    l[j][j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < kNumBands; ++i) {
      double s = a[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
      l[i][j] = s / l[j][j];
    }
  }
  auto substitute = [&](const Reflectances& rhs) {
    Reflectances z{};
    for (std::size_t i = 0; i < kNumBands; ++i) {
      double s = rhs[i];
      for (std::size_t k = 0; k < i; ++k) s -= l[i][k] * z[k];
      z[i] = s / l[i][i];
    }
    Reflectances w{};
    for (std::size_t ii = kNumBands; ii-- > 0;) {
      double s = z[ii];
      for (std::size_t k = ii + 1; k < kNumBands; ++k) s -= l[k][ii] * w[k];
      w[ii] = s / l[ii][ii];
    }
    return w;
  };
  Reflectances w = substitute(b);
  Reflectances residual{};
  for (std::size_t i = 0; i < kNumBands; ++i) {
    residual[i] = b[i];
    for (std::size_t k = 0; k < kNumBands; ++k) residual[i] -= a[i][k] * w[k];
  }
  const Reflectances dw = substitute(residual);
  for (std::size_t i = 0; i < kNumBands; ++i) w[i] += dw[i];
  return w;
}

FittedModel fit_linear_model(const SampleTable& train, double lambda, TargetSpace target,
                             ModelKind kind) {
  const detail::Design design = detail::make_design(train, target);
  if (design.y.size() < kNumBands + 1) {
    throw ArgumentError("linear fits need at least 7 rows, got " +
                        std::to_string(design.y.size()));
  }
  const CenteredSystem sys = centered_system(design);
  Matrix6 a = sys.gram;
  for (std::size_t j = 0; j < kNumBands; ++j) a[j][j] += lambda;

  LinearPayload p;
  if (kind == ModelKind::linear) {
    // A constant column has a zero diagonal; report it before factorizing.
    for (std::size_t j = 0; j < kNumBands; ++j) {
      if (!(sys.gram[j][j] > 0.0)) throw RankError(collinearity_message(sys.gram, j));
    }
  }
  p.weights = solve_spd(a, sys.rhs, sys.gram);
  p.intercept = sys.y_mean;
  for (std::size_t j = 0; j < kNumBands; ++j) p.intercept -= p.weights[j] * sys.x_mean[j];

  EstimatorSpec spec = EstimatorSpec::defaults(kind);
  spec.target = target;
  if (kind == ModelKind::ridge) spec.lambda = lambda;
  return FittedModel{spec, std::nullopt, p};
}

}  // namespace

FittedModel fit_ols(const SampleTable& train, TargetSpace target) {
  return fit_linear_model(train, 0.0, target, ModelKind::linear);
}

FittedModel fit_ridge(const SampleTable& train, double lambda, TargetSpace target) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ArgumentError("ridge penalty must be finite and >= 0");
  }
  return fit_linear_model(train, lambda, target, ModelKind::ridge);
}

}  // namespace chl
