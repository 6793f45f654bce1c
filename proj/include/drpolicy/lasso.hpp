#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace drpolicy {

// Result of a single lasso solve. Coefficients are reported on the original
// column scale; `predict` adds the intercept back.
struct LassoFit {
  Eigen::VectorXd coef;       // original scale, length m
  double intercept = 0.0;
  double lambda = 0.0;
  Eigen::VectorXd col_mean;   // standardization parameters
  Eigen::VectorXd col_std;    // 1.0 for dropped columns
  std::vector<int> dropped;   // zero-variance columns removed before the solve
  bool converged = true;
  int sweeps = 0;
  std::vector<double> objective_path;  // objective after each full sweep

  double predict(const Eigen::VectorXd& x) const { return intercept + coef.dot(x); }

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const {
    return (x * coef).array() + intercept;
  }
};

struct LassoOptions {
  double tol = 1e-7;       // max coefficient change per sweep, standardized scale
  int max_sweeps = 10000;
  double kkt_tol = 1e-7;   // stationarity slack demanded before declaring convergence
};

// Cyclic coordinate descent for
//   min_{b0, b} (1/2n) ||y - b0 - X b||^2 + lambda ||b||_1
// with columns standardized to mean zero and unit (1/n) variance internally.
// The intercept is never penalized. Zero-variance columns are dropped and
// recorded in the fit.
LassoFit lasso_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                   const LassoOptions& opts = {});

// Warm-started path solve over a decreasing lambda sequence.
std::vector<LassoFit> lasso_path(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                 const std::vector<double>& lambdas,
                                 const LassoOptions& opts = {});

// Smallest penalty with an all-zero solution: max_j |(1/n) X~_j^T (y - ybar)|
// on standardized columns.
double lasso_lambda_max(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

// 50 penalties log-spaced from lambda_max down to 1e-3 * lambda_max.
std::vector<double> default_lambda_grid(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                        int points = 50, double min_ratio = 1e-3);

struct LassoCvOptions {
  int folds = 5;
  LassoOptions solver;
};

// K-fold cross-validated lasso. Selects the lambda minimizing mean
// out-of-fold squared error (ties go to the larger lambda), then refits on
// the full data. Fold assignment is a deterministic function of the seed.
LassoFit lasso_cv_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                      const std::vector<double>& lambda_grid, std::uint64_t seed,
                      const LassoCvOptions& opts = {});

// Convenience overload using the default grid.
LassoFit lasso_cv_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::uint64_t seed,
                      const LassoCvOptions& opts = {});

// Max KKT violation of a fit: used by tests and by the solver's exit check.
double lasso_kkt_gap(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const LassoFit& fit);

}  // namespace drpolicy
