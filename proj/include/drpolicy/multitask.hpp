#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "drpolicy/types.hpp"

namespace drpolicy {

struct MultiTaskFit {
  Eigen::MatrixXd coef;  // tasks x k; prediction for row i is coef * z_i
  double penalty = 0.0;
  bool converged = true;
  int sweeps = 0;
  std::vector<double> objective_path;
};

struct MultiTaskOptions {
  double tol = 1e-8;
  int max_sweeps = 10000;
};

// Block coordinate descent for the multi-task group lasso (no intercept):
//   min_A (1/2n) sum_i ||y_i - A z_i||^2 + s * sum_j ||A col_j||_2
// grouping, for each context feature j, its coefficients across all tasks.
MultiTaskFit multitask_lasso(const Eigen::MatrixXd& z, const Eigen::MatrixXd& targets,
                             double s_penalty, const MultiTaskOptions& opts = {});

// Smallest penalty with the all-zero solution: max_j ||(1/n) Z_j^T Y||_2.
double multitask_lambda_max(const Eigen::MatrixXd& z, const Eigen::MatrixXd& targets);

// Max violation of the group KKT conditions at A.
double multitask_kkt_gap(const Eigen::MatrixXd& z, const Eigen::MatrixXd& targets,
                         const Eigen::MatrixXd& a, double s_penalty);

// K-fold cross-validated penalty selection over a log-spaced grid
// (lambda_max down to min_ratio * lambda_max), ties to the larger penalty.
MultiTaskFit multitask_lasso_cv(const Eigen::MatrixXd& z, const Eigen::MatrixXd& targets,
                                int folds, std::uint64_t seed, int grid_points = 50,
                                double min_ratio = 1e-3, const MultiTaskOptions& opts = {});

// Resource-allocation policy learner: regresses theta_rows / lambda_cost on
// contexts and returns z -> A z. Maximizes the empirical quadratic-cost
// objective E_n[<theta, A z> - (lambda_cost/2) ||A z||^2] over the penalized
// class.
Policy multitask_lasso_policy(const Eigen::MatrixXd& theta_rows, const Eigen::MatrixXd& contexts,
                              double lambda_cost, double s_penalty,
                              const MultiTaskOptions& opts = {});

}  // namespace drpolicy
