#include "drpolicy/multitask.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "drpolicy/errors.hpp"
#include "drpolicy/rng.hpp"

namespace drpolicy {
namespace {

double mt_objective(const Eigen::MatrixXd& residual, const Eigen::MatrixXd& a, double s,
                    double n) {
  double group_norm = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) group_norm += a.col(j).norm();
  return residual.squaredNorm() / (2.0 * n) + s * group_norm;
}

}  // namespace

MultiTaskFit multitask_lasso(const Eigen::MatrixXd& z, const Eigen::MatrixXd& targets,
                             double s_penalty, const MultiTaskOptions& opts) {
  if (z.rows() != targets.rows()) throw InvalidInputError("multitask_lasso: row mismatch");
  if (z.rows() < 1 || z.cols() < 1 || targets.cols() < 1)
    throw InvalidInputError("multitask_lasso: empty problem");
  if (s_penalty < 0.0) throw InvalidInputError("multitask_lasso: negative penalty");

  const auto n = static_cast<double>(z.rows());
  const Eigen::Index k = z.cols();
  const Eigen::Index tasks = targets.cols();

  Eigen::VectorXd curvature(k);  // (1/n) ||z_j||^2
  for (Eigen::Index j = 0; j < k; ++j) curvature(j) = z.col(j).squaredNorm() / n;

  MultiTaskFit fit;
  fit.penalty = s_penalty;
  fit.coef = Eigen::MatrixXd::Zero(tasks, k);
  Eigen::MatrixXd residual = targets;  // targets - Z A^T

  fit.converged = false;
  int sweep = 0;
  while (sweep < opts.max_sweeps) {
    ++sweep;
    double max_delta = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (curvature(j) < 1e-14) continue;
      const Eigen::VectorXd old = fit.coef.col(j);
      Eigen::VectorXd u = residual.transpose() * z.col(j) / n + curvature(j) * old;
      const double norm = u.norm();
      Eigen::VectorXd updated = Eigen::VectorXd::Zero(tasks);
      if (norm > s_penalty) updated = u * ((norm - s_penalty) / (norm * curvature(j)));
      const Eigen::VectorXd delta = updated - old;
      if (delta.cwiseAbs().maxCoeff() > 0.0) {
        residual -= z.col(j) * delta.transpose();
        fit.coef.col(j) = updated;
        max_delta = std::max(max_delta, delta.cwiseAbs().maxCoeff());
      }
    }
    fit.objective_path.push_back(mt_objective(residual, fit.coef, s_penalty, n));
    if (max_delta < opts.tol) {
      fit.converged = true;
      break;
    }
  }
  fit.sweeps = sweep;
  return fit;
}

double multitask_lambda_max(const Eigen::MatrixXd& z, const Eigen::MatrixXd& targets) {
  const auto n = static_cast<double>(z.rows());
  double lmax = 0.0;
  for (Eigen::Index j = 0; j < z.cols(); ++j)
    lmax = std::max(lmax, (targets.transpose() * z.col(j)).norm() / n);
  return lmax;
}

double multitask_kkt_gap(const Eigen::MatrixXd& z, const Eigen::MatrixXd& targets,
                         const Eigen::MatrixXd& a, double s_penalty) {
  const auto n = static_cast<double>(z.rows());
  const Eigen::MatrixXd residual = targets - z * a.transpose();
  double gap = 0.0;
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    const Eigen::VectorXd g = residual.transpose() * z.col(j) / n;  // -gradient of the loss
    const double cnorm = a.col(j).norm();
    if (cnorm > 0.0)
      gap = std::max(gap, (g - s_penalty * a.col(j) / cnorm).norm());
    else
      gap = std::max(gap, std::max(0.0, g.norm() - s_penalty));
  }
  return gap;
}

MultiTaskFit multitask_lasso_cv(const Eigen::MatrixXd& z, const Eigen::MatrixXd& targets,
                                int folds, std::uint64_t seed, int grid_points, double min_ratio,
                                const MultiTaskOptions& opts) {
  if (folds < 2) throw InvalidInputError("multitask_lasso_cv: need at least 2 folds");
  const Eigen::Index n = z.rows();
  if (n < folds) throw InvalidInputError("multitask_lasso_cv: fewer rows than folds");

  double lmax = multitask_lambda_max(z, targets);
  if (lmax <= 0.0) lmax = 1e-12;
  std::vector<double> grid(static_cast<std::size_t>(grid_points));
  for (int i = 0; i < grid_points; ++i) {
    const double t = grid_points == 1 ? 0.0 : static_cast<double>(i) / (grid_points - 1);
    grid[static_cast<std::size_t>(i)] = std::exp(std::log(lmax) + t * std::log(min_ratio));
  }

  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  Rng rng(seed);
  for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
  std::vector<int> fold_of(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < perm.size(); ++i)
    fold_of[static_cast<std::size_t>(perm[i])] = static_cast<int>(i % folds);

  std::vector<double> cv_err(grid.size(), 0.0);
  for (int f = 0; f < folds; ++f) {
    std::vector<Eigen::Index> train, test;
    for (Eigen::Index i = 0; i < n; ++i)
      (fold_of[static_cast<std::size_t>(i)] == f ? test : train).push_back(i);
    Eigen::MatrixXd ztr(static_cast<Eigen::Index>(train.size()), z.cols());
    Eigen::MatrixXd ytr(static_cast<Eigen::Index>(train.size()), targets.cols());
    for (std::size_t i = 0; i < train.size(); ++i) {
      ztr.row(static_cast<Eigen::Index>(i)) = z.row(train[i]);
      ytr.row(static_cast<Eigen::Index>(i)) = targets.row(train[i]);
    }
    // Warm start down the grid.
    MultiTaskFit warm;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      MultiTaskFit fit = multitask_lasso(ztr, ytr, grid[g], opts);
      for (Eigen::Index i : test) {
        const Eigen::VectorXd pred = fit.coef * z.row(i).transpose();
        cv_err[g] += (targets.row(i).transpose() - pred).squaredNorm();
      }
    }
  }
  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g)
    if (cv_err[g] < cv_err[best]) best = g;
  return multitask_lasso(z, targets, grid[best], opts);
}

Policy multitask_lasso_policy(const Eigen::MatrixXd& theta_rows, const Eigen::MatrixXd& contexts,
                              double lambda_cost, double s_penalty,
                              const MultiTaskOptions& opts) {
  if (lambda_cost <= 0.0) throw InvalidInputError("multitask_lasso_policy: cost weight must be > 0");
  const Eigen::MatrixXd targets = theta_rows / lambda_cost;
  const MultiTaskFit fit = multitask_lasso(contexts, targets, s_penalty, opts);
  return Policy::linear_multi_task(fit.coef);
}

}  // namespace drpolicy
