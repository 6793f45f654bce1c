#include "drpolicy/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "drpolicy/errors.hpp"
#include "drpolicy/rng.hpp"

namespace drpolicy {
namespace {

struct Standardized {
  Eigen::MatrixXd x;          // centered/scaled copy, zero-variance columns zeroed
  Eigen::VectorXd mean;
  Eigen::VectorXd std;        // 1.0 where dropped
  std::vector<int> dropped;
  Eigen::VectorXd y_centered;
  double y_mean = 0.0;
};

Standardized standardize(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() != y.size()) throw InvalidInputError("lasso: X rows and y length differ");
  if (x.rows() < 1 || x.cols() < 1) throw InvalidInputError("lasso: empty problem");
  if (!x.allFinite() || !y.allFinite()) throw InvalidInputError("lasso: non-finite input");

  const auto n = static_cast<double>(x.rows());
  Standardized s;
  s.x = x;
  s.mean = x.colwise().mean();
  s.std.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    s.x.col(j).array() -= s.mean(j);
    const double var = s.x.col(j).squaredNorm() / n;
    const double sd = std::sqrt(var);
    if (sd < 1e-12) {
      s.dropped.push_back(static_cast<int>(j));
      s.std(j) = 1.0;
      s.x.col(j).setZero();
    } else {
      s.std(j) = sd;
      s.x.col(j) /= sd;
    }
  }
  s.y_mean = y.mean();
  s.y_centered = y.array() - s.y_mean;
  return s;
}

double objective(const Eigen::VectorXd& residual, const Eigen::VectorXd& beta, double lambda,
                 double n) {
  return residual.squaredNorm() / (2.0 * n) + lambda * beta.lpNorm<1>();
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

// Coordinate descent on pre-standardized data. beta is in/out (warm start);
// residual must equal y_centered - X beta on entry.
void descend(const Standardized& s, Eigen::VectorXd& beta, Eigen::VectorXd& residual,
             double lambda, const LassoOptions& opts, LassoFit& out) {
  const auto n = static_cast<double>(s.x.rows());
  const Eigen::Index m = s.x.cols();
  std::vector<char> is_dropped(static_cast<std::size_t>(m), 0);
  for (int j : s.dropped) is_dropped[static_cast<std::size_t>(j)] = 1;

  out.objective_path.clear();
  out.converged = false;
  int sweep = 0;
  bool check_full_kkt = false;
  while (sweep < opts.max_sweeps) {
    ++sweep;
    double max_delta = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (is_dropped[static_cast<std::size_t>(j)]) continue;
      const double old = beta(j);
      // rho_j = (1/n) x_j^T residual + old (unit-variance columns)
      const double rho = s.x.col(j).dot(residual) / n + old;
      const double updated = soft_threshold(rho, lambda);
      if (updated != old) {
        residual += s.x.col(j) * (old - updated);
        beta(j) = updated;
        max_delta = std::max(max_delta, std::abs(updated - old));
      }
    }
    out.objective_path.push_back(objective(residual, beta, lambda, n));
    if (max_delta < opts.tol) {
      if (!check_full_kkt) {
        check_full_kkt = true;  // verify stationarity once before exiting
      }
      // Stationarity check over all coordinates; resume sweeping on violation.
      double gap = 0.0;
      for (Eigen::Index j = 0; j < m; ++j) {
        if (is_dropped[static_cast<std::size_t>(j)]) continue;
        const double c = s.x.col(j).dot(residual) / n;
        if (beta(j) != 0.0)
          gap = std::max(gap, std::abs(c - lambda * (beta(j) > 0 ? 1.0 : -1.0)));
        else
          gap = std::max(gap, std::max(0.0, std::abs(c) - lambda));
      }
      if (gap <= opts.kkt_tol) {
        out.converged = true;
        break;
      }
    }
  }
  out.sweeps = sweep;
}

LassoFit finalize(const Standardized& s, const Eigen::VectorXd& beta_std, double lambda,
                  LassoFit fit) {
  fit.lambda = lambda;
  fit.col_mean = s.mean;
  fit.col_std = s.std;
  fit.dropped = s.dropped;
  fit.coef = (beta_std.array() / s.std.array()).matrix();
  fit.intercept = s.y_mean - fit.coef.dot(s.mean);
  return fit;
}

}  // namespace

LassoFit lasso_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                   const LassoOptions& opts) {
  if (lambda < 0.0) throw InvalidInputError("lasso: negative penalty");
  const Standardized s = standardize(x, y);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(x.cols());
  Eigen::VectorXd residual = s.y_centered;
  LassoFit fit;
  descend(s, beta, residual, lambda, opts, fit);
  return finalize(s, beta, lambda, std::move(fit));
}

std::vector<LassoFit> lasso_path(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                 const std::vector<double>& lambdas, const LassoOptions& opts) {
  const Standardized s = standardize(x, y);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(x.cols());
  Eigen::VectorXd residual = s.y_centered;
  std::vector<LassoFit> fits;
  fits.reserve(lambdas.size());
  for (double lambda : lambdas) {
    if (lambda < 0.0) throw InvalidInputError("lasso: negative penalty");
    LassoFit fit;
    descend(s, beta, residual, lambda, opts, fit);
    fits.push_back(finalize(s, beta, lambda, std::move(fit)));
  }
  return fits;
}

double lasso_lambda_max(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const Standardized s = standardize(x, y);
  const auto n = static_cast<double>(x.rows());
  double lmax = 0.0;
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    lmax = std::max(lmax, std::abs(s.x.col(j).dot(s.y_centered)) / n);
  return lmax;
}

std::vector<double> default_lambda_grid(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                        int points, double min_ratio) {
  double lmax = lasso_lambda_max(x, y);
  if (lmax <= 0.0) lmax = 1e-12;  // constant outcome: any penalty gives the null model
  std::vector<double> grid(static_cast<std::size_t>(points));
  const double log_max = std::log(lmax);
  const double log_min = std::log(lmax * min_ratio);
  for (int i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    grid[static_cast<std::size_t>(i)] = std::exp(log_max + t * (log_min - log_max));
  }
  return grid;
}

LassoFit lasso_cv_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                      const std::vector<double>& lambda_grid, std::uint64_t seed,
                      const LassoCvOptions& opts) {
  if (lambda_grid.empty()) throw InvalidInputError("lasso_cv_fit: empty lambda grid");
  if (opts.folds < 2) throw InvalidInputError("lasso_cv_fit: need at least 2 folds");
  const Eigen::Index n = x.rows();
  if (n < opts.folds) throw InvalidInputError("lasso_cv_fit: fewer rows than folds");

  if (lambda_grid.size() == 1) return lasso_fit(x, y, lambda_grid[0], opts.solver);

  // Deterministic fold assignment: shuffled indices dealt round-robin.
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  Rng rng(seed);
  for (std::size_t i = perm.size() - 1; i > 0; --i)
    std::swap(perm[i], perm[rng.below(i + 1)]);
  std::vector<int> fold_of(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < perm.size(); ++i)
    fold_of[static_cast<std::size_t>(perm[i])] = static_cast<int>(i % opts.folds);

  // Sort the grid descending so warm starts run from sparse to dense.
  std::vector<double> grid = lambda_grid;
  std::sort(grid.begin(), grid.end(), std::greater<>());

  std::vector<double> cv_err(grid.size(), 0.0);
  for (int f = 0; f < opts.folds; ++f) {
    std::vector<Eigen::Index> train, test;
    for (Eigen::Index i = 0; i < n; ++i)
      (fold_of[static_cast<std::size_t>(i)] == f ? test : train).push_back(i);
    Eigen::MatrixXd xtr(static_cast<Eigen::Index>(train.size()), x.cols());
    Eigen::VectorXd ytr(static_cast<Eigen::Index>(train.size()));
    for (std::size_t i = 0; i < train.size(); ++i) {
      xtr.row(static_cast<Eigen::Index>(i)) = x.row(train[i]);
      ytr(static_cast<Eigen::Index>(i)) = y(train[i]);
    }
    const std::vector<LassoFit> fits = lasso_path(xtr, ytr, grid, opts.solver);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      double err = 0.0;
      for (Eigen::Index i : test) {
        const double r = y(i) - fits[g].predict(Eigen::VectorXd(x.row(i)));
        err += r * r;
      }
      cv_err[g] += err / static_cast<double>(test.size());
    }
  }

  // Ties go to the larger lambda; the grid is descending, so strict '<' does it.
  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g)
    if (cv_err[g] < cv_err[best]) best = g;

  return lasso_fit(x, y, grid[best], opts.solver);
}

LassoFit lasso_cv_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::uint64_t seed,
                      const LassoCvOptions& opts) {
  return lasso_cv_fit(x, y, default_lambda_grid(x, y), seed, opts);
}

double lasso_kkt_gap(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const LassoFit& fit) {
  const Standardized s = standardize(x, y);
  const auto n = static_cast<double>(x.rows());
  // Re-express the fit on the standardized scale.
  Eigen::VectorXd beta_std = (fit.coef.array() * s.std.array()).matrix();
  Eigen::VectorXd residual = s.y_centered - s.x * beta_std;
  double gap = 0.0;
  std::vector<char> is_dropped(static_cast<std::size_t>(x.cols()), 0);
  for (int j : fit.dropped) is_dropped[static_cast<std::size_t>(j)] = 1;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (is_dropped[static_cast<std::size_t>(j)]) continue;
    const double c = s.x.col(j).dot(residual) / n;
    if (beta_std(j) != 0.0)
      gap = std::max(gap, std::abs(c - fit.lambda * (beta_std(j) > 0 ? 1.0 : -1.0)));
    else
      gap = std::max(gap, std::max(0.0, std::abs(c) - fit.lambda));
  }
  return gap;
}

}  // namespace drpolicy
