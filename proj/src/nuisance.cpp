#include "drpolicy/nuisance.hpp"

#include <cmath>

#include "drpolicy/errors.hpp"
#include "drpolicy/rng.hpp"

namespace drpolicy {
namespace {

// Design with one block per feature: [phi_j, phi_j * q_1, ..., phi_j * q_m].
Eigen::MatrixXd theta_design(const LoggedDataset& data, const FeatureMap& map,
                             const PolyFeatureConfig& cfg) {
  const Eigen::Index n = data.rows();
  const Eigen::Index m = cfg.size(data.context_dim());
  const int p = map.p();
  Eigen::MatrixXd x(n, p * (1 + m));
  for (Eigen::Index r = 0; r < n; ++r) {
    const VectorXd phi = map.eval(data.actions.row(r), data.contexts.row(r));
    const VectorXd q = expand_polynomial_features(Eigen::VectorXd(data.contexts.row(r)), cfg);
    for (int j = 0; j < p; ++j) {
      const Eigen::Index base = static_cast<Eigen::Index>(j) * (1 + m);
      x(r, base) = phi(j);
      x.row(r).segment(base + 1, m) = phi(j) * q.transpose();
    }
  }
  return x;
}

}  // namespace

ThetaHat fit_theta_hat(const LoggedDataset& data, const FeatureMap& map,
                       const PolyFeatureConfig& cfg, std::uint64_t seed,
                       const LassoCvOptions& opts) {
  data.validate();
  const Eigen::Index m = cfg.size(data.context_dim());
  const int p = map.p();
  const Eigen::MatrixXd x = theta_design(data, map, cfg);
  const LassoFit fit = lasso_cv_fit(x, data.y, seed, opts);

  VectorXd consts(p);
  MatrixXd coefs(p, m);
  for (int j = 0; j < p; ++j) {
    const Eigen::Index base = static_cast<Eigen::Index>(j) * (1 + m);
    consts(j) = fit.coef(base);
    coefs.row(j) = fit.coef.segment(base + 1, m).transpose();
  }

  // Attribute the global intercept to the first constant feature, if any.
  // A feature is constant exactly when its phi_j column was dropped as
  // zero-variance with a nonzero mean.
  double unattributed = fit.intercept;
  for (int j = 0; j < p && unattributed != 0.0; ++j) {
    const Eigen::Index base = static_cast<Eigen::Index>(j) * (1 + m);
    for (int d : fit.dropped) {
      if (d == base && std::abs(fit.col_mean(base)) > 1e-12) {
        consts(j) += unattributed / fit.col_mean(base);
        unattributed = 0.0;
        break;
      }
    }
  }
  return ThetaHat(cfg, std::move(consts), std::move(coefs), unattributed, fit);
}

SigmaHat fit_sigma_hat(const LoggedDataset& data, const FeatureMap& map,
                       const PolyFeatureConfig& cfg, std::uint64_t seed,
                       const LassoCvOptions& opts) {
  data.validate();
  const Eigen::Index n = data.rows();
  const int p = map.p();
  const Eigen::MatrixXd q = expand_polynomial_features(data.contexts, cfg);

  Eigen::MatrixXd phis(n, p);
  for (Eigen::Index r = 0; r < n; ++r)
    phis.row(r) = map.eval(data.actions.row(r), data.contexts.row(r)).transpose();

  std::vector<LassoFit> fits;
  fits.reserve(static_cast<std::size_t>(p) * (p + 1) / 2);
  int entry = 0;
  for (int i = 0; i < p; ++i)
    for (int j = i; j < p; ++j) {
      const Eigen::VectorXd target = phis.col(i).cwiseProduct(phis.col(j));
      fits.push_back(lasso_cv_fit(q, target, substream_seed(seed, entry), opts));
      ++entry;
    }
  return SigmaHat(cfg, p, std::move(fits));
}

PricingNuisance fit_pricing_nuisances(const LoggedDataset& data, const PolyFeatureConfig& cfg,
                                      std::uint64_t seed, const LassoCvOptions& opts) {
  data.validate();
  if (data.action_dim() != 1)
    throw InvalidInputError("fit_pricing_nuisances: scalar action required");
  const Eigen::MatrixXd q = expand_polynomial_features(data.contexts, cfg);
  const Eigen::VectorXd price = data.actions.col(0);
  const LassoFit g_fit = lasso_cv_fit(q, price, seed, opts);
  const Eigen::VectorXd residual = price - g_fit.predict(q);
  const double sigma2 = residual.squaredNorm() / static_cast<double>(data.rows());
  if (sigma2 <= 1e-10)
    throw DegenerateLoggingError("fit_pricing_nuisances: logging policy has no price variation");
  PricingNuisance out;
  out.g_hat = [g_fit, cfg](const VectorXd& z) {
    return g_fit.predict(expand_polynomial_features(z, cfg));
  };
  out.sigma2 = sigma2;
  return out;
}

QuadraticMoments fit_quadratic_moments(const LoggedDataset& data, const PolyFeatureConfig& cfg,
                                       std::uint64_t seed, const LassoCvOptions& opts) {
  data.validate();
  if (data.action_dim() != 1)
    throw InvalidInputError("fit_quadratic_moments: scalar action required");
  const Eigen::MatrixXd q = expand_polynomial_features(data.contexts, cfg);
  const Eigen::VectorXd price = data.actions.col(0);
  const LassoFit mu1_fit = lasso_cv_fit(q, price, seed, opts);
  const Eigen::ArrayXd residual = (price - mu1_fit.predict(q)).array();
  const auto n = static_cast<double>(data.rows());
  QuadraticMoments out;
  out.c2 = residual.square().sum() / n;
  out.c3 = residual.cube().sum() / n;
  out.c4 = residual.square().square().sum() / n;
  if (out.c2 <= 1e-10)
    throw DegenerateLoggingError("fit_quadratic_moments: logging policy has no price variation");
  out.mu1_hat = [mu1_fit, cfg](const VectorXd& z) {
    return mu1_fit.predict(expand_polynomial_features(z, cfg));
  };
  return out;
}

}  // namespace drpolicy
