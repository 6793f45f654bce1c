#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "drpolicy/lasso.hpp"
#include "drpolicy/poly.hpp"
#include "drpolicy/types.hpp"

namespace drpolicy {

// First-stage fit of theta0(z): y is regressed on the design
// [phi_j(a,z) * (1, q(z))]_j, so each coefficient function theta_j(z) is
// linear in the polynomial expansion q(z).
class ThetaHat {
 public:
  ThetaHat() = default;
  ThetaHat(PolyFeatureConfig cfg, VectorXd consts, MatrixXd coefs, double unattributed,
           LassoFit fit)
      : cfg_(cfg),
        consts_(std::move(consts)),
        coefs_(std::move(coefs)),
        unattributed_intercept_(unattributed),
        fit_(std::move(fit)) {}

  int p() const { return static_cast<int>(consts_.size()); }

  VectorXd operator()(const VectorXd& z) const {
    return consts_ + coefs_ * expand_polynomial_features(z, cfg_);
  }

  std::function<VectorXd(const VectorXd&)> as_fn() const {
    return [copy = *this](const VectorXd& z) { return copy(z); };
  }

  // Intercept mass that could not be assigned to any feature (only when the
  // map has no constant feature; converges to zero under the model).
  double unattributed_intercept() const { return unattributed_intercept_; }
  const LassoFit& fit() const { return fit_; }

 private:
  PolyFeatureConfig cfg_;
  VectorXd consts_;   // p
  MatrixXd coefs_;    // p x m
  double unattributed_intercept_ = 0.0;
  LassoFit fit_;
};

// First-stage fit of Sigma0(z) = E[phi phi^T | z]: one cross-validated lasso
// of phi_i phi_j on q(z) per upper-triangle entry.
class SigmaHat {
 public:
  SigmaHat() = default;
  SigmaHat(PolyFeatureConfig cfg, int p, std::vector<LassoFit> entry_fits)
      : cfg_(cfg), p_(p), fits_(std::move(entry_fits)) {}

  int p() const { return p_; }

  MatrixXd operator()(const VectorXd& z) const {
    const VectorXd q = expand_polynomial_features(z, cfg_);
    MatrixXd s(p_, p_);
    int idx = 0;
    for (int i = 0; i < p_; ++i)
      for (int j = i; j < p_; ++j) {
        const double v = fits_[static_cast<std::size_t>(idx++)].predict(q);
        s(i, j) = v;
        s(j, i) = v;
      }
    return s;
  }

  std::function<MatrixXd(const VectorXd&)> as_fn() const {
    return [copy = *this](const VectorXd& z) { return copy(z); };
  }

  const std::vector<LassoFit>& entry_fits() const { return fits_; }

 private:
  PolyFeatureConfig cfg_;
  int p_ = 0;
  std::vector<LassoFit> fits_;
};

ThetaHat fit_theta_hat(const LoggedDataset& data, const FeatureMap& map,
                       const PolyFeatureConfig& cfg, std::uint64_t seed,
                       const LassoCvOptions& opts = {});

SigmaHat fit_sigma_hat(const LoggedDataset& data, const FeatureMap& map,
                       const PolyFeatureConfig& cfg, std::uint64_t seed,
                       const LassoCvOptions& opts = {});

// Homoskedastic pricing shortcut: g(z) = E[p|z] by cross-validated lasso on
// q(z), sigma2 = mean squared residual of that regression.
PricingNuisance fit_pricing_nuisances(const LoggedDataset& data, const PolyFeatureConfig& cfg,
                                      std::uint64_t seed, const LassoCvOptions& opts = {});

// Quadratic pricing shortcut: mu1(z) by cross-validated lasso, central moments
// of the residual p - mu1(z) as sample moments.
QuadraticMoments fit_quadratic_moments(const LoggedDataset& data, const PolyFeatureConfig& cfg,
                                       std::uint64_t seed, const LassoCvOptions& opts = {});

}  // namespace drpolicy
