#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

#include "drpolicy/types.hpp"

namespace drpolicy {

// Off-policy value estimate with per-observation contributions.
struct ValueEstimate {
  double value = 0.0;          // mean of contributions
  VectorXd contributions;

  double se() const {
    const Eigen::Index n = contributions.size();
    if (n < 2) return 0.0;
    const double mean = contributions.mean();
    const double var = (contributions.array() - mean).square().sum() / static_cast<double>(n - 1);
    return std::sqrt(var / static_cast<double>(n));
  }

  static ValueEstimate from_contributions(VectorXd c) {
    ValueEstimate v;
    v.value = c.mean();
    v.contributions = std::move(c);
    return v;
  }
};

// Per-observation doubly robust coefficient estimate; policy-independent, so
// one pass over the data serves every policy evaluated afterwards.
struct DrRecord {
  VectorXd theta_dr;
  VectorXd context;
  Eigen::Index source_row = 0;
};

using DrRecords = std::vector<DrRecord>;

// (S + ridge * tr(S)/p * I)^-1 via Cholesky. The ridge is applied only if the
// plain factorization fails or is numerically singular; a conditioning worse
// than 1e12 after ridging is an error.
MatrixXd invert_sigma(const MatrixXd& s, double ridge = 1e-8, long row_hint = -1);

// theta_DR(y, a, z) = theta_hat(z)
//                     + Sigma_hat(z)^-1 phi(a,z) (y - <theta_hat(z), phi(a,z)>).
VectorXd theta_dr(double y, const VectorXd& a, const VectorXd& z, const FeatureMap& map,
                  const NuisancePair& nuis, double ridge = 1e-8);

DrRecords make_dr_records(const LoggedDataset& data, const FeatureMap& map,
                          const NuisancePair& nuis, double ridge = 1e-8);

// V_DR(pi) = mean_i <theta_DR,i, phi(pi(z_i), z_i)>.
ValueEstimate value_dr(const DrRecords& records, const Policy& pi, const FeatureMap& map);

// Revenue evaluation for records carrying demand/revenue coefficients
// (a_DR, b_DR): contribution pi (a - b pi) for the linear demand model,
// a pi - b pi^2 for the quadratic revenue model (the same polynomial; kept
// separate for clarity at call sites).
enum class RevenueModel { LinearDemand, QuadraticRevenue };

ValueEstimate value_dr_revenue(const DrRecords& records, const Policy& pi, RevenueModel model);

// Plug-in baseline: contribution <theta_hat(z_i), phi(pi(z_i), z_i)>.
ValueEstimate value_direct(const LoggedDataset& data, const FeatureMap& map,
                           const std::function<VectorXd(const VectorXd&)>& theta_hat,
                           const Policy& pi);

// Inverse-propensity baseline: theta_IPS = Sigma_hat(z)^-1 phi(a,z) y.
ValueEstimate value_ips(const LoggedDataset& data, const FeatureMap& map,
                        const std::function<MatrixXd(const VectorXd&)>& sigma_hat,
                        const Policy& pi, double ridge = 1e-8);

// v0_DR: the doubly robust value at the true nuisance functions.
ValueEstimate value_oracle(const LoggedDataset& data, const FeatureMap& map,
                           const NuisancePair& true_nuisances, const Policy& pi,
                           double ridge = 1e-8);

// Closed-form DR coefficients for the linear demand model d = a(z) - b(z) p
// under homoskedastic logging. Returns (a_DR, b_DR) in the positive-slope
// convention; equivalent to the generic moment with phi = (1, p) and
// theta = (a, -b).
std::pair<double, double> theta_dr_pricing_linear(double d, double p, double a_hat, double b_hat,
                                                  double g_hat, double sigma2_hat);

// Closed-form DR coefficients for the quadratic revenue model
// r = a(z) p - b(z) p^2, with conditional raw moments of p derived from
// (mu1(z), central moments c2..c4).
std::pair<double, double> theta_dr_pricing_quadratic(double r, double p, double a_hat,
                                                     double b_hat, double mu1, double c2,
                                                     double c3, double c4);

// Discrete-action special case: coordinate-wise DR update at the observed
// action index (1-based) with propensities p_i(z).
VectorXd theta_dr_multiaction(double y, int action_index, const VectorXd& theta_hat,
                              const VectorXd& propensities);

// Instrumental-variable moment: theta_hat(z) + SigmaI(z)^-1 w (y - <theta_hat, phi>),
// with SigmaI(z) = E[w phi(a,z)^T | z] (not symmetric in general).
VectorXd theta_dr_iv(double y, const VectorXd& a, const VectorXd& z, const VectorXd& w,
                     const FeatureMap& map,
                     const std::function<VectorXd(const VectorXd&)>& theta_hat,
                     const std::function<MatrixXd(const VectorXd&)>& sigmaI_hat);

// Semi-bandit feedback: vector outcomes Y with E[Y | a, z] = Theta0(z)^T phi(a,z).
// V_DR(pi) = mean_i phi_pi^T (Theta_hat + Sigma^-1 phi_a (Y^T - phi_a^T Theta_hat)) phi_pi.
ValueEstimate value_dr_semibandit(const LoggedDataset& data, const MatrixXd& outcomes,
                                  const FeatureMap& map,
                                  const std::function<MatrixXd(const VectorXd&)>& theta_matrix_hat,
                                  const std::function<MatrixXd(const VectorXd&)>& sigma_hat,
                                  const Policy& pi, double ridge = 1e-8);

}  // namespace drpolicy
