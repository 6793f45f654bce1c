#include "drpolicy/estimators.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <cmath>
#include <string>

#include "drpolicy/errors.hpp"

namespace drpolicy {
namespace {

constexpr double kMinRcond = 1e-12;

bool symmetric_within(const MatrixXd& s, double tol) {
  return (s - s.transpose()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace

MatrixXd invert_sigma(const MatrixXd& s, double ridge, long row_hint) {
  if (s.rows() != s.cols()) throw InvalidInputError("invert_sigma: matrix not square");
  if (!s.allFinite()) throw InvalidInputError("invert_sigma: non-finite entries");
  if (!symmetric_within(s, 1e-8 * (1.0 + s.cwiseAbs().maxCoeff())))
    throw InvalidInputError("invert_sigma: matrix not symmetric");

  const Eigen::Index p = s.rows();
  const MatrixXd sym = 0.5 * (s + s.transpose());
  Eigen::LLT<MatrixXd> llt(sym);
  if (llt.info() == Eigen::Success && llt.rcond() >= kMinRcond)
    return llt.solve(MatrixXd::Identity(p, p));

  const double scale = ridge * sym.trace() / static_cast<double>(p);
  const MatrixXd ridged = sym + scale * MatrixXd::Identity(p, p);
  Eigen::LLT<MatrixXd> llt2(ridged);
  if (llt2.info() != Eigen::Success || llt2.rcond() < kMinRcond)
    throw SingularCovarianceError(
        "invert_sigma: covariance singular after ridge" +
            (row_hint >= 0 ? " (row " + std::to_string(row_hint) + ")" : std::string()),
        row_hint);
  return llt2.solve(MatrixXd::Identity(p, p));
}

VectorXd theta_dr(double y, const VectorXd& a, const VectorXd& z, const FeatureMap& map,
                  const NuisancePair& nuis, double ridge) {
  const VectorXd phi = map.eval(a, z);
  const VectorXd th = nuis.theta_hat(z);
  const MatrixXd sigma_inv = invert_sigma(nuis.sigma_hat(z), ridge);
  const double residual = y - th.dot(phi);
  VectorXd out = th + sigma_inv * phi * residual;
  if (!out.allFinite()) throw SingularCovarianceError("theta_dr: non-finite output");
  return out;
}

DrRecords make_dr_records(const LoggedDataset& data, const FeatureMap& map,
                          const NuisancePair& nuis, double ridge) {
  data.validate();
  DrRecords records;
  records.reserve(static_cast<std::size_t>(data.rows()));
  long failures = 0;
  long first_failure = -1;
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    try {
      DrRecord rec;
      rec.theta_dr = theta_dr(data.y(r), data.actions.row(r), data.contexts.row(r), map, nuis,
                              ridge);
      rec.context = data.contexts.row(r);
      rec.source_row = r;
      records.push_back(std::move(rec));
    } catch (const SingularCovarianceError&) {
      ++failures;
      if (first_failure < 0) first_failure = r;
    }
  }
  if (failures > 0)
    throw SingularCovarianceError("make_dr_records: " + std::to_string(failures) +
                                      " row(s) with singular covariance, first at row " +
                                      std::to_string(first_failure),
                                  first_failure);
  return records;
}

ValueEstimate value_dr(const DrRecords& records, const Policy& pi, const FeatureMap& map) {
  if (records.empty()) throw InvalidInputError("value_dr: no records");
  VectorXd c(static_cast<Eigen::Index>(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i) {
    const DrRecord& r = records[i];
    const VectorXd phi = map.eval(pi.apply(r.context), r.context);
    c(static_cast<Eigen::Index>(i)) = r.theta_dr.dot(phi);
  }
  return ValueEstimate::from_contributions(std::move(c));
}

ValueEstimate value_dr_revenue(const DrRecords& records, const Policy& pi, RevenueModel model) {
  if (records.empty()) throw InvalidInputError("value_dr_revenue: no records");
  VectorXd c(static_cast<Eigen::Index>(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i) {
    const DrRecord& r = records[i];
    const double price = pi.apply(r.context)(0);
    const double a = r.theta_dr(0);
    const double b = r.theta_dr(1);
    // Both models price the same polynomial: pi (a - b pi) == a pi - b pi^2.
    c(static_cast<Eigen::Index>(i)) =
        model == RevenueModel::LinearDemand ? price * (a - b * price)
                                            : a * price - b * price * price;
  }
  return ValueEstimate::from_contributions(std::move(c));
}

ValueEstimate value_direct(const LoggedDataset& data, const FeatureMap& map,
                           const std::function<VectorXd(const VectorXd&)>& theta_hat,
                           const Policy& pi) {
  data.validate();
  VectorXd c(data.rows());
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    const VectorXd z = data.contexts.row(r);
    c(r) = theta_hat(z).dot(map.eval(pi.apply(z), z));
  }
  return ValueEstimate::from_contributions(std::move(c));
}

ValueEstimate value_ips(const LoggedDataset& data, const FeatureMap& map,
                        const std::function<MatrixXd(const VectorXd&)>& sigma_hat,
                        const Policy& pi, double ridge) {
  data.validate();
  VectorXd c(data.rows());
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    const VectorXd z = data.contexts.row(r);
    const VectorXd phi_obs = map.eval(data.actions.row(r), z);
    const MatrixXd sigma_inv = invert_sigma(sigma_hat(z), ridge, r);
    const VectorXd theta_ips = sigma_inv * phi_obs * data.y(r);
    c(r) = theta_ips.dot(map.eval(pi.apply(z), z));
  }
  return ValueEstimate::from_contributions(std::move(c));
}

ValueEstimate value_oracle(const LoggedDataset& data, const FeatureMap& map,
                           const NuisancePair& true_nuisances, const Policy& pi, double ridge) {
  return value_dr(make_dr_records(data, map, true_nuisances, ridge), pi, map);
}

std::pair<double, double> theta_dr_pricing_linear(double d, double p, double a_hat, double b_hat,
                                                  double g_hat, double sigma2_hat) {
  if (sigma2_hat <= 0.0)
    throw InvalidInputError("theta_dr_pricing_linear: sigma2 must be positive");
  // Residual against the predicted demand a_hat - b_hat * p.
  const double e = d - a_hat + b_hat * p;
  const double a_dr = a_hat + (1.0 + g_hat * (g_hat - p) / sigma2_hat) * e;
  const double b_dr = b_hat - (p - g_hat) / sigma2_hat * e;
  return {a_dr, b_dr};
}

std::pair<double, double> theta_dr_pricing_quadratic(double r, double p, double a_hat,
                                                     double b_hat, double mu1, double c2,
                                                     double c3, double c4) {
  double mu2, mu3, mu4;
  QuadraticMoments::raw_moments(mu1, c2, c3, c4, mu2, mu3, mu4);
  const double det = mu4 * mu2 - mu3 * mu3;
  if (det <= 0.0)
    throw SingularCovarianceError("theta_dr_pricing_quadratic: non-positive moment determinant");
  // Residual against the predicted revenue a_hat * p - b_hat * p^2.
  const double e = r - a_hat * p + b_hat * p * p;
  const double a_dr = a_hat + (mu4 * p - mu3 * p * p) / det * e;
  const double b_dr = b_hat - (mu2 * p * p - mu3 * p) / det * e;
  return {a_dr, b_dr};
}

VectorXd theta_dr_multiaction(double y, int action_index, const VectorXd& theta_hat,
                              const VectorXd& propensities) {
  if (propensities.size() != theta_hat.size())
    throw InvalidInputError("theta_dr_multiaction: dimension mismatch");
  if (action_index < 1 || action_index > theta_hat.size())
    throw InvalidInputError("theta_dr_multiaction: action index out of range");
  if ((propensities.array() <= 0.0).any())
    throw InvalidInputError("theta_dr_multiaction: propensities must be strictly positive");
  if (std::abs(propensities.sum() - 1.0) > 1e-6)
    throw InvalidInputError("theta_dr_multiaction: propensities must sum to one");
  VectorXd out = theta_hat;
  const Eigen::Index i = action_index - 1;
  out(i) += (y - theta_hat(i)) / propensities(i);
  return out;
}

VectorXd theta_dr_iv(double y, const VectorXd& a, const VectorXd& z, const VectorXd& w,
                     const FeatureMap& map,
                     const std::function<VectorXd(const VectorXd&)>& theta_hat,
                     const std::function<MatrixXd(const VectorXd&)>& sigmaI_hat) {
  const VectorXd phi = map.eval(a, z);
  const VectorXd th = theta_hat(z);
  if (w.size() != th.size()) throw InvalidInputError("theta_dr_iv: instrument dimension mismatch");
  const MatrixXd sigmaI = sigmaI_hat(z);
  Eigen::FullPivLU<MatrixXd> lu(sigmaI);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible())
    throw SingularCovarianceError("theta_dr_iv: instrument covariance singular");
  const double residual = y - th.dot(phi);
  VectorXd out = th + lu.solve(w) * residual;
  if (!out.allFinite()) throw SingularCovarianceError("theta_dr_iv: non-finite output");
  return out;
}

ValueEstimate value_dr_semibandit(const LoggedDataset& data, const MatrixXd& outcomes,
                                  const FeatureMap& map,
                                  const std::function<MatrixXd(const VectorXd&)>& theta_matrix_hat,
                                  const std::function<MatrixXd(const VectorXd&)>& sigma_hat,
                                  const Policy& pi, double ridge) {
  if (outcomes.rows() != data.rows())
    throw InvalidInputError("value_dr_semibandit: outcome rows mismatch");
  if (outcomes.cols() != map.p())
    throw InvalidInputError("value_dr_semibandit: need one outcome column per feature");
  VectorXd c(data.rows());
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    const VectorXd z = data.contexts.row(r);
    const VectorXd phi_obs = map.eval(data.actions.row(r), z);
    const MatrixXd theta = theta_matrix_hat(z);
    const MatrixXd sigma_inv = invert_sigma(sigma_hat(z), ridge, r);
    const Eigen::RowVectorXd y_row = outcomes.row(r);
    const MatrixXd theta_dr_mat =
        theta + sigma_inv * phi_obs * (y_row - phi_obs.transpose() * theta);
    const VectorXd phi_pi = map.eval(pi.apply(z), z);
    c(r) = phi_pi.dot(theta_dr_mat * phi_pi);
  }
  return ValueEstimate::from_contributions(std::move(c));
}

}  // namespace drpolicy
