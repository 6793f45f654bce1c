#pragma once

#include <Eigen/Dense>

#include "drpolicy/errors.hpp"

namespace drpolicy {

// Polynomial context expansion q(z): powers of each coordinate up to `degree`,
// then all two-way interactions. The constant term is never part of q(z);
// intercepts are handled by the regression that consumes the expansion.
struct PolyFeatureConfig {
  int degree = 3;
  bool interactions = true;
  bool intercept = true;  // consumed by the fits, not by expand()

  Eigen::Index size(Eigen::Index k) const {
    Eigen::Index m = k * degree;
    if (interactions) m += k * (k - 1) / 2;
    return m;
  }
};

// Ordering: raw coordinates, squares, ..., degree-th powers, then pairs
// z_i z_j with i < j (row-major over pairs).
inline Eigen::VectorXd expand_polynomial_features(const Eigen::VectorXd& z,
                                                  const PolyFeatureConfig& cfg) {
  if (z.size() < 1) throw InvalidInputError("expand_polynomial_features: empty context");
  if (cfg.degree < 1) throw InvalidInputError("expand_polynomial_features: degree must be >= 1");
  if (!z.allFinite()) throw InvalidInputError("expand_polynomial_features: non-finite input");

  const Eigen::Index k = z.size();
  Eigen::VectorXd out(cfg.size(k));
  Eigen::Index pos = 0;
  for (int d = 1; d <= cfg.degree; ++d)
    for (Eigen::Index i = 0; i < k; ++i) out(pos++) = std::pow(z(i), d);
  if (cfg.interactions)
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = i + 1; j < k; ++j) out(pos++) = z(i) * z(j);
  return out;
}

// Row-wise expansion of an n x k context matrix.
inline Eigen::MatrixXd expand_polynomial_features(const Eigen::MatrixXd& contexts,
                                                  const PolyFeatureConfig& cfg) {
  Eigen::MatrixXd out(contexts.rows(), cfg.size(contexts.cols()));
  for (Eigen::Index r = 0; r < contexts.rows(); ++r)
    out.row(r) = expand_polynomial_features(Eigen::VectorXd(contexts.row(r)), cfg).transpose();
  return out;
}

}  // namespace drpolicy
