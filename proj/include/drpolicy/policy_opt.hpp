#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "drpolicy/estimators.hpp"
#include "drpolicy/types.hpp"

namespace drpolicy {

// Three-way sample split for the out-of-sample regularized ERM:
// nuisance sample S1, validation S2v, training S2t.
struct SplitConfig {
  double nuisance = 0.5;
  double validation = 0.25;
  double training = 0.25;
};

struct DataSplit {
  std::vector<Eigen::Index> nuisance, validation, training;
};

DataSplit split_three(Eigen::Index n, const SplitConfig& cfg, std::uint64_t seed);

// Regularization level for the validation constraint. The entropy-integral
// term of the theoretical rate is dropped; the scale statistic r_hat is the
// largest root-mean-square candidate value on the validation sample.
struct MuRule {
  double c = 2.0;
  double delta = 0.1;
};

double mu_n(double r_hat, Eigen::Index n_validation, const MuRule& rule);

// Flattened per-row (a, b) coefficient records for fast candidate scoring.
struct PricingRecordArray {
  Eigen::ArrayXd a, b;
  Eigen::MatrixXd contexts;  // n x k
  Eigen::ArrayXd zbar;       // context summary per row
  int summary_len = 1;

  static PricingRecordArray from_records(const DrRecords& records, int summary_len);

  Eigen::Index size() const { return a.size(); }
  Eigen::ArrayXd prices(const Policy& pi) const;
  // value = mean of pi (a - b pi); rms = sqrt(mean contribution^2).
  struct Score {
    double value = 0.0;
    double rms = 0.0;
  };
  Score score(const Policy& pi) const;
  ValueEstimate value(const Policy& pi) const;
};

// Candidate policies for a space: an even grid for the constant family,
// uniform box samples for the linear family, plus Gaussian perturbations
// (scale perturb_scale * box width) around each anchor. Deterministic in seed.
std::vector<Policy> generate_candidates(const PolicySpace& space, std::uint64_t seed,
                                        const std::vector<Policy>& anchors = {});

// Argmax of `score` over candidates; ties broken by lexicographically
// smallest flattened parameter vector.
Policy erm_argmax(const std::vector<Policy>& candidates,
                  const std::function<double(const Policy&)>& score);

// Closed-form vertex gamma* = mean(a) / (2 mean(b)) of the concave revenue
// parabola, clipped to the box; when mean(b) <= 0 the better box endpoint.
Policy optimize_constant_pricing(const PricingRecordArray& rec, const PolicySpace& space);

// Maximizes sum_i (g.z_i) a_i - (g.z_i)^2 b_i by solving 2 M g = v with
// M = sum b_i z_i z_i^T, v = sum a_i z_i (ridged if M is not positive
// definite), clips g to the box, and keeps the best of the solution and a
// random candidate set.
Policy optimize_linear_pricing(const PricingRecordArray& rec, const PolicySpace& space,
                               std::uint64_t seed);

// Plain ERM over the space's candidate set, anchored by the closed-form
// maximizer of the concave families.
Policy erm(const PricingRecordArray& rec, const PolicySpace& space, std::uint64_t seed);

// Out-of-sample regularized ERM (validation-constrained training ERM).
struct RegularizedErmResult {
  Policy policy;           // pi_2
  Policy preliminary;      // pi_1
  double r_hat = 0.0;
  double mu = 0.0;
  double validation_slack = 0.0;  // E_S2v[v(pi_1) - v(pi_2)]
  std::vector<Policy> final_candidates;
  std::size_t feasible_count = 0;
};

RegularizedErmResult regularized_erm_records(const PricingRecordArray& validation_records,
                                             const PricingRecordArray& training_records,
                                             const PolicySpace& space, const MuRule& mu,
                                             std::uint64_t seed,
                                             std::optional<double> mu_override = {});

// Full Algorithm-1 pipeline for the pricing applications: splits the data,
// fits nuisances on S1, runs the validation ERM on S2v and the constrained
// ERM on S2t. The map kind selects the linear-demand or quadratic-revenue
// closed-form DR records.
RegularizedErmResult regularized_erm(const LoggedDataset& data, const FeatureMap& map,
                                     const PolicySpace& space, const SplitConfig& split,
                                     const MuRule& mu, std::uint64_t seed);

}  // namespace drpolicy
