#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "drpolicy/errors.hpp"

namespace drpolicy {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// n logged observations (y_i, a_i, z_i): outcome, action vector, context vector.
// Immutable after construction; shared freely across worker threads.
struct LoggedDataset {
  VectorXd y;        // outcomes, length n
  MatrixXd actions;  // n x d_a
  MatrixXd contexts; // n x k

  LoggedDataset() = default;
  LoggedDataset(VectorXd y_in, MatrixXd a_in, MatrixXd z_in)
      : y(std::move(y_in)), actions(std::move(a_in)), contexts(std::move(z_in)) {
    validate();
  }

  Eigen::Index rows() const { return y.size(); }
  Eigen::Index action_dim() const { return actions.cols(); }
  Eigen::Index context_dim() const { return contexts.cols(); }

  void validate() const {
    if (y.size() < 1) throw InvalidInputError("LoggedDataset: need at least one row");
    if (actions.rows() != y.size() || contexts.rows() != y.size())
      throw InvalidInputError("LoggedDataset: row counts of y, actions, contexts differ");
    if (actions.cols() < 1) throw InvalidInputError("LoggedDataset: action dimension must be >= 1");
    if (!y.allFinite() || !actions.allFinite() || !contexts.allFinite())
      throw InvalidInputError("LoggedDataset: non-finite entries");
  }

  LoggedDataset take(const std::vector<Eigen::Index>& idx) const {
    LoggedDataset out;
    out.y.resize(static_cast<Eigen::Index>(idx.size()));
    out.actions.resize(static_cast<Eigen::Index>(idx.size()), actions.cols());
    out.contexts.resize(static_cast<Eigen::Index>(idx.size()), contexts.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      out.y(static_cast<Eigen::Index>(i)) = y(idx[i]);
      out.actions.row(static_cast<Eigen::Index>(i)) = actions.row(idx[i]);
      out.contexts.row(static_cast<Eigen::Index>(i)) = contexts.row(idx[i]);
    }
    return out;
  }
};

// The known feature functions phi(a, z) defining the semi-parametric value model
// V(a, z) = <theta0(z), phi(a, z)>.
class FeatureMap {
 public:
  enum class Kind { PricingLinear, PricingQuadratic, IdentityAction, DiscreteOneHot, Custom };

  using EvalFn = std::function<VectorXd(const VectorXd&, const VectorXd&)>;

  FeatureMap() = default;

  static FeatureMap pricing_linear() {
    // phi(p, z) = (1, p): demand-model features for a scalar price.
    return FeatureMap(Kind::PricingLinear, 2, 1,
                      [](const VectorXd& a, const VectorXd&) {
                        VectorXd f(2);
                        f << 1.0, a(0);
                        return f;
                      });
  }

  static FeatureMap pricing_quadratic() {
    // phi(p, z) = (p, p^2): revenue-model features.
    return FeatureMap(Kind::PricingQuadratic, 2, 1,
                      [](const VectorXd& a, const VectorXd&) {
                        VectorXd f(2);
                        f << a(0), a(0) * a(0);
                        return f;
                      });
  }

  static FeatureMap identity_action(int d) {
    return FeatureMap(Kind::IdentityAction, d, d,
                      [](const VectorXd& a, const VectorXd&) { return a; });
  }

  // Action is a 1-vector holding a 1-based index into {1, ..., n_actions}.
  static FeatureMap discrete_one_hot(int n_actions) {
    return FeatureMap(Kind::DiscreteOneHot, n_actions, 1,
                      [n_actions](const VectorXd& a, const VectorXd&) {
                        const double raw = a(0);
                        const long idx = std::lround(raw);
                        if (std::abs(raw - static_cast<double>(idx)) > 1e-9 || idx < 1 ||
                            idx > n_actions)
                          throw InvalidInputError("one-hot map: action index out of range");
                        VectorXd f = VectorXd::Zero(n_actions);
                        f(idx - 1) = 1.0;
                        return f;
                      });
  }

  static FeatureMap custom(int p, int action_dim, EvalFn fn) {
    return FeatureMap(Kind::Custom, p, action_dim, std::move(fn));
  }

  Kind kind() const { return kind_; }
  int p() const { return p_; }
  int action_dim() const { return action_dim_; }

  VectorXd eval(const VectorXd& a, const VectorXd& z) const {
    if (a.size() != action_dim_)
      throw InvalidInputError("FeatureMap::eval: action dimension mismatch");
    if (!a.allFinite() || !z.allFinite())
      throw InvalidInputError("FeatureMap::eval: non-finite input");
    VectorXd f = fn_(a, z);
    if (f.size() != p_) throw InvalidInputError("FeatureMap::eval: feature length mismatch");
    return f;
  }

 private:
  FeatureMap(Kind kind, int p, int action_dim, EvalFn fn)
      : kind_(kind), p_(p), action_dim_(action_dim), fn_(std::move(fn)) {}

  Kind kind_ = Kind::Custom;
  int p_ = 0;
  int action_dim_ = 0;
  EvalFn fn_;
};

// phi(a, z) for a single observation.
inline VectorXd eval_features(const FeatureMap& map, const VectorXd& a, const VectorXd& z) {
  return map.eval(a, z);
}

// Per-coordinate interval the policy output is clipped to.
struct ActionBox {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  double clip(double v) const { return std::min(hi, std::max(lo, v)); }
  bool unbounded() const { return !std::isfinite(lo) && !std::isfinite(hi); }
};

// Deterministic map from contexts to actions.
//
// Scalar policy forms (constant, threshold, sin) and the paper's "pi(z) = z"
// evaluation policy act on the context summary z_bar = mean of the first
// `summary_len` coordinates, which is the same summary that drives the
// synthetic demand models. Linear policies use the full context.
class Policy {
 public:
  enum class Form { Constant, Linear, Threshold, Sin, LinearMultiTask };

  Policy() = default;

  static Policy constant(double gamma, ActionBox box = {}) {
    Policy p;
    p.form_ = Form::Constant;
    p.params_ = VectorXd::Constant(1, gamma);
    p.action_dim_ = 1;
    p.box_ = box;
    p.check_finite();
    return p;
  }

  // pi(z) = gamma . z over the full context.
  static Policy linear(VectorXd gamma, ActionBox box = {}) {
    Policy p;
    p.form_ = Form::Linear;
    p.params_ = std::move(gamma);
    p.context_dim_ = p.params_.size();
    p.action_dim_ = 1;
    p.box_ = box;
    p.check_finite();
    return p;
  }

  // pi(z) = lo_val + (hi_val - lo_val) * 1{z_bar > cut}.
  static Policy threshold(int summary_len, double lo_val = 1.0, double hi_val = 2.0,
                          double cut = 1.5, ActionBox box = {}) {
    Policy p;
    p.form_ = Form::Threshold;
    p.params_.resize(3);
    p.params_ << lo_val, hi_val, cut;
    p.summary_len_ = summary_len;
    p.action_dim_ = 1;
    p.box_ = box;
    p.check_finite();
    return p;
  }

  // pi(z) = sin(z_bar).
  static Policy sine(int summary_len, ActionBox box = {}) {
    Policy p;
    p.form_ = Form::Sin;
    p.summary_len_ = summary_len;
    p.action_dim_ = 1;
    p.box_ = box;
    return p;
  }

  // pi(z) = A z for a d_a x k matrix A.
  static Policy linear_multi_task(MatrixXd a_matrix, ActionBox box = {}) {
    Policy p;
    p.form_ = Form::LinearMultiTask;
    p.matrix_ = std::move(a_matrix);
    p.context_dim_ = p.matrix_.cols();
    p.action_dim_ = static_cast<int>(p.matrix_.rows());
    p.box_ = box;
    if (!p.matrix_.allFinite()) throw InvalidInputError("Policy: non-finite parameters");
    return p;
  }

  Form form() const { return form_; }
  const VectorXd& params() const { return params_; }
  const MatrixXd& matrix() const { return matrix_; }
  int action_dim() const { return action_dim_; }
  int summary_len() const { return summary_len_; }
  const ActionBox& box() const { return box_; }
  void set_box(ActionBox box) { box_ = box; }

  VectorXd apply(const VectorXd& z) const {
    if (context_dim_ > 0 && z.size() != context_dim_)
      throw InvalidInputError("Policy::apply: context dimension mismatch");
    if (summary_len_ > 0 && z.size() < summary_len_)
      throw InvalidInputError("Policy::apply: context shorter than summary length");
    VectorXd out(action_dim_);
    switch (form_) {
      case Form::Constant:
        out(0) = params_(0);
        break;
      case Form::Linear:
        out(0) = params_.dot(z);
        break;
      case Form::Threshold: {
        const double zb = summary(z);
        out(0) = zb > params_(2) ? params_(1) : params_(0);
        break;
      }
      case Form::Sin:
        out(0) = std::sin(summary(z));
        break;
      case Form::LinearMultiTask:
        out = matrix_ * z;
        break;
    }
    for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = box_.clip(out(i));
    return out;
  }

  // Flattened parameter vector, used for deterministic lexicographic tie-breaks.
  VectorXd flat_params() const {
    if (form_ == Form::LinearMultiTask) {
      return Eigen::Map<const VectorXd>(matrix_.data(), matrix_.size());
    }
    return params_;
  }

 private:
  double summary(const VectorXd& z) const {
    const int l = summary_len_ > 0 ? summary_len_ : static_cast<int>(z.size());
    return z.head(l).mean();
  }

  void check_finite() const {
    if (!params_.allFinite()) throw InvalidInputError("Policy: non-finite parameters");
  }

  Form form_ = Form::Constant;
  VectorXd params_;
  MatrixXd matrix_;
  int action_dim_ = 1;
  int summary_len_ = 0;   // 0: use all coordinates when a summary is needed
  Eigen::Index context_dim_ = 0;  // 0: any
  ActionBox box_;
};

inline VectorXd apply_policy(const Policy& pi, const VectorXd& z) { return pi.apply(z); }

// A parametric family of policies plus the rule for generating ERM candidates.
struct PolicySpace {
  enum class Family { Constant, Linear, MultiTaskLinear };

  Family family = Family::Constant;
  int context_dim = 1;      // k (Linear / MultiTaskLinear)
  int action_dim = 1;       // tasks (MultiTaskLinear)
  int summary_len = 1;      // carried through to generated policies
  double param_lo = 0.1;    // per-coordinate parameter box
  double param_hi = 5.0;
  ActionBox action_box;     // output clipping

  // Candidate-generation rule.
  int grid_points = 200;      // Constant family
  int random_candidates = 500;  // Linear family
  int perturbations = 100;      // Gaussian perturbations per anchor
  double perturb_scale = 0.1;   // times the box width

  static PolicySpace constant_pricing(ActionBox box = {0.1, 5.0}) {
    PolicySpace s;
    s.family = Family::Constant;
    s.param_lo = box.lo;
    s.param_hi = box.hi;
    s.action_box = box;
    return s;
  }

  static PolicySpace linear_pricing(int k, ActionBox box = {0.1, 5.0}) {
    PolicySpace s;
    s.family = Family::Linear;
    s.context_dim = k;
    s.param_lo = -5.0;
    s.param_hi = 5.0;
    s.action_box = box;
    return s;
  }

  static PolicySpace multitask_linear(int tasks, int k) {
    PolicySpace s;
    s.family = Family::MultiTaskLinear;
    s.context_dim = k;
    s.action_dim = tasks;
    s.param_lo = -10.0;
    s.param_hi = 10.0;
    return s;
  }

  double clip_param(double v) const { return std::min(param_hi, std::max(param_lo, v)); }

  Policy make_constant(double gamma) const {
    return Policy::constant(clip_param(gamma), action_box);
  }

  Policy make_linear(VectorXd gamma) const {
    for (Eigen::Index i = 0; i < gamma.size(); ++i) gamma(i) = clip_param(gamma(i));
    return Policy::linear(std::move(gamma), action_box);
  }
};

// First-stage estimates: theta_hat(z) and the conditional feature covariance
// Sigma_hat(z) = E[phi phi^T | z].
struct NuisancePair {
  std::function<VectorXd(const VectorXd&)> theta_hat;
  std::function<MatrixXd(const VectorXd&)> sigma_hat;
};

// Sufficient statistics for the linear pricing model under homoskedastic
// logging: g(z) = E[p|z] and sigma2 = Var(p|z).
struct PricingNuisance {
  std::function<double(const VectorXd&)> g_hat;
  double sigma2 = 0.0;

  // Expands to Sigma(z) = [[1, g], [g, sigma2 + g^2]], i.e. E[(1,p)(1,p)^T | z].
  MatrixXd sigma_matrix(const VectorXd& z) const {
    const double g = g_hat(z);
    MatrixXd s(2, 2);
    s << 1.0, g, g, sigma2 + g * g;
    return s;
  }

  NuisancePair to_pair(std::function<VectorXd(const VectorXd&)> theta) const {
    return NuisancePair{std::move(theta), [*this](const VectorXd& z) { return sigma_matrix(z); }};
  }
};

// Sufficient statistics for the quadratic pricing model: conditional mean
// mu1(z) = E[p|z] plus context-free central moments of p.
struct QuadraticMoments {
  std::function<double(const VectorXd&)> mu1_hat;
  double c2 = 0.0;  // 2nd central moment
  double c3 = 0.0;  // 3rd
  double c4 = 0.0;  // 4th

  // Raw conditional moments mu_k(z) = E[p^k | z] via the central-moment recursions.
  static void raw_moments(double mu1, double c2, double c3, double c4, double& mu2, double& mu3,
                          double& mu4) {
    mu2 = c2 + mu1 * mu1;
    mu3 = c3 + 3.0 * mu2 * mu1 - 2.0 * mu1 * mu1 * mu1;
    mu4 = c4 + 4.0 * mu3 * mu1 - 6.0 * mu1 * mu1 * mu2 + 3.0 * mu1 * mu1 * mu1 * mu1;
  }

  // Expands to Sigma(z) = [[mu2, mu3], [mu3, mu4]], i.e. E[(p,p^2)(p,p^2)^T | z].
  MatrixXd sigma_matrix(const VectorXd& z) const {
    const double m1 = mu1_hat(z);
    double m2, m3, m4;
    raw_moments(m1, c2, c3, c4, m2, m3, m4);
    MatrixXd s(2, 2);
    s << m2, m3, m3, m4;
    return s;
  }

  NuisancePair to_pair(std::function<VectorXd(const VectorXd&)> theta) const {
    return NuisancePair{std::move(theta), [*this](const VectorXd& z) { return sigma_matrix(z); }};
  }
};

}  // namespace drpolicy
