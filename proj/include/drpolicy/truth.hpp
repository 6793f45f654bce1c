#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "drpolicy/dgp.hpp"
#include "drpolicy/types.hpp"

namespace drpolicy {

// Gauss-Legendre nodes and weights on [lo, hi].
struct Quadrature {
  std::vector<double> nodes, weights;
};
Quadrature gauss_legendre(int n, double lo, double hi);

struct TruthConfig {
  Application application = Application::PricingLinear;
  Form form = Form::Quadratic;
  int k = 2;
  int l = 1;
  double lambda_cost = 2.0;       // resource quadratic-cost coefficient
  int quad_nodes = 48;            // per dimension
  long mc_draws = 10'000'000;     // fallback for dimensions quadrature cannot handle
  std::uint64_t mc_seed = 0x5eedbeef;

  static TruthConfig from(const DgpConfig& dgp, double lambda_cost = 2.0) {
    TruthConfig t;
    t.application = dgp.application;
    t.form = dgp.form;
    t.k = dgp.k;
    t.l = dgp.l;
    t.lambda_cost = lambda_cost;
    return t;
  }
};

// E[V(pi(z), z)]: closed-form integration over the context distribution where
// the integrand is low-dimensional (exactly splitting the step discontinuity
// when l == 1), Monte Carlo with a fixed oracle seed otherwise. Pricing and
// quadratic-revenue values are E[pi (a - b pi)]; the resource value is
// E[<theta(z_bar), pi(z)>] - (lambda_cost/2) E[||pi(z)||^2].
double true_policy_value(const TruthConfig& cfg, const Policy& pi);

// Moments of the coefficient functions against the context, used by the
// closed-form best-in-class solutions: E[a], E[b], E[a z], E[b z],
// E[b z z^T], and E[z z^T].
struct FormMoments {
  double ea = 0.0, eb = 0.0;
  VectorXd az, bz;   // E[a(z_bar) z], E[b(z_bar) z]
  MatrixXd bzz;      // E[b(z_bar) z z^T]
  MatrixXd zz;       // E[z z^T]
};
FormMoments form_moments(const TruthConfig& cfg);

struct BestInClass {
  Policy policy;
  double value = 0.0;
};

// Maximizer of the true value over the policy space, by the closed-form
// vertex of the concave families (constant, linear, multitask-linear).
BestInClass best_in_class(const TruthConfig& cfg, const PolicySpace& space);

}  // namespace drpolicy
