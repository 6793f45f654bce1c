#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>

#include "drpolicy/types.hpp"

namespace drpolicy {

enum class Form { Quadratic, Step, Sigmoid, Linear };
enum class Regime { Low, High };  // (k=2, l=1) and (k=10, l=3)
enum class Application { PricingLinear, PricingQuadratic, Resource };

std::string to_string(Form f);
std::string to_string(Regime r);
bool form_from_string(const std::string& s, Form& out);

struct DgpConfig {
  Application application = Application::PricingLinear;
  Form form = Form::Quadratic;
  int k = 2;            // context dimension
  int l = 1;            // coordinates driving the outcome (z_bar = mean of first l)
  Eigen::Index n = 1000;
  std::uint64_t seed = 0;
  double noise_sd = 1.0;

  void set_regime(Regime r) {
    k = r == Regime::Low ? 2 : 10;
    l = r == Regime::Low ? 1 : 3;
  }
  Regime regime() const { return k == 2 && l == 1 ? Regime::Low : Regime::High; }
};

// Demand coefficient functions of the context summary. The step form treats
// the measure-zero tie z_bar == 1.5 as the upper branch.
std::pair<double, double> dgp_coefficients(Form form, double z_bar);

inline double context_summary(const VectorXd& z, int l) { return z.head(l).mean(); }

// z ~ U(1,2)^k, price ~ N(z_bar, 1), demand d = a(z_bar) - b(z_bar) p + noise.
LoggedDataset generate_pricing_data(const DgpConfig& cfg);

// Same contexts and prices; outcome r = a(z_bar) p - b(z_bar) p^2 + noise.
LoggedDataset generate_quadratic_data(const DgpConfig& cfg);

// Two tasks invested independently: a_1, a_2 ~ N(z_bar, 1) i.i.d.,
// y = a(z_bar) a_1 + b(z_bar) a_2 + noise.
LoggedDataset generate_resource_data(const DgpConfig& cfg);

LoggedDataset generate_data(const DgpConfig& cfg);

// True nuisance functions of a DGP, for oracle estimators.
struct TrueNuisance {
  Form form;
  int l = 1;
  Application application = Application::PricingLinear;

  // Demand convention (a, b), both positive.
  std::pair<double, double> coefficients(const VectorXd& z) const {
    return dgp_coefficients(form, context_summary(z, l));
  }

  // Signed coefficient vector theta0(z) for the generic moment.
  VectorXd theta0(const VectorXd& z) const;
  // Sigma0(z) = E[phi phi^T | z] for the application's feature map.
  MatrixXd sigma0(const VectorXd& z) const;

  NuisancePair pair() const {
    return NuisancePair{[*this](const VectorXd& z) { return theta0(z); },
                        [*this](const VectorXd& z) { return sigma0(z); }};
  }

  double g0(const VectorXd& z) const { return context_summary(z, l); }
  static constexpr double sigma2_0 = 1.0;
  // Central moments of the N(0,1) price noise.
  static constexpr double c2_0 = 1.0, c3_0 = 0.0, c4_0 = 3.0;
};

inline TrueNuisance true_nuisance(const DgpConfig& cfg) {
  return TrueNuisance{cfg.form, cfg.l, cfg.application};
}

}  // namespace drpolicy
