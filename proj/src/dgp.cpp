#include "drpolicy/dgp.hpp"

#include <cmath>

#include "drpolicy/errors.hpp"
#include "drpolicy/rng.hpp"

namespace drpolicy {

std::string to_string(Form f) {
  switch (f) {
    case Form::Quadratic: return "quadratic";
    case Form::Step: return "step";
    case Form::Sigmoid: return "sigmoid";
    case Form::Linear: return "linear";
  }
  return "?";
}

std::string to_string(Regime r) { return r == Regime::Low ? "low" : "high"; }

bool form_from_string(const std::string& s, Form& out) {
  if (s == "quadratic") out = Form::Quadratic;
  else if (s == "step") out = Form::Step;
  else if (s == "sigmoid") out = Form::Sigmoid;
  else if (s == "linear") out = Form::Linear;
  else return false;
  return true;
}

std::pair<double, double> dgp_coefficients(Form form, double z_bar) {
  switch (form) {
    case Form::Quadratic:
      return {2.0 * z_bar * z_bar, 0.6 * z_bar};
    case Form::Step:
      return z_bar < 1.5 ? std::pair{5.0, 0.7} : std::pair{6.0, 1.2};
    case Form::Sigmoid: {
      const double s = 1.0 / (1.0 + std::exp(z_bar));
      return {s + 3.0, 2.0 * s + 0.1};
    }
    case Form::Linear:
      return {6.0 * z_bar, z_bar};
  }
  throw InvalidInputError("dgp_coefficients: unknown form");
}

namespace {

// One RNG stream per dataset; per-row draw order is fixed so that the pricing
// and quadratic generators share contexts and prices at equal seeds.
void fill_contexts_row(Rng& rng, MatrixXd& z, Eigen::Index r) {
  for (Eigen::Index c = 0; c < z.cols(); ++c) z(r, c) = rng.uniform(1.0, 2.0);
}

}  // namespace

LoggedDataset generate_pricing_data(const DgpConfig& cfg) {
  if (cfg.n < 1 || cfg.l < 1 || cfg.l > cfg.k) throw InvalidInputError("DgpConfig invalid");
  Rng rng(substream_seed(cfg.seed, 0x9c1));
  LoggedDataset out;
  out.y.resize(cfg.n);
  out.actions.resize(cfg.n, 1);
  out.contexts.resize(cfg.n, cfg.k);
  for (Eigen::Index r = 0; r < cfg.n; ++r) {
    fill_contexts_row(rng, out.contexts, r);
    const double zb = out.contexts.row(r).head(cfg.l).mean();
    const double price = zb + rng.normal();
    const auto [a, b] = dgp_coefficients(cfg.form, zb);
    out.actions(r, 0) = price;
    out.y(r) = a - b * price + cfg.noise_sd * rng.normal();
  }
  return out;
}

LoggedDataset generate_quadratic_data(const DgpConfig& cfg) {
  if (cfg.n < 1 || cfg.l < 1 || cfg.l > cfg.k) throw InvalidInputError("DgpConfig invalid");
  Rng rng(substream_seed(cfg.seed, 0x9c1));
  LoggedDataset out;
  out.y.resize(cfg.n);
  out.actions.resize(cfg.n, 1);
  out.contexts.resize(cfg.n, cfg.k);
  for (Eigen::Index r = 0; r < cfg.n; ++r) {
    fill_contexts_row(rng, out.contexts, r);
    const double zb = out.contexts.row(r).head(cfg.l).mean();
    const double price = zb + rng.normal();
    const auto [a, b] = dgp_coefficients(cfg.form, zb);
    out.actions(r, 0) = price;
    out.y(r) = a * price - b * price * price + cfg.noise_sd * rng.normal();
  }
  return out;
}

LoggedDataset generate_resource_data(const DgpConfig& cfg) {
  if (cfg.n < 1 || cfg.l < 1 || cfg.l > cfg.k) throw InvalidInputError("DgpConfig invalid");
  Rng rng(substream_seed(cfg.seed, 0x9c1));
  LoggedDataset out;
  out.y.resize(cfg.n);
  out.actions.resize(cfg.n, 2);
  out.contexts.resize(cfg.n, cfg.k);
  for (Eigen::Index r = 0; r < cfg.n; ++r) {
    fill_contexts_row(rng, out.contexts, r);
    const double zb = out.contexts.row(r).head(cfg.l).mean();
    const double a1 = zb + rng.normal();
    const double a2 = zb + rng.normal();
    const auto [a, b] = dgp_coefficients(cfg.form, zb);
    out.actions(r, 0) = a1;
    out.actions(r, 1) = a2;
    out.y(r) = a * a1 + b * a2 + cfg.noise_sd * rng.normal();
  }
  return out;
}

LoggedDataset generate_data(const DgpConfig& cfg) {
  switch (cfg.application) {
    case Application::PricingLinear: return generate_pricing_data(cfg);
    case Application::PricingQuadratic: return generate_quadratic_data(cfg);
    case Application::Resource: return generate_resource_data(cfg);
  }
  throw InvalidInputError("generate_data: unknown application");
}

VectorXd TrueNuisance::theta0(const VectorXd& z) const {
  const auto [a, b] = coefficients(z);
  VectorXd th(2);
  switch (application) {
    case Application::PricingLinear:
    case Application::PricingQuadratic:
      th << a, -b;  // demand/revenue models carry the negative slope
      break;
    case Application::Resource:
      th << a, b;
      break;
  }
  return th;
}

MatrixXd TrueNuisance::sigma0(const VectorXd& z) const {
  const double zb = context_summary(z, l);
  MatrixXd s(2, 2);
  switch (application) {
    case Application::PricingLinear:
      // E[(1,p)(1,p)^T | z] with p ~ N(z_bar, 1).
      s << 1.0, zb, zb, 1.0 + zb * zb;
      break;
    case Application::PricingQuadratic: {
      double m2, m3, m4;
      QuadraticMoments::raw_moments(zb, c2_0, c3_0, c4_0, m2, m3, m4);
      s << m2, m3, m3, m4;
      break;
    }
    case Application::Resource:
      // Independent N(z_bar, 1) investments.
      s << 1.0 + zb * zb, zb * zb, zb * zb, 1.0 + zb * zb;
      break;
  }
  return s;
}

}  // namespace drpolicy
