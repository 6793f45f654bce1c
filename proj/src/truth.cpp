#include "drpolicy/truth.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "drpolicy/errors.hpp"
#include "drpolicy/rng.hpp"

namespace drpolicy {

Quadrature gauss_legendre(int n, double lo, double hi) {
  // Nodes via Newton iteration on P_n; standard and fully deterministic.
  Quadrature q;
  q.nodes.resize(static_cast<std::size_t>(n));
  q.weights.resize(static_cast<std::size_t>(n));
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    q.nodes[static_cast<std::size_t>(i)] = mid - half * x;
    q.nodes[static_cast<std::size_t>(n - 1 - i)] = mid + half * x;
    const double w = 2.0 * half / ((1.0 - x * x) * pp * pp);
    q.weights[static_cast<std::size_t>(i)] = w;
    q.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  return q;
}

namespace {

bool uses_summary_only(const Policy& pi) {
  switch (pi.form()) {
    case Policy::Form::Constant:
    case Policy::Form::Threshold:
    case Policy::Form::Sin:
      return true;
    default:
      return false;
  }
}

bool has_jump(const TruthConfig& cfg, const Policy& pi) {
  return cfg.form == Form::Step || pi.form() == Policy::Form::Threshold;
}

// Integrand in the full context vector.
double value_at(const TruthConfig& cfg, const Policy& pi, const VectorXd& z) {
  const double zb = z.head(cfg.l).mean();
  const auto [a, b] = dgp_coefficients(cfg.form, zb);
  const VectorXd action = pi.apply(z);
  if (cfg.application == Application::Resource) {
    return a * action(0) + b * action(1) - 0.5 * cfg.lambda_cost * action.squaredNorm();
  }
  const double p = action(0);
  return p * (a - b * p);
}

// Tensor-product Gauss-Legendre over the first `dim` coordinates of
// z in [1,2]^dim (the remaining coordinates do not enter the integrand).
// When split_first is set, the first coordinate's rule is split at 1.5.
double tensor_quadrature(const TruthConfig& cfg, const Policy& pi, int dim, bool split_first) {
  std::vector<Quadrature> rules(static_cast<std::size_t>(dim));
  Quadrature first;
  if (split_first) {
    const Quadrature a = gauss_legendre(cfg.quad_nodes, 1.0, 1.5);
    const Quadrature b = gauss_legendre(cfg.quad_nodes, 1.5, 2.0);
    first.nodes = a.nodes;
    first.weights = a.weights;
    first.nodes.insert(first.nodes.end(), b.nodes.begin(), b.nodes.end());
    first.weights.insert(first.weights.end(), b.weights.begin(), b.weights.end());
  } else {
    first = gauss_legendre(cfg.quad_nodes, 1.0, 2.0);
  }
  rules[0] = first;
  for (int d = 1; d < dim; ++d)
    rules[static_cast<std::size_t>(d)] = gauss_legendre(cfg.quad_nodes, 1.0, 2.0);

  VectorXd z = VectorXd::Constant(dim, 1.5);
  std::vector<std::size_t> idx(static_cast<std::size_t>(dim), 0);
  double total = 0.0;
  for (;;) {
    double w = 1.0;
    for (int d = 0; d < dim; ++d) {
      z(d) = rules[static_cast<std::size_t>(d)].nodes[idx[static_cast<std::size_t>(d)]];
      w *= rules[static_cast<std::size_t>(d)].weights[idx[static_cast<std::size_t>(d)]];
    }
    total += w * value_at(cfg, pi, z);
    int d = 0;
    for (; d < dim; ++d) {
      auto& i = idx[static_cast<std::size_t>(d)];
      if (++i < rules[static_cast<std::size_t>(d)].nodes.size()) break;
      i = 0;
    }
    if (d == dim) break;
  }
  return total;  // weights already sum to the interval length 1 per dimension
}

double monte_carlo(const TruthConfig& cfg, const Policy& pi, int dim) {
  Rng rng(cfg.mc_seed);
  double total = 0.0;
  VectorXd z(dim);
  for (long i = 0; i < cfg.mc_draws; ++i) {
    for (int d = 0; d < dim; ++d) z(d) = rng.uniform(1.0, 2.0);
    total += value_at(cfg, pi, z);
  }
  return total / static_cast<double>(cfg.mc_draws);
}

}  // namespace

double true_policy_value(const TruthConfig& cfg, const Policy& pi) {
  const int dim = uses_summary_only(pi) ? cfg.l : cfg.k;
  const bool jump = has_jump(cfg, pi);
  if (dim == 1) return tensor_quadrature(cfg, pi, 1, jump);
  if (dim <= 3 && (!jump || cfg.l == 1)) return tensor_quadrature(cfg, pi, dim, jump && cfg.l == 1);
  return monte_carlo(cfg, pi, dim);
}

FormMoments form_moments(const TruthConfig& cfg) {
  FormMoments m;
  const int k = cfg.k;
  const int l = cfg.l;
  m.az.setZero(k);
  m.bz.setZero(k);
  m.bzz.setZero(k, k);

  // U(1,2) raw moments for the coordinates that factor out.
  constexpr double e1 = 1.5, e2 = 7.0 / 3.0;

  // Low-dimensional joint moments with z_bar over the first l coordinates.
  // ma[i], mb[i]: E[a z_i], E[b z_i]; mbzz(i,j): E[b z_i z_j] for i, j < l.
  VectorXd ma = VectorXd::Zero(l), mb = VectorXd::Zero(l);
  MatrixXd mbzz = MatrixXd::Zero(l, l);
  const bool jump = cfg.form == Form::Step;
  if (l == 1) {
    Quadrature rule = gauss_legendre(cfg.quad_nodes, 1.0, 1.5);
    const Quadrature hi = gauss_legendre(cfg.quad_nodes, 1.5, 2.0);
    rule.nodes.insert(rule.nodes.end(), hi.nodes.begin(), hi.nodes.end());
    rule.weights.insert(rule.weights.end(), hi.weights.begin(), hi.weights.end());
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double z = rule.nodes[i];
      const double w = rule.weights[i];
      const auto [a, b] = dgp_coefficients(cfg.form, z);
      m.ea += w * a;
      m.eb += w * b;
      ma(0) += w * a * z;
      mb(0) += w * b * z;
      mbzz(0, 0) += w * b * z * z;
    }
  } else if (l <= 3 && !jump) {
    const Quadrature rule = gauss_legendre(cfg.quad_nodes, 1.0, 2.0);
    std::vector<std::size_t> idx(static_cast<std::size_t>(l), 0);
    VectorXd z(l);
    for (;;) {
      double w = 1.0;
      for (int d = 0; d < l; ++d) {
        z(d) = rule.nodes[idx[static_cast<std::size_t>(d)]];
        w *= rule.weights[idx[static_cast<std::size_t>(d)]];
      }
      const auto [a, b] = dgp_coefficients(cfg.form, z.mean());
      m.ea += w * a;
      m.eb += w * b;
      ma += w * a * z;
      mb += w * b * z;
      mbzz += w * b * z * z.transpose();
      int d = 0;
      for (; d < l; ++d) {
        auto& i = idx[static_cast<std::size_t>(d)];
        if (++i < rule.nodes.size()) break;
        i = 0;
      }
      if (d == l) break;
    }
  } else {
    Rng rng(cfg.mc_seed);
    VectorXd z(l);
    for (long i = 0; i < cfg.mc_draws; ++i) {
      for (int d = 0; d < l; ++d) z(d) = rng.uniform(1.0, 2.0);
      const auto [a, b] = dgp_coefficients(cfg.form, z.mean());
      m.ea += a;
      m.eb += b;
      ma += a * z;
      mb += b * z;
      mbzz += b * z * z.transpose();
    }
    const double inv = 1.0 / static_cast<double>(cfg.mc_draws);
    m.ea *= inv;
    m.eb *= inv;
    ma *= inv;
    mb *= inv;
    mbzz *= inv;
  }

  for (int i = 0; i < k; ++i) {
    m.az(i) = i < l ? ma(i) : m.ea * e1;
    m.bz(i) = i < l ? mb(i) : m.eb * e1;
  }
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      if (i < l && j < l) m.bzz(i, j) = mbzz(i, j);
      else if (i < l) m.bzz(i, j) = mb(i) * e1;
      else if (j < l) m.bzz(i, j) = mb(j) * e1;
      else m.bzz(i, j) = m.eb * (i == j ? e2 : e1 * e1);
    }

  m.zz = MatrixXd::Constant(k, k, e1 * e1);
  m.zz.diagonal().setConstant(e2);
  return m;
}

BestInClass best_in_class(const TruthConfig& cfg, const PolicySpace& space) {
  const FormMoments m = form_moments(cfg);
  BestInClass out;
  switch (space.family) {
    case PolicySpace::Family::Constant: {
      // V(gamma) = gamma Ea - gamma^2 Eb, exact for in-box constants.
      const double vertex = m.ea / (2.0 * m.eb);
      Policy best = space.make_constant(vertex);
      double best_value = true_policy_value(cfg, best);
      for (int i = 0; i < space.grid_points; ++i) {
        const double t = space.grid_points == 1
                             ? 0.0
                             : static_cast<double>(i) / (space.grid_points - 1);
        const double g = space.param_lo + t * (space.param_hi - space.param_lo);
        const double v = g * m.ea - g * g * m.eb;
        if (v > best_value) {
          best = space.make_constant(g);
          best_value = v;
        }
      }
      out.policy = best;
      out.value = best_value;
      break;
    }
    case PolicySpace::Family::Linear: {
      // V(g) = g.u - g^T W g with u = E[a z], W = E[b z z^T].
      const VectorXd gamma = 0.5 * m.bzz.ldlt().solve(m.az);
      out.policy = space.make_linear(gamma);
      out.value = true_policy_value(cfg, out.policy);
      break;
    }
    case PolicySpace::Family::MultiTaskLinear: {
      // Rows decouple: alpha_t = (1/lambda) W^-1 u_t with W = E[z z^T].
      const Eigen::LDLT<MatrixXd> w(m.zz);
      MatrixXd rows(2, cfg.k);
      rows.row(0) = (w.solve(m.az) / cfg.lambda_cost).transpose();
      rows.row(1) = (w.solve(m.bz) / cfg.lambda_cost).transpose();
      out.policy = Policy::linear_multi_task(rows);
      out.value = true_policy_value(cfg, out.policy);
      break;
    }
  }
  return out;
}

}  // namespace drpolicy
