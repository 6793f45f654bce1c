#include "drpolicy/policy_opt.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "drpolicy/errors.hpp"
#include "drpolicy/nuisance.hpp"
#include "drpolicy/poly.hpp"
#include "drpolicy/rng.hpp"

namespace drpolicy {
namespace {

bool lex_less(const VectorXd& lhs, const VectorXd& rhs) {
  if (lhs.size() != rhs.size()) return lhs.size() < rhs.size();
  for (Eigen::Index i = 0; i < lhs.size(); ++i) {
    if (lhs(i) < rhs(i)) return true;
    if (lhs(i) > rhs(i)) return false;
  }
  return false;
}

}  // namespace

DataSplit split_three(Eigen::Index n, const SplitConfig& cfg, std::uint64_t seed) {
  if (cfg.nuisance <= 0.0 || cfg.validation <= 0.0 || cfg.training <= 0.0)
    throw InvalidInputError("split_three: all fractions must be positive");
  if (std::abs(cfg.nuisance + cfg.validation + cfg.training - 1.0) > 1e-9)
    throw InvalidInputError("split_three: fractions must sum to one");

  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  Rng rng(seed);
  for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);

  const auto n1 = static_cast<std::size_t>(std::llround(cfg.nuisance * static_cast<double>(n)));
  const auto nv = static_cast<std::size_t>(std::llround(cfg.validation * static_cast<double>(n)));
  DataSplit split;
  split.nuisance.assign(perm.begin(), perm.begin() + static_cast<long>(n1));
  split.validation.assign(perm.begin() + static_cast<long>(n1),
                          perm.begin() + static_cast<long>(n1 + nv));
  split.training.assign(perm.begin() + static_cast<long>(n1 + nv), perm.end());
  if (split.nuisance.empty() || split.validation.empty() || split.training.empty())
    throw InvalidInputError("split_three: a split is empty at this sample size");
  return split;
}

double mu_n(double r_hat, Eigen::Index n_validation, const MuRule& rule) {
  if (n_validation < 1) throw InvalidInputError("mu_n: empty validation sample");
  return rule.c * r_hat *
         std::sqrt(std::log(1.0 / rule.delta) / static_cast<double>(n_validation));
}

PricingRecordArray PricingRecordArray::from_records(const DrRecords& records, int summary_len) {
  if (records.empty()) throw InvalidInputError("PricingRecordArray: no records");
  const auto n = static_cast<Eigen::Index>(records.size());
  PricingRecordArray out;
  out.summary_len = summary_len;
  out.a.resize(n);
  out.b.resize(n);
  out.contexts.resize(n, records.front().context.size());
  out.zbar.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const DrRecord& r = records[static_cast<std::size_t>(i)];
    out.a(i) = r.theta_dr(0);
    out.b(i) = r.theta_dr(1);
    out.contexts.row(i) = r.context.transpose();
    out.zbar(i) = r.context.head(summary_len).mean();
  }
  return out;
}

Eigen::ArrayXd PricingRecordArray::prices(const Policy& pi) const {
  const Eigen::Index n = size();
  Eigen::ArrayXd p(n);
  switch (pi.form()) {
    case Policy::Form::Constant:
      p.setConstant(pi.params()(0));
      break;
    case Policy::Form::Linear:
      p = (contexts * pi.params()).array();
      break;
    case Policy::Form::Threshold:
      p = (zbar > pi.params()(2)).select(pi.params()(1), Eigen::ArrayXd::Constant(n, pi.params()(0)));
      break;
    case Policy::Form::Sin:
      p = zbar.sin();
      break;
    default:
      for (Eigen::Index i = 0; i < n; ++i) p(i) = pi.apply(contexts.row(i))(0);
      return p;
  }
  const ActionBox& box = pi.box();
  if (!box.unbounded()) p = p.min(box.hi).max(box.lo);
  return p;
}

PricingRecordArray::Score PricingRecordArray::score(const Policy& pi) const {
  const Eigen::ArrayXd p = prices(pi);
  const Eigen::ArrayXd contrib = p * (a - b * p);
  Score s;
  s.value = contrib.mean();
  s.rms = std::sqrt(contrib.square().mean());
  return s;
}

ValueEstimate PricingRecordArray::value(const Policy& pi) const {
  const Eigen::ArrayXd p = prices(pi);
  return ValueEstimate::from_contributions((p * (a - b * p)).matrix());
}

std::vector<Policy> generate_candidates(const PolicySpace& space, std::uint64_t seed,
                                        const std::vector<Policy>& anchors) {
  std::vector<Policy> out;
  Rng rng(seed);
  switch (space.family) {
    case PolicySpace::Family::Constant: {
      out.reserve(static_cast<std::size_t>(space.grid_points) + anchors.size());
      for (int i = 0; i < space.grid_points; ++i) {
        const double t = space.grid_points == 1
                             ? 0.0
                             : static_cast<double>(i) / (space.grid_points - 1);
        out.push_back(space.make_constant(space.param_lo + t * (space.param_hi - space.param_lo)));
      }
      for (const Policy& p : anchors) out.push_back(p);
      break;
    }
    case PolicySpace::Family::Linear: {
      const int k = space.context_dim;
      out.reserve(static_cast<std::size_t>(space.random_candidates) +
                  anchors.size() * (1 + static_cast<std::size_t>(space.perturbations)));
      for (int i = 0; i < space.random_candidates; ++i) {
        VectorXd g(k);
        for (int j = 0; j < k; ++j) g(j) = rng.uniform(space.param_lo, space.param_hi);
        out.push_back(space.make_linear(std::move(g)));
      }
      const double scale = space.perturb_scale * (space.param_hi - space.param_lo);
      for (const Policy& anchor : anchors) {
        out.push_back(anchor);
        const VectorXd base = anchor.flat_params();
        for (int i = 0; i < space.perturbations; ++i) {
          VectorXd g(k);
          for (int j = 0; j < k; ++j) g(j) = base(j) + scale * rng.normal();
          out.push_back(space.make_linear(std::move(g)));
        }
      }
      break;
    }
    case PolicySpace::Family::MultiTaskLinear:
      throw InvalidInputError("generate_candidates: multitask policies are fit, not enumerated");
  }
  if (out.empty()) throw InvalidInputError("generate_candidates: empty candidate set");
  return out;
}

Policy erm_argmax(const std::vector<Policy>& candidates,
                  const std::function<double(const Policy&)>& score) {
  if (candidates.empty()) throw InvalidInputError("erm_argmax: empty candidate set");
  std::size_t best = 0;
  double best_value = score(candidates[0]);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double v = score(candidates[i]);
    if (v > best_value ||
        (v == best_value &&
         lex_less(candidates[i].flat_params(), candidates[best].flat_params()))) {
      best = i;
      best_value = v;
    }
  }
  return candidates[best];
}

Policy optimize_constant_pricing(const PricingRecordArray& rec, const PolicySpace& space) {
  const double mean_a = rec.a.mean();
  const double mean_b = rec.b.mean();
  if (mean_b > 0.0) return space.make_constant(mean_a / (2.0 * mean_b));
  // Concavity fails: the maximum of gamma (mean_a - mean_b gamma) on the box
  // sits at an endpoint.
  const Policy lo = space.make_constant(space.param_lo);
  const Policy hi = space.make_constant(space.param_hi);
  return rec.score(lo).value >= rec.score(hi).value ? lo : hi;
}

Policy optimize_linear_pricing(const PricingRecordArray& rec, const PolicySpace& space,
                               std::uint64_t seed) {
  const Eigen::Index k = rec.contexts.cols();
  MatrixXd m = MatrixXd::Zero(k, k);
  VectorXd v = VectorXd::Zero(k);
  for (Eigen::Index i = 0; i < rec.size(); ++i) {
    const VectorXd z = rec.contexts.row(i);
    m.noalias() += rec.b(i) * z * z.transpose();
    v.noalias() += rec.a(i) * z;
  }

  VectorXd gamma;
  Eigen::LLT<MatrixXd> llt(2.0 * m);
  if (llt.info() == Eigen::Success && llt.rcond() > 1e-12) {
    gamma = llt.solve(v);
  } else {
    const MatrixXd ridged =
        2.0 * m + (1e-6 * m.trace() / static_cast<double>(k)) * MatrixXd::Identity(k, k);
    gamma = ridged.ldlt().solve(v);
  }
  if (!gamma.allFinite()) gamma = VectorXd::Zero(k);

  std::vector<Policy> candidates = generate_candidates(space, seed, {space.make_linear(gamma)});
  return erm_argmax(candidates, [&](const Policy& p) { return rec.score(p).value; });
}

Policy erm(const PricingRecordArray& rec, const PolicySpace& space, std::uint64_t seed) {
  switch (space.family) {
    case PolicySpace::Family::Constant: {
      const std::vector<Policy> candidates =
          generate_candidates(space, seed, {optimize_constant_pricing(rec, space)});
      return erm_argmax(candidates, [&](const Policy& p) { return rec.score(p).value; });
    }
    case PolicySpace::Family::Linear:
      return optimize_linear_pricing(rec, space, seed);
    default:
      throw InvalidInputError("erm: unsupported policy family");
  }
}

RegularizedErmResult regularized_erm_records(const PricingRecordArray& validation_records,
                                             const PricingRecordArray& training_records,
                                             const PolicySpace& space, const MuRule& mu,
                                             std::uint64_t seed,
                                             std::optional<double> mu_override) {
  // Step 3: validation ERM over the base candidates plus the closed-form
  // maximizer of the validation records.
  std::vector<Policy> anchors_v;
  if (space.family == PolicySpace::Family::Constant)
    anchors_v.push_back(optimize_constant_pricing(validation_records, space));
  else
    anchors_v.push_back(optimize_linear_pricing(validation_records, space,
                                                substream_seed(seed, 11)));
  std::vector<Policy> candidates = generate_candidates(space, seed, anchors_v);

  std::vector<double> val_value(candidates.size());
  double r_hat = 0.0;
  std::size_t best_v = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto s = validation_records.score(candidates[i]);
    val_value[i] = s.value;
    r_hat = std::max(r_hat, s.rms);
    if (s.value > val_value[best_v] ||
        (s.value == val_value[best_v] &&
         lex_less(candidates[i].flat_params(), candidates[best_v].flat_params())))
      best_v = i;
  }
  const Policy pi1 = candidates[best_v];
  const double pi1_val_value = val_value[best_v];

  RegularizedErmResult out;
  out.preliminary = pi1;
  out.r_hat = r_hat;
  out.mu = mu_override ? *mu_override : mu_n(r_hat, validation_records.size(), mu);

  // Step 5 candidates: the step-3 set, the closed-form maximizer of the
  // training records, pi_1, and Gaussian perturbations around both.
  std::vector<Policy> anchors_t;
  if (space.family == PolicySpace::Family::Constant) {
    anchors_t.push_back(optimize_constant_pricing(training_records, space));
    anchors_t.push_back(pi1);
  } else {
    anchors_t.push_back(optimize_linear_pricing(training_records, space,
                                                substream_seed(seed, 13)));
    anchors_t.push_back(pi1);
  }
  Rng rng(substream_seed(seed, 17));
  const double scale = space.perturb_scale * (space.param_hi - space.param_lo);
  for (const Policy& anchor : anchors_t) {
    candidates.push_back(anchor);
    val_value.push_back(validation_records.score(anchor).value);
    if (space.family == PolicySpace::Family::Linear) {
      const VectorXd base = anchor.flat_params();
      for (int i = 0; i < space.perturbations; ++i) {
        VectorXd g(space.context_dim);
        for (int j = 0; j < space.context_dim; ++j) g(j) = base(j) + scale * rng.normal();
        Policy p = space.make_linear(std::move(g));
        val_value.push_back(validation_records.score(p).value);
        candidates.push_back(std::move(p));
      }
    }
  }

  // Step 4/5: constrained ERM on the training records over the policies whose
  // validation regret against pi_1 is at most mu_n.
  std::size_t best_t = 0;
  double best_t_value = 0.0;
  bool found = false;
  out.feasible_count = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (pi1_val_value - val_value[i] > out.mu) continue;
    ++out.feasible_count;
    const double v = training_records.score(candidates[i]).value;
    if (!found || v > best_t_value ||
        (v == best_t_value &&
         lex_less(candidates[i].flat_params(), candidates[best_t].flat_params()))) {
      best_t = i;
      best_t_value = v;
      found = true;
    }
  }
  out.policy = candidates[best_t];
  out.validation_slack = pi1_val_value - val_value[best_t];
  out.final_candidates = std::move(candidates);
  return out;
}

RegularizedErmResult regularized_erm(const LoggedDataset& data, const FeatureMap& map,
                                     const PolicySpace& space, const SplitConfig& split,
                                     const MuRule& mu, std::uint64_t seed) {
  if (map.kind() != FeatureMap::Kind::PricingLinear &&
      map.kind() != FeatureMap::Kind::PricingQuadratic)
    throw InvalidInputError("regularized_erm: pricing feature map required");

  const DataSplit idx = split_three(data.rows(), split, substream_seed(seed, 1));
  const LoggedDataset s1 = data.take(idx.nuisance);
  const LoggedDataset sv = data.take(idx.validation);
  const LoggedDataset st = data.take(idx.training);

  const PolyFeatureConfig poly;
  const ThetaHat theta = fit_theta_hat(s1, map, poly, substream_seed(seed, 2));

  auto build = [&](const LoggedDataset& part) {
    DrRecords recs;
    recs.reserve(static_cast<std::size_t>(part.rows()));
    for (Eigen::Index r = 0; r < part.rows(); ++r) {
      const VectorXd z = part.contexts.row(r);
      const VectorXd th = theta(z);
      DrRecord rec;
      rec.context = z;
      rec.source_row = r;
      rec.theta_dr.resize(2);
      recs.push_back(std::move(rec));
    }
    return recs;
  };

  DrRecords recs_v = build(sv);
  DrRecords recs_t = build(st);
  if (map.kind() == FeatureMap::Kind::PricingLinear) {
    const PricingNuisance pn = fit_pricing_nuisances(s1, poly, substream_seed(seed, 3));
    auto fill = [&](const LoggedDataset& part, DrRecords& recs) {
      for (Eigen::Index r = 0; r < part.rows(); ++r) {
        const VectorXd z = part.contexts.row(r);
        const VectorXd th = theta(z);
        const auto [adr, bdr] = theta_dr_pricing_linear(part.y(r), part.actions(r, 0), th(0),
                                                        -th(1), pn.g_hat(z), pn.sigma2);
        recs[static_cast<std::size_t>(r)].theta_dr << adr, bdr;
      }
    };
    fill(sv, recs_v);
    fill(st, recs_t);
  } else {
    const QuadraticMoments qm = fit_quadratic_moments(s1, poly, substream_seed(seed, 3));
    auto fill = [&](const LoggedDataset& part, DrRecords& recs) {
      for (Eigen::Index r = 0; r < part.rows(); ++r) {
        const VectorXd z = part.contexts.row(r);
        const VectorXd th = theta(z);
        const auto [adr, bdr] = theta_dr_pricing_quadratic(part.y(r), part.actions(r, 0), th(0),
                                                           -th(1), qm.mu1_hat(z), qm.c2, qm.c3,
                                                           qm.c4);
        recs[static_cast<std::size_t>(r)].theta_dr << adr, bdr;
      }
    };
    fill(sv, recs_v);
    fill(st, recs_t);
  }

  const int l = space.summary_len;
  return regularized_erm_records(PricingRecordArray::from_records(recs_v, l),
                                 PricingRecordArray::from_records(recs_t, l), space, mu,
                                 substream_seed(seed, 4));
}

}  // namespace drpolicy
