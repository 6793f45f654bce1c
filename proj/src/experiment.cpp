#include "drpolicy/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "drpolicy/errors.hpp"
#include "drpolicy/estimators.hpp"
#include "drpolicy/multitask.hpp"
#include "drpolicy/nuisance.hpp"
#include "drpolicy/parallel.hpp"
#include "drpolicy/rng.hpp"

namespace drpolicy {

std::string to_string(Estimator e) {
  switch (e) {
    case Estimator::Dr: return "dr";
    case Estimator::Direct: return "direct";
    case Estimator::Ips: return "ips";
    case Estimator::Oracle: return "oracle";
  }
  return "?";
}

std::string to_string(LearnerKind l) {
  switch (l) {
    case LearnerKind::Dr: return "dr";
    case LearnerKind::Direct: return "direct";
    case LearnerKind::Ips: return "ips";
    case LearnerKind::Oracle: return "oracle";
    case LearnerKind::DrRegularized: return "dr-regularized";
  }
  return "?";
}

std::string to_string(EvalPolicy p) {
  switch (p) {
    case EvalPolicy::Constant: return "constant";
    case EvalPolicy::Linear: return "linear";
    case EvalPolicy::Threshold: return "threshold";
    case EvalPolicy::Sin: return "sin";
  }
  return "?";
}

std::string to_string(PolicySpace::Family f) {
  switch (f) {
    case PolicySpace::Family::Constant: return "constant";
    case PolicySpace::Family::Linear: return "linear";
    case PolicySpace::Family::MultiTaskLinear: return "multitask";
  }
  return "?";
}

bool estimator_from_string(const std::string& s, Estimator& out) {
  if (s == "dr") out = Estimator::Dr;
  else if (s == "direct") out = Estimator::Direct;
  else if (s == "ips") out = Estimator::Ips;
  else if (s == "oracle") out = Estimator::Oracle;
  else return false;
  return true;
}

bool learner_from_string(const std::string& s, LearnerKind& out) {
  if (s == "dr") out = LearnerKind::Dr;
  else if (s == "direct") out = LearnerKind::Direct;
  else if (s == "ips") out = LearnerKind::Ips;
  else if (s == "oracle") out = LearnerKind::Oracle;
  else if (s == "dr-regularized") out = LearnerKind::DrRegularized;
  else return false;
  return true;
}

bool eval_policy_from_string(const std::string& s, EvalPolicy& out) {
  if (s == "constant") out = EvalPolicy::Constant;
  else if (s == "linear") out = EvalPolicy::Linear;
  else if (s == "threshold") out = EvalPolicy::Threshold;
  else if (s == "sin") out = EvalPolicy::Sin;
  else return false;
  return true;
}

std::optional<Aggregate> aggregate_stats(const std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  Aggregate agg;
  agg.count = static_cast<int>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  agg.mean = sum / static_cast<double>(values.size());
  if (values.size() == 1) {
    agg.single = true;
    agg.stdev = 0.0;
    return agg;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - agg.mean) * (v - agg.mean);
  agg.stdev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return agg;
}

Policy make_eval_policy(EvalPolicy which, int k, int l, const ActionBox& box) {
  switch (which) {
    case EvalPolicy::Constant:
      return Policy::constant(1.0, box);
    case EvalPolicy::Linear: {
      // pi(z) = z_bar, expressed as an inner product with the full context.
      VectorXd g = VectorXd::Zero(k);
      g.head(l).setConstant(1.0 / static_cast<double>(l));
      return Policy::linear(std::move(g), box);
    }
    case EvalPolicy::Threshold:
      return Policy::threshold(l, 1.0, 2.0, 1.5, box);
    case EvalPolicy::Sin:
      return Policy::sine(l, box);
  }
  throw InvalidInputError("make_eval_policy: unknown policy");
}

PolicySpace make_space(PolicySpace::Family family, const ExperimentConfig& cfg) {
  DgpConfig d;
  d.set_regime(cfg.regime);
  switch (family) {
    case PolicySpace::Family::Constant: {
      PolicySpace s = PolicySpace::constant_pricing(cfg.pricing_box);
      s.summary_len = d.l;
      return s;
    }
    case PolicySpace::Family::Linear: {
      PolicySpace s = PolicySpace::linear_pricing(d.k, cfg.pricing_box);
      s.summary_len = d.l;
      return s;
    }
    case PolicySpace::Family::MultiTaskLinear: {
      PolicySpace s = PolicySpace::multitask_linear(2, d.k);
      s.summary_len = d.l;
      return s;
    }
  }
  throw InvalidInputError("make_space: unknown family");
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<Eigen::Index> iota_range(Eigen::Index lo, Eigen::Index hi) {
  std::vector<Eigen::Index> v(static_cast<std::size_t>(hi - lo));
  for (Eigen::Index i = lo; i < hi; ++i) v[static_cast<std::size_t>(i - lo)] = i;
  return v;
}

// ---- pricing record builders -------------------------------------------

struct PricingLinearFit {
  ThetaHat theta;
  PricingNuisance pn;
};

struct PricingQuadraticFit {
  ThetaHat theta;
  QuadraticMoments qm;
};

PricingRecordArray init_records(const LoggedDataset& part, int summary_len) {
  PricingRecordArray rec;
  rec.summary_len = summary_len;
  rec.a.resize(part.rows());
  rec.b.resize(part.rows());
  rec.contexts = part.contexts;
  rec.zbar.resize(part.rows());
  for (Eigen::Index r = 0; r < part.rows(); ++r)
    rec.zbar(r) = part.contexts.row(r).head(summary_len).mean();
  return rec;
}

PricingRecordArray pricing_linear_records(Estimator est, const LoggedDataset& part,
                                          const PricingLinearFit& fit, const TrueNuisance& truth) {
  PricingRecordArray rec = init_records(part, truth.l);
  for (Eigen::Index r = 0; r < part.rows(); ++r) {
    const VectorXd z = part.contexts.row(r);
    const double price = part.actions(r, 0);
    const double d = part.y(r);
    switch (est) {
      case Estimator::Direct: {
        const VectorXd th = fit.theta(z);
        rec.a(r) = th(0);
        rec.b(r) = -th(1);
        break;
      }
      case Estimator::Dr: {
        const VectorXd th = fit.theta(z);
        const auto [adr, bdr] =
            theta_dr_pricing_linear(d, price, th(0), -th(1), fit.pn.g_hat(z), fit.pn.sigma2);
        rec.a(r) = adr;
        rec.b(r) = bdr;
        break;
      }
      case Estimator::Ips: {
        // theta_IPS = Sigma_hat(z)^-1 phi(p, z) d, via the closed 2x2 inverse.
        const double g = fit.pn.g_hat(z);
        const double s2 = fit.pn.sigma2;
        rec.a(r) = (1.0 + g * (g - price) / s2) * d;
        rec.b(r) = -((price - g) / s2) * d;
        break;
      }
      case Estimator::Oracle: {
        const auto [a0, b0] = truth.coefficients(z);
        const auto [adr, bdr] =
            theta_dr_pricing_linear(d, price, a0, b0, truth.g0(z), TrueNuisance::sigma2_0);
        rec.a(r) = adr;
        rec.b(r) = bdr;
        break;
      }
    }
  }
  return rec;
}

PricingRecordArray pricing_quadratic_records(Estimator est, const LoggedDataset& part,
                                             const PricingQuadraticFit& fit,
                                             const TrueNuisance& truth) {
  PricingRecordArray rec = init_records(part, truth.l);
  for (Eigen::Index r = 0; r < part.rows(); ++r) {
    const VectorXd z = part.contexts.row(r);
    const double price = part.actions(r, 0);
    const double y = part.y(r);
    switch (est) {
      case Estimator::Direct: {
        const VectorXd th = fit.theta(z);
        rec.a(r) = th(0);
        rec.b(r) = -th(1);
        break;
      }
      case Estimator::Dr: {
        const VectorXd th = fit.theta(z);
        const auto [adr, bdr] = theta_dr_pricing_quadratic(y, price, th(0), -th(1),
                                                           fit.qm.mu1_hat(z), fit.qm.c2,
                                                           fit.qm.c3, fit.qm.c4);
        rec.a(r) = adr;
        rec.b(r) = bdr;
        break;
      }
      case Estimator::Ips: {
        double m2, m3, m4;
        QuadraticMoments::raw_moments(fit.qm.mu1_hat(z), fit.qm.c2, fit.qm.c3, fit.qm.c4, m2, m3,
                                      m4);
        const double det = m4 * m2 - m3 * m3;
        if (det <= 0.0)
          throw SingularCovarianceError("ips: non-positive moment determinant", r);
        rec.a(r) = (m4 * price - m3 * price * price) / det * y;
        rec.b(r) = -((m2 * price * price - m3 * price) / det) * y;
        break;
      }
      case Estimator::Oracle: {
        const auto [a0, b0] = truth.coefficients(z);
        const auto [adr, bdr] = theta_dr_pricing_quadratic(
            y, price, a0, b0, truth.g0(z), TrueNuisance::c2_0, TrueNuisance::c3_0,
            TrueNuisance::c4_0);
        rec.a(r) = adr;
        rec.b(r) = bdr;
        break;
      }
    }
  }
  return rec;
}

// ---- resource record builder ---------------------------------------------

struct ResourceFit {
  ThetaHat theta;
  SigmaHat sigma;
};

// Rows of per-observation theta estimates (tasks as columns).
MatrixXd resource_records(Estimator est, const LoggedDataset& part, const ResourceFit& fit,
                          const TrueNuisance& truth, const FeatureMap& map, double ridge = 1e-8) {
  MatrixXd rows(part.rows(), 2);
  for (Eigen::Index r = 0; r < part.rows(); ++r) {
    const VectorXd z = part.contexts.row(r);
    const VectorXd act = part.actions.row(r);
    const double y = part.y(r);
    switch (est) {
      case Estimator::Direct:
        rows.row(r) = fit.theta(z).transpose();
        break;
      case Estimator::Dr: {
        const NuisancePair pair{fit.theta.as_fn(), fit.sigma.as_fn()};
        rows.row(r) = theta_dr(y, act, z, map, pair, ridge).transpose();
        break;
      }
      case Estimator::Ips: {
        const MatrixXd sigma_inv = invert_sigma(fit.sigma(z), ridge, r);
        rows.row(r) = (sigma_inv * act * y).transpose();
        break;
      }
      case Estimator::Oracle: {
        const NuisancePair pair = truth.pair();
        rows.row(r) = theta_dr(y, act, z, map, pair, ridge).transpose();
        break;
      }
    }
  }
  return rows;
}

struct CellKey {
  std::string form, policy, estimator;
  long n;
};

}  // namespace

ExperimentResult run_evaluation_experiment(const ExperimentConfig& cfg) {
  if (cfg.application == Application::Resource)
    throw InvalidInputError("run_evaluation_experiment: pricing applications only");
  if (cfg.sims < 1) throw InvalidInputError("run_evaluation_experiment: sims must be >= 1");
  if (cfg.forms.empty() || cfg.policies.empty() || cfg.estimators.empty() || cfg.n_list.empty())
    throw InvalidInputError("run_evaluation_experiment: empty dimension");

  DgpConfig base;
  base.application = cfg.application;
  base.set_regime(cfg.regime);

  const std::size_t nf = cfg.forms.size();
  const std::size_t nn = cfg.n_list.size();
  const std::size_t np = cfg.policies.size();
  const std::size_t ne = cfg.estimators.size();
  const auto sims = static_cast<std::size_t>(cfg.sims);

  std::vector<Policy> policies;
  policies.reserve(np);
  for (EvalPolicy p : cfg.policies)
    policies.push_back(make_eval_policy(p, base.k, base.l, cfg.pricing_box));

  // Recomputed truths per (form, policy).
  std::vector<double> truths(nf * np);
  for (std::size_t f = 0; f < nf; ++f) {
    TruthConfig tc;
    tc.application = cfg.application;
    tc.form = cfg.forms[f];
    tc.k = base.k;
    tc.l = base.l;
    tc.mc_draws = cfg.mc_truth_draws;
    for (std::size_t p = 0; p < np; ++p)
      truths[f * np + p] = true_policy_value(tc, policies[p]);
  }

  // values[((f * nn + i) * sims + s) * np * ne + p * ne + e]
  std::vector<double> values(nf * nn * sims * np * ne, kNaN);
  std::vector<char> failed(nf * nn * sims, 0);

  const Eigen::Index tasks = static_cast<Eigen::Index>(nf * nn * sims);
  parallel_for(tasks, cfg.workers, [&](Eigen::Index task) {
    const auto s = static_cast<std::size_t>(task) % sims;
    const auto i = (static_cast<std::size_t>(task) / sims) % nn;
    const auto f = static_cast<std::size_t>(task) / (sims * nn);

    DgpConfig dgp = base;
    dgp.form = cfg.forms[f];
    dgp.n = cfg.n_list[i];
    dgp.seed = substream_seed(cfg.seed, 0xE7A1, f, i, s);
    const TrueNuisance truth = true_nuisance(dgp);
    try {
      const LoggedDataset data = generate_data(dgp);
      const Eigen::Index half = data.rows() / 2;
      const std::uint64_t fit_seed = substream_seed(dgp.seed, 0xF17);

      auto run_direction = [&](const LoggedDataset& fit_part, const LoggedDataset& eval_part,
                               std::vector<PricingRecordArray>& recs) {
        if (cfg.application == Application::PricingLinear) {
          PricingLinearFit fit{
              fit_theta_hat(fit_part, FeatureMap::pricing_linear(), cfg.poly, fit_seed),
              fit_pricing_nuisances(fit_part, cfg.poly, substream_seed(fit_seed, 2))};
          for (std::size_t e = 0; e < ne; ++e)
            recs.push_back(pricing_linear_records(cfg.estimators[e], eval_part, fit, truth));
        } else {
          PricingQuadraticFit fit{
              fit_theta_hat(fit_part, FeatureMap::pricing_quadratic(), cfg.poly, fit_seed),
              fit_quadratic_moments(fit_part, cfg.poly, substream_seed(fit_seed, 2))};
          for (std::size_t e = 0; e < ne; ++e)
            recs.push_back(pricing_quadratic_records(cfg.estimators[e], eval_part, fit, truth));
        }
      };

      const LoggedDataset part_a = data.take(iota_range(0, half));
      const LoggedDataset part_b = data.take(iota_range(half, data.rows()));
      std::vector<PricingRecordArray> recs;
      recs.reserve(ne * (cfg.crossfit_swap ? 2 : 1));
      run_direction(part_a, part_b, recs);
      if (cfg.crossfit_swap) run_direction(part_b, part_a, recs);

      for (std::size_t p = 0; p < np; ++p)
        for (std::size_t e = 0; e < ne; ++e) {
          double total = 0.0;
          Eigen::Index count = 0;
          for (std::size_t dir = 0; dir * ne + e < recs.size(); ++dir) {
            const PricingRecordArray& r = recs[dir * ne + e];
            total += r.value(policies[p]).value * static_cast<double>(r.size());
            count += r.size();
          }
          values[((f * nn + i) * sims + s) * np * ne + p * ne + e] =
              total / static_cast<double>(count);
        }
    } catch (const std::exception&) {
      failed[(f * nn + i) * sims + s] = 1;
    }
  });

  ExperimentResult out;
  const std::string regime_name = to_string(cfg.regime);
  for (std::size_t f = 0; f < nf; ++f)
    for (std::size_t i = 0; i < nn; ++i) {
      std::size_t cell_failures = 0;
      for (std::size_t s = 0; s < sims; ++s) cell_failures += failed[(f * nn + i) * sims + s];
      out.failed_sims += static_cast<long>(cell_failures);
      const bool drop = cell_failures * 10 > sims;
      for (std::size_t p = 0; p < np; ++p)
        for (std::size_t e = 0; e < ne; ++e) {
          std::vector<double> vals;
          vals.reserve(sims);
          for (std::size_t s = 0; s < sims; ++s) {
            const double v = values[((f * nn + i) * sims + s) * np * ne + p * ne + e];
            if (!std::isnan(v)) {
              vals.push_back(v);
              out.raw.push_back(SimRecord{static_cast<int>(s), to_string(cfg.forms[f]),
                                          regime_name, to_string(cfg.policies[p]),
                                          to_string(cfg.estimators[e]), cfg.n_list[i], v,
                                          truths[f * np + p], std::nullopt});
            }
          }
          if (drop) continue;
          const auto agg = aggregate_stats(vals);
          if (!agg) continue;
          out.rows.push_back(ResultRow{to_string(cfg.forms[f]), regime_name,
                                       to_string(cfg.policies[p]), to_string(cfg.estimators[e]),
                                       cfg.n_list[i], agg->count, agg->mean, agg->stdev,
                                       truths[f * np + p], std::nullopt, std::nullopt});
        }
      if (drop)
        out.dropped_cells.push_back(to_string(cfg.forms[f]) + "/n=" +
                                    std::to_string(cfg.n_list[i]));
    }
  sort_rows(out.rows);
  return out;
}

ExperimentResult run_regret_experiment(const ExperimentConfig& cfg) {
  if (cfg.sims < 1) throw InvalidInputError("run_regret_experiment: sims must be >= 1");
  if (cfg.forms.empty() || cfg.spaces.empty() || cfg.learners.empty() || cfg.n_list.empty())
    throw InvalidInputError("run_regret_experiment: empty dimension");
  if (cfg.application == Application::Resource) {
    for (PolicySpace::Family fam : cfg.spaces)
      if (fam != PolicySpace::Family::MultiTaskLinear)
        throw InvalidInputError("run_regret_experiment: resource allocation uses multitask spaces");
  }

  DgpConfig base;
  base.application = cfg.application;
  base.set_regime(cfg.regime);

  const std::size_t nf = cfg.forms.size();
  const std::size_t nn = cfg.n_list.size();
  const std::size_t nsp = cfg.spaces.size();
  const std::size_t nl = cfg.learners.size();
  const auto sims = static_cast<std::size_t>(cfg.sims);

  std::vector<PolicySpace> spaces;
  for (PolicySpace::Family fam : cfg.spaces) spaces.push_back(make_space(fam, cfg));

  // Best-in-class per (form, space).
  std::vector<BestInClass> best(nf * nsp);
  std::vector<TruthConfig> tcs(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    TruthConfig tc;
    tc.application = cfg.application;
    tc.form = cfg.forms[f];
    tc.k = base.k;
    tc.l = base.l;
    tc.lambda_cost = cfg.lambda_cost;
    tc.mc_draws = cfg.mc_truth_draws;
    tcs[f] = tc;
    for (std::size_t sp = 0; sp < nsp; ++sp) best[f * nsp + sp] = best_in_class(tc, spaces[sp]);
  }

  // values[(((f * nn + i) * sims + s) * nsp + sp) * nl + l]
  std::vector<double> values(nf * nn * sims * nsp * nl, kNaN);
  std::vector<char> failed(nf * nn * sims, 0);

  const FeatureMap resource_map = FeatureMap::identity_action(2);
  const Eigen::Index tasks = static_cast<Eigen::Index>(nf * nn * sims);
  parallel_for(tasks, cfg.workers, [&](Eigen::Index task) {
    const auto s = static_cast<std::size_t>(task) % sims;
    const auto i = (static_cast<std::size_t>(task) / sims) % nn;
    const auto f = static_cast<std::size_t>(task) / (sims * nn);

    DgpConfig dgp = base;
    dgp.form = cfg.forms[f];
    dgp.n = cfg.n_list[i];
    dgp.seed = substream_seed(cfg.seed, 0x9E67, f, i, s);
    const TrueNuisance truth = true_nuisance(dgp);
    try {
      const LoggedDataset data = generate_data(dgp);
      const DataSplit split = split_three(data.rows(), cfg.splits, substream_seed(dgp.seed, 3));
      const LoggedDataset s1 = data.take(split.nuisance);
      const LoggedDataset sv = data.take(split.validation);
      const LoggedDataset st = data.take(split.training);
      std::vector<Eigen::Index> pooled = split.validation;
      pooled.insert(pooled.end(), split.training.begin(), split.training.end());
      const LoggedDataset s2 = data.take(pooled);
      const std::uint64_t fit_seed = substream_seed(dgp.seed, 0xF17);

      if (cfg.application == Application::Resource) {
        ResourceFit fit{fit_theta_hat(s1, resource_map, cfg.poly, fit_seed),
                        fit_sigma_hat(s1, resource_map, cfg.poly, substream_seed(fit_seed, 2))};
        for (std::size_t l = 0; l < nl; ++l) {
          if (cfg.learners[l] == LearnerKind::DrRegularized)
            throw InvalidInputError("resource allocation has no regularized-ERM learner");
          const Estimator est = static_cast<Estimator>(cfg.learners[l]);
          const MatrixXd theta_rows = resource_records(est, s2, fit, truth, resource_map);
          const MultiTaskFit mt =
              multitask_lasso_cv(s2.contexts, theta_rows / cfg.lambda_cost, 5,
                                 substream_seed(dgp.seed, 0xC5, l));
          const Policy pi = Policy::linear_multi_task(mt.coef);
          for (std::size_t sp = 0; sp < nsp; ++sp)
            values[(((f * nn + i) * sims + s) * nsp + sp) * nl + l] =
                true_policy_value(tcs[f], pi);
        }
        return;
      }

      // Pricing applications.
      PricingLinearFit lin_fit;
      PricingQuadraticFit quad_fit;
      if (cfg.application == Application::PricingLinear)
        lin_fit = PricingLinearFit{
            fit_theta_hat(s1, FeatureMap::pricing_linear(), cfg.poly, fit_seed),
            fit_pricing_nuisances(s1, cfg.poly, substream_seed(fit_seed, 2))};
      else
        quad_fit = PricingQuadraticFit{
            fit_theta_hat(s1, FeatureMap::pricing_quadratic(), cfg.poly, fit_seed),
            fit_quadratic_moments(s1, cfg.poly, substream_seed(fit_seed, 2))};

      auto records_for = [&](Estimator est, const LoggedDataset& part) {
        return cfg.application == Application::PricingLinear
                   ? pricing_linear_records(est, part, lin_fit, truth)
                   : pricing_quadratic_records(est, part, quad_fit, truth);
      };

      for (std::size_t l = 0; l < nl; ++l) {
        const LearnerKind learner = cfg.learners[l];
        for (std::size_t sp = 0; sp < nsp; ++sp) {
          const std::uint64_t erm_seed = substream_seed(dgp.seed, 0xE2, sp, l);
          Policy pi;
          if (learner == LearnerKind::DrRegularized) {
            const auto res =
                regularized_erm_records(records_for(Estimator::Dr, sv),
                                        records_for(Estimator::Dr, st), spaces[sp], cfg.mu,
                                        erm_seed);
            pi = res.policy;
          } else {
            const Estimator est = static_cast<Estimator>(learner);
            pi = erm(records_for(est, s2), spaces[sp], erm_seed);
          }
          values[(((f * nn + i) * sims + s) * nsp + sp) * nl + l] =
              true_policy_value(tcs[f], pi);
        }
      }
    } catch (const std::exception&) {
      failed[(f * nn + i) * sims + s] = 1;
    }
  });

  ExperimentResult out;
  const std::string regime_name = to_string(cfg.regime);
  for (std::size_t f = 0; f < nf; ++f)
    for (std::size_t i = 0; i < nn; ++i) {
      std::size_t cell_failures = 0;
      for (std::size_t s = 0; s < sims; ++s) cell_failures += failed[(f * nn + i) * sims + s];
      out.failed_sims += static_cast<long>(cell_failures);
      const bool drop = cell_failures * 10 > sims;
      for (std::size_t sp = 0; sp < nsp; ++sp)
        for (std::size_t l = 0; l < nl; ++l) {
          const double best_value = best[f * nsp + sp].value;
          std::vector<double> vals, regrets;
          vals.reserve(sims);
          regrets.reserve(sims);
          for (std::size_t s = 0; s < sims; ++s) {
            const double v = values[(((f * nn + i) * sims + s) * nsp + sp) * nl + l];
            if (!std::isnan(v)) {
              vals.push_back(v);
              regrets.push_back(best_value - v);
              out.raw.push_back(SimRecord{static_cast<int>(s), to_string(cfg.forms[f]),
                                          regime_name, to_string(cfg.spaces[sp]),
                                          to_string(cfg.learners[l]), cfg.n_list[i], v,
                                          best_value, best_value - v});
            }
          }
          if (drop) continue;
          const auto agg = aggregate_stats(vals);
          if (!agg) continue;
          const auto ragg = aggregate_stats(regrets);
          out.rows.push_back(ResultRow{to_string(cfg.forms[f]), regime_name,
                                       to_string(cfg.spaces[sp]),
                                       to_string(cfg.learners[l]), cfg.n_list[i], agg->count,
                                       agg->mean, agg->stdev, best_value, ragg->mean,
                                       ragg->stdev});
        }
      if (drop)
        out.dropped_cells.push_back(to_string(cfg.forms[f]) + "/n=" +
                                    std::to_string(cfg.n_list[i]));
    }
  sort_rows(out.rows);
  return out;
}

void dump_dataset_csv(const LoggedDataset& data, std::ostream& os) {
  os << "y";
  for (Eigen::Index j = 0; j < data.action_dim(); ++j) os << ",a_" << (j + 1);
  for (Eigen::Index j = 0; j < data.context_dim(); ++j) os << ",z_" << (j + 1);
  os << '\n';
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    os << format_double(data.y(r));
    for (Eigen::Index j = 0; j < data.action_dim(); ++j)
      os << ',' << format_double(data.actions(r, j));
    for (Eigen::Index j = 0; j < data.context_dim(); ++j)
      os << ',' << format_double(data.contexts(r, j));
    os << '\n';
  }
}

}  // namespace drpolicy
