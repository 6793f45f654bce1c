#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "drpolicy/dgp.hpp"
#include "drpolicy/policy_opt.hpp"
#include "drpolicy/poly.hpp"
#include "drpolicy/report.hpp"
#include "drpolicy/truth.hpp"
#include "drpolicy/types.hpp"

namespace drpolicy {

enum class Estimator { Dr, Direct, Ips, Oracle };
enum class LearnerKind { Dr, Direct, Ips, Oracle, DrRegularized };
enum class EvalPolicy { Constant, Linear, Threshold, Sin };

std::string to_string(Estimator e);
std::string to_string(LearnerKind l);
std::string to_string(EvalPolicy p);
std::string to_string(PolicySpace::Family f);
bool estimator_from_string(const std::string& s, Estimator& out);
bool learner_from_string(const std::string& s, LearnerKind& out);
bool eval_policy_from_string(const std::string& s, EvalPolicy& out);

struct ExperimentConfig {
  Application application = Application::PricingLinear;
  std::vector<Form> forms = {Form::Quadratic, Form::Step, Form::Sigmoid, Form::Linear};
  Regime regime = Regime::Low;
  std::vector<long> n_list = {1000, 2000, 5000, 10000};
  int sims = 100;
  std::uint64_t seed = 42;

  std::vector<Estimator> estimators = {Estimator::Dr, Estimator::Direct, Estimator::Ips,
                                       Estimator::Oracle};
  std::vector<EvalPolicy> policies = {EvalPolicy::Constant, EvalPolicy::Linear,
                                      EvalPolicy::Threshold, EvalPolicy::Sin};
  std::vector<PolicySpace::Family> spaces = {PolicySpace::Family::Constant,
                                             PolicySpace::Family::Linear};
  std::vector<LearnerKind> learners = {LearnerKind::Dr, LearnerKind::Direct, LearnerKind::Ips,
                                       LearnerKind::Oracle};

  SplitConfig splits;            // nuisance / validation / training
  MuRule mu;
  bool crossfit_swap = false;    // two-fold swap cross-fitting for evaluation
  int workers = 0;               // 0: DRPOLICY_WORKERS env or hardware
  double lambda_cost = 2.0;      // resource quadratic-cost coefficient
  long mc_truth_draws = 10'000'000;
  ActionBox pricing_box{0.1, 5.0};
  PolyFeatureConfig poly;
};

struct Aggregate {
  double mean = 0.0;
  double stdev = 0.0;
  int count = 0;
  bool single = false;  // one record: stdev reported as 0
};

// Sample mean and (n-1)-denominator standard deviation; empty input yields
// no aggregate.
std::optional<Aggregate> aggregate_stats(const std::vector<double>& values);

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<SimRecord> raw;
  long failed_sims = 0;
  std::vector<std::string> dropped_cells;  // cells with > 10% failed sims

  bool clean() const { return failed_sims == 0 && dropped_cells.empty(); }
};

// The evaluation-policy object for a regime (summary length l).
Policy make_eval_policy(EvalPolicy which, int k, int l, const ActionBox& box);

// Policy-space object for a family under the config's regime.
PolicySpace make_space(PolicySpace::Family family, const ExperimentConfig& cfg);

// Figure-1(a)-style experiment: per replication, fits nuisances on one half,
// builds per-row coefficient records for every estimator on the other half,
// and evaluates every policy. Aggregates mean/std per (form, policy,
// estimator, n) cell against the recomputed true value.
ExperimentResult run_evaluation_experiment(const ExperimentConfig& cfg);

// Figure-1(b)-style experiment: per replication, each learner optimizes over
// each policy space on records built from its own estimator; regret is
// measured against the best-in-class true value.
ExperimentResult run_regret_experiment(const ExperimentConfig& cfg);

// Writes a dataset as CSV (columns y, a_1..a_da, z_1..z_k).
void dump_dataset_csv(const LoggedDataset& data, std::ostream& os);

}  // namespace drpolicy
