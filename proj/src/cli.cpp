#include "drpolicy/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "drpolicy/errors.hpp"

namespace drpolicy {
namespace {

struct RawOptions {
  std::vector<std::string> forms;
  std::string regime = "low";
  std::string application = "pricing";
  std::vector<long> n_list;
  int sims = 100;
  std::uint64_t seed = 42;
  std::vector<std::string> estimators;
  std::vector<std::string> policies;
  std::vector<std::string> spaces;
  double mu_c = 2.0;
  double delta = 0.1;
  std::vector<double> splits;
  std::string out = "results.csv";
  std::string format = "csv";
  bool emit_raw = false;
  bool crossfit_swap = false;
  int workers = 0;
  long dump_n = 1000;
};

void add_common_flags(CLI::App* cmd, RawOptions& raw, bool with_format = true) {
  cmd->add_option("--form", raw.forms, "Demand forms: quadratic, step, sigmoid, linear")
      ->delimiter(',');
  cmd->add_option("--regime", raw.regime, "Context regime: low (k=2,l=1) or high (k=10,l=3)")
      ->check(CLI::IsMember({"low", "high"}));
  cmd->add_option("--n", raw.n_list, "Sample sizes")->delimiter(',')
      ->check(CLI::PositiveNumber);
  cmd->add_option("--sims", raw.sims, "Replications per cell")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", raw.seed, "Master seed");
  cmd->add_option("--workers", raw.workers,
                  "Worker threads (0: DRPOLICY_WORKERS env or hardware)");
  if (with_format) {
    cmd->add_option("--out", raw.out, "Output path");
    cmd->add_option("--format", raw.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_flag("--emit-raw", raw.emit_raw, "Also write per-replication records");
  }
  cmd->set_config("--config", "", "Config file with key=value lines");
}

void add_estimation_flags(CLI::App* cmd, RawOptions& raw) {
  cmd->add_option("--estimators", raw.estimators,
                  "Estimators/learners: dr, direct, ips, oracle, dr-regularized")
      ->delimiter(',');
  cmd->add_option("--splits", raw.splits,
                  "Nuisance/validation/training fractions, e.g. 0.5,0.25,0.25")
      ->delimiter(',')->expected(3);
  cmd->add_option("--mu-c", raw.mu_c, "Constant c in the mu_n rule");
  cmd->add_option("--delta", raw.delta, "Confidence level in the mu_n rule")
      ->check(CLI::Range(1e-9, 0.999999));
  cmd->add_flag("--crossfit-swap", raw.crossfit_swap,
                "Two-fold swap cross-fitting for evaluation");
}

bool parse_forms(const std::vector<std::string>& names, std::vector<Form>& out,
                 std::string& err) {
  if (names.empty()) return true;
  out.clear();
  for (const std::string& s : names) {
    Form f;
    if (!form_from_string(s, f)) {
      err = "unknown form: " + s;
      return false;
    }
    out.push_back(f);
  }
  return true;
}

bool apply_raw(const RawOptions& raw, const std::string& subcommand, RunConfig& cfg,
               std::string& err) {
  cfg.subcommand = subcommand;
  ExperimentConfig& e = cfg.exp;
  if (!parse_forms(raw.forms, e.forms, err)) return false;
  e.regime = raw.regime == "high" ? Regime::High : Regime::Low;
  if (!raw.n_list.empty()) e.n_list = raw.n_list;
  e.sims = raw.sims;
  e.seed = raw.seed;
  e.workers = raw.workers;
  e.mu.c = raw.mu_c;
  e.mu.delta = raw.delta;
  e.crossfit_swap = raw.crossfit_swap;
  if (!raw.splits.empty()) {
    e.splits.nuisance = raw.splits[0];
    e.splits.validation = raw.splits[1];
    e.splits.training = raw.splits[2];
  }

  if (raw.application == "pricing") e.application = Application::PricingLinear;
  else if (raw.application == "quadratic") e.application = Application::PricingQuadratic;
  else if (raw.application == "resource") e.application = Application::Resource;
  else {
    err = "unknown application: " + raw.application;
    return false;
  }

  if (!raw.policies.empty()) {
    e.policies.clear();
    for (const std::string& s : raw.policies) {
      EvalPolicy p;
      if (!eval_policy_from_string(s, p)) {
        err = "unknown policy: " + s;
        return false;
      }
      e.policies.push_back(p);
    }
  }
  if (!raw.estimators.empty()) {
    e.estimators.clear();
    e.learners.clear();
    for (const std::string& s : raw.estimators) {
      LearnerKind l;
      if (!learner_from_string(s, l)) {
        err = "unknown estimator: " + s;
        return false;
      }
      e.learners.push_back(l);
      if (l != LearnerKind::DrRegularized) e.estimators.push_back(static_cast<Estimator>(l));
    }
  }
  if (!raw.spaces.empty()) {
    e.spaces.clear();
    for (const std::string& s : raw.spaces) {
      if (s == "constant") e.spaces.push_back(PolicySpace::Family::Constant);
      else if (s == "linear") e.spaces.push_back(PolicySpace::Family::Linear);
      else if (s == "multitask") e.spaces.push_back(PolicySpace::Family::MultiTaskLinear);
      else {
        err = "unknown space: " + s;
        return false;
      }
    }
  }
  cfg.out_path = raw.out;
  cfg.format = raw.format;
  cfg.emit_raw = raw.emit_raw;
  cfg.dump_n = raw.dump_n;
  return true;
}

struct CliState {
  RawOptions raw;
  CLI::App app{"drpolicy: doubly robust off-policy evaluation and optimization "
               "with continuous actions"};
  CLI::App* evaluate = nullptr;
  CLI::App* optimize = nullptr;
  CLI::App* bench_pricing = nullptr;
  CLI::App* bench_quadratic = nullptr;
  CLI::App* bench_resource = nullptr;
  CLI::App* dump_data = nullptr;

  CliState() {
    app.require_subcommand(0, 1);

    evaluate = app.add_subcommand("evaluate", "Off-policy evaluation experiment");
    add_common_flags(evaluate, raw);
    add_estimation_flags(evaluate, raw);
    evaluate->add_option("--application", raw.application, "pricing or quadratic")
        ->check(CLI::IsMember({"pricing", "quadratic"}));
    evaluate->add_option("--policies", raw.policies,
                         "Evaluation policies: constant, linear, threshold, sin")
        ->delimiter(',');

    optimize = app.add_subcommand("optimize", "Policy optimization / regret experiment");
    add_common_flags(optimize, raw);
    add_estimation_flags(optimize, raw);
    optimize->add_option("--application", raw.application, "pricing, quadratic or resource")
        ->check(CLI::IsMember({"pricing", "quadratic", "resource"}));
    optimize->add_option("--space", raw.spaces, "Policy spaces: constant, linear, multitask")
        ->delimiter(',');

    bench_pricing = app.add_subcommand(
        "bench-pricing", "Pricing benchmark: evaluation and regret across all forms");
    add_common_flags(bench_pricing, raw);
    add_estimation_flags(bench_pricing, raw);

    bench_quadratic = app.add_subcommand(
        "bench-quadratic", "Quadratic revenue benchmark: evaluation and regret");
    add_common_flags(bench_quadratic, raw);
    add_estimation_flags(bench_quadratic, raw);

    bench_resource = app.add_subcommand(
        "bench-resource", "Costly resource allocation benchmark (multitask policies)");
    add_common_flags(bench_resource, raw);
    add_estimation_flags(bench_resource, raw);

    dump_data = app.add_subcommand("dump-data", "Write a generated dataset as CSV");
    add_common_flags(dump_data, raw);
    dump_data->add_option("--application", raw.application, "pricing, quadratic or resource")
        ->check(CLI::IsMember({"pricing", "quadratic", "resource"}));
    dump_data->add_option("--rows", raw.dump_n, "Rows to generate")->check(CLI::PositiveNumber);
  }

  CLI::App* chosen() {
    for (CLI::App* cmd : {evaluate, optimize, bench_pricing, bench_quadratic, bench_resource,
                          dump_data})
      if (cmd->parsed()) return cmd;
    return nullptr;
  }
};

}  // namespace

ParsedCli parse_config(const std::vector<std::string>& args) {
  ParsedCli out;
  CliState state;
  try {
    // CLI11 parses reversed vectors.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    state.app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    std::cout << state.app.help();
    out.exit_code = 0;
    return out;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << state.app.help();
    out.exit_code = 2;
    return out;
  }

  CLI::App* cmd = state.chosen();
  if (cmd == nullptr) {
    std::cerr << state.app.help();
    out.exit_code = 2;
    return out;
  }

  std::string err;
  if (!apply_raw(state.raw, cmd->get_name(), out.cfg, err)) {
    std::cerr << "error: " << err << '\n';
    out.exit_code = 2;
    return out;
  }
  out.canonical = cmd->config_to_str(true, false);
  out.should_run = true;
  return out;
}

namespace {

int write_outputs(const ExperimentResult& result, const RunConfig& cfg) {
  std::ofstream os(cfg.out_path, std::ios::binary);
  if (!os) {
    std::cerr << "error: cannot open " << cfg.out_path << " for writing\n";
    return 1;
  }
  if (cfg.format == "json") write_json(result.rows, os);
  else write_csv(result.rows, os);
  os.close();
  if (!os) {
    std::cerr << "error: failed writing " << cfg.out_path << '\n';
    return 1;
  }
  if (cfg.emit_raw) {
    const std::string raw_path = cfg.out_path + ".raw.csv";
    std::ofstream raw(raw_path, std::ios::binary);
    if (!raw) {
      std::cerr << "error: cannot open " << raw_path << " for writing\n";
      return 1;
    }
    write_raw_csv(result.raw, raw);
  }
  if (!result.clean()) {
    std::cerr << "warning: " << result.failed_sims << " replication(s) failed";
    if (!result.dropped_cells.empty()) {
      std::cerr << "; dropped cells:";
      for (const std::string& c : result.dropped_cells) std::cerr << ' ' << c;
    }
    std::cerr << '\n';
    return 1;
  }
  return 0;
}

ExperimentConfig bench_eval_config(const RunConfig& cfg) {
  ExperimentConfig e = cfg.exp;
  return e;
}

}  // namespace

int run(const RunConfig& cfg) {
  try {
    if (cfg.subcommand == "evaluate") {
      return write_outputs(run_evaluation_experiment(cfg.exp), cfg);
    }
    if (cfg.subcommand == "optimize") {
      return write_outputs(run_regret_experiment(cfg.exp), cfg);
    }
    if (cfg.subcommand == "bench-pricing" || cfg.subcommand == "bench-quadratic") {
      ExperimentConfig e = bench_eval_config(cfg);
      e.application = cfg.subcommand == "bench-pricing" ? Application::PricingLinear
                                                        : Application::PricingQuadratic;
      ExperimentResult eval = run_evaluation_experiment(e);
      ExperimentConfig r = e;
      r.spaces = {PolicySpace::Family::Constant, PolicySpace::Family::Linear};
      ExperimentResult regret = run_regret_experiment(r);
      ExperimentResult merged;
      merged.rows = eval.rows;
      merged.rows.insert(merged.rows.end(), regret.rows.begin(), regret.rows.end());
      merged.raw = eval.raw;
      merged.raw.insert(merged.raw.end(), regret.raw.begin(), regret.raw.end());
      merged.failed_sims = eval.failed_sims + regret.failed_sims;
      merged.dropped_cells = eval.dropped_cells;
      merged.dropped_cells.insert(merged.dropped_cells.end(), regret.dropped_cells.begin(),
                                  regret.dropped_cells.end());
      sort_rows(merged.rows);
      return write_outputs(merged, cfg);
    }
    if (cfg.subcommand == "bench-resource") {
      ExperimentConfig e = cfg.exp;
      e.application = Application::Resource;
      if (e.forms.size() == 4) e.forms = {Form::Linear};  // default: the footnote's cell
      e.spaces = {PolicySpace::Family::MultiTaskLinear};
      if (e.learners.size() == 4)
        e.learners = {LearnerKind::Dr, LearnerKind::Direct, LearnerKind::Oracle};
      return write_outputs(run_regret_experiment(e), cfg);
    }
    if (cfg.subcommand == "dump-data") {
      DgpConfig d;
      d.application = cfg.exp.application;
      d.form = cfg.exp.forms.empty() ? Form::Quadratic : cfg.exp.forms.front();
      d.set_regime(cfg.exp.regime);
      d.n = cfg.dump_n;
      d.seed = cfg.exp.seed;
      const LoggedDataset data = generate_data(d);
      std::ofstream os(cfg.out_path, std::ios::binary);
      if (!os) {
        std::cerr << "error: cannot open " << cfg.out_path << " for writing\n";
        return 1;
      }
      dump_dataset_csv(data, os);
      return os ? 0 : 1;
    }
  } catch (const InvalidInputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  std::cerr << "error: unknown subcommand " << cfg.subcommand << '\n';
  return 2;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  ParsedCli parsed = parse_config(args);
  if (!parsed.should_run) return parsed.exit_code;
  return run(parsed.cfg);
}

}  // namespace drpolicy
