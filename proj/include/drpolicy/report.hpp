#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace drpolicy {

// One aggregated cell of an experiment. Evaluation rows leave the regret
// columns empty; regret rows carry the best-in-class value in true_value.
struct ResultRow {
  std::string form, regime, policy, estimator;
  long n = 0;
  int sims = 0;
  double mean = 0.0;
  double stdev = 0.0;
  std::optional<double> true_value;
  std::optional<double> mean_regret;
  std::optional<double> std_regret;
};

// One replication's outcome, emitted behind --emit-raw.
struct SimRecord {
  int sim = 0;
  std::string form, regime, policy, estimator;
  long n = 0;
  double value = 0.0;
  std::optional<double> true_value;
  std::optional<double> regret;
};

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

// Stable sort by (form, policy, estimator, n).
void sort_rows(std::vector<ResultRow>& rows);

void write_csv(const std::vector<ResultRow>& rows, std::ostream& os);
void write_json(const std::vector<ResultRow>& rows, std::ostream& os);
void write_raw_csv(const std::vector<SimRecord>& records, std::ostream& os);

}  // namespace drpolicy
