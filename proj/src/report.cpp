#include "drpolicy/report.hpp"

#include <algorithm>
#include <charconv>
#include <tuple>

#include <json.hpp>

namespace drpolicy {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::string opt_str(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

nlohmann::json opt_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

void sort_rows(std::vector<ResultRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.form, a.policy, a.estimator, a.n) <
           std::tie(b.form, b.policy, b.estimator, b.n);
  });
}

void write_csv(const std::vector<ResultRow>& rows, std::ostream& os) {
  os << "form,regime,policy,estimator,n,sims,mean,std,true_value,mean_regret,std_regret\n";
  for (const ResultRow& r : rows) {
    os << r.form << ',' << r.regime << ',' << r.policy << ',' << r.estimator << ',' << r.n << ','
       << r.sims << ',' << format_double(r.mean) << ',' << format_double(r.stdev) << ','
       << opt_str(r.true_value) << ',' << opt_str(r.mean_regret) << ',' << opt_str(r.std_regret)
       << '\n';
  }
}

void write_json(const std::vector<ResultRow>& rows, std::ostream& os) {
  nlohmann::json out = nlohmann::json::array();
  for (const ResultRow& r : rows) {
    out.push_back({{"form", r.form},
                   {"regime", r.regime},
                   {"policy", r.policy},
                   {"estimator", r.estimator},
                   {"n", r.n},
                   {"sims", r.sims},
                   {"mean", r.mean},
                   {"std", r.stdev},
                   {"true_value", opt_json(r.true_value)},
                   {"mean_regret", opt_json(r.mean_regret)},
                   {"std_regret", opt_json(r.std_regret)}});
  }
  os << out.dump(2) << '\n';
}

void write_raw_csv(const std::vector<SimRecord>& records, std::ostream& os) {
  os << "sim,form,regime,policy,estimator,n,value,true_value,regret\n";
  for (const SimRecord& r : records) {
    os << r.sim << ',' << r.form << ',' << r.regime << ',' << r.policy << ',' << r.estimator
       << ',' << r.n << ',' << format_double(r.value) << ',' << opt_str(r.true_value) << ','
       << opt_str(r.regret) << '\n';
  }
}

}  // namespace drpolicy
