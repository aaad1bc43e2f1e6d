#include "rectconv/io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace rectconv {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

// JSON has no NaN or infinity; both become null.
std::string json_number(double x) { return std::isfinite(x) ? format_number(x) : "null"; }

std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

std::string json_object(const std::map<std::string, double>& m) {
  std::string out = "{";
  bool first = true;
  for (const auto& [k, v] : m) {
    if (!first) out += ", ";
    first = false;
    out += json_string(k) + ": " + json_number(v);
  }
  return out + "}";
}

}  // namespace

void write_density_csv(std::ostream& os, const std::vector<DensitySample>& rows) {
  os << "E,rho,eta_used,residual,iterations\n";
  for (const auto& r : rows)
    os << format_number(r.E) << ',' << format_number(r.rho) << ',' << format_number(r.eta_used) << ','
       << format_number(r.residual) << ',' << r.iterations << '\n';
}

std::string support_to_json(const SupportScan& scan) {
  std::string out = "{\"intervals\": [";
  for (std::size_t i = 0; i < scan.intervals.size(); ++i) {
    if (i > 0) out += ", ";
    out += "[" + json_number(scan.intervals[i].first) + ", " + json_number(scan.intervals[i].second) + "]";
  }
  out += "], \"grid_step\": " + json_number(scan.grid_step) + "}";
  return out;
}

std::string edge_to_json(const EdgeData& edge, double bbp_threshold) {
  std::ostringstream os;
  os << "{\"lambda_plus\": " << json_number(edge.lambda_plus)
     << ", \"zeta_plus\": " << json_number(edge.zeta_plus)
     << ", \"xi_plus\": " << json_number(edge.xi_plus)
     << ", \"velocity\": " << json_number(edge.velocity)
     << ", \"sqrt_coeff\": " << json_number(edge.sqrt_coeff)
     << ", \"phi_second\": " << json_number(edge.phi_second)
     << ", \"bbp_threshold\": " << json_number(bbp_threshold) << "}";
  return os.str();
}

void write_quantiles_csv(std::ostream& os, const QuantileTable& table, const EdgeData& edge,
                         const ModelParams& params) {
  os << "j,gamma_j,kappa_j,eta_l_j\n";
  for (std::size_t j = 1; j <= table.gamma.size(); ++j) {
    const double g = table.gamma[j - 1];
    const double kappa = std::abs(edge.lambda_plus - g);
    os << j << ',' << format_number(g) << ',' << format_number(kappa) << ','
       << format_number(eta_lower(params, kappa)) << '\n';
  }
}

std::string report_to_json(const ExperimentReport& report, const std::string& run_config_json) {
  std::ostringstream os;
  os << "{\n  \"name\": " << json_string(report.name) << ",\n  \"pass\": " << (report.pass ? "true" : "false")
     << ",\n  \"trials\": " << report.per_trial.size() << ",\n  \"summary\": " << json_object(report.summary)
     << ",\n  \"criteria\": " << json_object(report.criteria)
     << ",\n  \"config\": " << (run_config_json.empty() ? "null" : run_config_json) << "\n}\n";
  return os.str();
}

void write_trials_csv(std::ostream& os, const ExperimentReport& report) {
  const bool two = !report.per_trial.empty() && report.per_trial.front().seed_b.has_value();
  os << "trial,seed";
  if (two) os << ",seed_b";
  if (!report.per_trial.empty())
    for (const auto& [k, v] : report.per_trial.front().values) os << ',' << k;
  os << '\n';
  for (const auto& t : report.per_trial) {
    os << t.trial << ',' << t.seed;
    if (two) os << ',' << t.seed_b.value_or(0);
    for (const auto& [k, v] : t.values) os << ',' << format_number(v);
    os << '\n';
  }
}

}  // namespace rectconv
