#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rectconv/experiments.hpp"

namespace rectconv {

/// Shortest round-trip text is not used; every number is printed with 17
/// significant digits so outputs are byte-deterministic.
std::string format_number(double x);

void write_density_csv(std::ostream& os, const std::vector<DensitySample>& rows);
std::string support_to_json(const SupportScan& scan);
std::string edge_to_json(const EdgeData& edge, double bbp_threshold);
void write_quantiles_csv(std::ostream& os, const QuantileTable& table, const EdgeData& edge,
                         const ModelParams& params);
std::string report_to_json(const ExperimentReport& report, const std::string& run_config_json);
void write_trials_csv(std::ostream& os, const ExperimentReport& report);

}  // namespace rectconv
