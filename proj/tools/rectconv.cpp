// rectconv: command-line front end for the free-convolution library.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rectconv/error.hpp"
#include "rectconv/io.hpp"
#include "rectconv/kernels.hpp"
#include "rectconv/run_config.hpp"

namespace {

using namespace rectconv;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  int threads = 0;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "Run description (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "Output directory (overrides out_dir)");
  cmd->add_option("--seed", c.seed, "Base seed (overrides seed)");
  cmd->add_option("--trials", c.trials, "Trial count (overrides trials)")->check(CLI::PositiveNumber);
  cmd->add_option("--threads", c.threads, "Worker threads (default: RECTCONV_THREADS, then OpenMP)")
      ->check(CLI::NonNegativeNumber);
}

RunConfig resolve(const Common& c) {
  RunConfig rc = load_run_config(c.config);
  if (!c.out.empty()) rc.out_dir = c.out;
  if (c.seed) rc.experiment.base_seed = *c.seed;
  if (c.trials) rc.experiment.trials = *c.trials;
  set_thread_count(resolve_thread_count(c.threads));
  std::filesystem::create_directories(rc.out_dir);
  return rc;
}

std::ofstream open_out(const RunConfig& rc, const std::string& name) {
  const auto path = std::filesystem::path(rc.out_dir) / name;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

int cmd_density(const Common& c, double lo, double hi, std::size_t samples) {
  const RunConfig rc = resolve(c);
  const auto& ec = rc.experiment;
  if (hi < lo) throw std::invalid_argument("density: range must satisfy lo <= hi");
  if (lo < hi && samples < 2) throw std::invalid_argument("density: samples must be >= 2");
  const std::size_t count = lo == hi ? 1 : samples;
  std::vector<double> energies(count);
  for (std::size_t i = 0; i < count; ++i)
    energies[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);

  // The law is not defined at E = 0; that row is written as nan.
  std::vector<double> queried;
  for (double e : energies)
    if (e != 0.0) queried.push_back(e);
  const auto solved = density_grid(ec.spec, ec.params, queried, ec.solver);
  std::vector<DensitySample> rows;
  std::size_t k = 0;
  for (double e : energies) {
    if (e == 0.0) rows.push_back({0.0, NAN, NAN, NAN, 0});
    else rows.push_back(solved[k++]);
  }
  auto os = open_out(rc, "density.csv");
  write_density_csv(os, rows);
  std::clog << "density: wrote " << rows.size() << " rows to " << rc.out_dir << "/density.csv\n";
  return kExitPass;
}

int cmd_edge(const Common& c) {
  const RunConfig rc = resolve(c);
  const auto& ec = rc.experiment;
  const EdgeData edge = find_right_edge(ec.spec, ec.params, ec.solver);
  const std::string text = edge_to_json(edge, bbp_threshold(ec.spec, ec.params, edge));
  open_out(rc, "edge.json") << text << '\n';
  std::cout << text << '\n';
  return kExitPass;
}

int cmd_quantiles(const Common& c, std::size_t j_max) {
  const RunConfig rc = resolve(c);
  const auto& ec = rc.experiment;
  const EdgeData edge = find_right_edge(ec.spec, ec.params, ec.solver);
  const QuantileTable table = classical_locations(ec.spec, ec.params, j_max, edge, ec.solver);
  auto os = open_out(rc, "quantiles.csv");
  write_quantiles_csv(os, table, edge, ec.params);
  std::clog << "quantiles: " << j_max << " locations, quadrature error " << format_number(table.quad_error) << '\n';
  return kExitPass;
}

int cmd_support(const Common& c, double lo, double hi, double step) {
  const RunConfig rc = resolve(c);
  const auto& ec = rc.experiment;
  const SupportScan scan = support_scan(ec.spec, ec.params, lo, hi, step > 0.0 ? step : (hi - lo) / 1000.0, ec.solver);
  const std::string text = support_to_json(scan);
  open_out(rc, "support.json") << text << '\n';
  std::cout << text << '\n';
  return kExitPass;
}

int cmd_experiment(const Common& c, const std::string& name) {
  const RunConfig rc = resolve(c);
  const ExperimentReport report = run_experiment(name, rc.experiment);
  open_out(rc, name + "_report.json") << report_to_json(report, rc.echo());
  auto csv = open_out(rc, name + "_trials.csv");
  write_trials_csv(csv, report);
  std::cout << (report.pass ? "PASS " : "FAIL ") << name;
  for (const auto& [k, v] : report.summary) std::cout << ' ' << k << '=' << format_number(v);
  std::cout << '\n';
  return report.pass ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rectangular free convolution with the Marchenko-Pastur law"};
  app.require_subcommand(1);

  Common common;
  std::vector<double> range;
  std::size_t samples = 201;
  double step = 0.0;
  std::size_t j_max = 20;
  std::string name;

  auto* density = app.add_subcommand("density", "Tabulate rho on a uniform energy grid");
  add_common(density, common);
  density->add_option("--range", range, "LO HI")->expected(2)->required();
  density->add_option("--samples", samples, "Grid points");

  auto* edge = app.add_subcommand("edge", "Right edge, its velocity, square-root coefficient and BBP threshold");
  add_common(edge, common);

  auto* quant = app.add_subcommand("quantiles", "Classical eigenvalue locations");
  add_common(quant, common);
  quant->add_option("--jmax", j_max, "Number of locations")->check(CLI::PositiveNumber);

  auto* support = app.add_subcommand("support", "Intervals where the density is positive");
  add_common(support, common);
  support->add_option("--range", range, "LO HI")->expected(2)->required();
  support->add_option("--step", step, "Scan step (default: range / 1000)");

  auto* experiment = app.add_subcommand("experiment", "Run a Monte-Carlo experiment");
  add_common(experiment, common);
  experiment->add_option("name", name, "rigidity | universality | delocalization | locallaw | bbp | t1-null | rank-sweep")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*density) return cmd_density(common, range[0], range[1], samples);
    if (*edge) return cmd_edge(common);
    if (*quant) return cmd_quantiles(common, j_max);
    if (*support) return cmd_support(common, range[0], range[1], step);
    if (*experiment) {
      const auto& names = experiment_names();
      if (std::find(names.begin(), names.end(), name) == names.end()) {
        std::cerr << "unknown experiment '" << name << "'\n" << experiment->help();
        return kExitUsage;
      }
      return cmd_experiment(common, name);
    }
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
