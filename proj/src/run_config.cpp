#include "rectconv/run_config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "rectconv/io.hpp"

namespace rectconv {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where,
                    std::vector<std::string>& problems) {
  for (const auto& [k, v] : obj.items())
    if (!allowed.count(k)) problems.push_back("unknown key '" + where + k + "'");
}

Spectrum load_spectrum(const json& src, const std::string& base_dir) {
  if (src.is_array()) return make_spectrum(src.get<std::vector<double>>());
  if (!src.is_object()) throw std::invalid_argument("config: 'spectrum' must be an array or an object");
  if (src.contains("values")) return make_spectrum(src.at("values").get<std::vector<double>>());
  if (src.contains("zeros")) return zero_spectrum(src.at("zeros").get<std::size_t>());
  if (src.contains("canonical")) {
    const auto& c = src.at("canonical");
    return canonical_sqrt_spectrum(c.at("p").get<std::size_t>(), c.value("edge", 1.0));
  }
  if (src.contains("file")) {
    std::filesystem::path path = src.at("file").get<std::string>();
    if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot read spectrum file " + path.string());
    if (path.extension() == ".json") {
      std::stringstream buf;
      buf << in.rdbuf();
      return spectrum_from_json(buf.str());
    }
    return read_spectrum_text(in);
  }
  throw std::invalid_argument("config: 'spectrum' needs one of values, zeros, canonical, file");
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("config: top level must be an object");

  std::vector<std::string> problems;
  reject_unknown(doc, {"spectrum", "p", "n", "c", "t", "noise", "trials", "seed", "solver", "experiment", "out_dir"},
                 "", problems);
  for (const char* key : {"spectrum", "t"})
    if (!doc.contains(key)) problems.push_back(std::string("missing field '") + key + "'");
  if (!doc.contains("n") && !doc.contains("c")) problems.push_back("missing field 'n' (or 'c')");
  if (doc.contains("solver"))
    reject_unknown(doc["solver"], {"tolerance", "max_iterations", "eta_start", "homotopy_factor", "damping"},
                   "solver.", problems);
  if (doc.contains("experiment"))
    reject_unknown(doc["experiment"],
                   {"k_max", "z_grid", "vartheta", "omega", "ell", "c_v", "spikes", "thresholds", "save_trials_dir"},
                   "experiment.", problems);
  if (!problems.empty()) {
    std::string msg = "config:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw std::invalid_argument(msg);
  }

  RunConfig rc;
  auto& ec = rc.experiment;
  try {
    rc.spectrum_source = doc["spectrum"].dump();
    ec.spec = load_spectrum(doc["spectrum"], base_dir);
    const std::size_t p = doc.value("p", ec.spec.size());
    if (p != ec.spec.size()) throw std::invalid_argument("config: 'p' does not match the spectrum size");
    std::size_t n = 0;
    if (doc.contains("n")) {
      n = doc["n"].get<std::size_t>();
    } else {
      const double c = doc["c"].get<double>();
      if (!(c > 0.0 && c <= 1.0)) throw std::invalid_argument("config: 'c' must lie in (0, 1]");
      n = static_cast<std::size_t>(std::llround(static_cast<double>(p) / c));
    }
    double t = 0.0;
    if (doc["t"].is_object()) t = std::pow(static_cast<double>(n), doc["t"].at("n_power").get<double>());
    else t = doc["t"].get<double>();
    ec.params = make_params(p, n, t);

    if (doc.contains("noise")) {
      ec.kinds.clear();
      const auto& nk = doc["noise"];
      if (nk.is_string()) ec.kinds.push_back(parse_noise_kind(nk.get<std::string>()));
      else for (const auto& k : nk) ec.kinds.push_back(parse_noise_kind(k.get<std::string>()));
    }
    ec.trials = doc.value("trials", ec.trials);
    ec.base_seed = doc.value("seed", ec.base_seed);
    rc.out_dir = doc.value("out_dir", rc.out_dir);

    if (doc.contains("solver")) {
      const auto& s = doc["solver"];
      ec.solver.tolerance = s.value("tolerance", ec.solver.tolerance);
      ec.solver.max_iterations = s.value("max_iterations", ec.solver.max_iterations);
      ec.solver.eta_start = s.value("eta_start", ec.solver.eta_start);
      ec.solver.homotopy_factor = s.value("homotopy_factor", ec.solver.homotopy_factor);
      ec.solver.damping = s.value("damping", ec.solver.damping);
    }
    if (doc.contains("experiment")) {
      const auto& e = doc["experiment"];
      ec.k_max = e.value("k_max", std::min(ec.k_max, p));
      ec.vartheta = e.value("vartheta", ec.vartheta);
      ec.omega = e.value("omega", ec.omega);
      ec.ell = e.value("ell", ec.ell);
      ec.c_v = e.value("c_v", ec.c_v);
      ec.save_trials_dir = e.value("save_trials_dir", ec.save_trials_dir);
      if (e.contains("spikes")) ec.spikes = e["spikes"].get<std::vector<double>>();
      if (e.contains("z_grid"))
        for (const auto& z : e["z_grid"]) ec.z_grid.push_back({z.at(0).get<double>(), z.at(1).get<double>()});
      if (e.contains("thresholds")) {
        const auto& th = e["thresholds"];
        auto& T = ec.thresholds;
        T.c_rigid = th.value("c_rigid", T.c_rigid);
        T.ks_budget = th.value("ks_budget", T.ks_budget);
        T.c_deloc = th.value("c_deloc", T.c_deloc);
        T.c_avg = th.value("c_avg", T.c_avg);
        T.c_aniso = th.value("c_aniso", T.c_aniso);
        T.c_bbp = th.value("c_bbp", T.c_bbp);
        T.rank_frequency = th.value("rank_frequency", T.rank_frequency);
        T.tail_quantile = th.value("tail_quantile", T.tail_quantile);
      }
    } else {
      ec.k_max = std::min(ec.k_max, p);
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: wrong type: ") + e.what());
  }
  ec.validate();
  return rc;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const auto base = std::filesystem::path(path).parent_path().string();
  return parse_run_config(buf.str(), base.empty() ? "." : base);
}

std::string RunConfig::echo() const {
  const auto& ec = experiment;
  const auto num = [](double x) { return std::isfinite(x) ? format_number(x) : std::string("null"); };
  std::ostringstream os;
  os << "{\"spectrum\": " << spectrum_source << ", \"p\": " << ec.params.p << ", \"n\": " << ec.params.n
     << ", \"t\": " << num(ec.params.t) << ", \"noise\": [";
  for (std::size_t i = 0; i < ec.kinds.size(); ++i) os << (i ? ", " : "") << '"' << to_string(ec.kinds[i]) << '"';
  os << "], \"trials\": " << ec.trials << ", \"seed\": " << ec.base_seed
     << ", \"solver\": {\"tolerance\": " << num(ec.solver.tolerance)
     << ", \"max_iterations\": " << ec.solver.max_iterations << ", \"eta_start\": " << num(ec.solver.eta_start)
     << ", \"homotopy_factor\": " << num(ec.solver.homotopy_factor) << ", \"damping\": " << num(ec.solver.damping)
     << "}, \"experiment\": {\"k_max\": " << ec.k_max << ", \"vartheta\": " << num(ec.vartheta)
     << ", \"omega\": " << num(ec.omega) << ", \"ell\": " << ec.ell << ", \"c_v\": " << num(ec.c_v) << ", \"spikes\": [";
  for (std::size_t i = 0; i < ec.spikes.size(); ++i) os << (i ? ", " : "") << num(ec.spikes[i]);
  os << "], \"z_grid\": [";
  for (std::size_t i = 0; i < ec.z_grid.size(); ++i)
    os << (i ? ", " : "") << '[' << num(ec.z_grid[i].re) << ", " << num(ec.z_grid[i].im) << ']';
  const auto& T = ec.thresholds;
  os << "], \"thresholds\": {\"c_rigid\": " << num(T.c_rigid) << ", \"ks_budget\": " << num(T.ks_budget)
     << ", \"c_deloc\": " << num(T.c_deloc) << ", \"c_avg\": " << num(T.c_avg) << ", \"c_aniso\": " << num(T.c_aniso)
     << ", \"c_bbp\": " << num(T.c_bbp) << ", \"rank_frequency\": " << num(T.rank_frequency)
     << ", \"tail_quantile\": " << num(T.tail_quantile) << "}}, \"out_dir\": " << nlohmann::json(out_dir).dump()
     << "}";
  return os.str();
}

}  // namespace rectconv
