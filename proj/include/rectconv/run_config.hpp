#pragma once

#include <string>

#include "rectconv/experiments.hpp"

namespace rectconv {

/// Parsed run description: one JSON document with keys `spectrum`, `p`, `n`
/// (or `c`), `t`, `noise`, `trials`, `seed`, `solver.*`, `experiment.*`.
///
/// `t` may also be {"n_power": a}, meaning t = n^a. `noise` is a kind name or
/// a list of them.
///
/// `spectrum` is an array of eigenvalues, {"values": [...]}, {"file": path},
/// {"canonical": {"p": P, "edge": E}} or {"zeros": P}.
struct RunConfig {
  ExperimentConfig experiment;
  std::string out_dir = ".";
  // The `spectrum` entry as given, echoed instead of the expanded values.
  std::string spectrum_source = "null";
  // Canonical JSON echo, embedded into every report.
  std::string echo() const;
};

/// Throws std::invalid_argument listing missing or invalid fields.
RunConfig parse_run_config(const std::string& json_text, const std::string& base_dir = ".");
RunConfig load_run_config(const std::string& path);

}  // namespace rectconv
