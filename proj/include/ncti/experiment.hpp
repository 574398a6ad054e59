#pragma once

// Batch driver: JSON experiment configs -> invariant reports persisted as
// result.json + samples.csv. Strict schema (unknown keys rejected) so typos
// fail before any computation starts.

#include <cstdint>
#include <string>
#include <vector>

#include "ncti/invariants.hpp"
#include "ncti/model.hpp"

#include "json.hpp"

namespace ncti {

struct X0Policy {
  std::string policy = "single";  // "single" | "grid"
  std::vector<double> value;      // single: explicit center (defaults to 1/2 per direction)
  int points_per_dir = 3;         // grid: G points per direction at (g + 1/2)/G
};

struct ExperimentConfig {
  LatticeModel model;
  std::vector<int> Ls;
  BC bc = BC::periodic;
  // chemical potential policy: exactly one of mu/filling, else the preset default
  bool has_mu = false;
  double mu = 0.0;
  bool has_filling = false;
  double filling = 0.0;
  std::vector<std::vector<int>> index_sets;
  std::vector<std::string> routes;  // subset of {"local", "index"}
  std::vector<std::uint64_t> seeds;
  X0Policy x0;
  int fedosov_power = 0;         // 0 = route default
  double window_radius = -1.0;   // < 0 = L/4
  double rounding_threshold = 0.15;
  bool fixed_reduction_order = true;
  bool assert_mode = false;
  nlohmann::json echo;  // the validated input, echoed into result.json

  // x0 sample points for an index set of size k (local route always uses one
  // nominal entry so every route contributes the same number of CSV rows)
  std::vector<std::vector<double>> x0_points(int k) const;
};

// Throws std::invalid_argument with a field path on any schema violation.
ExperimentConfig parse_experiment_config(const nlohmann::json& j);

struct ItemFailure {
  int L = 0;
  std::uint64_t seed = 0;
  std::string message;
};

struct ExperimentResult {
  nlohmann::json record;               // full result.json content
  std::vector<InvariantReport> reports;
  std::vector<ItemFailure> failures;
  bool assert_ok = true;   // rounding deviations and route agreement (assert mode)
  std::string csv;         // samples.csv content
};

// Runs every (L, seed) work item on a bounded pool, assembles reports in the
// fixed order L -> seed -> I -> x0 -> route, and (if out_dir is nonempty)
// writes <out_dir>/result.json and <out_dir>/samples.csv.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                                int threads);

// Named preset configs ("ssh1d_topological", "ssh1d_trivial", "hofstadter2d",
// "hofstadter2d_disordered", "stacked_chern3d") as ready-to-run JSON.
std::vector<std::pair<std::string, nlohmann::json>> preset_examples();

}  // namespace ncti
