#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sbmkit/bp.hpp"

namespace sbmkit {

enum class Experiment { planted_coloring, sbm };

struct SweepConfig {
  Experiment experiment = Experiment::planted_coloring;
  std::size_t q = 5;
  std::size_t n = 50000;
  // planted_coloring: mean degrees. sbm: paired c_in / c_out lists.
  std::vector<double> c;
  std::vector<double> c_in;
  std::vector<double> c_out;
  std::size_t seeds = 5;
  std::uint64_t seed = 1;
  std::vector<InitMode> inits = {InitMode::random, InitMode::planted};
  double noise = 1e-3;
  double tol = 1e-6;
  std::size_t max_sweeps = 1000;
  std::filesystem::path out;
  std::filesystem::path summary_out;
  std::filesystem::path spectrum_out;
  std::size_t threads = 1;

  std::size_t grid_size() const;
  SbmParams point(std::size_t index) const;
  void validate() const;
};

// key = value per line, '#' starts a comment. Lists are comma separated or
// given as start:stop:step (inclusive).
SweepConfig parse_sweep_config(std::istream& is);
SweepConfig load_sweep_config(const std::filesystem::path& path);

std::optional<InitMode> parse_init_mode(const std::string& s);
std::string to_string(InitMode m);

struct SweepRow {
  std::size_t point = 0;
  Experiment experiment = Experiment::planted_coloring;
  std::size_t q = 0;
  std::size_t n = 0;
  double c_in = 0.0;
  double c_out = 0.0;
  double c = 0.0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  InitMode init = InitMode::random;
  bool converged = false;
  std::size_t sweeps = 0;
  double overlap = 0.0;
  double bethe_f = 0.0;
};

// Per grid point means over seeds; delta_f is planted minus random init.
struct SweepSummary {
  double c_in = 0.0;
  double c_out = 0.0;
  double c = 0.0;
  double lambda = 0.0;
  double overlap_random = 0.0;
  double overlap_planted = 0.0;
  double f_random = 0.0;
  double f_planted = 0.0;
  double delta_f = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // grid index, then seed, then init
  std::vector<SweepSummary> summary;  // empty unless both random and planted ran
  bool all_converged = true;
};

// The graph for (point, seed) uses derive_seed(derive_seed(cfg.seed, point), seed).
SweepResult run_sweep(const SweepConfig& cfg);

// Runs the sweep and writes cfg.out (via a .partial file renamed on
// success), the summary and the optional spectrum dump.
SweepResult run_sweep_to_files(const SweepConfig& cfg);

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
void write_summary_csv(std::ostream& os, const std::vector<SweepSummary>& summary);

// First c where delta_f changes sign, linearly interpolated. Differences
// within zero_tol count as zero (no planted fixed point) and are skipped.
std::optional<double> free_energy_crossing(const std::vector<SweepSummary>& summary,
                                           double zero_tol = 1e-6);

}  // namespace sbmkit
