#ifndef OPMOD_EXPERIMENT_HPP
#define OPMOD_EXPERIMENT_HPP

//
// Module      : experiment
// Description : deterministic experiment runner behind the CLI; validates the
//               whole configuration before writing any artifact
//

#include <cstdint>
#include <string>
#include <vector>

namespace opmod::cli {

// exit semantics: 0 success, 1 invariant/assertion violation, 2 config error
inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitConfig = 2;

struct ExperimentConfig {
  std::string subcommand;
  std::string function_id = "conj";
  std::string kind = "C";
  std::vector<double> alpha_grid;
  std::vector<double> delta_grid;
  std::vector<double> r_grid;
  double delta = 1.0;
  double disc_radius = 1.0;
  std::size_t dim = 6;
  std::size_t budget = 200;
  std::size_t iterations = 40;
  std::size_t instances = 200;
  std::uint64_t seed = 1;
  double grid_w = 64.0;
  std::size_t grid_n = 1024;
  std::string matrix_file;
  std::string modulus = "power:0.5";
  std::string out_dir;  // empty -> $OPMOD_OUT_DIR or "."
};

// throws std::invalid_argument on any schema violation
ExperimentConfig config_from_json_file(const std::string& path);

// full validation (function ids, grids, ranges); throws std::invalid_argument
void validate_config(const ExperimentConfig& cfg);

int run(const ExperimentConfig& cfg);

}  // namespace opmod::cli

#endif
