#pragma once

#include <string>

#include "pge/model.hpp"
#include "pge/trainer.hpp"

namespace pge {

// Flat key=value run configuration: model shape, score function, training
// hyperparameters and data paths. `#` starts a comment; unknown keys are
// validation errors. echo_config() round-trips exactly.
struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  std::string train_path;
  std::string valid_path;
  std::string test_path;
  std::string stopword_path;
  std::string word_vector_path;
  std::string out_dir = ".";
};

RunConfig parse_run_config_text(const std::string& text);
RunConfig parse_run_config_file(const std::string& path);

// Every violated constraint, one per line; empty string when valid.
std::string validate_run_config(const RunConfig& cfg);

// Resolved key=value text in canonical key order; doubles printed with %.17g
// so a re-parse reproduces the identical run.
std::string echo_config(const RunConfig& cfg);

}  // namespace pge
