#pragma once

#include "slicelab/harness.hpp"

#include <string>

namespace slicelab {

// Experiment grammar: top-level keys bodies[], densities[], checks[], quad,
// opt. Syntax errors carry line and column; semantic errors carry the path
// of the offending element.
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);

// single-object forms used by the command line
StarBody parse_body_json(const std::string& text);
DensitySpec parse_density_json(const std::string& text);

}  // namespace slicelab
