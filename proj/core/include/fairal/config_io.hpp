#pragma once

#include <string>
#include <vector>

#include "fairal/datagen.hpp"
#include "fairal/experiment.hpp"

namespace fairal {

/// JSON object whose keys mirror DatasetSpec field names exactly; unknown
/// keys and type mismatches throw ConfigError. Omitted keys keep defaults.
DatasetSpec load_dataset_spec_json(const std::string& path);

/// JSON object (single config) or array of objects, keys mirroring
/// ExperimentConfig field names ("dataset" and "model" are nested objects).
/// Every returned config is validated and resolved.
std::vector<ExperimentConfig> load_experiment_configs_json(
    const std::string& path);

}  // namespace fairal
