#pragma once

#include "evade/model.hpp"

namespace evade {

struct SavedModel {
  ClassifierHandle model;
  TrainConfig config;
};

// Versioned binary blob: magic, format version, kind, config echo, learned
// state. Stable within one artifact version only.
void save_model(const Classifier& model, const TrainConfig& config,
                const std::string& path);
SavedModel load_model(const std::string& path);

}  // namespace evade
