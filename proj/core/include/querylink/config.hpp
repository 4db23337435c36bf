#pragma once

// Experiment configuration: JSON file form, validation and hashing.

#include <cstdint>
#include <stdexcept>
#include <string>

#include "querylink/engine.hpp"
#include "querylink/generator.hpp"
#include "querylink/linkstore.hpp"

namespace querylink {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string name;
  NetworkConfig network;
  QueryConfig query;
  long totalQueries = 40000;
  long intervalSize = 2500;
  Direction direction = Direction::FORWARDS;
  LeafOrder leafOrder = LeafOrder::LTR;
  StoreConstants store;
  uint64_t seed = 1;
};

// Parses and validates a config file. Throws ConfigError with the offending
// key on malformed or inconsistent input.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& jsonText);

std::string config_to_json(const ExperimentConfig& cfg);

// FNV-1a over the canonical JSON form with the seed field dropped, so one
// preset hashes identically no matter which seed a run used. Hex string.
std::string config_hash(const ExperimentConfig& cfg);

void validate_config(const ExperimentConfig& cfg);

}  // namespace querylink
