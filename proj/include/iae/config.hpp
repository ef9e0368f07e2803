#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "iae/combinations.hpp"

namespace iae {

// How susceptibility coordinates are shared between sources.
//   independent: one private space per source.
//   shared_susceptibility: a single susceptibility space for all sources.
//   single_space: influence and susceptibility are the same points.
enum class Variant : std::uint8_t { independent = 0, shared_susceptibility = 1, single_space = 2 };

// Accepts "independent", "shared" and "single" (plus the long enum names).
const char* to_string(Variant v);
Variant parse_variant(const std::string& name);

const char* to_string(SamplingMode m);
SamplingMode parse_sampling(const std::string& name);

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct TrainConfig {
  int dimension = 75;
  int epochs = 100;
  double learning_rate = 0.01;
  double mu = 2.0;
  double kernel_time = 1.0;
  SamplingMode sampling = SamplingMode::dominant;
  Variant variant = Variant::independent;
  std::uint64_t seed = 0;
  // Worker cap for gradient accumulation; 0 = hardware concurrency. Results
  // do not depend on it.
  unsigned threads = 0;

  // Throws ConfigError naming the first out-of-range field.
  void validate() const;
};

}  // namespace iae
