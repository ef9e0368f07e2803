#include "iae/config.hpp"

#include <cmath>

namespace iae {

const char* to_string(Variant v) {
  switch (v) {
    case Variant::independent: return "independent";
    case Variant::shared_susceptibility: return "shared";
    case Variant::single_space: return "single";
  }
  return "unknown";
}

Variant parse_variant(const std::string& name) {
  if (name == "independent") return Variant::independent;
  if (name == "shared" || name == "shared_susceptibility") return Variant::shared_susceptibility;
  if (name == "single" || name == "single_space") return Variant::single_space;
  throw ConfigError("unknown variant: " + name);
}

const char* to_string(SamplingMode m) {
  return m == SamplingMode::dominant ? "dominant" : "full";
}

SamplingMode parse_sampling(const std::string& name) {
  if (name == "dominant") return SamplingMode::dominant;
  if (name == "full") return SamplingMode::full;
  throw ConfigError("unknown sampling mode: " + name);
}

void TrainConfig::validate() const {
  if (dimension < 1) throw ConfigError("dimension must be >= 1");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be > 0");
  }
  if (!(mu > 1.0) || !std::isfinite(mu)) throw ConfigError("mu must be > 1");
  if (!(kernel_time > 0.0) || !std::isfinite(kernel_time)) {
    throw ConfigError("kernel time must be > 0");
  }
}

}  // namespace iae
