#pragma once

#include <cstdint>
#include <vector>

#include "iae/cascade.hpp"
#include "iae/embedding.hpp"

namespace iae {

// Ground-truth geometry for generating cascades. Sources are tokens
// "s0".."s{S-1}", pool users "u0".."u{P-1}"; every source holds its own
// susceptibility coordinate for every pool user.
struct PlantedWorld {
  EmbeddingModel ground_truth;
  std::vector<UserId> sources;
  std::vector<UserId> pool;
  int users_per_source = 0;
  double noise = 0.0;  // per-adjacent-pair swap probability during emission
};

// Coordinates uniform in [-1, 1]^D; a susceptibility point whose distance to
// its source lies within 1e-9 of another pool user's is redrawn.
PlantedWorld generate_world(int num_sources, int users_per_source, int dimension,
                            std::uint64_t seed, double noise = 0.0);

// For each source: `per_source` cascades of `cascade_len` infected users drawn
// without replacement, sorted by ground-truth distance, then one pass of
// adjacent swaps with probability w.noise each. `id_prefix` tags cascade ids.
CascadeDataset emit_cascades(const PlantedWorld& w, int per_source, int cascade_len,
                             std::uint64_t seed, const std::string& id_prefix = "c");

// Appends reversed-order copies (infected users reversed, source kept) of a
// seeded random `fraction` of the cascades.
CascadeDataset add_reversed_duplicates(const CascadeDataset& d, double fraction,
                                       std::uint64_t seed);

}  // namespace iae
