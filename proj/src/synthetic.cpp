#include "iae/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace iae {

PlantedWorld generate_world(int num_sources, int users_per_source, int dimension,
                            std::uint64_t seed, double noise) {
  if (num_sources < 1 || users_per_source < 1 || dimension < 1) {
    throw ConfigError("world sizes must be >= 1");
  }
  if (!(noise >= 0.0 && noise <= 1.0)) throw ConfigError("noise must lie in [0, 1]");

  Vocabulary vocab;
  std::vector<UserId> sources, pool;
  for (int s = 0; s < num_sources; ++s) sources.push_back(vocab.intern("s" + std::to_string(s)));
  for (int u = 0; u < users_per_source; ++u) pool.push_back(vocab.intern("u" + std::to_string(u)));

  EmbeddingModel truth(dimension, Variant::independent, std::move(vocab));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  auto draw = [&](std::span<double> p) {
    for (double& v : p) v = coord(rng);
  };

  for (UserId s : sources) {
    const Slot xs = truth.add_influence(s);
    draw(truth.point(xs));
    std::vector<double> dists;
    for (UserId u : pool) {
      const Slot y = truth.add_susceptibility(s, u);
      for (;;) {
        draw(truth.point(y));
        const double d = *distance_sq(truth, s, u);
        const bool near_tie = std::any_of(dists.begin(), dists.end(),
                                          [&](double o) { return std::abs(o - d) < 1e-9; });
        if (!near_tie) {
          dists.push_back(d);
          break;
        }
      }
    }
  }
  return {std::move(truth), std::move(sources), std::move(pool), users_per_source, noise};
}

CascadeDataset emit_cascades(const PlantedWorld& w, int per_source, int cascade_len,
                             std::uint64_t seed, const std::string& id_prefix) {
  if (per_source < 0) throw ConfigError("cascades per source must be >= 0");
  if (cascade_len < 1) throw ConfigError("cascade length must be >= 1");
  if (cascade_len > w.users_per_source) {
    throw ConfigError("cascade length exceeds the source's user pool");
  }
  const auto& truth = w.ground_truth;
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution swap(w.noise);

  std::vector<Cascade> out;
  out.reserve(w.sources.size() * static_cast<std::size_t>(per_source));
  std::vector<UserId> pool = w.pool;
  for (UserId s : w.sources) {
    const auto& s_token = truth.vocabulary().token(s);
    for (int k = 0; k < per_source; ++k) {
      // Partial Fisher-Yates: the first cascade_len entries become the draw.
      for (int i = 0; i < cascade_len; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
        std::swap(pool[i], pool[pick(rng)]);
      }
      std::vector<UserId> infected(pool.begin(), pool.begin() + cascade_len);
      std::sort(infected.begin(), infected.end(), [&](UserId a, UserId b) {
        return *distance_sq(truth, s, a) < *distance_sq(truth, s, b);
      });
      for (std::size_t i = 0; i + 1 < infected.size(); ++i) {
        if (swap(rng)) std::swap(infected[i], infected[i + 1]);
      }
      Cascade c{id_prefix + "_" + s_token + "_" + std::to_string(k), {s}};
      c.users.insert(c.users.end(), infected.begin(), infected.end());
      out.push_back(std::move(c));
    }
  }
  return CascadeDataset(truth.vocabulary(), std::move(out));
}

CascadeDataset add_reversed_duplicates(const CascadeDataset& d, double fraction,
                                       std::uint64_t seed) {
  std::vector<Cascade> out = d.cascades();
  const auto n = static_cast<std::size_t>(std::llround(fraction * d.cascade_count()));
  std::vector<std::size_t> order(d.cascade_count());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(std::min(n, order.size()));
  std::sort(order.begin(), order.end());
  for (std::size_t i : order) {
    Cascade c = d.cascades()[i];
    std::reverse(c.users.begin() + 1, c.users.end());
    c.id += "_rev";
    out.push_back(std::move(c));
  }
  return CascadeDataset(d.vocabulary(), std::move(out));
}

}  // namespace iae
