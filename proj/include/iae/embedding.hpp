#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "iae/cascade.hpp"
#include "iae/combinations.hpp"
#include "iae/config.hpp"

namespace iae {

class FormatError : public std::runtime_error {
 public:
  FormatError(std::size_t offset, const std::string& what);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

struct KernelParams {
  double time = 1.0;
};

// Index of one D-dimensional point inside the model's coordinate pool.
enum class Slot : std::uint32_t {};

class EmbeddingModel {
 public:
  using SpaceMap = std::unordered_map<UserId, Slot>;

  EmbeddingModel() = default;
  EmbeddingModel(int dimension, Variant variant, Vocabulary vocab = {});

  int dimension() const { return dim_; }
  Variant variant() const { return variant_; }
  const Vocabulary& vocabulary() const { return vocab_; }

  // Allocation is idempotent: an existing slot is returned unchanged.
  Slot add_influence(UserId s);
  Slot add_susceptibility(UserId s, UserId u);

  std::optional<Slot> influence_slot(UserId s) const;
  std::optional<Slot> susceptibility_slot(UserId s, UserId u) const;

  std::span<double> point(Slot slot);
  std::span<const double> point(Slot slot) const;

  std::size_t slot_count() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  std::span<double> coordinates() { return coords_; }
  std::span<const double> coordinates() const { return coords_; }

  // Number of points in influence / susceptibility roles. Under single_space
  // both count the same storage.
  std::size_t influence_count() const { return influence_.size(); }
  std::size_t susceptibility_count() const;

  // Users holding a coordinate in the susceptibility space seen by `s`,
  // excluding `s` itself, ascending by id.
  std::vector<UserId> candidates(UserId s) const;

  // Sources holding influence coordinates, ascending by id.
  std::vector<UserId> sources() const;

  const SpaceMap& influence_map() const { return influence_; }
  // Per-source susceptibility maps. independent: keyed by source.
  // shared_susceptibility: one entry under kSharedKey. single_space: empty.
  const std::map<UserId, SpaceMap>& susceptibility_maps() const { return susceptibility_; }

  static constexpr UserId kSharedKey = static_cast<UserId>(0xFFFFFFFFu);

  // Structural and bitwise coordinate equality; slot numbering is ignored.
  bool same_as(const EmbeddingModel& other) const;

 private:
  const SpaceMap* space_for(UserId s) const;
  Slot new_slot();

  int dim_ = 0;
  Variant variant_ = Variant::independent;
  Vocabulary vocab_;
  std::vector<double> coords_;
  SpaceMap influence_;
  std::map<UserId, SpaceMap> susceptibility_;
};

// Allocates an influence point for every source in `table` and a
// susceptibility point for every (source, user) pair it mentions, then draws
// all coordinates uniformly from [-0.5/D, 0.5/D] in slot order.
EmbeddingModel init_model(const CombinationTable& table, const Vocabulary& vocab,
                          const TrainConfig& config, std::mt19937_64& rng);

// Squared Euclidean distance from the influence point of `s` to the
// susceptibility point of `u` in `s`'s space; empty if either is missing.
std::optional<double> distance_sq(const EmbeddingModel& m, UserId s, UserId u);

// Heat-diffusion kernel (4 pi t)^(-D/2) exp(-d^2 / 4t), D the model dimension.
std::optional<double> diffusion_kernel(const EmbeddingModel& m, const KernelParams& p, UserId s,
                                       UserId u);

void save_model(std::ostream& out, const EmbeddingModel& m);
EmbeddingModel load_model(std::istream& in);
void save_model_file(const std::string& path, const EmbeddingModel& m);
EmbeddingModel load_model_file(const std::string& path);

inline constexpr char kModelMagic[4] = {'I', 'A', 'E', 'M'};
inline constexpr std::uint32_t kModelFormatVersion = 1;

}  // namespace iae
