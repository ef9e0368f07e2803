#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iae/cascade.hpp"
#include "iae/combinations.hpp"
#include "iae/config.hpp"
#include "iae/embedding.hpp"

namespace iae {

struct EpochStats {
  int epoch = 0;
  double total_loss = 0.0;  // hinge loss summed over the table, before the update
  std::size_t active_count = 0;
  // Scalar coordinate operations performed by the epoch (distance terms plus
  // gradient terms). Grows as table size x D.
  std::uint64_t coordinate_ops = 0;
};

/// Squared-distance gap d(s, later) - d(s, earlier). All three coordinates
/// must be allocated; throws std::invalid_argument otherwise.
double predicted_gap(const EmbeddingModel& m, UserId s, UserId earlier, UserId later);

inline double hinge_loss(double avg_margin, double gap) {
  return gap >= avg_margin ? 0.0 : avg_margin - gap;
}

struct Gradient {
  std::vector<double> influence;  // d loss / d x_s
  std::vector<double> earlier;    // d loss / d y_earlier
  std::vector<double> later;      // d loss / d y_later
};

/// Gradient of the hinge term for one combination, or empty when the
/// predicted gap already meets the margin.
std::optional<Gradient> accumulate_gradients(const EmbeddingModel& m, const Combination& combo);

// Combination table resolved against a model's slots, ready for repeated
// epochs. Each slot keeps the list of (entry, role) incidences in table order
// so accumulation can run per slot without write contention.
class CompiledTable {
 public:
  CompiledTable(const EmbeddingModel& m, const CombinationTable& table);

  struct Entry {
    Slot x, yi, yj;
    double margin;
  };
  enum class Role : std::uint8_t { influence, earlier, later };
  struct Incidence {
    std::uint32_t entry;
    Role role;
  };

  std::span<const Entry> entries() const { return entries_; }
  std::span<const Incidence> incidences(Slot s) const;
  std::size_t slot_count() const { return offsets_.size() - 1; }

 private:
  std::vector<Entry> entries_;
  std::vector<std::size_t> offsets_;
  std::vector<Incidence> incidences_;
};

/// One batch gradient step. Loss and active count are measured against the
/// model as passed in; each touched coordinate then moves by -eta times its
/// gradient averaged over the active combinations that touched it.
EpochStats run_epoch(EmbeddingModel& m, const CompiledTable& table, double eta,
                     unsigned threads = 1);
EpochStats run_epoch(EmbeddingModel& m, const CombinationTable& table, double eta,
                     unsigned threads = 1);

struct TrainResult {
  EmbeddingModel model;
  std::vector<EpochStats> history;
  std::size_t table_size = 0;
  std::optional<std::string> warning;
};

/// Builds the table, initializes from config.seed and runs up to
/// config.epochs epochs, stopping after the first epoch with no active
/// combination. `on_epoch` is invoked after each epoch, if set.
TrainResult train(const CascadeDataset& train_set, const TrainConfig& config,
                  const std::function<void(const EpochStats&)>& on_epoch = {});

unsigned resolve_threads(unsigned requested);

}  // namespace iae
