#include "iae/training.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <thread>

#include "iae/parallel.hpp"

namespace iae {

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    acc += d * d;
  }
  return acc;
}

struct ResolvedCombo {
  Slot x, yi, yj;
};

ResolvedCombo resolve(const EmbeddingModel& m, UserId s, UserId earlier, UserId later) {
  const auto x = m.influence_slot(s);
  const auto yi = m.susceptibility_slot(s, earlier);
  const auto yj = m.susceptibility_slot(s, later);
  if (!x || !yi || !yj) throw std::invalid_argument("combination has unallocated coordinates");
  return {*x, *yi, *yj};
}

}  // namespace

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

double predicted_gap(const EmbeddingModel& m, UserId s, UserId earlier, UserId later) {
  const auto r = resolve(m, s, earlier, later);
  const auto x = m.point(r.x);
  return sq_dist(x, m.point(r.yj)) - sq_dist(x, m.point(r.yi));
}

std::optional<Gradient> accumulate_gradients(const EmbeddingModel& m, const Combination& combo) {
  const auto r = resolve(m, combo.source, combo.earlier, combo.later);
  const auto x = m.point(r.x);
  const auto yi = m.point(r.yi);
  const auto yj = m.point(r.yj);
  const double gap = sq_dist(x, yj) - sq_dist(x, yi);
  if (gap >= combo.avg_margin) return std::nullopt;

  const std::size_t dim = x.size();
  Gradient g{std::vector<double>(dim), std::vector<double>(dim), std::vector<double>(dim)};
  for (std::size_t k = 0; k < dim; ++k) {
    g.influence[k] = 2.0 * (yj[k] - yi[k]);
    g.earlier[k] = 2.0 * (yi[k] - x[k]);
    g.later[k] = 2.0 * (x[k] - yj[k]);
  }
  return g;
}

CompiledTable::CompiledTable(const EmbeddingModel& m, const CombinationTable& table) {
  entries_.reserve(table.size());
  for (const auto& [key, c] : table.entries()) {
    const auto r = resolve(m, c.source, c.earlier, c.later);
    entries_.push_back({r.x, r.yi, r.yj, c.avg_margin});
  }

  // Counting sort of incidences by slot keeps table order within each slot.
  const std::size_t slots = m.slot_count();
  offsets_.assign(slots + 1, 0);
  for (const auto& e : entries_) {
    ++offsets_[static_cast<std::size_t>(e.x) + 1];
    ++offsets_[static_cast<std::size_t>(e.yi) + 1];
    ++offsets_[static_cast<std::size_t>(e.yj) + 1];
  }
  for (std::size_t s = 0; s < slots; ++s) offsets_[s + 1] += offsets_[s];
  incidences_.resize(offsets_.back());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::uint32_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    incidences_[fill[static_cast<std::size_t>(e.x)]++] = {i, Role::influence};
    incidences_[fill[static_cast<std::size_t>(e.yi)]++] = {i, Role::earlier};
    incidences_[fill[static_cast<std::size_t>(e.yj)]++] = {i, Role::later};
  }
}

std::span<const CompiledTable::Incidence> CompiledTable::incidences(Slot s) const {
  const auto i = static_cast<std::size_t>(s);
  return std::span<const Incidence>(incidences_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
}

EpochStats run_epoch(EmbeddingModel& m, const CompiledTable& table, double eta, unsigned threads) {
  if (table.slot_count() != m.slot_count()) {
    throw std::invalid_argument("compiled table does not match model");
  }
  const auto entries = table.entries();
  const std::size_t dim = static_cast<std::size_t>(m.dimension());
  const EmbeddingModel& snapshot = m;
  threads = resolve_threads(threads);

  // Pass 1: hinge activity per entry against the fixed model.
  std::vector<double> loss(entries.size(), 0.0);
  std::vector<std::uint8_t> active(entries.size(), 0);
  parallel_blocks(entries.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto& e = entries[i];
      const auto x = snapshot.point(e.x);
      const double gap = sq_dist(x, snapshot.point(e.yj)) - sq_dist(x, snapshot.point(e.yi));
      if (gap < e.margin) {
        active[i] = 1;
        loss[i] = e.margin - gap;
      }
    }
  });

  EpochStats stats;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    stats.total_loss += loss[i];
    stats.active_count += active[i];
  }
  stats.coordinate_ops = 2 * entries.size() * dim + 3 * stats.active_count * dim;
  if (stats.active_count == 0) return stats;

  // Pass 2: each slot sums its own active incidences in table order, so the
  // result is independent of the worker count.
  std::vector<double> next(snapshot.coordinates().begin(), snapshot.coordinates().end());
  parallel_blocks(table.slot_count(), threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> grad(dim);
    for (std::size_t s = begin; s < end; ++s) {
      std::fill(grad.begin(), grad.end(), 0.0);
      std::size_t touches = 0;
      for (const auto& inc : table.incidences(static_cast<Slot>(s))) {
        if (!active[inc.entry]) continue;
        ++touches;
        const auto& e = entries[inc.entry];
        const auto x = snapshot.point(e.x);
        const auto yi = snapshot.point(e.yi);
        const auto yj = snapshot.point(e.yj);
        switch (inc.role) {
          case CompiledTable::Role::influence:
            for (std::size_t k = 0; k < dim; ++k) grad[k] += 2.0 * (yj[k] - yi[k]);
            break;
          case CompiledTable::Role::earlier:
            for (std::size_t k = 0; k < dim; ++k) grad[k] += 2.0 * (yi[k] - x[k]);
            break;
          case CompiledTable::Role::later:
            for (std::size_t k = 0; k < dim; ++k) grad[k] += 2.0 * (x[k] - yj[k]);
            break;
        }
      }
      if (touches == 0) continue;
      const double step = eta / static_cast<double>(touches);
      double* out = next.data() + s * dim;
      for (std::size_t k = 0; k < dim; ++k) out[k] -= step * grad[k];
    }
  });
  std::copy(next.begin(), next.end(), m.coordinates().begin());
  return stats;
}

EpochStats run_epoch(EmbeddingModel& m, const CombinationTable& table, double eta, unsigned threads) {
  return run_epoch(m, CompiledTable(m, table), eta, threads);
}

TrainResult train(const CascadeDataset& train_set, const TrainConfig& config,
                  const std::function<void(const EpochStats&)>& on_epoch) {
  config.validate();
  const auto table = build_table(train_set, config.mu, config.sampling);
  std::mt19937_64 rng(config.seed);
  TrainResult result{init_model(table, train_set.vocabulary(), config, rng), {}, table.size(), {}};
  if (table.empty()) {
    result.warning = "combination table is empty; no epochs run";
    return result;
  }

  const CompiledTable compiled(result.model, table);
  for (int k = 0; k < config.epochs; ++k) {
    auto stats = run_epoch(result.model, compiled, config.learning_rate, config.threads);
    stats.epoch = k;
    result.history.push_back(stats);
    if (on_epoch) on_epoch(stats);
    if (stats.active_count == 0) break;
  }
  return result;
}

}  // namespace iae
