#pragma once

#include <compare>
#include <iosfwd>
#include <map>
#include <vector>

#include "iae/cascade.hpp"

namespace iae {

enum class SamplingMode { full, dominant };

/// Critical penalty margin between an earlier infection at order `t_i` and a
/// later one at `t_j`: log_mu(1 + (t_j - t_i) / (1 + t_i)).
///
/// Requires 1 <= t_i < t_j and mu > 1; throws std::invalid_argument otherwise.
double critical_margin(int t_i, int t_j, double mu);

struct Triple {
  UserId source;
  UserId earlier;
  UserId later;
  double margin;
};

/// One triple per ordered pair of infected users, in cascade order
/// (earlier index major). A cascade with n infected users yields n(n-1)/2.
std::vector<Triple> extract_triples(const Cascade& c, double mu);

struct CombinationKey {
  UserId source;
  UserId earlier;
  UserId later;

  auto operator<=>(const CombinationKey&) const = default;

  CombinationKey reversed() const { return {source, later, earlier}; }
};

struct Combination {
  UserId source;
  UserId earlier;
  UserId later;
  int count = 0;
  double avg_margin = 0.0;

  CombinationKey key() const { return {source, earlier, later}; }
};

class CombinationTable {
 public:
  using Map = std::map<CombinationKey, Combination>;

  CombinationTable() = default;
  CombinationTable(Map entries, SamplingMode mode) : entries_(std::move(entries)), mode_(mode) {}

  const Map& entries() const { return entries_; }
  SamplingMode mode() const { return mode_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  const Combination* find(const CombinationKey& k) const;

 private:
  Map entries_;
  SamplingMode mode_ = SamplingMode::full;
};

// Merges identical triples across cascades (count = contributing cascades,
// avg_margin = unweighted mean), then in dominant mode keeps an orientation
// only if it strictly outnumbers its reverse. Ties drop both.
CombinationTable build_table(const CascadeDataset& train, double mu, SamplingMode mode);

// TSV: source earlier later count avg_margin, tokens resolved through `vocab`.
void write_table_tsv(std::ostream& out, const CombinationTable& table, const Vocabulary& vocab);

}  // namespace iae
