#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iae/cascade.hpp"
#include "iae/embedding.hpp"

namespace iae {

struct RankedUser {
  UserId user;
  std::optional<double> distance_sq;  // empty: no coordinate in the source's space
};

struct RankedPrediction {
  UserId source{};
  std::vector<RankedUser> ranking;
  std::size_t unseen_count = 0;

  // Number of leading entries that carry a distance.
  std::size_t ranked_count() const { return ranking.size() - unseen_count; }
};

class UnknownSourceError : public std::invalid_argument {
 public:
  explicit UnknownSourceError(const std::string& token)
      : std::invalid_argument("source has no influence coordinate: " + token) {}
};

/// Candidates in `s`'s susceptibility space, ascending by squared distance,
/// ties by user id. Any `extra` users without a coordinate there are appended
/// after them with no distance, ascending by id, and counted as unseen.
/// Throws UnknownSourceError if `s` has no influence coordinate.
RankedPrediction rank_for_source(const EmbeddingModel& m, UserId s,
                                 std::span<const UserId> extra = {});

/// Mean over the truth cascade's infected users of precision-at-rank, where
/// rank is the user's position among the entries that carry a distance.
/// Users never ranked contribute zero.
double average_precision(const RankedPrediction& prediction, const Cascade& truth);

struct CascadeScore {
  std::string cascade_id;
  double ap = 0.0;
  std::size_t candidate_count = 0;
  std::size_t unseen_count = 0;
  bool source_known = true;
};

struct EvalReport {
  std::vector<CascadeScore> per_cascade;
  double map = 0.0;
  std::size_t unknown_sources = 0;
  std::size_t unseen_total = 0;
  std::size_t truth_total = 0;
};

// Test cascades must share ids with the model's vocabulary, e.g. parsed with
// the model vocabulary as base. Unknown sources score 0 and are flagged.
EvalReport evaluate(const EmbeddingModel& m, const CascadeDataset& test, unsigned threads = 1);

void write_report_jsonl(std::ostream& out, const EvalReport& r);
void write_report_tsv(std::ostream& out, const EvalReport& r);

}  // namespace iae
