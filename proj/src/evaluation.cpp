#include "iae/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <unordered_set>

#include <json.hpp>

#include "iae/parallel.hpp"

namespace iae {

RankedPrediction rank_for_source(const EmbeddingModel& m, UserId s, std::span<const UserId> extra) {
  if (!m.influence_slot(s)) {
    const auto& vocab = m.vocabulary();
    throw UnknownSourceError(to_index(s) < vocab.size() ? vocab.token(s)
                                                        : "#" + std::to_string(to_index(s)));
  }
  RankedPrediction out;
  out.source = s;
  const auto users = m.candidates(s);
  out.ranking.reserve(users.size() + extra.size());
  for (UserId u : users) out.ranking.push_back({u, distance_sq(m, s, u)});
  std::stable_sort(out.ranking.begin(), out.ranking.end(),
                   [](const RankedUser& a, const RankedUser& b) {
                     return *a.distance_sq < *b.distance_sq;
                   });

  std::vector<UserId> missing;
  for (UserId u : extra) {
    if (u != s && !m.susceptibility_slot(s, u)) missing.push_back(u);
  }
  std::sort(missing.begin(), missing.end());
  missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
  for (UserId u : missing) out.ranking.push_back({u, std::nullopt});
  out.unseen_count = missing.size();
  return out;
}

double average_precision(const RankedPrediction& prediction, const Cascade& truth) {
  if (truth.source() != prediction.source) {
    throw std::invalid_argument("truth cascade source differs from prediction source");
  }
  const std::unordered_set<UserId> relevant(truth.users.begin() + 1, truth.users.end());
  double sum = 0.0;
  std::size_t hits = 0;
  std::size_t rank = 0;
  for (const auto& r : prediction.ranking) {
    if (!r.distance_sq) break;
    ++rank;
    if (relevant.contains(r.user)) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(rank);
    }
  }
  return sum / static_cast<double>(relevant.size());
}

EvalReport evaluate(const EmbeddingModel& m, const CascadeDataset& test, unsigned threads) {
  if (test.cascade_count() == 0) throw std::invalid_argument("test set is empty");
  const auto& cascades = test.cascades();
  EvalReport report;
  report.per_cascade.resize(cascades.size());

  parallel_blocks(cascades.size(), std::max(1u, threads), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Cascade& c = cascades[i];
      auto& score = report.per_cascade[i];
      score.cascade_id = c.id;
      const std::span<const UserId> infected(c.users.begin() + 1, c.users.end());
      if (!m.influence_slot(c.source())) {
        score.source_known = false;
        score.unseen_count = infected.size();
        continue;
      }
      const auto pred = rank_for_source(m, c.source(), infected);
      score.ap = average_precision(pred, c);
      score.candidate_count = pred.ranked_count();
      score.unseen_count = pred.unseen_count;
    }
  });

  double sum = 0.0;
  for (std::size_t i = 0; i < cascades.size(); ++i) {
    const auto& score = report.per_cascade[i];
    sum += score.ap;
    report.unknown_sources += score.source_known ? 0 : 1;
    report.unseen_total += score.unseen_count;
    report.truth_total += cascades[i].infected_count();
  }
  report.map = sum / static_cast<double>(cascades.size());
  return report;
}

void write_report_jsonl(std::ostream& out, const EvalReport& r) {
  for (const auto& s : r.per_cascade) {
    nlohmann::json row = {{"id", s.cascade_id},
                          {"ap", s.ap},
                          {"candidates", s.candidate_count},
                          {"unseen", s.unseen_count}};
    if (!s.source_known) row["unknown_source"] = true;
    out << row.dump() << '\n';
  }
  nlohmann::json summary = {{"summary", true},
                            {"map", r.map},
                            {"cascades", r.per_cascade.size()},
                            {"unknown_sources", r.unknown_sources},
                            {"unseen_total", r.unseen_total},
                            {"truth_total", r.truth_total}};
  out << summary.dump() << '\n';
}

void write_report_tsv(std::ostream& out, const EvalReport& r) {
  char buf[64];
  out << "id\tap\tcandidates\tunseen\tunknown_source\n";
  for (const auto& s : r.per_cascade) {
    std::snprintf(buf, sizeof buf, "%.17g", s.ap);
    out << s.cascade_id << '\t' << buf << '\t' << s.candidate_count << '\t' << s.unseen_count
        << '\t' << (s.source_known ? 0 : 1) << '\n';
  }
  std::snprintf(buf, sizeof buf, "%.17g", r.map);
  out << "# map\t" << buf << "\tcascades\t" << r.per_cascade.size() << "\tunknown_sources\t"
      << r.unknown_sources << "\tunseen_total\t" << r.unseen_total << '\n';
}

}  // namespace iae
