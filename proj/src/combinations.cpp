#include "iae/combinations.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace iae {

double critical_margin(int t_i, int t_j, double mu) {
  if (t_i < 1 || t_j <= t_i) throw std::invalid_argument("critical_margin requires 1 <= t_i < t_j");
  if (!(mu > 1.0)) throw std::invalid_argument("critical_margin requires mu > 1");
  const double ratio = 1.0 + static_cast<double>(t_j - t_i) / (1.0 + t_i);
  return std::log(ratio) / std::log(mu);
}

std::vector<Triple> extract_triples(const Cascade& c, double mu) {
  std::vector<Triple> out;
  const std::size_t n = c.infected_count();
  if (n < 2) return out;
  out.reserve(n * (n - 1) / 2);
  // users[k] has infection order k for k >= 1.
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = i + 1; j <= n; ++j) {
      out.push_back({c.source(), c.users[i], c.users[j],
                     critical_margin(static_cast<int>(i), static_cast<int>(j), mu)});
    }
  }
  return out;
}

const Combination* CombinationTable::find(const CombinationKey& k) const {
  auto it = entries_.find(k);
  return it == entries_.end() ? nullptr : &it->second;
}

CombinationTable build_table(const CascadeDataset& train, double mu, SamplingMode mode) {
  struct Acc {
    int count = 0;
    double sum = 0.0;
  };
  std::map<CombinationKey, Acc> merged;
  for (const auto& c : train.cascades()) {
    for (const auto& t : extract_triples(c, mu)) {
      auto& a = merged[{t.source, t.earlier, t.later}];
      a.count += 1;
      a.sum += t.margin;
    }
  }

  CombinationTable::Map entries;
  for (const auto& [key, acc] : merged) {
    if (mode == SamplingMode::dominant) {
      auto rev = merged.find(key.reversed());
      if (rev != merged.end() && rev->second.count >= acc.count) continue;
    }
    entries.emplace_hint(entries.end(), key,
                         Combination{key.source, key.earlier, key.later, acc.count,
                                     acc.sum / acc.count});
  }
  return CombinationTable(std::move(entries), mode);
}

void write_table_tsv(std::ostream& out, const CombinationTable& table, const Vocabulary& vocab) {
  char buf[64];
  for (const auto& [key, c] : table.entries()) {
    std::snprintf(buf, sizeof buf, "%.6f", c.avg_margin);
    out << vocab.token(c.source) << '\t' << vocab.token(c.earlier) << '\t' << vocab.token(c.later)
        << '\t' << c.count << '\t' << buf << '\n';
  }
}

}  // namespace iae
