#include "iae/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_set>

namespace iae {

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

ValidationError::ValidationError(std::size_t line, std::string token, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what + " '" + token + "'"),
      line_(line),
      token_(std::move(token)) {}

UserId Vocabulary::intern(std::string_view token) {
  std::string key(token);
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  const auto id = static_cast<UserId>(tokens_.size());
  tokens_.push_back(key);
  index_.emplace(std::move(key), id);
  return id;
}

std::optional<UserId> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> infection_order(const Cascade& c, UserId u) {
  for (std::size_t i = 1; i < c.users.size(); ++i) {
    if (c.users[i] == u) return static_cast<int>(i);
  }
  return std::nullopt;
}

CascadeDataset::CascadeDataset(Vocabulary vocab, std::vector<Cascade> cascades)
    : vocab_(std::move(vocab)), cascades_(std::move(cascades)) {
  std::unordered_set<UserId> seen;
  for (const auto& c : cascades_) {
    for (UserId u : c.users) {
      if (seen.insert(u).second) users_.push_back(u);
    }
  }
  std::sort(users_.begin(), users_.end());
}

namespace {

std::vector<std::string_view> split_spaces(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t next = s.find(' ', pos);
    if (next == std::string_view::npos) next = s.size();
    if (next > pos) out.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
  return out;
}

}  // namespace

CascadeDataset parse_cascade_file(std::istream& in, Vocabulary base) {
  Vocabulary vocab = std::move(base);
  std::vector<Cascade> cascades;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos || line.front() == '#') continue;

    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw ParseError(line_no, "missing tab after cascade id");
    const auto id = line.substr(0, tab);
    if (id.empty()) throw ParseError(line_no, "empty cascade id");
    const auto tokens = split_spaces(line.substr(tab + 1));
    if (tokens.size() < 2) {
      throw ParseError(line_no, "cascade needs a source and at least one infected user");
    }

    std::unordered_set<std::string_view> seen;
    Cascade c{std::string(id), {}};
    c.users.reserve(tokens.size());
    for (auto tok : tokens) {
      if (!seen.insert(tok).second) {
        throw ValidationError(line_no, std::string(tok), "duplicate user in cascade");
      }
    }
    for (auto tok : tokens) c.users.push_back(vocab.intern(tok));
    cascades.push_back(std::move(c));
  }
  return CascadeDataset(std::move(vocab), std::move(cascades));
}

CascadeDataset parse_cascade_string(std::string_view text, Vocabulary base) {
  std::istringstream in{std::string(text)};
  return parse_cascade_file(in, std::move(base));
}

CascadeDataset load_cascade_file(const std::string& path, Vocabulary base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open cascade file: " + path);
  return parse_cascade_file(in, std::move(base));
}

void write_cascade_file(std::ostream& out, const CascadeDataset& d) {
  const auto& vocab = d.vocabulary();
  for (const auto& c : d.cascades()) {
    out << c.id << '\t';
    for (std::size_t i = 0; i < c.users.size(); ++i) {
      if (i) out << ' ';
      out << vocab.token(c.users[i]);
    }
    out << '\n';
  }
}

DatasetSplit split_dataset(const CascadeDataset& d, double test_fraction, std::uint64_t seed) {
  const std::size_t total = d.cascade_count();
  if (total < 2) throw std::invalid_argument("cannot split a dataset with fewer than 2 cascades");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("test fraction must lie in (0, 1)");
  }
  const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(total)));

  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<bool> is_test(total, false);
  for (std::size_t i = 0; i < n_test; ++i) is_test[order[i]] = true;

  std::vector<Cascade> train, test;
  for (std::size_t i = 0; i < total; ++i) {
    (is_test[i] ? test : train).push_back(d.cascades()[i]);
  }
  return {CascadeDataset(d.vocabulary(), std::move(train)),
          CascadeDataset(d.vocabulary(), std::move(test))};
}

}  // namespace iae
