#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace iae {

// Dense interned user identifier. Tokens from input files map onto these in
// first-appearance order.
enum class UserId : std::uint32_t {};

constexpr std::uint32_t to_index(UserId u) { return static_cast<std::uint32_t>(u); }

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::size_t line, std::string token, const std::string& what);
  std::size_t line() const { return line_; }
  const std::string& token() const { return token_; }

 private:
  std::size_t line_;
  std::string token_;
};

// Bidirectional token <-> UserId table.
class Vocabulary {
 public:
  UserId intern(std::string_view token);
  std::optional<UserId> find(std::string_view token) const;
  const std::string& token(UserId u) const { return tokens_.at(to_index(u)); }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, UserId> index_;
};

struct Cascade {
  std::string id;
  std::vector<UserId> users;  // users[0] is the source

  UserId source() const { return users.front(); }
  std::size_t infected_count() const { return users.size() - 1; }
};

/// 1-based position of `u` among the infected users of `c`; empty for the
/// source and for users outside the cascade.
std::optional<int> infection_order(const Cascade& c, UserId u);

class CascadeDataset {
 public:
  CascadeDataset() = default;
  CascadeDataset(Vocabulary vocab, std::vector<Cascade> cascades);

  const std::vector<Cascade>& cascades() const { return cascades_; }
  const Vocabulary& vocabulary() const { return vocab_; }

  // Distinct users appearing in any cascade, ascending by id.
  const std::vector<UserId>& users() const { return users_; }

  std::size_t cascade_count() const { return cascades_.size(); }
  std::size_t user_count() const { return users_.size(); }

 private:
  Vocabulary vocab_;
  std::vector<Cascade> cascades_;
  std::vector<UserId> users_;
};

// Line format: `<cascade_id>\t<tok> <tok> ...`, source first. Blank lines and
// lines starting with '#' are skipped; CRLF endings are accepted. When `base`
// is given, its ids are kept and new tokens are appended after them.
CascadeDataset parse_cascade_file(std::istream& in, Vocabulary base = {});
CascadeDataset parse_cascade_string(std::string_view text, Vocabulary base = {});
CascadeDataset load_cascade_file(const std::string& path, Vocabulary base = {});

void write_cascade_file(std::ostream& out, const CascadeDataset& d);

struct DatasetSplit {
  CascadeDataset train;
  CascadeDataset test;
};

// Test receives round(test_fraction * S) cascades, chosen by a seeded
// shuffle; both halves keep the input's vocabulary and relative order.
DatasetSplit split_dataset(const CascadeDataset& d, double test_fraction, std::uint64_t seed);

}  // namespace iae
