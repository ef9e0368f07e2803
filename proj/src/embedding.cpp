#include "iae/embedding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <set>

namespace iae {

FormatError::FormatError(std::size_t offset, const std::string& what)
    : std::runtime_error("model format error at byte " + std::to_string(offset) + ": " + what),
      offset_(offset) {}

EmbeddingModel::EmbeddingModel(int dimension, Variant variant, Vocabulary vocab)
    : dim_(dimension), variant_(variant), vocab_(std::move(vocab)) {
  if (dimension < 1) throw ConfigError("dimension must be >= 1");
}

Slot EmbeddingModel::new_slot() {
  const auto slot = static_cast<Slot>(slot_count());
  coords_.resize(coords_.size() + dim_, 0.0);
  return slot;
}

Slot EmbeddingModel::add_influence(UserId s) {
  auto it = influence_.find(s);
  if (it != influence_.end()) return it->second;
  const Slot slot = new_slot();
  influence_.emplace(s, slot);
  return slot;
}

Slot EmbeddingModel::add_susceptibility(UserId s, UserId u) {
  SpaceMap* space = nullptr;
  switch (variant_) {
    case Variant::independent: space = &susceptibility_[s]; break;
    case Variant::shared_susceptibility: space = &susceptibility_[kSharedKey]; break;
    case Variant::single_space: space = &influence_; break;
  }
  auto it = space->find(u);
  if (it != space->end()) return it->second;
  const Slot slot = new_slot();
  space->emplace(u, slot);
  return slot;
}

const EmbeddingModel::SpaceMap* EmbeddingModel::space_for(UserId s) const {
  switch (variant_) {
    case Variant::independent: {
      auto it = susceptibility_.find(s);
      return it == susceptibility_.end() ? nullptr : &it->second;
    }
    case Variant::shared_susceptibility: {
      auto it = susceptibility_.find(kSharedKey);
      return it == susceptibility_.end() ? nullptr : &it->second;
    }
    case Variant::single_space: return &influence_;
  }
  return nullptr;
}

std::optional<Slot> EmbeddingModel::influence_slot(UserId s) const {
  auto it = influence_.find(s);
  if (it == influence_.end()) return std::nullopt;
  return it->second;
}

std::optional<Slot> EmbeddingModel::susceptibility_slot(UserId s, UserId u) const {
  const SpaceMap* space = space_for(s);
  if (!space) return std::nullopt;
  auto it = space->find(u);
  if (it == space->end()) return std::nullopt;
  return it->second;
}

std::span<double> EmbeddingModel::point(Slot slot) {
  return std::span<double>(coords_).subspan(static_cast<std::size_t>(slot) * dim_, dim_);
}

std::span<const double> EmbeddingModel::point(Slot slot) const {
  return std::span<const double>(coords_).subspan(static_cast<std::size_t>(slot) * dim_, dim_);
}

std::size_t EmbeddingModel::susceptibility_count() const {
  if (variant_ == Variant::single_space) return influence_.size();
  std::size_t n = 0;
  for (const auto& [key, space] : susceptibility_) n += space.size();
  return n;
}

std::vector<UserId> EmbeddingModel::candidates(UserId s) const {
  std::vector<UserId> out;
  const SpaceMap* space = space_for(s);
  if (!space) return out;
  out.reserve(space->size());
  for (const auto& [u, slot] : *space) {
    if (u != s) out.push_back(u);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<UserId> EmbeddingModel::sources() const {
  std::vector<UserId> out;
  out.reserve(influence_.size());
  for (const auto& [u, slot] : influence_) out.push_back(u);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

bool same_space(const EmbeddingModel& a, const EmbeddingModel::SpaceMap& sa,
                const EmbeddingModel& b, const EmbeddingModel::SpaceMap& sb) {
  if (sa.size() != sb.size()) return false;
  for (const auto& [u, slot] : sa) {
    auto it = sb.find(u);
    if (it == sb.end()) return false;
    const auto pa = a.point(slot);
    const auto pb = b.point(it->second);
    if (std::memcmp(pa.data(), pb.data(), pa.size_bytes()) != 0) return false;
  }
  return true;
}

}  // namespace

bool EmbeddingModel::same_as(const EmbeddingModel& other) const {
  if (dim_ != other.dim_ || variant_ != other.variant_ || !(vocab_ == other.vocab_)) return false;
  if (!same_space(*this, influence_, other, other.influence_)) return false;
  if (susceptibility_.size() != other.susceptibility_.size()) return false;
  for (const auto& [key, space] : susceptibility_) {
    auto it = other.susceptibility_.find(key);
    if (it == other.susceptibility_.end()) return false;
    if (!same_space(*this, space, other, it->second)) return false;
  }
  return true;
}

EmbeddingModel init_model(const CombinationTable& table, const Vocabulary& vocab,
                          const TrainConfig& config, std::mt19937_64& rng) {
  if (config.dimension < 1) throw ConfigError("dimension must be >= 1");
  EmbeddingModel m(config.dimension, config.variant, vocab);
  for (const auto& [key, c] : table.entries()) {
    m.add_influence(c.source);
    m.add_susceptibility(c.source, c.earlier);
    m.add_susceptibility(c.source, c.later);
  }
  const double half = 0.5 / config.dimension;
  std::uniform_real_distribution<double> dist(-half, half);
  for (double& v : m.coordinates()) v = dist(rng);
  return m;
}

std::optional<double> distance_sq(const EmbeddingModel& m, UserId s, UserId u) {
  const auto xs = m.influence_slot(s);
  const auto yu = m.susceptibility_slot(s, u);
  if (!xs || !yu) return std::nullopt;
  const auto x = m.point(*xs);
  const auto y = m.point(*yu);
  double acc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d = x[k] - y[k];
    acc += d * d;
  }
  return acc;
}

std::optional<double> diffusion_kernel(const EmbeddingModel& m, const KernelParams& p, UserId s,
                                       UserId u) {
  if (!(p.time > 0.0)) throw std::invalid_argument("kernel time must be > 0");
  const auto d2 = distance_sq(m, s, u);
  if (!d2) return std::nullopt;
  const double log_norm = -0.5 * m.dimension() * std::log(4.0 * std::numbers::pi * p.time);
  return std::exp(log_norm - *d2 / (4.0 * p.time));
}

// ---------------------------------------------------------------------------
// Binary format (all integers and doubles little-endian):
//   "IAEM" u32 version u32 D u8 variant
//   u64 vocab_count u64 influence_count u64 block_count
//   vocab_count x (u32 len, bytes)
//   influence_count x (u32 user, D x f64)
//   block_count x (u32 source, u64 n, n x (u32 user, D x f64))
// The shared variant writes one block under source 0xFFFFFFFF; the single
// variant writes no blocks.
// ---------------------------------------------------------------------------

namespace {

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void bytes(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), n); }

  template <typename T>
  void uint(T v) {
    unsigned char buf[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    bytes(buf, sizeof buf);
  }

  void f64(double v) { uint(std::bit_cast<std::uint64_t>(v)); }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void bytes(void* p, std::size_t n, const char* what) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw FormatError(offset_ + static_cast<std::size_t>(in_.gcount()),
                        std::string("truncated while reading ") + what);
    }
    offset_ += n;
  }

  template <typename T>
  T uint(const char* what) {
    unsigned char buf[sizeof(T)];
    bytes(buf, sizeof buf, what);
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(buf[i]) << (8 * i);
    return v;
  }

  double f64(const char* what) { return std::bit_cast<double>(uint<std::uint64_t>(what)); }

  std::size_t offset() const { return offset_; }

 private:
  std::istream& in_;
  std::size_t offset_ = 0;
};

std::vector<std::pair<UserId, Slot>> sorted_entries(const EmbeddingModel::SpaceMap& space) {
  std::vector<std::pair<UserId, Slot>> v(space.begin(), space.end());
  std::sort(v.begin(), v.end());
  return v;
}

void write_entries(Writer& w, const EmbeddingModel& m, const EmbeddingModel::SpaceMap& space) {
  for (const auto& [u, slot] : sorted_entries(space)) {
    w.uint<std::uint32_t>(to_index(u));
    for (double v : m.point(slot)) w.f64(v);
  }
}

}  // namespace

void save_model(std::ostream& out, const EmbeddingModel& m) {
  Writer w(out);
  w.bytes(kModelMagic, sizeof kModelMagic);
  w.uint<std::uint32_t>(kModelFormatVersion);
  w.uint<std::uint32_t>(static_cast<std::uint32_t>(m.dimension()));
  w.uint<std::uint8_t>(static_cast<std::uint8_t>(m.variant()));
  w.uint<std::uint64_t>(m.vocabulary().size());
  w.uint<std::uint64_t>(m.influence_map().size());
  w.uint<std::uint64_t>(m.susceptibility_maps().size());

  for (const auto& tok : m.vocabulary().tokens()) {
    w.uint<std::uint32_t>(static_cast<std::uint32_t>(tok.size()));
    w.bytes(tok.data(), tok.size());
  }
  write_entries(w, m, m.influence_map());
  for (const auto& [source, space] : m.susceptibility_maps()) {
    w.uint<std::uint32_t>(to_index(source));
    w.uint<std::uint64_t>(space.size());
    write_entries(w, m, space);
  }
  if (!out) throw IoError("failed to write model stream");
}

EmbeddingModel load_model(std::istream& in) {
  Reader r(in);
  char magic[4];
  r.bytes(magic, sizeof magic, "magic");
  if (std::memcmp(magic, kModelMagic, sizeof magic) != 0) throw FormatError(0, "bad magic");
  const auto version = r.uint<std::uint32_t>("version");
  if (version != kModelFormatVersion) {
    throw FormatError(4, "unsupported format version " + std::to_string(version));
  }
  const auto dim = r.uint<std::uint32_t>("dimension");
  if (dim < 1 || dim > (1u << 20)) throw FormatError(8, "invalid dimension");
  const auto tag = r.uint<std::uint8_t>("variant");
  if (tag > static_cast<std::uint8_t>(Variant::single_space)) {
    throw FormatError(12, "unknown variant tag " + std::to_string(tag));
  }
  const auto variant = static_cast<Variant>(tag);
  const auto n_vocab = r.uint<std::uint64_t>("vocabulary count");
  const auto n_influence = r.uint<std::uint64_t>("influence count");
  const auto n_blocks = r.uint<std::uint64_t>("block count");
  if (n_vocab >= 0xFFFFFFFFull) throw FormatError(13, "vocabulary too large");
  if (variant == Variant::single_space && n_blocks != 0) {
    throw FormatError(29, "single-space model carries susceptibility blocks");
  }
  if (variant == Variant::shared_susceptibility && n_blocks > 1) {
    throw FormatError(29, "shared model carries more than one susceptibility block");
  }

  Vocabulary vocab;
  for (std::uint64_t i = 0; i < n_vocab; ++i) {
    const std::size_t at = r.offset();
    const auto len = r.uint<std::uint32_t>("token length");
    if (len > (1u << 20)) throw FormatError(at, "token too long");
    std::string tok(len, '\0');
    r.bytes(tok.data(), len, "token");
    if (to_index(vocab.intern(tok)) != i) throw FormatError(at, "duplicate token '" + tok + "'");
  }

  EmbeddingModel m(static_cast<int>(dim), variant, std::move(vocab));

  auto read_user = [&](const char* what) {
    const std::size_t at = r.offset();
    const auto id = r.uint<std::uint32_t>(what);
    if (id >= n_vocab) throw FormatError(at, std::string(what) + " id out of range");
    return std::pair{static_cast<UserId>(id), at};
  };
  auto read_point = [&](std::span<double> dst) {
    for (double& v : dst) {
      const std::size_t at = r.offset();
      v = r.f64("coordinate");
      if (!std::isfinite(v)) throw FormatError(at, "non-finite coordinate");
    }
  };

  for (std::uint64_t i = 0; i < n_influence; ++i) {
    const auto [u, at] = read_user("influence user");
    if (m.influence_slot(u)) throw FormatError(at, "duplicate influence entry");
    read_point(m.point(m.add_influence(u)));
  }
  UserId prev_source{};
  for (std::uint64_t b = 0; b < n_blocks; ++b) {
    const std::size_t at = r.offset();
    const auto raw_source = r.uint<std::uint32_t>("block source");
    const auto source = static_cast<UserId>(raw_source);
    if (variant == Variant::shared_susceptibility) {
      if (source != EmbeddingModel::kSharedKey) throw FormatError(at, "shared block key expected");
    } else if (raw_source >= n_vocab) {
      throw FormatError(at, "block source id out of range");
    }
    if (b > 0 && source <= prev_source) throw FormatError(at, "blocks out of order");
    prev_source = source;
    const auto count = r.uint<std::uint64_t>("block size");
    for (std::uint64_t i = 0; i < count; ++i) {
      const auto [u, uat] = read_user("susceptibility user");
      const std::size_t before = m.slot_count();
      const Slot slot = m.add_susceptibility(source, u);
      if (m.slot_count() == before) throw FormatError(uat, "duplicate susceptibility entry");
      read_point(m.point(slot));
    }
  }
  return m;
}

void save_model_file(const std::string& path, const EmbeddingModel& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open model file for writing: " + path);
  save_model(out, m);
  out.close();
  if (!out) throw IoError("failed to write model file: " + path);
}

EmbeddingModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file: " + path);
  return load_model(in);
}

}  // namespace iae
