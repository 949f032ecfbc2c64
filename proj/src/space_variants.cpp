#include "bloomsketch/space_variants.hpp"

#include <algorithm>
#include <bit>
#include <random>
#include <sstream>
#include <utility>

#include "bloomsketch/errors.hpp"

namespace bloomsketch {

namespace {

constexpr std::uint64_t kPermSalt = 0x7065726d75746521ULL;

std::uint64_t low_mask(unsigned bits) { return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1; }

}  // namespace

// ---- DlCBF ----

DlCBF::DlCBF(std::size_t d, std::size_t b, std::size_t cells_per_bucket, unsigned remainder_bits,
             unsigned counter_bits, std::uint64_t seed)
    : d_(d), b_(b), w_(cells_per_bucket), r_(remainder_bits), c_(counter_bits), bucket_bits_(0), seed_(seed) {
  if (d == 0) throw ParameterError("DlCBF: need at least one subtable");
  if (b == 0 || !std::has_single_bit(b)) throw ParameterError("DlCBF: buckets per subtable must be a power of two");
  if (w_ == 0) throw ParameterError("DlCBF: buckets need at least one cell");
  if (r_ < 1 || r_ > 32) throw ParameterError("DlCBF: remainder bits must be in [1, 32]");
  if (c_ < 1 || c_ > 16) throw ParameterError("DlCBF: counter bits must be in [1, 16]");
  bucket_bits_ = static_cast<unsigned>(std::countr_zero(b));
  if (bucket_bits_ + r_ > 63) throw ParameterError("DlCBF: fingerprint wider than 63 bits");
  const std::uint64_t mask = low_mask(bucket_bits_ + r_);
  for (std::size_t i = 0; i < d_; ++i) {
    mul_.push_back((mix64(seed ^ kPermSalt ^ (2 * i + 1)) | 1) & mask);
    add_.push_back(mix64(seed + kPermSalt + 2 * i) & mask);
  }
  rem_.assign(d_ * b_ * w_, 0);
  cnt_.assign(d_ * b_ * w_, 0);
}

std::size_t DlCBF::memory_bits() const noexcept { return d_ * b_ * w_ * (r_ + c_); }

std::vector<DlCBFCandidate> DlCBF::candidates(std::string_view item) const {
  const unsigned width = bucket_bits_ + r_;
  const std::uint64_t mask = low_mask(width);
  const std::uint64_t f = hash64(item, seed_) & mask;
  std::vector<DlCBFCandidate> out;
  out.reserve(d_);
  for (std::size_t i = 0; i < d_; ++i) {
    const std::uint64_t p = (mul_[i] * f + add_[i]) & mask;
    out.push_back({static_cast<std::uint32_t>(p >> r_), static_cast<std::uint32_t>(p & low_mask(r_))});
  }
  return out;
}

std::size_t DlCBF::bucket_load(std::size_t table, std::size_t bucket) const {
  const auto base = cell_base(table, bucket);
  std::size_t load = 0;
  for (std::size_t c = 0; c < w_; ++c) load += cnt_[base + c] != 0;
  return load;
}

std::size_t DlCBF::max_bucket_load() const {
  std::size_t best = 0;
  for (std::size_t t = 0; t < d_; ++t) {
    for (std::size_t bk = 0; bk < b_; ++bk) best = std::max(best, bucket_load(t, bk));
  }
  return best;
}

std::optional<std::size_t> DlCBF::find(const std::vector<DlCBFCandidate>& cand) const {
  for (std::size_t t = 0; t < d_; ++t) {
    const auto base = cell_base(t, cand[t].bucket);
    for (std::size_t c = 0; c < w_; ++c) {
      if (cnt_[base + c] != 0 && rem_[base + c] == cand[t].remainder) return base + c;
    }
  }
  return std::nullopt;
}

InsertStatus DlCBF::insert(std::string_view item) {
  const auto cand = candidates(item);
  const auto cap = static_cast<std::uint32_t>(low_mask(c_));
  if (const auto hit = find(cand)) {
    if (cnt_[*hit] == cap) {
      ++saturation_events_;
    } else {
      ++cnt_[*hit];
    }
    ++n_;
    return InsertStatus::inserted;
  }
  std::size_t best_table = d_;
  std::size_t best_load = w_;
  for (std::size_t t = 0; t < d_; ++t) {
    const auto load = bucket_load(t, cand[t].bucket);
    if (load < best_load) {
      best_load = load;
      best_table = t;
    }
  }
  if (best_table == d_) {
    ++overflows_;
    return InsertStatus::failed;
  }
  const auto base = cell_base(best_table, cand[best_table].bucket);
  for (std::size_t c = 0; c < w_; ++c) {
    if (cnt_[base + c] == 0) {
      rem_[base + c] = cand[best_table].remainder;
      cnt_[base + c] = 1;
      break;
    }
  }
  ++n_;
  return InsertStatus::inserted;
}

QueryOutcome DlCBF::query(std::string_view item) const {
  const auto hit = find(candidates(item));
  if (!hit) return QueryOutcome::absent();
  auto out = QueryOutcome::maybe_present();
  out.frequency = cnt_[*hit];
  return out;
}

RemoveResult DlCBF::remove(std::string_view item) {
  const auto hit = find(candidates(item));
  if (!hit) return RemoveResult::not_found;
  // A saturated counter no longer knows its count; it stays put.
  if (cnt_[*hit] != low_mask(c_)) {
    if (--cnt_[*hit] == 0) rem_[*hit] = 0;
  }
  if (n_ > 0) --n_;
  return RemoveResult::removed;
}

std::uint64_t DlCBF::count_estimate(std::string_view item) const {
  const auto hit = find(candidates(item));
  return hit ? cnt_[*hit] : 0;
}

DlCBF DlCBF::restore(std::size_t d, std::size_t b, std::size_t cells_per_bucket, unsigned remainder_bits,
                     unsigned counter_bits, std::uint64_t seed, std::vector<std::uint32_t> remainders,
                     std::vector<std::uint32_t> counters, std::uint64_t n, std::uint64_t overflows) {
  DlCBF f(d, b, cells_per_bucket, remainder_bits, counter_bits, seed);
  if (remainders.size() != f.rem_.size() || counters.size() != f.cnt_.size()) {
    throw ParameterError("DlCBF: cell array length mismatch");
  }
  for (std::size_t i = 0; i < counters.size(); ++i) {
    if (counters[i] > low_mask(counter_bits) || remainders[i] > low_mask(remainder_bits) ||
        (counters[i] == 0 && remainders[i] != 0)) {
      throw ParameterError("DlCBF: cell value out of range");
    }
  }
  f.rem_ = std::move(remainders);
  f.cnt_ = std::move(counters);
  f.n_ = n;
  f.overflows_ = overflows;
  return f;
}

// ---- BFAH ----

BFAH::BFAH(std::size_t m, std::size_t k, HashFamily hashes) : k_(k), hashes_(std::move(hashes)) {
  if (m < 2) throw ParameterError("BFAH: m must be at least 2");
  if (k == 0) throw ParameterError("BFAH: k must be at least 1");
  bits_ = BitVector(m);
}

std::uint64_t BFAH::address(std::string_view item) const {
  const auto pos = hashes_.indices(item, k_, bits_.size());
  const auto selector = hashes_.index_at(item, k_, bits_.size()) % k_;
  return pos[selector];
}

InsertStatus BFAH::insert(std::string_view item) { return insert(item, std::string(item)); }

InsertStatus BFAH::insert(std::string_view item, std::string payload) {
  for (const auto i : hashes_.indices(item, k_, bits_.size())) bits_.set(i);
  auto& chain = slots_[address(item)];
  last_collided_ = std::any_of(chain.begin(), chain.end(), [&](const BFAHEntry& e) { return e.item != item; });
  if (last_collided_) ++collisions_;
  chain.push_back({std::string(item), std::move(payload)});
  ++n_;
  return InsertStatus::inserted;
}

QueryOutcome BFAH::query(std::string_view item) const {
  for (const auto i : hashes_.indices(item, k_, bits_.size())) {
    if (!bits_.test(i)) return QueryOutcome::absent();
  }
  if (!slots_.contains(address(item))) return QueryOutcome::absent();
  return QueryOutcome::maybe_present();
}

std::vector<std::string> BFAH::lookup(std::string_view item) const {
  std::vector<std::string> out;
  const auto it = slots_.find(address(item));
  if (it == slots_.end()) return out;
  for (const auto& e : it->second) out.push_back(e.payload);
  return out;
}

BFAH BFAH::restore(BitVector bits, std::size_t k, HashFamily hashes,
                   std::map<std::uint64_t, std::vector<BFAHEntry>> slots, std::uint64_t n,
                   std::uint64_t collisions) {
  BFAH f(bits.size(), k, std::move(hashes));
  for (const auto& [addr, chain] : slots) {
    if (addr >= bits.size() || chain.empty()) throw ParameterError("BFAH: bad slot entry");
  }
  f.bits_ = std::move(bits);
  f.slots_ = std::move(slots);
  f.n_ = n;
  f.collisions_ = collisions;
  return f;
}

// ---- MatrixBF ----

std::vector<std::string> chunk_document(std::string_view text, const ChunkerConfig& config) {
  std::vector<std::string> chunks;
  if (config.style == ChunkStyle::lines) {
    std::size_t start = 0;
    while (start <= text.size()) {
      auto end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      auto line = text.substr(start, end - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (!line.empty()) chunks.emplace_back(line);
      start = end + 1;
    }
  } else {
    if (config.shingle_words == 0 || config.stride == 0) {
      throw ParameterError("chunk_document: shingle size and stride must be positive");
    }
    std::vector<std::string> words;
    std::istringstream in{std::string(text)};
    for (std::string w; in >> w;) words.push_back(std::move(w));
    if (words.size() <= config.shingle_words) {
      std::string all;
      for (const auto& w : words) all += (all.empty() ? "" : " ") + w;
      if (!words.empty()) chunks.push_back(std::move(all));
    } else {
      for (std::size_t i = 0; i + config.shingle_words <= words.size(); i += config.stride) {
        std::string s = words[i];
        for (std::size_t j = 1; j < config.shingle_words; ++j) s += " " + words[i + j];
        chunks.push_back(std::move(s));
      }
    }
  }
  if (chunks.empty()) chunks.emplace_back();
  return chunks;
}

MatrixBF::MatrixBF(std::size_t m, std::size_t k, ChunkerConfig chunker, std::size_t threshold, HashFamily hashes)
    : m_(m), k_(k), chunker_(chunker), threshold_(threshold), hashes_(std::move(hashes)) {
  if (m < 2) throw ParameterError("MatrixBF: m must be at least 2");
  if (k == 0) throw ParameterError("MatrixBF: k must be at least 1");
  if (chunker_.shingle_words == 0 || chunker_.stride == 0) {
    throw ParameterError("MatrixBF: shingle size and stride must be positive");
  }
}

StandardBF MatrixBF::row_for(std::string_view text) const {
  StandardBF row(m_, k_, hashes_);
  for (const auto& chunk : chunk_document(text, chunker_)) row.insert(chunk);
  return row;
}

std::size_t MatrixBF::add_document(std::string_view text) {
  rows_.push_back(row_for(text));
  ++n_;
  return rows_.size() - 1;
}

InsertStatus MatrixBF::insert(std::string_view document) {
  add_document(document);
  return InsertStatus::inserted;
}

QueryOutcome MatrixBF::query(std::string_view document) const {
  const auto probe = row_for(document);
  const auto need = probe.bits().popcount();
  for (const auto& row : rows_) {
    if (and_popcount(row.bits(), probe.bits()) == need) return QueryOutcome::maybe_present();
  }
  return QueryOutcome::absent();
}

const StandardBF& MatrixBF::row(std::size_t i) const {
  if (i >= rows_.size()) throw InputError("MatrixBF: unknown document id " + std::to_string(i));
  return rows_[i];
}

Similarity MatrixBF::similarity(std::size_t i, std::size_t j) const {
  const auto& a = row(i).bits();
  const auto& b = row(j).bits();
  Similarity s;
  s.and_popcount = and_popcount(a, b);
  s.ratio = static_cast<double>(s.and_popcount) / static_cast<double>(std::max<std::size_t>(1, a.popcount()));
  s.similar = s.and_popcount > threshold_;
  return s;
}

MatrixBF MatrixBF::restore(std::size_t m, std::size_t k, ChunkerConfig chunker, std::size_t threshold,
                           HashFamily hashes, std::vector<BitVector> rows) {
  MatrixBF f(m, k, chunker, threshold, std::move(hashes));
  for (auto& bits : rows) {
    if (bits.size() != m) throw ParameterError("MatrixBF: row length mismatch");
    f.rows_.push_back(StandardBF::restore(std::move(bits), k, f.hashes_, 0));
  }
  f.n_ = f.rows_.size();
  return f;
}

// ---- CompactedBF ----

namespace {

void validate_compaction(std::size_t m, std::size_t nb, unsigned w) {
  if (w < 1 || w > 16) throw ParameterError("compact: index width w must be in [1, 16]");
  if (nb < 2) throw ParameterError("compact: need at least two blocks");
  if (nb > (std::size_t{1} << w) - 2) throw ParameterError("compact: nb must not exceed 2^w - 2");
  if (w >= nb) throw ParameterError("compact: w must be smaller than nb or nothing is saved");
  if (m % nb != 0) throw ParameterError("compact: filter length must be divisible by nb");
}

// Decodes one index into the pattern of set blocks.
void decode_index(std::uint32_t index, unsigned w, std::size_t nb, CompactionMode mode, std::vector<bool>& pattern,
                  std::size_t position) {
  const std::uint32_t all = static_cast<std::uint32_t>((std::uint64_t{1} << w) - 1);
  std::fill(pattern.begin(), pattern.end(), false);
  if (index == all) {
    std::fill(pattern.begin(), pattern.end(), true);
    return;
  }
  if (mode == CompactionMode::value) {
    for (std::size_t j = 0; j < nb && j < w; ++j) pattern[j] = (index >> j) & 1u;
    return;
  }
  if (index == 0) return;
  if (index > nb) throw FormatError("compacted index names no block", position);
  pattern[index - 1] = true;
}

}  // namespace

CompactedBF::CompactedBF(unsigned w, std::size_t nb, std::vector<std::uint32_t> indices, std::size_t k,
                         HashFamily hashes, CompactionMode mode)
    : w_(w), nb_(nb), indices_(std::move(indices)), k_(k), hashes_(std::move(hashes)), mode_(mode) {
  if (k_ == 0) throw ParameterError("CompactedBF: k must be at least 1");
  const std::size_t bp = indices_.size();
  validate_compaction(bp * nb_, nb_, w_);
  if (bp == 0) throw ParameterError("CompactedBF: empty index array");
  decoded_ = BitVector(bp * nb_);
  std::vector<bool> pattern(nb_);
  for (std::size_t i = 0; i < bp; ++i) {
    decode_index(indices_[i], w_, nb_, mode_, pattern, i);
    for (std::size_t j = 0; j < nb_; ++j) {
      if (pattern[j]) decoded_.set(j * bp + i);
    }
  }
}

InsertStatus CompactedBF::insert(std::string_view) {
  throw CapabilityError("compacted filter is read-only; insert into the source filter and compact again");
}

QueryOutcome CompactedBF::query(std::string_view item) const {
  for (const auto i : hashes_.indices(item, k_, decoded_.size())) {
    if (!decoded_.test(i)) return QueryOutcome::absent();
  }
  return QueryOutcome::maybe_present();
}

std::vector<std::uint8_t> CompactedBF::to_wire() const {
  const auto bp = static_cast<std::uint32_t>(indices_.size());
  std::vector<std::uint8_t> out;
  out.reserve(7 + (static_cast<std::size_t>(bp) * w_ + 7) / 8);
  out.push_back(static_cast<std::uint8_t>(w_));
  out.push_back(static_cast<std::uint8_t>(nb_ & 0xFF));
  out.push_back(static_cast<std::uint8_t>((nb_ >> 8) & 0xFF));
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((bp >> (8 * i)) & 0xFF));
  std::size_t bit = 0;
  out.resize(7 + (static_cast<std::size_t>(bp) * w_ + 7) / 8, 0);
  for (const auto index : indices_) {
    for (unsigned b = 0; b < w_; ++b, ++bit) {
      if ((index >> b) & 1u) out[7 + bit / 8] |= static_cast<std::uint8_t>(1u << (bit % 8));
    }
  }
  return out;
}

CompactedBF CompactedBF::from_wire(std::span<const std::uint8_t> bytes, std::size_t k, HashFamily hashes,
                                   CompactionMode mode) {
  if (bytes.size() < 7) throw FormatError("compacted header truncated", bytes.size());
  const unsigned w = bytes[0];
  const std::size_t nb = bytes[1] | (std::size_t{bytes[2]} << 8);
  std::uint64_t bp = 0;
  for (int i = 0; i < 4; ++i) bp |= std::uint64_t{bytes[3 + i]} << (8 * i);
  if (w < 1 || w > 16) throw FormatError("compacted index width out of range", 0);
  const std::uint64_t body = (bp * w + 7) / 8;
  if (bytes.size() < 7 + body) throw FormatError("compacted index array truncated", bytes.size());
  if (bytes.size() > 7 + body) throw FormatError("trailing bytes after compacted index array", 7 + body);
  std::vector<std::uint32_t> indices(bp, 0);
  std::size_t bit = 0;
  for (auto& index : indices) {
    for (unsigned b = 0; b < w; ++b, ++bit) {
      if ((bytes[7 + bit / 8] >> (bit % 8)) & 1u) index |= 1u << b;
    }
  }
  try {
    return CompactedBF(w, nb, std::move(indices), k, std::move(hashes), mode);
  } catch (const FormatError& e) {
    throw FormatError("compacted index names no block", 7 + e.offset() * w / 8);
  } catch (const ParameterError& e) {
    throw FormatError(std::string("compacted header: ") + e.what(), 0);
  }
}

CompactedBF CompactedBF::from_indices(unsigned w, std::size_t nb, std::vector<std::uint32_t> indices, std::size_t k,
                                      HashFamily hashes, CompactionMode mode, std::uint64_t n) {
  CompactedBF c(w, nb, std::move(indices), k, std::move(hashes), mode);
  c.n_ = n;
  return c;
}

CompactedBF compact(const StandardBF& bf, std::size_t nb, unsigned w, std::uint64_t seed, CompactionMode mode) {
  const std::size_t m = bf.m();
  validate_compaction(m, nb, w);
  const std::size_t bp = m / nb;
  const std::uint32_t all = static_cast<std::uint32_t>((std::uint64_t{1} << w) - 1);
  std::mt19937_64 rng(seed);
  std::vector<std::uint32_t> indices(bp, 0);
  CompactionStats stats;
  std::vector<std::size_t> ones;
  for (std::size_t i = 0; i < bp; ++i) {
    ones.clear();
    std::uint64_t value = 0;
    for (std::size_t j = 0; j < nb; ++j) {
      if (bf.bits().test(j * bp + i)) {
        ones.push_back(j);
        if (j < 64) value |= std::uint64_t{1} << j;
      }
    }
    const std::size_t c = ones.size();
    const bool wide = !ones.empty() && ones.back() >= 32;
    if (mode == CompactionMode::value) {
      if (!wide && value < all) {
        indices[i] = static_cast<std::uint32_t>(value);
        ++stats.rule_hits[1];
      } else {
        indices[i] = all;
        ++stats.rule_hits[2];
        stats.zeros_to_ones += nb - c;
      }
      continue;
    }
    if (c == 0) {
      ++stats.rule_hits[0];
    } else if (c == 1) {
      indices[i] = static_cast<std::uint32_t>(ones[0] + 1);
      ++stats.rule_hits[1];
    } else if (2 * c >= nb) {
      indices[i] = all;
      ++stats.rule_hits[2];
      stats.zeros_to_ones += nb - c;
    } else {
      indices[i] = static_cast<std::uint32_t>(ones[rng() % c] + 1);
      ++stats.rule_hits[3];
      stats.ones_to_zeros += c - 1;
    }
  }
  CompactedBF out(w, nb, std::move(indices), bf.k(), bf.hashes(), mode);
  out.stats_ = stats;
  out.n_ = bf.size();
  return out;
}

StandardBF reconstruct(const CompactedBF& cbf) {
  const std::size_t bp = cbf.bp();
  BitVector bits(bp * cbf.nb());
  std::vector<bool> pattern(cbf.nb());
  for (std::size_t i = 0; i < bp; ++i) {
    decode_index(cbf.indices()[i], cbf.w(), cbf.nb(), cbf.mode(), pattern, i);
    for (std::size_t j = 0; j < cbf.nb(); ++j) {
      if (pattern[j]) bits.set(j * bp + i);
    }
  }
  return StandardBF::restore(std::move(bits), cbf.k(), cbf.hashes(), cbf.size());
}

}  // namespace bloomsketch
