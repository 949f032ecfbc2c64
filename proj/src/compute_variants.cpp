#include "bloomsketch/compute_variants.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "bloomsketch/errors.hpp"
#include "bloomsketch/hash.hpp"

namespace bloomsketch {

namespace {

constexpr std::uint64_t kWordSalt = 0x7566626677307264ULL;

// reach[j][s] = some j of the available candidates sum to s.
std::vector<std::vector<char>> subset_sums(const std::vector<std::uint64_t>& cand, const std::vector<char>& used,
                                           std::size_t k, std::uint64_t cap) {
  std::vector<std::vector<char>> reach(k + 1, std::vector<char>(cap + 1, 0));
  reach[0][0] = 1;
  for (std::size_t c = 0; c < cand.size(); ++c) {
    if (used[c]) continue;
    for (std::size_t j = k; j >= 1; --j) {
      for (std::uint64_t s = cap; s >= cand[c]; --s) {
        if (reach[j - 1][s - cand[c]]) reach[j][s] = 1;
        if (s == cand[c]) break;
      }
    }
  }
  return reach;
}

}  // namespace

bool is_prime(std::uint64_t n) noexcept {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

std::vector<std::uint64_t> ohbf_partition_sizes(std::uint64_t total_bits, std::size_t k) {
  if (k == 0) throw ParameterError("ohbf_partition_sizes: k must be at least 1");
  if (total_bits < 2 * k) throw ParameterError("ohbf_partition_sizes: need total_bits >= 2k");
  const double target = static_cast<double>(total_bits) / static_cast<double>(k);

  // The 3k + 8 primes <= total_bits closest to the target.
  const std::size_t want = 3 * k + 8;
  std::vector<std::uint64_t> cand;
  auto up = static_cast<std::uint64_t>(std::ceil(target));
  auto down = up - 1;
  bool up_live = up <= total_bits;
  bool down_live = true;
  while (cand.size() < want && (up_live || down_live)) {
    while (up_live && !is_prime(up)) up_live = ++up <= total_bits;
    while (down_live && !is_prime(down)) down_live = down-- > 2;
    if (!up_live && !down_live) break;
    const bool take_down =
        down_live && (!up_live || target - static_cast<double>(down) <= static_cast<double>(up) - target);
    if (take_down) {
      cand.push_back(down);
      down_live = down-- > 2;
    } else {
      cand.push_back(up);
      up_live = ++up <= total_bits;
    }
  }
  if (cand.size() < k) throw ParameterError("ohbf_partition_sizes: not enough primes below total_bits");

  // Sums are offset by k * min so the table only spans the candidate window.
  const std::uint64_t lo = *std::min_element(cand.begin(), cand.end());
  if (k * lo > total_bits) throw ParameterError("ohbf_partition_sizes: no prime set fits in total_bits");
  std::vector<std::uint64_t> shifted(cand.size());
  for (std::size_t i = 0; i < cand.size(); ++i) shifted[i] = cand[i] - lo;
  const std::uint64_t cap = total_bits - k * lo;
  const std::uint64_t window = *std::max_element(shifted.begin(), shifted.end()) * k;
  const std::uint64_t limit = std::min(cap, window);

  std::vector<char> used(cand.size(), 0);
  auto reach = subset_sums(shifted, used, k, limit);
  std::int64_t best = -1;
  for (std::int64_t s = static_cast<std::int64_t>(limit); s >= 0; --s) {
    if (reach[k][static_cast<std::size_t>(s)]) {
      best = s;
      break;
    }
  }
  if (best < 0) throw ParameterError("ohbf_partition_sizes: no prime set fits in total_bits");

  // Candidates are already ordered by closeness to the target.
  std::vector<std::uint64_t> out;
  auto remaining = static_cast<std::uint64_t>(best);
  for (std::size_t need = k; need > 0; --need) {
    bool placed = false;
    for (std::size_t c = 0; c < cand.size() && !placed; ++c) {
      if (used[c] || shifted[c] > remaining) continue;
      used[c] = 1;
      const auto rest = subset_sums(shifted, used, need - 1, remaining - shifted[c]);
      if (rest[need - 1][remaining - shifted[c]]) {
        out.push_back(cand[c]);
        remaining -= shifted[c];
        placed = true;
      } else {
        used[c] = 0;
      }
    }
    if (!placed) throw ParameterError("ohbf_partition_sizes: reconstruction failed");
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---- OHBF ----

OHBF::OHBF(std::uint64_t total_bits, std::size_t k, std::uint64_t seed)
    : OHBF(ohbf_partition_sizes(total_bits, k), seed) {}

OHBF::OHBF(std::vector<std::uint64_t> moduli, std::uint64_t seed) : moduli_(std::move(moduli)), seed_(seed) {
  if (moduli_.empty()) throw ParameterError("OHBF: need at least one partition");
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < moduli_.size(); ++i) {
    if (moduli_[i] < 2) throw ParameterError("OHBF: partitions must hold at least 2 bits");
    for (std::size_t j = 0; j < i; ++j) {
      if (std::gcd(moduli_[i], moduli_[j]) != 1) throw ParameterError("OHBF: partition sizes must be pairwise coprime");
    }
    offsets_.push_back(total);
    total += moduli_[i];
  }
  bits_ = BitVector(total);
}

std::vector<std::uint64_t> OHBF::positions(std::string_view item) const {
  const std::uint64_t h = hash64(item, seed_);
  std::vector<std::uint64_t> out(moduli_.size());
  for (std::size_t i = 0; i < moduli_.size(); ++i) out[i] = offsets_[i] + h % moduli_[i];
  return out;
}

InsertStatus OHBF::insert(std::string_view item) {
  for (const auto i : positions(item)) bits_.set(i);
  ++n_;
  return InsertStatus::inserted;
}

QueryOutcome OHBF::query(std::string_view item) const {
  for (const auto i : positions(item)) {
    if (!bits_.test(i)) return QueryOutcome::absent();
  }
  return QueryOutcome::maybe_present();
}

OHBF OHBF::restore(std::vector<std::uint64_t> moduli, std::uint64_t seed, BitVector bits, std::uint64_t n) {
  OHBF f(std::move(moduli), seed);
  if (bits.size() != f.bits_.size()) throw ParameterError("OHBF: bit array length mismatch");
  f.bits_ = std::move(bits);
  f.n_ = n;
  return f;
}

// ---- UFBF ----

UFBF::UFBF(std::size_t l, std::size_t k, std::size_t w, std::uint64_t seed) : l_(l), k_(k), w_(w), seed_(seed) {
  if (l == 0) throw ParameterError("UFBF: need at least one block");
  if (k == 0) throw ParameterError("UFBF: k must be at least 1");
  if (w < 2 || w > 64) throw ParameterError("UFBF: word size must be in [2, 64]");
  bits_ = BitVector(l * k * w);
}

UFBF UFBF::for_capacity(std::size_t capacity, double bits_per_element, std::uint64_t seed) {
  if (capacity == 0 || !(bits_per_element > 0)) throw ParameterError("UFBF: capacity and budget must be positive");
  const double total = std::ceil(static_cast<double>(capacity) * bits_per_element);
  const auto blocks = static_cast<std::size_t>(std::ceil(total / 512.0));
  return UFBF(std::max<std::size_t>(blocks, 1), 8, 64, seed);
}

UFBFLocation UFBF::locate(std::string_view item) const {
  UFBFLocation loc;
  loc.block = hash64(item, seed_) % l_;
  const std::uint64_t h = hash64(item, seed_ ^ kWordSalt);
  loc.offsets.resize(k_);
  for (std::size_t i = 0; i < k_; ++i) loc.offsets[i] = mix64(h + (i + 1) * 0x9e3779b97f4a7c15ULL) % w_;
  return loc;
}

std::vector<std::uint64_t> UFBF::positions(const UFBFLocation& loc) const {
  std::vector<std::uint64_t> out(k_);
  for (std::size_t i = 0; i < k_; ++i) out[i] = (loc.block * k_ + i) * w_ + loc.offsets[i];
  return out;
}

InsertStatus UFBF::insert(std::string_view item) {
  for (const auto i : positions(locate(item))) bits_.set(i);
  ++n_;
  return InsertStatus::inserted;
}

QueryOutcome UFBF::query(std::string_view item) const {
  for (const auto i : positions(locate(item))) {
    if (!bits_.test(i)) return QueryOutcome::absent();
  }
  return QueryOutcome::maybe_present();
}

UFBF UFBF::restore(std::size_t l, std::size_t k, std::size_t w, std::uint64_t seed, BitVector bits,
                   std::uint64_t n) {
  UFBF f(l, k, w, seed);
  if (bits.size() != f.bits_.size()) throw ParameterError("UFBF: bit array length mismatch");
  f.bits_ = std::move(bits);
  f.n_ = n;
  return f;
}

UFBFLocation ufbf_locate(std::string_view item, std::size_t l, std::size_t k, std::size_t w, std::uint64_t seed) {
  return UFBF(l, k, w, seed).locate(item);
}

}  // namespace bloomsketch
