#include "bloomsketch/hash.hpp"

#include <bit>
#include <cmath>
#include <cstring>

#include "bloomsketch/errors.hpp"

namespace bloomsketch {

namespace {

// XXH64 primes.
constexpr std::uint64_t kP1 = 0x9E3779B185EBCA87ULL;
constexpr std::uint64_t kP2 = 0xC2B2AE3D27D4EB4FULL;
constexpr std::uint64_t kP3 = 0x165667B19E3779F9ULL;
constexpr std::uint64_t kP4 = 0x85EBCA77C2B2AE63ULL;
constexpr std::uint64_t kP5 = 0x27D4EB2F165667C5ULL;

constexpr std::uint64_t kStrideSalt = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kFingerprintSalt = 0xF1A9E7D3C5B4A291ULL;
constexpr std::uint64_t kOffsetSalt = 0x0FF5E7D1B3A59786ULL;

std::uint64_t load64(const unsigned char* p) noexcept {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

std::uint32_t load32(const unsigned char* p) noexcept {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

constexpr std::uint64_t xxh_round(std::uint64_t acc, std::uint64_t input) noexcept {
  acc += input * kP2;
  acc = std::rotl(acc, 31);
  return acc * kP1;
}

constexpr std::uint64_t xxh_merge(std::uint64_t acc, std::uint64_t val) noexcept {
  acc ^= xxh_round(0, val);
  return acc * kP1 + kP4;
}

// Stride for double hashing: odd (so power-of-two moduli get a full cycle)
// and nonzero modulo m.
std::uint64_t stride_mod(std::uint64_t h, std::uint64_t m) noexcept {
  const std::uint64_t b = (mix64(h + kStrideSalt) | 1u) % m;
  return b == 0 ? 1 : b;
}

void require_modulus(std::size_t k, std::uint64_t m) {
  if (k == 0) throw ParameterError("hash_indices: k must be at least 1");
  if (m < 2) throw ParameterError("hash_indices: modulus m must be at least 2");
}

}  // namespace

std::uint64_t hash64(std::string_view bytes, std::uint64_t seed) noexcept {
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const auto* const end = p + bytes.size();
  std::uint64_t h;
  if (bytes.size() >= 32) {
    std::uint64_t v1 = seed + kP1 + kP2;
    std::uint64_t v2 = seed + kP2;
    std::uint64_t v3 = seed;
    std::uint64_t v4 = seed - kP1;
    do {
      v1 = xxh_round(v1, load64(p));
      v2 = xxh_round(v2, load64(p + 8));
      v3 = xxh_round(v3, load64(p + 16));
      v4 = xxh_round(v4, load64(p + 24));
      p += 32;
    } while (p + 32 <= end);
    h = std::rotl(v1, 1) + std::rotl(v2, 7) + std::rotl(v3, 12) + std::rotl(v4, 18);
    h = xxh_merge(h, v1);
    h = xxh_merge(h, v2);
    h = xxh_merge(h, v3);
    h = xxh_merge(h, v4);
  } else {
    h = seed + kP5;
  }
  h += static_cast<std::uint64_t>(bytes.size());
  while (p + 8 <= end) {
    h ^= xxh_round(0, load64(p));
    h = std::rotl(h, 27) * kP1 + kP4;
    p += 8;
  }
  if (p + 4 <= end) {
    h ^= static_cast<std::uint64_t>(load32(p)) * kP1;
    h = std::rotl(h, 23) * kP2 + kP3;
    p += 4;
  }
  while (p < end) {
    h ^= static_cast<std::uint64_t>(*p) * kP5;
    h = std::rotl(h, 11) * kP1;
    ++p;
  }
  h ^= h >> 33;
  h *= kP2;
  h ^= h >> 29;
  h *= kP3;
  h ^= h >> 32;
  return h;
}

std::string encode_u64(std::uint64_t value) {
  std::string out(8, '\0');
  for (int i = 0; i < 8; ++i) out[static_cast<std::size_t>(i)] = static_cast<char>((value >> (8 * i)) & 0xFF);
  return out;
}

HashFamily HashFamily::scripted(IndexScript script, std::uint64_t fallback_seed) {
  HashFamily family(fallback_seed);
  family.script_ = std::make_shared<const IndexScript>(std::move(script));
  return family;
}

const std::vector<std::uint64_t>* HashFamily::lookup(std::string_view item) const {
  if (!script_) return nullptr;
  const auto it = script_->find(item);
  return it == script_->end() ? nullptr : &it->second;
}

std::vector<std::uint64_t> HashFamily::indices(std::string_view item, std::size_t k, std::uint64_t m) const {
  require_modulus(k, m);
  std::vector<std::uint64_t> out(k);
  indices_into(item, m, out);
  return out;
}

void HashFamily::indices_into(std::string_view item, std::uint64_t m, std::span<std::uint64_t> out) const {
  require_modulus(out.size(), m);
  if (const auto* scripted = lookup(item)) {
    if (scripted->size() < out.size()) {
      throw ParameterError("HashFamily: scripted index list shorter than requested k");
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
      if ((*scripted)[i] >= m) throw ParameterError("HashFamily: scripted index out of range");
      out[i] = (*scripted)[i];
    }
    return;
  }
  const std::uint64_t h = base(item);
  const std::uint64_t a = h % m;
  const std::uint64_t b = stride_mod(h, m);
  std::uint64_t idx = a;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = idx;
    idx = static_cast<std::uint64_t>((static_cast<unsigned __int128>(idx) + b) % m);
  }
}

std::uint64_t HashFamily::index_at(std::string_view item, std::size_t i, std::uint64_t m) const {
  require_modulus(i + 1, m);
  if (const auto* scripted = lookup(item)) {
    if (i >= scripted->size()) throw ParameterError("HashFamily: scripted index list too short");
    if ((*scripted)[i] >= m) throw ParameterError("HashFamily: scripted index out of range");
    return (*scripted)[i];
  }
  const std::uint64_t h = base(item);
  const auto a = static_cast<unsigned __int128>(h % m);
  const auto b = static_cast<unsigned __int128>(stride_mod(h, m));
  return static_cast<std::uint64_t>((a + b * i) % m);
}

HashFamily HashFamily::derive(std::uint64_t salt) const noexcept {
  return HashFamily(mix64(seed_ ^ mix64(salt + kStrideSalt)));
}

std::vector<std::uint64_t> hash_indices(std::string_view item, std::size_t k, std::uint64_t m, std::uint64_t seed) {
  return HashFamily(seed).indices(item, k, m);
}

Fingerprint fingerprint(std::string_view item, unsigned f, std::uint64_t seed) {
  if (f < 1 || f > 32) throw ParameterError("fingerprint: width f must be in [1, 32]");
  const std::uint64_t mask = (std::uint64_t{1} << f) - 1;
  auto value = static_cast<std::uint32_t>(hash64(item, seed ^ kFingerprintSalt) & mask);
  if (value == 0) value = 1;
  return {value, f};
}

std::uint64_t offset_of(std::string_view item, std::uint64_t w_bar, std::uint64_t seed) {
  if (w_bar < 2) throw ParameterError("offset_of: w_bar must be at least 2");
  return 1 + hash64(item, seed ^ kOffsetSalt) % (w_bar - 1);
}

VectorHasher::VectorHasher(unsigned q, double low, double high) : q_(q), low_(low), high_(high) {
  if (q < 2) throw ParameterError("vector_hash: q must be at least 2");
  if (!std::isfinite(low) || !std::isfinite(high) || !(low < high)) {
    throw ParameterError("vector_hash: quantization range must be finite with low < high");
  }
}

std::vector<std::uint32_t> VectorHasher::quantize(std::span<const double> v) const {
  if (v.empty()) throw InputError("vector_hash: vector must be non-empty");
  std::vector<std::uint32_t> symbols;
  symbols.reserve(v.size());
  const double scale = static_cast<double>(q_) / (high_ - low_);
  for (const double x : v) {
    if (!std::isfinite(x)) throw InputError("vector_hash: component is NaN or infinite");
    double cell = std::floor((x - low_) * scale);
    if (cell < 0) cell = 0;
    if (cell > q_ - 1) cell = q_ - 1;
    symbols.push_back(static_cast<std::uint32_t>(cell));
  }
  return symbols;
}

std::uint64_t VectorHasher::operator()(std::span<const double> v, std::uint64_t seed) const {
  const auto symbols = quantize(v);
  std::string bytes;
  bytes.reserve(symbols.size() * 4);
  for (const auto s : symbols) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<char>((s >> (8 * i)) & 0xFF));
  }
  return hash64(bytes, seed);
}

std::uint64_t vector_hash(std::span<const double> v, unsigned q, std::uint64_t seed) {
  return VectorHasher(q)(v, seed);
}

}  // namespace bloomsketch
