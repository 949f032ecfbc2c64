#include "bloomsketch/special_filters.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "bloomsketch/errors.hpp"

namespace bloomsketch {

namespace {

constexpr std::uint64_t kBucketSalt = 0x6473626675636b74ULL;
constexpr std::uint64_t kSampleSalt = 0x73616d706c657321ULL;
constexpr std::uint64_t kFpSalt = 0x637563666f6f7470ULL;
constexpr std::uint64_t kAltSalt = 0x637563616c746572ULL;

}  // namespace

// ---- DeletableBF ----

DeletableBF::DeletableBF(std::size_t m, std::size_t k, std::size_t regions, HashFamily hashes)
    : k_(k), region_size_(0), hashes_(std::move(hashes)) {
  if (m < 2) throw ParameterError("DeletableBF: m must be at least 2");
  if (k == 0) throw ParameterError("DeletableBF: k must be at least 1");
  if (regions == 0 || regions > m || m % regions != 0) {
    throw ParameterError("DeletableBF: regions must divide m");
  }
  region_size_ = m / regions;
  bits_ = BitVector(m);
  collisions_ = BitVector(regions);
}

std::vector<std::uint64_t> DeletableBF::positions(std::string_view item) const {
  return hashes_.indices(item, k_, bits_.size());
}

InsertStatus DeletableBF::insert(std::string_view item) {
  for (const auto i : positions(item)) {
    if (bits_.test(i)) {
      collisions_.set(region_of(i));
    } else {
      bits_.set(i);
    }
  }
  ++n_;
  return InsertStatus::inserted;
}

QueryOutcome DeletableBF::query(std::string_view item) const {
  for (const auto i : positions(item)) {
    if (!bits_.test(i)) return QueryOutcome::absent();
  }
  return QueryOutcome::maybe_present();
}

bool DeletableBF::deletable(std::string_view item) const {
  const auto pos = positions(item);
  return std::any_of(pos.begin(), pos.end(), [&](std::uint64_t i) { return !collisions_.test(region_of(i)); });
}

RemoveResult DeletableBF::remove(std::string_view item) {
  if (!query(item).present()) return RemoveResult::not_found;
  bool any = false;
  for (const auto i : positions(item)) {
    if (!collisions_.test(region_of(i))) {
      bits_.reset(i);
      any = true;
    }
  }
  if (!any) return RemoveResult::not_deletable;
  if (n_ > 0) --n_;
  return RemoveResult::removed;
}

DeletableBF DeletableBF::restore(std::size_t k, HashFamily hashes, BitVector bits, BitVector collisions,
                                 std::uint64_t n) {
  DeletableBF f(bits.size(), k, collisions.size(), std::move(hashes));
  f.bits_ = std::move(bits);
  f.collisions_ = std::move(collisions);
  f.n_ = n;
  return f;
}

// ---- DistanceSensitiveBF ----

DSBFGeometry dsbf_geometry(const DSBFParams& p) {
  if (p.dim == 0) throw ParameterError("DSBF: dim must be at least 1");
  if (!(p.eps >= 0.0) || !(p.eps < p.delta) || !(p.delta <= static_cast<double>(p.dim))) {
    throw ParameterError("DSBF: need 0 <= eps < delta <= dim");
  }
  if (p.capacity == 0) throw ParameterError("DSBF: capacity must be at least 1");
  if (!(p.beta > 0.0 && p.beta < 1.0) || !(p.gamma > 0.0 && p.gamma < 1.0)) {
    throw ParameterError("DSBF: beta and gamma must lie in (0, 1)");
  }
  if (!(p.bucket_bits_per_entry > 0.0) || p.bucket_k == 0) throw ParameterError("DSBF: bad bucket filter sizing");

  DSBFGeometry geo;
  const double want = std::ceil(std::log2(static_cast<double>(p.capacity))) + 4.0;
  geo.g = static_cast<std::size_t>(std::clamp(want, 1.0, static_cast<double>(p.dim)));
  const double dim = static_cast<double>(p.dim);
  const double g = static_cast<double>(geo.g);
  const double kb = static_cast<double>(p.bucket_k);
  const double bucket_fpp = std::pow(1.0 - std::exp(-kb / p.bucket_bits_per_entry), kb);
  geo.p_close = std::pow(1.0 - p.eps / dim, g);
  geo.p_far = std::min(1.0, std::pow(1.0 - p.delta / dim, g) + bucket_fpp);
  if (geo.p_close <= 0.5 || geo.p_far >= 0.5) {
    throw ParameterError("DSBF: eps and delta too close for the sampled coordinate count");
  }
  // Hoeffding bounds for a majority vote over k independent functions.
  const double a = std::log(1.0 / p.beta) / (2.0 * (geo.p_close - 0.5) * (geo.p_close - 0.5));
  const double b = std::log(1.0 / p.gamma) / (2.0 * (0.5 - geo.p_far) * (0.5 - geo.p_far));
  geo.k = static_cast<std::size_t>(std::ceil(std::max(a, b)));
  geo.k = std::max<std::size_t>(geo.k, 1);
  geo.t = (geo.k + 1) / 2;
  return geo;
}

DistanceSensitiveBF::DistanceSensitiveBF(DSBFParams params, std::uint64_t seed)
    : params_(params),
      geo_(dsbf_geometry(params_)),
      seed_(seed),
      buckets_(static_cast<std::size_t>(std::max(
                   2.0, std::ceil(params_.bucket_bits_per_entry * static_cast<double>(geo_.k * params_.capacity)))),
               params_.bucket_k, HashFamily(mix64(seed ^ kBucketSalt))) {
  std::mt19937_64 rng(seed ^ kSampleSalt);
  std::vector<std::uint32_t> coords(params_.dim);
  std::iota(coords.begin(), coords.end(), 0u);
  samples_.resize(geo_.k);
  for (auto& s : samples_) {
    // Partial Fisher-Yates: g distinct coordinates per function.
    for (std::size_t i = 0; i < geo_.g; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng() % (params_.dim - i));
      std::swap(coords[i], coords[j]);
    }
    s.assign(coords.begin(), coords.begin() + static_cast<std::ptrdiff_t>(geo_.g));
  }
}

void DistanceSensitiveBF::check_dim(const BitVector& v) const {
  if (v.size() != params_.dim) throw InputError("DSBF: point length does not match dim");
}

BitVector DistanceSensitiveBF::parse_point(std::string_view item) const {
  if (item.size() != params_.dim) throw InputError("DSBF: point length does not match dim");
  BitVector v(params_.dim);
  for (std::size_t i = 0; i < item.size(); ++i) {
    if (item[i] == '1') {
      v.set(i);
    } else if (item[i] != '0') {
      throw InputError("DSBF: points are strings of '0' and '1'");
    }
  }
  return v;
}

std::string DistanceSensitiveBF::bucket_key(const BitVector& v, std::size_t fn) const {
  std::string key = encode_u64(fn);
  const auto& s = samples_[fn];
  std::uint8_t acc = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    acc = static_cast<std::uint8_t>(acc | (v.test(s[i]) ? 1u << (i & 7) : 0u));
    if ((i & 7) == 7 || i + 1 == s.size()) {
      key.push_back(static_cast<char>(acc));
      acc = 0;
    }
  }
  return key;
}

void DistanceSensitiveBF::insert_point(const BitVector& v) {
  check_dim(v);
  for (std::size_t fn = 0; fn < geo_.k; ++fn) buckets_.insert(bucket_key(v, fn));
  ++n_;
}

std::size_t DistanceSensitiveBF::votes(const BitVector& v) const {
  check_dim(v);
  std::size_t hits = 0;
  for (std::size_t fn = 0; fn < geo_.k; ++fn) {
    if (buckets_.query(bucket_key(v, fn)).present()) ++hits;
  }
  return hits;
}

bool DistanceSensitiveBF::near(const BitVector& v) const { return votes(v) >= geo_.t; }

InsertStatus DistanceSensitiveBF::insert(std::string_view item) {
  insert_point(parse_point(item));
  return InsertStatus::inserted;
}

QueryOutcome DistanceSensitiveBF::query(std::string_view item) const {
  return near(parse_point(item)) ? QueryOutcome::maybe_present() : QueryOutcome::absent();
}

DistanceSensitiveBF DistanceSensitiveBF::restore(DSBFParams params, std::uint64_t seed, BitVector bucket_bits,
                                                 std::uint64_t n) {
  DistanceSensitiveBF f(params, seed);
  if (bucket_bits.size() != f.buckets_.m()) throw ParameterError("DSBF: bucket array length mismatch");
  f.buckets_ = StandardBF::restore(std::move(bucket_bits), params.bucket_k, f.buckets_.hashes(), n * f.geo_.k);
  f.n_ = n;
  return f;
}

// ---- CuckooFilter ----

CuckooFilter::CuckooFilter(std::size_t buckets, std::size_t slots_per_bucket, unsigned fp_bits,
                           std::size_t max_kicks, std::uint64_t seed)
    : buckets_(buckets), b_(slots_per_bucket), fp_bits_(fp_bits), max_kicks_(max_kicks), seed_(seed), rng_(seed) {
  if (buckets == 0 || !std::has_single_bit(buckets)) throw ParameterError("CuckooFilter: buckets must be a power of two");
  if (slots_per_bucket == 0) throw ParameterError("CuckooFilter: slots per bucket must be at least 1");
  if (fp_bits == 0 || fp_bits > 32) throw ParameterError("CuckooFilter: fingerprint bits must lie in [1, 32]");
  slots_.assign(buckets * slots_per_bucket, 0);
}

std::uint32_t CuckooFilter::fingerprint_of(std::string_view item) const {
  return fingerprint(item, fp_bits_, seed_ ^ kFpSalt).value;
}

std::size_t CuckooFilter::primary_bucket(std::string_view item) const {
  return static_cast<std::size_t>(hash64(item, seed_) & (buckets_ - 1));
}

std::size_t CuckooFilter::alternate_bucket(std::size_t i, std::uint32_t fp) const {
  return i ^ static_cast<std::size_t>(mix64(fp ^ seed_ ^ kAltSalt) & (buckets_ - 1));
}

bool CuckooFilter::place(std::size_t bucket, std::uint32_t fp) {
  for (std::size_t s = 0; s < b_; ++s) {
    auto& cell = slots_[bucket * b_ + s];
    if (cell == 0) {
      cell = fp;
      ++occupied_;
      return true;
    }
  }
  return false;
}

bool CuckooFilter::holds(std::size_t bucket, std::uint32_t fp) const {
  for (std::size_t s = 0; s < b_; ++s) {
    if (slots_[bucket * b_ + s] == fp) return true;
  }
  return false;
}

InsertStatus CuckooFilter::insert(std::string_view item) {
  std::uint32_t cur = fingerprint_of(item);
  const std::size_t i1 = primary_bucket(item);
  const std::size_t i2 = alternate_bucket(i1, cur);
  if (place(i1, cur) || place(i2, cur)) {
    ++n_;
    return InsertStatus::inserted;
  }
  // Relocation; each swap is logged so a failed walk can be rolled back.
  std::vector<std::pair<std::size_t, std::uint32_t>> path;
  std::size_t i = (rng_() & 1) ? i2 : i1;
  for (std::size_t kick = 0; kick < max_kicks_; ++kick) {
    const std::size_t idx = i * b_ + static_cast<std::size_t>(rng_() % b_);
    path.emplace_back(idx, slots_[idx]);
    std::swap(cur, slots_[idx]);
    i = alternate_bucket(i, cur);
    if (place(i, cur)) {
      ++n_;
      return InsertStatus::inserted;
    }
  }
  for (auto it = path.rbegin(); it != path.rend(); ++it) slots_[it->first] = it->second;
  ++failures_;
  return InsertStatus::failed;
}

QueryOutcome CuckooFilter::query(std::string_view item) const {
  const auto fp = fingerprint_of(item);
  const auto i1 = primary_bucket(item);
  if (holds(i1, fp) || holds(alternate_bucket(i1, fp), fp)) return QueryOutcome::maybe_present();
  return QueryOutcome::absent();
}

RemoveResult CuckooFilter::remove(std::string_view item) {
  const auto fp = fingerprint_of(item);
  const auto i1 = primary_bucket(item);
  for (const auto bucket : {i1, alternate_bucket(i1, fp)}) {
    for (std::size_t s = 0; s < b_; ++s) {
      auto& cell = slots_[bucket * b_ + s];
      if (cell == fp) {
        cell = 0;
        --occupied_;
        if (n_ > 0) --n_;
        return RemoveResult::removed;
      }
    }
  }
  return RemoveResult::not_found;
}

bool CuckooFilter::audit() const {
  const std::uint64_t limit = fp_bits_ == 32 ? 0xffffffffULL : (std::uint64_t{1} << fp_bits_) - 1;
  std::size_t seen = 0;
  for (std::size_t bucket = 0; bucket < buckets_; ++bucket) {
    for (std::size_t s = 0; s < b_; ++s) {
      const auto fp = slots_[bucket * b_ + s];
      if (fp == 0) continue;
      ++seen;
      if (fp > limit) return false;
      const auto j = alternate_bucket(bucket, fp);
      if (j >= buckets_ || alternate_bucket(j, fp) != bucket) return false;
    }
  }
  return seen == occupied_;
}

double CuckooFilter::space_cost() const {
  if (occupied_ == 0) throw ParameterError("CuckooFilter: space cost undefined for an empty table");
  return static_cast<double>(fp_bits_) / load_factor();
}

CuckooFilter CuckooFilter::restore(std::size_t buckets, std::size_t slots_per_bucket, unsigned fp_bits,
                                   std::size_t max_kicks, std::uint64_t seed, std::vector<std::uint32_t> slots,
                                   std::uint64_t n) {
  CuckooFilter f(buckets, slots_per_bucket, fp_bits, max_kicks, seed);
  if (slots.size() != f.slots_.size()) throw ParameterError("CuckooFilter: slot array length mismatch");
  f.slots_ = std::move(slots);
  f.occupied_ = static_cast<std::size_t>(std::count_if(f.slots_.begin(), f.slots_.end(), [](auto v) { return v != 0; }));
  f.n_ = n;
  return f;
}

// ---- PersistentBF ----

PersistentBF::PersistentBF(std::int64_t granularity, std::size_t m, std::size_t k, std::uint64_t seed)
    : g_(granularity), m_(m), k_(k), seed_(seed), lock_(std::make_unique<std::mutex>()) {
  if (granularity <= 0) throw ParameterError("PersistentBF: granularity must be positive");
  if (m < 2 || k == 0) throw ParameterError("PersistentBF: need m >= 2 and k >= 1");
}

PersistentBF::PersistentBF(PersistentBF&& other) noexcept
    : MembershipFilter(other),
      g_(other.g_),
      m_(other.m_),
      k_(other.k_),
      seed_(other.seed_),
      clock_(other.clock_),
      segments_(std::move(other.segments_)),
      lock_(std::move(other.lock_)) {}

std::int64_t PersistentBF::slot_of(std::int64_t t) const noexcept {
  std::int64_t q = t / g_;
  if (t % g_ != 0 && t < 0) --q;
  return q;
}

void PersistentBF::insert_at(std::string_view item, std::int64_t t) {
  const auto s = slot_of(t);
  std::lock_guard guard(*lock_);
  auto it = segments_.find(s);
  if (it == segments_.end()) it = segments_.emplace(s, StandardBF(m_, k_, HashFamily(seed_))).first;
  it->second.insert(item);
  ++n_;
}

InsertStatus PersistentBF::insert(std::string_view item) {
  insert_at(item, clock_);
  return InsertStatus::inserted;
}

QueryOutcome PersistentBF::query_range(std::string_view item, std::int64_t t1, std::int64_t t2) const {
  if (t1 > t2) throw ParameterError("PersistentBF: range start after range end");
  const auto lo = segments_.lower_bound(slot_of(t1));
  const auto hi = segments_.upper_bound(slot_of(t2));
  for (auto it = lo; it != hi; ++it) {
    if (it->second.query(item).present()) return QueryOutcome::maybe_present();
  }
  return QueryOutcome::absent();
}

QueryOutcome PersistentBF::query(std::string_view item) const {
  for (const auto& [slot, bf] : segments_) {
    if (bf.query(item).present()) return QueryOutcome::maybe_present();
  }
  return QueryOutcome::absent();
}

std::size_t PersistentBF::memory_bits() const noexcept { return segments_.size() * m_; }

PersistentBF PersistentBF::restore(std::int64_t granularity, std::size_t m, std::size_t k, std::uint64_t seed,
                                   std::int64_t clock, std::map<std::int64_t, StandardBF> segments, std::uint64_t n) {
  PersistentBF f(granularity, m, k, seed);
  for (const auto& [slot, bf] : segments) {
    if (bf.m() != m || bf.k() != k) throw ParameterError("PersistentBF: segment geometry mismatch");
  }
  f.segments_ = std::move(segments);
  f.clock_ = clock;
  f.n_ = n;
  return f;
}

// ---- HDBF ----

HDBF::HDBF(std::size_t m, std::size_t k, unsigned q, double low, double high, std::uint64_t seed)
    : low_(low), high_(high), seed_(seed), hasher_(q, low, high) {
  if (m < 2 || k == 0) throw ParameterError("HDBF: need m >= 2 and k >= 1");
  for (std::size_t i = 0; i < k; ++i) seeds_.push_back(mix64(seed + 0x9e3779b97f4a7c15ULL * (i + 1)));
  counters_ = CounterVector(m, kCounterWidth);
}

std::vector<std::uint64_t> HDBF::vector_positions(std::span<const double> v) const {
  std::vector<std::uint64_t> pos;
  pos.reserve(seeds_.size());
  for (const auto s : seeds_) pos.push_back(hasher_(v, s) % counters_.size());
  return pos;
}

std::vector<std::uint64_t> HDBF::item_positions(std::string_view item) const {
  std::vector<std::uint64_t> pos;
  pos.reserve(seeds_.size());
  for (const auto s : seeds_) pos.push_back(hash64(item, s) % counters_.size());
  return pos;
}

InsertStatus HDBF::add(const std::vector<std::uint64_t>& pos) {
  for (const auto i : pos) counters_.increment(i);
  ++n_;
  return InsertStatus::inserted;
}

QueryOutcome HDBF::probe(const std::vector<std::uint64_t>& pos) const {
  std::uint32_t lo = counters_.max();
  for (const auto i : pos) lo = std::min(lo, counters_.get(i));
  if (lo == 0) return QueryOutcome::absent();
  auto out = QueryOutcome::maybe_present();
  out.frequency = lo;
  return out;
}

RemoveResult HDBF::drop(const std::vector<std::uint64_t>& pos) {
  for (const auto i : pos) {
    if (counters_.get(i) == 0) return RemoveResult::not_found;
  }
  for (const auto i : pos) counters_.decrement(i);
  if (n_ > 0) --n_;
  return RemoveResult::removed;
}

InsertStatus HDBF::insert(std::string_view item) { return add(item_positions(item)); }
QueryOutcome HDBF::query(std::string_view item) const { return probe(item_positions(item)); }
RemoveResult HDBF::remove(std::string_view item) { return drop(item_positions(item)); }

std::uint64_t HDBF::count_estimate(std::string_view item) const {
  return probe(item_positions(item)).frequency.value_or(0);
}

InsertStatus HDBF::insert_vector(std::span<const double> v) { return add(vector_positions(v)); }
QueryOutcome HDBF::query_vector(std::span<const double> v) const { return probe(vector_positions(v)); }
RemoveResult HDBF::remove_vector(std::span<const double> v) { return drop(vector_positions(v)); }

HDBF HDBF::restore(std::size_t k, unsigned q, double low, double high, std::uint64_t seed, CounterVector counters,
                   std::uint64_t n) {
  HDBF f(counters.size(), k, q, low, high, seed);
  if (counters.width() != kCounterWidth) throw ParameterError("HDBF: counters must be 8 bits wide");
  f.counters_ = std::move(counters);
  f.n_ = n;
  return f;
}

}  // namespace bloomsketch
