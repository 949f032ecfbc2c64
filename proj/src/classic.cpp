#include "bloomsketch/classic.hpp"

#include <algorithm>
#include <utility>

#include "bloomsketch/errors.hpp"

namespace bloomsketch {

namespace {

void require_geometry(const char* who, std::size_t m, std::size_t k) {
  if (m < 2) throw ParameterError(std::string(who) + ": m must be at least 2");
  if (k == 0) throw ParameterError(std::string(who) + ": k must be at least 1");
}

}  // namespace

// ---- StandardBF ----

StandardBF::StandardBF(std::size_t m, std::size_t k, HashFamily hashes)
    : k_(k), hashes_(std::move(hashes)), bits_((require_geometry("StandardBF", m, k), m)) {}

std::vector<std::uint64_t> StandardBF::positions(std::string_view item) const {
  return hashes_.indices(item, k_, bits_.size());
}

InsertStatus StandardBF::insert(std::string_view item) {
  for (const auto i : positions(item)) bits_.set(i);
  ++n_;
  return InsertStatus::inserted;
}

QueryOutcome StandardBF::query(std::string_view item) const {
  for (const auto i : positions(item)) {
    if (!bits_.test(i)) return QueryOutcome::absent();
  }
  return QueryOutcome::maybe_present();
}

StandardBF StandardBF::restore(BitVector bits, std::size_t k, HashFamily hashes, std::uint64_t n) {
  StandardBF bf(bits.size(), k, std::move(hashes));
  bf.bits_ = std::move(bits);
  bf.n_ = n;
  return bf;
}

// ---- CountingBF ----

CountingBF::CountingBF(std::size_t m, std::size_t k, HashFamily hashes)
    : k_(k), hashes_(std::move(hashes)), counters_((require_geometry("CountingBF", m, k), m), kCounterWidth) {}

std::vector<std::uint64_t> CountingBF::positions(std::string_view item) const {
  return hashes_.indices(item, k_, counters_.size());
}

InsertStatus CountingBF::insert(std::string_view item) {
  for (const auto i : positions(item)) {
    if (!counters_.increment(i)) ++saturation_events_;
  }
  ++n_;
  return InsertStatus::inserted;
}

QueryOutcome CountingBF::query(std::string_view item) const {
  const auto count = count_estimate(item);
  if (count == 0) return QueryOutcome::absent();
  auto out = QueryOutcome::maybe_present();
  out.frequency = count;
  return out;
}

RemoveResult CountingBF::remove(std::string_view item) {
  const auto pos = positions(item);
  for (const auto i : pos) {
    if (counters_.get(i) == 0) return RemoveResult::not_found;
  }
  for (const auto i : pos) counters_.decrement(i);
  if (n_ > 0) --n_;
  return RemoveResult::removed;
}

std::uint64_t CountingBF::count_estimate(std::string_view item) const {
  std::uint32_t lo = counters_.max();
  for (const auto i : positions(item)) lo = std::min(lo, counters_.get(i));
  return lo;
}

void CountingBF::absorb(const CountingBF& other) {
  if (other.counters_.size() != counters_.size() || other.k_ != k_ || other.hashes_.seed() != hashes_.seed()) {
    throw ParameterError("CountingBF::absorb: geometry or hash family mismatch");
  }
  const std::uint64_t cap = counters_.max();
  for (std::size_t i = 0; i < counters_.size(); ++i) {
    const std::uint64_t sum = std::uint64_t{counters_.get(i)} + other.counters_.get(i);
    if (sum > cap) ++saturation_events_;
    counters_.put(i, static_cast<std::uint32_t>(std::min(sum, cap)));
  }
  n_ += other.n_;
  saturation_events_ += other.saturation_events_;
}

CountingBF CountingBF::restore(CounterVector counters, std::size_t k, HashFamily hashes, std::uint64_t n,
                               std::uint64_t saturation_events) {
  if (counters.width() != kCounterWidth) throw ParameterError("CountingBF: counters must be 4 bits wide");
  CountingBF bf(counters.size(), k, std::move(hashes));
  bf.counters_ = std::move(counters);
  bf.n_ = n;
  bf.saturation_events_ = saturation_events;
  return bf;
}

// ---- SpectralBF ----

SpectralBF::SpectralBF(std::size_t m, std::size_t k, SpectralMode mode, unsigned counter_width, HashFamily hashes)
    : k_(k),
      mode_(mode),
      hashes_(std::move(hashes)),
      counters_((require_geometry("SpectralBF", m, k), m), counter_width) {}

std::vector<std::uint64_t> SpectralBF::distinct_positions(std::string_view item) const {
  auto pos = hashes_.indices(item, k_, counters_.size());
  if (mode_ == SpectralMode::minimum_increase) {
    std::sort(pos.begin(), pos.end());
    pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
  }
  return pos;
}

InsertStatus SpectralBF::insert(std::string_view item) {
  const auto pos = distinct_positions(item);
  if (mode_ == SpectralMode::plain) {
    for (const auto i : pos) {
      if (!counters_.increment(i)) ++saturation_events_;
    }
  } else {
    std::uint32_t lo = counters_.max();
    for (const auto i : pos) lo = std::min(lo, counters_.get(i));
    for (const auto i : pos) {
      if (counters_.get(i) != lo) continue;
      if (!counters_.increment(i)) ++saturation_events_;
    }
  }
  ++n_;
  return InsertStatus::inserted;
}

QueryOutcome SpectralBF::query(std::string_view item) const {
  const auto count = count_estimate(item);
  if (count == 0) return QueryOutcome::absent();
  auto out = QueryOutcome::maybe_present();
  out.frequency = count;
  return out;
}

RemoveResult SpectralBF::remove(std::string_view item) {
  const auto pos = distinct_positions(item);
  std::uint32_t lo = counters_.max();
  for (const auto i : pos) lo = std::min(lo, counters_.get(i));
  if (lo == 0) return RemoveResult::not_found;
  for (const auto i : pos) {
    if (mode_ == SpectralMode::plain || counters_.get(i) == lo) counters_.decrement(i);
  }
  if (n_ > 0) --n_;
  return RemoveResult::removed;
}

std::uint64_t SpectralBF::count_estimate(std::string_view item) const {
  std::uint32_t lo = counters_.max();
  for (const auto i : hashes_.indices(item, k_, counters_.size())) lo = std::min(lo, counters_.get(i));
  return lo;
}

SpectralBF SpectralBF::restore(CounterVector counters, std::size_t k, SpectralMode mode, HashFamily hashes,
                               std::uint64_t n, std::uint64_t saturation_events) {
  SpectralBF bf(counters.size(), k, mode, counters.width(), std::move(hashes));
  bf.counters_ = std::move(counters);
  bf.n_ = n;
  bf.saturation_events_ = saturation_events;
  return bf;
}

// ---- AdaptiveBF ----

AdaptiveBF::AdaptiveBF(std::size_t m, std::size_t k, std::size_t max_probe, HashFamily hashes)
    : k_(k), max_probe_(max_probe), hashes_(std::move(hashes)), bits_((require_geometry("AdaptiveBF", m, k), m)) {
  if (max_probe == 0) throw ParameterError("AdaptiveBF: max_probe must be at least 1");
}

bool AdaptiveBF::base_bits_set(std::string_view item) const {
  for (std::size_t i = 0; i < k_; ++i) {
    if (!bits_.test(hashes_.index_at(item, i, bits_.size()))) return false;
  }
  return true;
}

std::uint64_t AdaptiveBF::run_length(std::string_view item) const {
  std::uint64_t run = 0;
  while (run < max_probe_ && bits_.test(hashes_.index_at(item, k_ + run, bits_.size()))) ++run;
  return run;
}

InsertStatus AdaptiveBF::insert(std::string_view item) {
  for (std::size_t i = 0; i < k_; ++i) bits_.set(hashes_.index_at(item, i, bits_.size()));
  const auto run = run_length(item);
  if (run < max_probe_) bits_.set(hashes_.index_at(item, k_ + run, bits_.size()));
  ++n_;
  return InsertStatus::inserted;
}

QueryOutcome AdaptiveBF::query(std::string_view item) const {
  if (!base_bits_set(item)) return QueryOutcome::absent();
  auto out = QueryOutcome::maybe_present();
  out.frequency = run_length(item);
  return out;
}

std::uint64_t AdaptiveBF::count_estimate(std::string_view item) const {
  return base_bits_set(item) ? run_length(item) : 0;
}

AdaptiveBF AdaptiveBF::restore(BitVector bits, std::size_t k, std::size_t max_probe, HashFamily hashes,
                               std::uint64_t n) {
  AdaptiveBF bf(bits.size(), k, max_probe, std::move(hashes));
  bf.bits_ = std::move(bits);
  bf.n_ = n;
  return bf;
}

}  // namespace bloomsketch
