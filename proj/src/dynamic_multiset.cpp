#include "bloomsketch/dynamic_multiset.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <utility>

#include "bloomsketch/errors.hpp"

namespace bloomsketch {

namespace {

constexpr std::uint64_t kItemKeySalt = 0x6962c74b65795f5fULL;
constexpr std::uint64_t kTableSalt = 0x7375627461626c65ULL;

}  // namespace

// ---- DynamicBF ----

DynamicBF::DynamicBF(std::size_t m, std::size_t k, std::uint64_t capacity, std::uint64_t seed)
    : DynamicBF(m, k, capacity, HashFamily(seed)) {}

DynamicBF::DynamicBF(std::size_t m, std::size_t k, std::uint64_t capacity, HashFamily hashes)
    : m_(m), k_(k), capacity_(capacity), hashes_(std::move(hashes)) {
  if (capacity == 0) throw ParameterError("DynamicBF: capacity must be at least 1");
  subs_.emplace_back(m_, k_, hashes_);
}

std::size_t DynamicBF::memory_bits() const noexcept {
  std::size_t bits = 0;
  for (const auto& s : subs_) bits += s.memory_bits();
  return bits;
}

InsertStatus DynamicBF::insert(std::string_view item) {
  if (subs_.back().size() >= capacity_) subs_.emplace_back(m_, k_, hashes_);
  subs_.back().insert(item);
  ++n_;
  return InsertStatus::inserted;
}

QueryOutcome DynamicBF::query(std::string_view item) const {
  for (const auto& s : subs_) {
    if (s.query(item).present()) return QueryOutcome::maybe_present();
  }
  return QueryOutcome::absent();
}

RemoveResult DynamicBF::remove(std::string_view item) {
  CountingBF* holder = nullptr;
  std::size_t hits = 0;
  for (auto& s : subs_) {
    if (s.query(item).present()) {
      holder = &s;
      ++hits;
    }
  }
  if (hits == 0) return RemoveResult::not_found;
  if (hits > 1) return RemoveResult::aborted;
  holder->remove(item);
  if (n_ > 0) --n_;
  return RemoveResult::removed;
}

std::uint64_t DynamicBF::count_estimate(std::string_view item) const {
  std::uint64_t total = 0;
  for (const auto& s : subs_) total += s.count_estimate(item);
  return total;
}

MergeReport DynamicBF::merge() {
  MergeReport report;
  report.filters_before = subs_.size();
  bool changed = true;
  while (changed && subs_.size() > 1) {
    changed = false;
    for (std::size_t i = 0; i < subs_.size() && !changed; ++i) {
      for (std::size_t j = i + 1; j < subs_.size() && !changed; ++j) {
        if (subs_[i].size() + subs_[j].size() > capacity_) continue;
        subs_[i].absorb(subs_[j]);
        subs_.erase(subs_.begin() + static_cast<std::ptrdiff_t>(j));
        ++report.merges;
        changed = true;
      }
    }
  }
  report.filters_after = subs_.size();
  return report;
}

DynamicBF DynamicBF::restore(std::size_t m, std::size_t k, std::uint64_t capacity, HashFamily hashes,
                             std::vector<CountingBF> subs) {
  DynamicBF f(m, k, capacity, std::move(hashes));
  if (subs.empty()) throw ParameterError("DynamicBF: no sub-filters");
  f.n_ = 0;
  for (const auto& s : subs) {
    if (s.m() != m || s.k() != k) throw ParameterError("DynamicBF: sub-filter geometry mismatch");
    f.n_ += s.size();
  }
  f.subs_ = std::move(subs);
  return f;
}

// ---- WeightedBF ----

std::vector<double> wbf_weights(std::span<const WBFProfileEntry> profile) {
  if (profile.empty()) throw ParameterError("wbf: empty profile");
  double total = 0.0;
  for (const auto& e : profile) {
    if (!(e.query_frequency >= 0.0) || !(e.membership >= 0.0 && e.membership <= 1.0)) {
      throw ParameterError("wbf: frequencies must be >= 0 and membership in [0, 1]");
    }
    total += (1.0 - e.membership) * e.query_frequency;
  }
  if (!(total > 0.0)) throw ParameterError("wbf: no query mass on non-members");
  std::vector<double> r;
  r.reserve(profile.size());
  for (const auto& e : profile) r.push_back((1.0 - e.membership) * e.query_frequency / total);
  return r;
}

double wbf_objective(std::span<const WBFProfileEntry> profile, std::span<const std::size_t> ks, double p) {
  if (ks.size() != profile.size()) throw ParameterError("wbf_objective: allocation size mismatch");
  const auto r = wbf_weights(profile);
  double total = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) total += r[i] * std::pow(1.0 - p, static_cast<double>(ks[i]));
  return total;
}

std::size_t wbf_average_k(std::size_t m, std::size_t n) {
  if (m < 2 || n == 0) throw ParameterError("wbf: need m >= 2 and n >= 1");
  const double k = std::round(std::log(2.0) * static_cast<double>(m) / static_cast<double>(n));
  return std::max<std::size_t>(1, static_cast<std::size_t>(k));
}

std::vector<std::size_t> wbf_allocate(std::span<const WBFProfileEntry> profile, std::size_t k_max, std::size_t m,
                                      std::size_t n) {
  const auto r = wbf_weights(profile);
  if (k_max == 0) throw ParameterError("wbf_allocate: k_max must be at least 1");
  const std::size_t k_avg = wbf_average_k(m, n);
  const double p = std::exp(-static_cast<double>(n * k_avg) / static_cast<double>(m));
  const double one = 1.0 - p;

  std::vector<std::size_t> ks(profile.size(), 1);
  std::size_t budget = profile.size() * k_avg;
  std::size_t spent = profile.size();

  // Max-heap on the current term r_e (1-p)^{k_e}; lower index wins ties.
  using Entry = std::pair<double, std::size_t>;
  auto cmp = [](const Entry& a, const Entry& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second > b.second;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] < k_max) heap.emplace(r[i] * one, i);
  }
  while (spent < budget && !heap.empty()) {
    const auto [term, i] = heap.top();
    heap.pop();
    ++ks[i];
    ++spent;
    if (ks[i] < k_max) heap.emplace(term * one, i);
  }
  return ks;
}

WeightedBF::WeightedBF(std::size_t m, std::size_t n, std::size_t k_max, std::vector<WBFProfileEntry> profile,
                       std::uint64_t seed)
    : expected_n_(n), k_max_(k_max), k_avg_(wbf_average_k(m, n)), profile_(std::move(profile)), hashes_(seed) {
  const auto ks = wbf_allocate(profile_, k_max_, m, n);
  for (std::size_t i = 0; i < ks.size(); ++i) allocation_.emplace(profile_[i].key, ks[i]);
  bits_ = BitVector(m);
}

std::size_t WeightedBF::hashes_for(std::string_view item) const {
  const auto it = allocation_.find(item);
  return it == allocation_.end() ? k_avg_ : it->second;
}

InsertStatus WeightedBF::insert(std::string_view item) {
  for (const auto i : hashes_.indices(item, hashes_for(item), bits_.size())) bits_.set(i);
  ++n_;
  return InsertStatus::inserted;
}

QueryOutcome WeightedBF::query(std::string_view item) const {
  for (const auto i : hashes_.indices(item, hashes_for(item), bits_.size())) {
    if (!bits_.test(i)) return QueryOutcome::absent();
  }
  return QueryOutcome::maybe_present();
}

WeightedBF WeightedBF::restore(std::size_t n_expected, std::size_t k_max, std::vector<WBFProfileEntry> profile,
                               std::uint64_t seed, BitVector bits, std::uint64_t n) {
  WeightedBF f(bits.size(), n_expected, k_max, std::move(profile), seed);
  f.bits_ = std::move(bits);
  f.n_ = n;
  return f;
}

// ---- IBLT ----

IBLT::IBLT(std::size_t m, std::size_t k, std::uint64_t seed) : k_(k), sub_(0), seed_(seed) {
  if (k == 0) throw ParameterError("IBLT: k must be at least 1");
  if (m < k || m % k != 0) throw ParameterError("IBLT: m must be a positive multiple of k");
  sub_ = m / k;
  for (std::size_t i = 0; i < k; ++i) table_seeds_.push_back(mix64(seed ^ mix64(kTableSalt + i)));
  count_.assign(m, 0);
  key_sum_.assign(m, 0);
  value_sum_.assign(m, 0);
}

std::uint64_t IBLT::item_key(std::string_view item) const { return hash64(item, seed_ ^ kItemKeySalt); }

std::size_t IBLT::cell_of(std::uint64_t key, std::size_t table) const {
  return table * sub_ + mix64(key ^ table_seeds_[table]) % sub_;
}

void IBLT::apply(std::uint64_t key, std::uint64_t value, std::int64_t sign) {
  for (std::size_t t = 0; t < k_; ++t) {
    const auto c = cell_of(key, t);
    count_[c] += sign;
    key_sum_[c] += sign > 0 ? key : -key;
    value_sum_[c] += sign > 0 ? value : -value;
  }
}

void IBLT::insert_pair(std::uint64_t key, std::uint64_t value) {
  apply(key, value, 1);
  ++n_;
}

void IBLT::erase_pair(std::uint64_t key, std::uint64_t value) {
  apply(key, value, -1);
  if (n_ > 0) --n_;
}

std::pair<IBLTLookup, std::uint64_t> IBLT::get(std::uint64_t key) const {
  for (std::size_t t = 0; t < k_; ++t) {
    const auto c = cell_of(key, t);
    if (count_[c] == 0 && key_sum_[c] == 0) return {IBLTLookup::not_found, 0};
    if (count_[c] == 1) {
      if (key_sum_[c] == key) return {IBLTLookup::found, value_sum_[c]};
      return {IBLTLookup::not_found, 0};
    }
  }
  return {IBLTLookup::unknown, 0};
}

IBLTListing IBLT::list_entries() const {
  IBLT work = *this;
  IBLTListing out;
  std::deque<std::size_t> pure;
  for (std::size_t c = 0; c < work.count_.size(); ++c) {
    if (work.count_[c] == 1) pure.push_back(c);
  }
  while (!pure.empty()) {
    const auto c = pure.front();
    pure.pop_front();
    if (work.count_[c] != 1) continue;
    const auto key = work.key_sum_[c];
    const auto value = work.value_sum_[c];
    out.pairs.emplace_back(key, value);
    work.apply(key, value, -1);
    for (std::size_t t = 0; t < k_; ++t) {
      const auto d = work.cell_of(key, t);
      if (work.count_[d] == 1) pure.push_back(d);
    }
  }
  out.residue = !work.empty();
  return out;
}

bool IBLT::empty() const noexcept {
  for (std::size_t c = 0; c < count_.size(); ++c) {
    if (count_[c] != 0 || key_sum_[c] != 0 || value_sum_[c] != 0) return false;
  }
  return true;
}

std::size_t IBLT::threshold() const noexcept {
  return static_cast<std::size_t>(static_cast<double>(count_.size()) / 1.3);
}

InsertStatus IBLT::insert(std::string_view item) {
  insert_pair(item_key(item), 0);
  return InsertStatus::inserted;
}

QueryOutcome IBLT::query(std::string_view item) const {
  if (get(item_key(item)).first == IBLTLookup::not_found) return QueryOutcome::absent();
  auto out = QueryOutcome::maybe_present();
  out.frequency = count_estimate(item);
  return out;
}

RemoveResult IBLT::remove(std::string_view item) {
  if (!query(item).present()) return RemoveResult::not_found;
  erase_pair(item_key(item), 0);
  return RemoveResult::removed;
}

std::uint64_t IBLT::count_estimate(std::string_view item) const {
  const auto key = item_key(item);
  std::int64_t lo = INT64_MAX;
  for (std::size_t t = 0; t < k_; ++t) lo = std::min(lo, count_[cell_of(key, t)]);
  return lo > 0 ? static_cast<std::uint64_t>(lo) : 0;
}

IBLT IBLT::restore(std::size_t k, std::uint64_t seed, std::vector<std::int64_t> counts,
                   std::vector<std::uint64_t> key_sums, std::vector<std::uint64_t> value_sums, std::uint64_t n) {
  IBLT t(counts.size(), k, seed);
  if (key_sums.size() != counts.size() || value_sums.size() != counts.size()) {
    throw ParameterError("IBLT: field arrays differ in length");
  }
  t.count_ = std::move(counts);
  t.key_sum_ = std::move(key_sums);
  t.value_sum_ = std::move(value_sums);
  t.n_ = n;
  return t;
}

// ---- ShiftingBF ----

ShiftingBF::ShiftingBF(std::size_t m, std::size_t k, std::size_t w_bar, std::uint64_t seed)
    : m_(m), k_(k), w_bar_(w_bar), hashes_(seed) {
  if (m < 2) throw ParameterError("ShiftingBF: m must be at least 2");
  if (k < 2 || k % 2 != 0) throw ParameterError("ShiftingBF: k must be even and at least 2");
  if (w_bar < 2) throw ParameterError("ShiftingBF: w_bar must be at least 2");
  bits_ = BitVector(m + w_bar - 1);
}

std::vector<std::uint64_t> ShiftingBF::base_positions(std::string_view item) const {
  return hashes_.indices(item, k_ / 2, m_);
}

std::uint64_t ShiftingBF::offset(std::string_view item) const { return offset_of(item, w_bar_, hashes_.seed()); }

InsertStatus ShiftingBF::insert(std::string_view item) { return insert(item, offset(item)); }

InsertStatus ShiftingBF::insert(std::string_view item, std::uint64_t aux) {
  if (aux < 1 || aux >= w_bar_) throw ParameterError("ShiftingBF: aux must lie in [1, w_bar - 1]");
  for (const auto i : base_positions(item)) {
    bits_.set(i);
    bits_.set(i + aux);
  }
  ++n_;
  return InsertStatus::inserted;
}

QueryOutcome ShiftingBF::query(std::string_view item) const {
  const auto o = offset(item);
  for (const auto i : base_positions(item)) {
    if (!bits_.test(i) || !bits_.test(i + o)) return QueryOutcome::absent();
  }
  return QueryOutcome::maybe_present();
}

ShBFAnswer ShiftingBF::query_aux(std::string_view item) const {
  ShBFAnswer out;
  const auto pos = base_positions(item);
  out.member = std::all_of(pos.begin(), pos.end(), [&](std::uint64_t i) { return bits_.test(i); });
  if (!out.member) return out;
  for (std::uint64_t a = 1; a < w_bar_; ++a) {
    if (std::all_of(pos.begin(), pos.end(), [&](std::uint64_t i) { return bits_.test(i + a); })) out.aux.push_back(a);
  }
  return out;
}

ShiftingBF ShiftingBF::restore(std::size_t m, std::size_t k, std::size_t w_bar, std::uint64_t seed, BitVector bits,
                               std::uint64_t n) {
  ShiftingBF f(m, k, w_bar, seed);
  if (bits.size() != f.bits_.size()) throw ParameterError("ShiftingBF: bit array length mismatch");
  f.bits_ = std::move(bits);
  f.n_ = n;
  return f;
}

}  // namespace bloomsketch
