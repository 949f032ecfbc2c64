#include "bloomsketch/fpp_variants.hpp"

#include <algorithm>
#include <random>
#include <string>
#include <utility>

#include "bloomsketch/errors.hpp"

namespace bloomsketch {

namespace {

constexpr std::uint64_t kNoFilterSalt = 0x6e6f2d66696c7472ULL;
constexpr std::uint64_t kIncrementSalt = 0x696e6372656d656eULL;
constexpr std::uint64_t kCellFpSalt = 0x63656c6c2d667021ULL;
constexpr std::uint64_t kSetHashSalt = 0x7365742d68617368ULL;
constexpr std::uint64_t kComplementSalt = 0x636f6d706c656d74ULL;

void require_geometry(const char* who, std::size_t m, std::size_t k) {
  if (m < 2) throw ParameterError(std::string(who) + ": m must be at least 2");
  if (k == 0) throw ParameterError(std::string(who) + ": k must be at least 1");
}

std::vector<std::uint64_t> distinct(std::vector<std::uint64_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

// ---- YesNoBF ----

YesNoBF::YesNoBF(std::size_t p, std::size_t k, std::size_t q, std::size_t r, std::size_t k_prime,
                 HashFamily hashes)
    : k_(k), q_(q), k_prime_(k_prime), hashes_(std::move(hashes)), no_hashes_(hashes_.derive(kNoFilterSalt)) {
  require_geometry("YesNoBF", p, k);
  if (q < 2) throw ParameterError("YesNoBF: q must be at least 2");
  if (r == 0) throw ParameterError("YesNoBF: r must be at least 1");
  if (k_prime == 0 || k_prime >= k) throw ParameterError("YesNoBF: need 1 <= k' < k");
  if (p < 4 * r * q) throw ParameterError("YesNoBF: yes-filter must be much larger than the no-filters (p >= 4rq)");
  yes_ = BitVector(p);
  no_.assign(r, BitVector(q));
}

std::size_t YesNoBF::memory_bits() const noexcept { return yes_.size() + no_.size() * q_; }

std::size_t YesNoBF::select(std::string_view item) const { return hashes_.base(item) % no_.size(); }

bool YesNoBF::yes_positive(std::string_view item) const {
  for (const auto i : hashes_.indices(item, k_, yes_.size())) {
    if (!yes_.test(i)) return false;
  }
  return true;
}

bool YesNoBF::no_positive(std::string_view item) const {
  const auto& no = no_[select(item)];
  for (const auto i : no_hashes_.indices(item, k_prime_, q_)) {
    if (!no.test(i)) return false;
  }
  return true;
}

InsertStatus YesNoBF::insert(std::string_view item) {
  for (const auto i : hashes_.indices(item, k_, yes_.size())) yes_.set(i);
  ++n_;
  return InsertStatus::inserted;
}

QueryOutcome YesNoBF::query(std::string_view item) const {
  if (!yes_positive(item) || no_positive(item)) return QueryOutcome::absent();
  return QueryOutcome::maybe_present();
}

bool YesNoBF::report_false_positive(std::string_view item) {
  if (!yes_positive(item)) return false;
  auto& no = no_[select(item)];
  for (const auto i : no_hashes_.indices(item, k_prime_, q_)) no.set(i);
  ++reported_;
  return true;
}

YesNoBF YesNoBF::restore(BitVector yes, std::vector<BitVector> no, std::size_t k, std::size_t k_prime,
                         HashFamily hashes, std::uint64_t n, std::uint64_t reported) {
  if (no.empty()) throw ParameterError("YesNoBF: no no-filters");
  YesNoBF bf(yes.size(), k, no.front().size(), no.size(), k_prime, std::move(hashes));
  for (const auto& f : no) {
    if (f.size() != bf.q_) throw ParameterError("YesNoBF: no-filters differ in size");
  }
  bf.yes_ = std::move(yes);
  bf.no_ = std::move(no);
  bf.n_ = n;
  bf.reported_ = reported;
  return bf;
}

// ---- VI-CBF ----

bool representable(std::uint64_t target, std::optional<std::uint64_t> count, std::span<const std::uint64_t> L) {
  if (L.empty()) return target == 0 && (!count || *count == 0);
  if (!count) {
    std::vector<char> reach(target + 1, 0);
    reach[0] = 1;
    for (std::uint64_t s = 1; s <= target; ++s) {
      for (const auto v : L) {
        if (v <= s && reach[s - v]) {
          reach[s] = 1;
          break;
        }
      }
    }
    return reach[target] != 0;
  }
  const auto [lo, hi] = std::minmax_element(L.begin(), L.end());
  if (*count * *lo > target || *count * *hi < target) return false;
  // sums reachable with exactly j elements
  std::vector<char> cur(target + 1, 0);
  cur[0] = 1;
  for (std::uint64_t j = 0; j < *count; ++j) {
    std::vector<char> next(target + 1, 0);
    for (std::uint64_t s = 0; s <= target; ++s) {
      if (!cur[s]) continue;
      for (const auto v : L) {
        if (s + v <= target) next[s + v] = 1;
      }
    }
    cur.swap(next);
  }
  return cur[target] != 0;
}

bool vicbf_membership_check(std::uint64_t c1, std::uint64_t c2, std::uint64_t v, std::span<const std::uint64_t> L,
                            VIScheme scheme, bool saturated) {
  if (std::find(L.begin(), L.end(), v) == L.end()) throw ParameterError("vicbf: increment not in L");
  if (saturated) return true;
  if (c2 < v) return false;
  if (scheme == VIScheme::vi) return representable(c2 - v, std::nullopt, L);
  if (c1 == 0) return false;
  if (c1 == 1) return c2 == v;
  return representable(c2 - v, c1 - 1, L);
}

VICBF::VICBF(std::size_t m, std::size_t k, VIScheme scheme, std::vector<std::uint64_t> L, unsigned c1_bits,
             unsigned c2_bits, HashFamily hashes)
    : k_(k), scheme_(scheme), L_(std::move(L)), hashes_(std::move(hashes)) {
  require_geometry("VICBF", m, k);
  if (L_.size() < 2) throw ParameterError("VICBF: L needs at least two increments");
  std::sort(L_.begin(), L_.end());
  if (std::adjacent_find(L_.begin(), L_.end()) != L_.end() || L_.front() == 0) {
    throw ParameterError("VICBF: increments must be distinct and positive");
  }
  c2_ = CounterVector(m, c2_bits);
  if (L_.back() > c2_.max()) throw ParameterError("VICBF: largest increment does not fit in c2");
  if (scheme_ == VIScheme::bh) {
    c1_ = CounterVector(m, c1_bits);
    if (c1_.max() < 2) throw ParameterError("VICBF: c1 needs at least 2 bits");
  }
}

std::size_t VICBF::memory_bits() const noexcept {
  return c2_.size() * c2_.width() + (scheme_ == VIScheme::bh ? c1_.size() * c1_.width() : 0);
}

bool VICBF::cell_saturated(std::size_t i) const noexcept {
  return scheme_ == VIScheme::bh ? c1_.saturated(i) : c2_.saturated(i);
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> VICBF::probes(std::string_view item) const {
  const auto pos = hashes_.indices(item, k_, c2_.size());
  const std::uint64_t h = hash64(item, hashes_.seed() ^ kIncrementSalt);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  out.reserve(k_);
  for (std::size_t i = 0; i < k_; ++i) {
    const auto pick = mix64(h + (i + 1) * 0x9e3779b97f4a7c15ULL) % L_.size();
    out.emplace_back(pos[i], L_[pick]);
  }
  return out;
}

void VICBF::saturate(std::size_t i) {
  if (scheme_ == VIScheme::bh) {
    c1_.put(i, c1_.max());
  } else {
    c2_.put(i, c2_.max());
  }
  ++saturation_events_;
}

InsertStatus VICBF::insert(std::string_view item) {
  for (const auto& [i, v] : probes(item)) {
    if (cell_saturated(i)) {
      ++saturation_events_;
      continue;
    }
    const std::uint64_t sum = c2_.get(i) + v;
    if (scheme_ == VIScheme::bh) {
      // c1's all-ones value is the saturation marker, so real counts stop one short.
      if (c1_.get(i) + 1 >= c1_.max() || sum > c2_.max()) {
        saturate(i);
        continue;
      }
      c1_.put(i, c1_.get(i) + 1);
      c2_.put(i, static_cast<std::uint32_t>(sum));
    } else {
      if (sum >= c2_.max()) {
        saturate(i);
        continue;
      }
      c2_.put(i, static_cast<std::uint32_t>(sum));
    }
  }
  ++n_;
  return InsertStatus::inserted;
}

QueryOutcome VICBF::query(std::string_view item) const {
  for (const auto& [i, v] : probes(item)) {
    const std::uint64_t c1 = scheme_ == VIScheme::bh ? c1_.get(i) : 0;
    if (!vicbf_membership_check(c1, c2_.get(i), v, L_, scheme_, cell_saturated(i))) return QueryOutcome::absent();
  }
  auto out = QueryOutcome::maybe_present();
  out.frequency = count_estimate(item);
  return out;
}

RemoveResult VICBF::remove(std::string_view item) {
  if (!query(item).present()) return RemoveResult::not_found;
  for (const auto& [i, v] : probes(item)) {
    if (cell_saturated(i)) continue;
    if (scheme_ == VIScheme::bh) c1_.put(i, c1_.get(i) - 1);
    c2_.put(i, static_cast<std::uint32_t>(c2_.get(i) - v));
  }
  if (n_ > 0) --n_;
  return RemoveResult::removed;
}

std::uint64_t VICBF::count_estimate(std::string_view item) const {
  std::uint64_t lo = UINT64_MAX;
  for (const auto& [i, v] : probes(item)) {
    const std::uint64_t est = scheme_ == VIScheme::bh ? c1_.get(i) : c2_.get(i) / v;
    lo = std::min(lo, est);
  }
  return lo;
}

VICBF VICBF::restore(VIScheme scheme, std::vector<std::uint64_t> L, CounterVector c1, CounterVector c2,
                     std::size_t k, HashFamily hashes, std::uint64_t n, std::uint64_t saturation_events) {
  const unsigned c1_bits = scheme == VIScheme::bh ? c1.width() : 2;
  VICBF bf(c2.size(), k, scheme, std::move(L), c1_bits, c2.width(), std::move(hashes));
  if (scheme == VIScheme::bh) {
    if (c1.size() != c2.size()) throw ParameterError("VICBF: c1 and c2 lengths differ");
    bf.c1_ = std::move(c1);
  }
  bf.c2_ = std::move(c2);
  bf.n_ = n;
  bf.saturation_events_ = saturation_events;
  return bf;
}

// ---- FPCBF ----

FPCBF::FPCBF(std::size_t m, std::size_t k, unsigned counter_bits, unsigned fp_bits, HashFamily hashes)
    : k_(k), hashes_(std::move(hashes)) {
  require_geometry("FPCBF", m, k);
  counters_ = CounterVector(m, counter_bits);
  fps_ = CounterVector(m, fp_bits);
}

std::uint32_t FPCBF::item_fingerprint(std::string_view item) const {
  return fingerprint(item, fps_.width(), hashes_.seed() ^ kCellFpSalt).value;
}

InsertStatus FPCBF::insert(std::string_view item) {
  const auto fp = item_fingerprint(item);
  for (const auto i : hashes_.indices(item, k_, counters_.size())) {
    if (!counters_.increment(i)) continue;
    fps_.put(i, fps_.get(i) ^ fp);
  }
  ++n_;
  return InsertStatus::inserted;
}

QueryOutcome FPCBF::query(std::string_view item) const {
  const auto fp = item_fingerprint(item);
  const auto pos = hashes_.indices(item, k_, counters_.size());
  for (const auto i : pos) {
    if (counters_.get(i) == 0) return QueryOutcome::absent();
  }
  for (const auto i : pos) {
    if (counters_.get(i) == 1 && fps_.get(i) != fp) return QueryOutcome::absent();
  }
  auto out = QueryOutcome::maybe_present();
  out.frequency = count_estimate(item);
  return out;
}

RemoveResult FPCBF::remove(std::string_view item) {
  if (!query(item).present()) return RemoveResult::not_found;
  const auto fp = item_fingerprint(item);
  for (const auto i : hashes_.indices(item, k_, counters_.size())) {
    if (!counters_.decrement(i)) continue;
    fps_.put(i, fps_.get(i) ^ fp);
  }
  if (n_ > 0) --n_;
  return RemoveResult::removed;
}

std::uint64_t FPCBF::count_estimate(std::string_view item) const {
  std::uint32_t lo = counters_.max();
  for (const auto i : hashes_.indices(item, k_, counters_.size())) lo = std::min(lo, counters_.get(i));
  return lo;
}

FPCBF FPCBF::restore(CounterVector counters, CounterVector fps, std::size_t k, HashFamily hashes, std::uint64_t n) {
  if (counters.size() != fps.size()) throw ParameterError("FPCBF: counter and fingerprint arrays differ in length");
  FPCBF bf(counters.size(), k, counters.width(), fps.width(), std::move(hashes));
  bf.counters_ = std::move(counters);
  bf.fps_ = std::move(fps);
  bf.n_ = n;
  return bf;
}

// ---- RetouchedBF ----

RetouchedBF::RetouchedBF(std::size_t m, std::size_t k, HashFamily hashes) : base_(m, k, std::move(hashes)) {}

RetouchedBF::RetouchedBF(StandardBF base) : base_(std::move(base)) {}

InsertStatus RetouchedBF::insert(std::string_view item) {
  base_.insert(item);
  ++n_;
  return InsertStatus::inserted;
}

QueryOutcome RetouchedBF::query(std::string_view item) const { return base_.query(item); }

ClearReport RetouchedBF::clear_random(std::size_t s, std::uint64_t seed) {
  std::vector<std::uint64_t> ones;
  const auto& bits = base_.bits();
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits.test(i)) ones.push_back(i);
  }
  ClearReport report;
  report.requested = s;
  if (s > ones.size()) {
    report.clamped = true;
    s = ones.size();
  }
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < s; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (ones.size() - i));
    std::swap(ones[i], ones[j]);
    base_.reset_bit(ones[i]);
    report.cleared.push_back(ones[i]);
    cleared_.push_back(ones[i]);
  }
  return report;
}

ClearReport RetouchedBF::clear_targeted(std::span<const std::string> false_positives) {
  ClearReport report;
  report.requested = false_positives.size();
  for (const auto& item : false_positives) {
    if (!base_.query(item).present()) continue;
    const auto pos = base_.positions(item);
    const auto lowest = *std::min_element(pos.begin(), pos.end());
    base_.reset_bit(lowest);
    report.cleared.push_back(lowest);
    cleared_.push_back(lowest);
  }
  return report;
}

RetouchedBF RetouchedBF::restore(StandardBF base, std::vector<std::uint64_t> cleared) {
  RetouchedBF bf(std::move(base));
  bf.n_ = bf.base_.size();
  bf.cleared_ = std::move(cleared);
  return bf;
}

// ---- ACBF ----

std::uint64_t acbf_optimal_first_level(std::uint64_t m, std::uint64_t k, std::uint64_t n) {
  if (m == 0 || k == 0) throw ParameterError("acbf_optimal_first_level: m and k must be positive");
  if (k * n >= 4 * m) throw ParameterError("acbf_optimal_first_level: k*n must be below the 4m bit budget");
  return 4 * m - k * n;
}

ACBF::ACBF(std::size_t s1, std::size_t k, std::size_t levels, HashFamily hashes)
    : k_(k), hashes_(std::move(hashes)) {
  require_geometry("ACBF", s1, k);
  if (levels < 1) throw ParameterError("ACBF: need at least one level");
  levels_.emplace_back(s1);
  for (std::size_t j = 1; j < levels; ++j) levels_.emplace_back(0);
}

std::size_t ACBF::memory_bits() const noexcept {
  std::size_t bits = 0;
  std::size_t cap = levels_.front().size();
  for (std::size_t j = 0; j < levels_.size(); ++j) {
    bits += std::max(cap, levels_[j].size());
    cap = std::max<std::size_t>(cap / 2, 1);
  }
  return bits + overflow_.size() * 64;
}

std::uint64_t ACBF::counter(std::size_t pos) const {
  std::uint64_t count = 0;
  std::size_t idx = pos;
  for (std::size_t j = 0; j < levels_.size(); ++j) {
    if (!levels_[j].test(idx)) return count;
    ++count;
    idx = levels_[j].rank(idx);
  }
  const auto it = overflow_.find(pos);
  return count + (it == overflow_.end() ? 0 : it->second);
}

void ACBF::increment(std::size_t pos) {
  std::size_t idx = pos;
  for (std::size_t j = 0; j < levels_.size(); ++j) {
    auto& level = levels_[j];
    if (!level.test(idx)) {
      level.set(idx);
      if (j + 1 < levels_.size()) levels_[j + 1].insert_bit(level.rank(idx), false);
      return;
    }
    idx = level.rank(idx);
  }
  ++overflow_[pos];
}

void ACBF::decrement(std::size_t pos) {
  std::vector<std::size_t> chain;
  std::size_t idx = pos;
  for (std::size_t j = 0; j < levels_.size() && levels_[j].test(idx); ++j) {
    chain.push_back(idx);
    idx = levels_[j].rank(idx);
  }
  if (chain.empty()) return;
  if (chain.size() == levels_.size()) {
    const auto it = overflow_.find(pos);
    if (it != overflow_.end()) {
      if (--it->second == 0) overflow_.erase(it);
      return;
    }
  }
  const std::size_t d = chain.size() - 1;
  if (d + 1 < levels_.size()) levels_[d + 1].erase_bit(levels_[d].rank(chain[d]));
  levels_[d].reset(chain[d]);
}

InsertStatus ACBF::insert(std::string_view item) {
  for (const auto i : hashes_.indices(item, k_, s1())) increment(i);
  ++n_;
  return InsertStatus::inserted;
}

QueryOutcome ACBF::query(std::string_view item) const {
  const auto pos = hashes_.indices(item, k_, s1());
  for (const auto i : pos) {
    if (!levels_.front().test(i)) return QueryOutcome::absent();
  }
  auto out = QueryOutcome::maybe_present();
  out.frequency = count_estimate(item);
  return out;
}

RemoveResult ACBF::remove(std::string_view item) {
  const auto pos = hashes_.indices(item, k_, s1());
  for (const auto i : pos) {
    if (!levels_.front().test(i)) return RemoveResult::not_found;
  }
  for (const auto i : pos) decrement(i);
  if (n_ > 0) --n_;
  return RemoveResult::removed;
}

std::uint64_t ACBF::count_estimate(std::string_view item) const {
  std::uint64_t lo = UINT64_MAX;
  for (const auto i : hashes_.indices(item, k_, s1())) lo = std::min(lo, counter(i));
  return lo;
}

ACBF ACBF::restore(std::vector<BitVector> levels, std::map<std::uint64_t, std::uint64_t> overflow, std::size_t k,
                   HashFamily hashes, std::uint64_t n) {
  if (levels.empty()) throw ParameterError("ACBF: no levels");
  ACBF bf(levels.front().size(), k, levels.size(), std::move(hashes));
  for (std::size_t j = 1; j < levels.size(); ++j) {
    if (levels[j].size() != levels[j - 1].popcount()) {
      throw ParameterError("ACBF: level size does not match the set bits of the level above");
    }
  }
  for (const auto& [pos, extra] : overflow) {
    if (pos >= levels.front().size() || extra == 0) throw ParameterError("ACBF: bad overflow entry");
  }
  bf.levels_ = std::move(levels);
  bf.overflow_ = std::move(overflow);
  bf.n_ = n;
  return bf;
}

// ---- GeneralizedBF ----

GeneralizedBF::GeneralizedBF(std::size_t m, std::size_t k1, std::size_t k2, HashFamily hashes)
    : k1_(k1), k2_(k2), hashes_(std::move(hashes)), set_hashes_(hashes_.derive(kSetHashSalt)) {
  require_geometry("GeneralizedBF", m, k1);
  if (k2 == 0) throw ParameterError("GeneralizedBF: k2 must be at least 1");
  bits_ = BitVector(m);
}

GeneralizedBF::GeneralizedBF(std::size_t m, std::size_t k1, std::size_t k2, double one_fraction,
                             std::uint64_t init_seed, HashFamily hashes)
    : GeneralizedBF(m, k1, k2, std::move(hashes)) {
  if (!(one_fraction >= 0.0 && one_fraction <= 1.0)) {
    throw ParameterError("GeneralizedBF: initial one-fraction must be in [0, 1]");
  }
  std::mt19937_64 rng(init_seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (u(rng) < one_fraction) bits_.set(i);
  }
}

// A scripted family supplies the reset positions followed by the set
// positions in one list; otherwise the two groups use unrelated families.
GBFTouch GeneralizedBF::touch(std::string_view item) const {
  std::vector<std::uint64_t> g;
  std::vector<std::uint64_t> h;
  if (hashes_.is_scripted()) {
    auto all = hashes_.indices(item, k1_ + k2_, bits_.size());
    g.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k1_));
    h.assign(all.begin() + static_cast<std::ptrdiff_t>(k1_), all.end());
  } else {
    g = hashes_.indices(item, k1_, bits_.size());
    h = set_hashes_.indices(item, k2_, bits_.size());
  }
  GBFTouch out;
  out.reset = distinct(std::move(g));
  for (const auto i : distinct(std::move(h))) {
    if (!std::binary_search(out.reset.begin(), out.reset.end(), i)) out.set.push_back(i);
  }
  return out;
}

void GeneralizedBF::set_bits(BitVector bits) {
  if (bits.size() != bits_.size()) throw ParameterError("GeneralizedBF: bit array length mismatch");
  bits_ = std::move(bits);
}

InsertStatus GeneralizedBF::insert(std::string_view item) {
  const auto t = touch(item);
  for (const auto i : t.reset) bits_.reset(i);
  for (const auto i : t.set) bits_.set(i);
  ++n_;
  return InsertStatus::inserted;
}

QueryOutcome GeneralizedBF::query(std::string_view item) const {
  const auto t = touch(item);
  for (const auto i : t.reset) {
    if (bits_.test(i)) return QueryOutcome::absent();
  }
  for (const auto i : t.set) {
    if (!bits_.test(i)) return QueryOutcome::absent();
  }
  return QueryOutcome::maybe_present();
}

GeneralizedBF GeneralizedBF::restore(BitVector bits, std::size_t k1, std::size_t k2, HashFamily hashes,
                                     std::uint64_t n) {
  GeneralizedBF bf(bits.size(), k1, k2, std::move(hashes));
  bf.bits_ = std::move(bits);
  bf.n_ = n;
  return bf;
}

// ---- MultiClassBF ----

MultiClassBF::MultiClassBF(std::size_t m, std::vector<std::size_t> class_k, HashFamily hashes, Classifier classifier)
    : class_k_(std::move(class_k)), hashes_(std::move(hashes)), classifier_(std::move(classifier)) {
  if (m < 2) throw ParameterError("MultiClassBF: m must be at least 2");
  if (class_k_.empty()) throw ParameterError("MultiClassBF: need at least one class");
  for (const auto k : class_k_) {
    if (k == 0) throw ParameterError("MultiClassBF: every class needs k >= 1");
  }
  bits_ = BitVector(m);
}

std::size_t MultiClassBF::classify(std::string_view item) const {
  const std::size_t cls = classifier_ ? classifier_(item) : 0;
  if (cls >= class_k_.size()) throw InputError("MultiClassBF: classifier returned an unknown class");
  return cls;
}

std::vector<std::uint64_t> MultiClassBF::positions(std::string_view item, std::size_t cls) const {
  if (cls >= class_k_.size()) throw InputError("MultiClassBF: unknown class " + std::to_string(cls));
  return hashes_.indices(item, class_k_[cls], bits_.size());
}

InsertStatus MultiClassBF::insert(std::string_view item) { return insert(item, classify(item)); }

QueryOutcome MultiClassBF::query(std::string_view item) const { return query(item, classify(item)); }

InsertStatus MultiClassBF::insert(std::string_view item, std::size_t cls) {
  for (const auto i : positions(item, cls)) bits_.set(i);
  ++n_;
  return InsertStatus::inserted;
}

QueryOutcome MultiClassBF::query(std::string_view item, std::size_t cls) const {
  for (const auto i : positions(item, cls)) {
    if (!bits_.test(i)) return QueryOutcome::absent();
  }
  return QueryOutcome::maybe_present();
}

MultiClassBF MultiClassBF::restore(BitVector bits, std::vector<std::size_t> class_k, HashFamily hashes,
                                   std::uint64_t n) {
  MultiClassBF bf(bits.size(), std::move(class_k), std::move(hashes));
  bf.bits_ = std::move(bits);
  bf.n_ = n;
  return bf;
}

// ---- ComplementBF ----

ComplementBF::ComplementBF(std::span<const std::string> members, std::span<const std::string> universe,
                           std::size_t m, std::size_t k, std::size_t m_c, std::size_t k_c, std::uint64_t seed)
    : filter_s_(m, k, HashFamily(seed)), filter_c_(m_c, k_c, HashFamily(seed).derive(kComplementSalt)) {
  universe_.insert(universe.begin(), universe.end());
  for (const auto& x : members) {
    if (!universe_.contains(x)) throw InputError("ComplementBF: member outside the universe");
    if (members_.insert(x).second) filter_s_.insert(x);
  }
  for (const auto& x : universe_) {
    if (!members_.contains(x)) filter_c_.insert(x);
  }
  n_ = members_.size();
}

InsertStatus ComplementBF::insert(std::string_view) {
  throw CapabilityError("complement filter is built once from a fixed partition; insert is not supported");
}

QueryOutcome ComplementBF::query(std::string_view item) const {
  const std::string key(item);
  if (!universe_.contains(key)) throw InputError("ComplementBF: item outside the universe");
  if (!filter_s_.query(item).present()) return QueryOutcome::absent();
  QueryOutcome out;
  if (!filter_c_.query(item).present()) {
    out.verdict = Verdict::present;
    return out;
  }
  out.needs_oracle = true;
  out.verdict = members_.contains(key) ? Verdict::present : Verdict::absent;
  return out;
}

std::vector<std::string> ComplementBF::members() const {
  std::vector<std::string> out(members_.begin(), members_.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> ComplementBF::universe() const {
  std::vector<std::string> out(universe_.begin(), universe_.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace bloomsketch
