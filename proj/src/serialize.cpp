#include "bloomsketch/serialize.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string_view>
#include <utility>

#include "bloomsketch/classic.hpp"
#include "bloomsketch/compute_variants.hpp"
#include "bloomsketch/dynamic_multiset.hpp"
#include "bloomsketch/errors.hpp"
#include "bloomsketch/fpp_variants.hpp"
#include "bloomsketch/space_variants.hpp"
#include "bloomsketch/special_filters.hpp"

namespace bloomsketch {
namespace {

constexpr std::uint8_t kMagic[4] = {'B', 'F', 'S', 'K'};

class Writer {
 public:
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) params_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(std::string_view s) {
    u64(s.size());
    params_.insert(params_.end(), s.begin(), s.end());
  }
  void raw_param(std::span<const std::uint8_t> bytes) { params_.insert(params_.end(), bytes.begin(), bytes.end()); }
  void seed_of(const HashFamily& h) {
    if (h.is_scripted()) throw CapabilityError("serialization: scripted hash families cannot be saved");
    u64(h.seed());
  }

  void word(std::uint64_t w) { words_.push_back(w); }
  void words(std::span<const std::uint64_t> ws) { words_.insert(words_.end(), ws.begin(), ws.end()); }
  void bits(const BitVector& b) { words(b.words()); }
  void counters(const CounterVector& c) { words(c.words()); }

  [[nodiscard]] std::vector<std::uint8_t> finish(Variant v, std::span<const std::uint8_t> raw_payload = {},
                                                 bool word_payload = true) const {
    if (params_.size() > std::numeric_limits<std::uint32_t>::max()) {
      throw CapabilityError("serialization: params block exceeds 4 GiB");
    }
    std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
    out.push_back(kFormatVersion);
    out.push_back(static_cast<std::uint8_t>(v));
    const auto len = static_cast<std::uint32_t>(params_.size());
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(len >> (8 * i)));
    out.insert(out.end(), params_.begin(), params_.end());
    if (word_payload) {
      auto put = [&](std::uint64_t x) {
        for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
      };
      put(words_.size());
      for (const auto w : words_) put(w);
    } else {
      out.insert(out.end(), raw_payload.begin(), raw_payload.end());
    }
    return out;
  }

 private:
  std::vector<std::uint8_t> params_;
  std::vector<std::uint64_t> words_;
};

std::uint64_t read_le(std::span<const std::uint8_t> b, std::size_t at, int n) {
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) v |= std::uint64_t{b[at + i]} << (8 * i);
  return v;
}

// Cursor over the params block and the word payload. Every read is bounds
// checked before anything is allocated.
class Reader {
 public:
  Reader(std::span<const std::uint8_t> bytes, std::size_t params_begin, std::size_t params_end)
      : bytes_(bytes), pos_(params_begin), params_end_(params_end), word_pos_(params_end) {}

  std::uint64_t u64() {
    if (params_end_ - pos_ < 8) throw FormatError("params block truncated", pos_);
    const auto v = read_le(bytes_, pos_, 8);
    pos_ += 8;
    return v;
  }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::size_t size() {
    const auto at = pos_;
    const auto v = u64();
    if (v > bytes_.size()) throw FormatError("implausible size in params block", at);
    return static_cast<std::size_t>(v);
  }
  std::string str() {
    const auto n = size();
    if (params_end_ - pos_ < n) throw FormatError("params string truncated", pos_);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::span<const std::uint8_t> raw_param(std::size_t n) {
    if (params_end_ - pos_ < n) throw FormatError("params block truncated", pos_);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  void end_params() {
    if (pos_ != params_end_) throw FormatError("unread bytes in params block", pos_);
  }

  // Word payload.
  void begin_words() {
    if (bytes_.size() - word_pos_ < 8) throw FormatError("payload word count truncated", word_pos_);
    word_count_ = read_le(bytes_, word_pos_, 8);
    word_pos_ += 8;
    const auto available = (bytes_.size() - word_pos_) / 8;
    if (word_count_ > available) throw FormatError("payload truncated", bytes_.size());
    if (bytes_.size() - word_pos_ != word_count_ * 8) {
      throw FormatError("trailing bytes after payload", word_pos_ + word_count_ * 8);
    }
  }
  std::vector<std::uint64_t> take(std::uint64_t n) {
    if (n > word_count_ - words_read_) throw FormatError("payload shorter than the declared arrays", word_pos_);
    std::vector<std::uint64_t> out(n);
    for (auto& w : out) {
      w = read_le(bytes_, word_pos_, 8);
      word_pos_ += 8;
    }
    words_read_ += n;
    return out;
  }
  std::uint64_t word() { return take(1).front(); }
  void end_words() {
    if (words_read_ != word_count_) throw FormatError("payload longer than the declared arrays", word_pos_);
  }

  BitVector bits(std::uint64_t size) {
    if (size / 64 > word_count_ - words_read_) throw FormatError("payload shorter than the declared arrays", word_pos_);
    return BitVector::from_words(size, take((size + 63) / 64));
  }
  CounterVector counters(std::uint64_t size, unsigned width) {
    if (width == 0 || width > 32 || !std::has_single_bit(width)) {
      throw FormatError("bad counter width", pos_);
    }
    const std::uint64_t per = 64 / width;
    return CounterVector::from_words(size, width, take((size + per - 1) / per));
  }

  [[nodiscard]] std::size_t word_offset() const noexcept { return word_pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_;
  std::size_t params_end_;
  std::size_t word_pos_;
  std::uint64_t word_count_ = 0;
  std::uint64_t words_read_ = 0;
};

template <class T>
const T& as(const MembershipFilter& f) {
  return dynamic_cast<const T&>(f);
}

template <class T>
std::unique_ptr<MembershipFilter> boxed(T&& f) {
  return std::make_unique<std::decay_t<T>>(std::forward<T>(f));
}

// ---- save ----

std::vector<std::uint8_t> save_compacted(const CompactedBF& c) {
  Writer w;
  const auto wire = c.to_wire();
  const std::span<const std::uint8_t> all(wire);
  w.raw_param(all.first(7));
  w.u64(c.k());
  w.seed_of(c.hashes());
  w.u64(static_cast<std::uint64_t>(c.mode()));
  w.u64(c.size());
  return w.finish(Variant::compacted, all.subspan(7), false);
}

void save_params(const MembershipFilter& f, Writer& w) {
  switch (f.variant()) {
    case Variant::standard: {
      const auto& x = as<StandardBF>(f);
      w.u64(x.m()), w.u64(x.k()), w.seed_of(x.hashes()), w.u64(x.size());
      w.bits(x.bits());
      return;
    }
    case Variant::counting: {
      const auto& x = as<CountingBF>(f);
      w.u64(x.m()), w.u64(x.k()), w.seed_of(x.hashes()), w.u64(x.size()), w.u64(x.saturation_events());
      w.counters(x.counters());
      return;
    }
    case Variant::spectral: {
      const auto& x = as<SpectralBF>(f);
      w.u64(x.counters().size()), w.u64(x.k()), w.u64(static_cast<std::uint64_t>(x.mode()));
      w.u64(x.counters().width()), w.seed_of(x.hashes()), w.u64(x.size()), w.u64(x.saturation_events());
      w.counters(x.counters());
      return;
    }
    case Variant::adaptive: {
      const auto& x = as<AdaptiveBF>(f);
      w.u64(x.bits().size()), w.u64(x.k()), w.u64(x.max_probe()), w.seed_of(x.hashes()), w.u64(x.size());
      w.bits(x.bits());
      return;
    }
    case Variant::yes_no: {
      const auto& x = as<YesNoBF>(f);
      w.u64(x.p()), w.u64(x.q()), w.u64(x.r()), w.u64(x.k()), w.u64(x.k_prime());
      w.seed_of(x.hashes()), w.u64(x.size()), w.u64(x.reported());
      w.bits(x.yes_bits());
      for (const auto& no : x.no_bits()) w.bits(no);
      return;
    }
    case Variant::vicbf: {
      const auto& x = as<VICBF>(f);
      w.u64(x.m()), w.u64(x.k()), w.u64(static_cast<std::uint64_t>(x.scheme()));
      w.u64(x.scheme() == VIScheme::bh ? x.c1().width() : 0), w.u64(x.c2().width());
      w.u64(x.increments().size());
      for (const auto v : x.increments()) w.u64(v);
      w.seed_of(x.hashes()), w.u64(x.size()), w.u64(x.saturation_events());
      if (x.scheme() == VIScheme::bh) w.counters(x.c1());
      w.counters(x.c2());
      return;
    }
    case Variant::fingerprint_cbf: {
      const auto& x = as<FPCBF>(f);
      w.u64(x.m()), w.u64(x.k()), w.u64(x.counters().width()), w.u64(x.fingerprints().width());
      w.seed_of(x.hashes()), w.u64(x.size());
      w.counters(x.counters()), w.counters(x.fingerprints());
      return;
    }
    case Variant::retouched: {
      const auto& x = as<RetouchedBF>(f);
      w.u64(x.base().m()), w.u64(x.base().k()), w.seed_of(x.base().hashes()), w.u64(x.size());
      w.u64(x.cleared_log().size());
      w.bits(x.base().bits());
      w.words(x.cleared_log());
      return;
    }
    case Variant::accurate_cbf: {
      const auto& x = as<ACBF>(f);
      w.u64(x.level_count());
      for (const auto& level : x.levels()) w.u64(level.size());
      w.u64(x.k()), w.seed_of(x.hashes()), w.u64(x.size()), w.u64(x.overflow().size());
      for (const auto& level : x.levels()) w.bits(level);
      for (const auto& [pos, extra] : x.overflow()) w.word(pos), w.word(extra);
      return;
    }
    case Variant::generalized: {
      const auto& x = as<GeneralizedBF>(f);
      w.u64(x.m()), w.u64(x.k1()), w.u64(x.k2()), w.seed_of(x.hashes()), w.u64(x.size());
      w.bits(x.bits());
      return;
    }
    case Variant::multi_class: {
      const auto& x = as<MultiClassBF>(f);
      w.u64(x.m()), w.u64(x.class_k().size());
      for (const auto k : x.class_k()) w.u64(k);
      w.seed_of(x.hashes()), w.u64(x.size());
      w.bits(x.bits());
      return;
    }
    case Variant::complement: {
      const auto& x = as<ComplementBF>(f);
      w.u64(x.filter_s().m()), w.u64(x.filter_s().k());
      w.u64(x.filter_complement().m()), w.u64(x.filter_complement().k());
      w.seed_of(x.filter_s().hashes());
      auto members = x.members();
      auto universe = x.universe();
      std::sort(members.begin(), members.end());
      std::sort(universe.begin(), universe.end());
      w.u64(members.size());
      for (const auto& s : members) w.str(s);
      w.u64(universe.size());
      for (const auto& s : universe) w.str(s);
      w.bits(x.filter_s().bits()), w.bits(x.filter_complement().bits());
      return;
    }
    case Variant::dleft_cbf: {
      const auto& x = as<DlCBF>(f);
      w.u64(x.d()), w.u64(x.b()), w.u64(x.cells_per_bucket()), w.u64(x.remainder_bits()), w.u64(x.counter_bits());
      w.u64(x.seed()), w.u64(x.size()), w.u64(x.overflows());
      for (std::size_t i = 0; i < x.remainders().size(); ++i) {
        w.word(std::uint64_t{x.remainders()[i]} | (std::uint64_t{x.cell_counters()[i]} << 32));
      }
      return;
    }
    case Variant::bfah: {
      const auto& x = as<BFAH>(f);
      w.u64(x.bits().size()), w.u64(x.k()), w.seed_of(x.hashes()), w.u64(x.size()), w.u64(x.collisions());
      w.u64(x.slots().size());
      for (const auto& [addr, entries] : x.slots()) {
        w.u64(addr), w.u64(entries.size());
        for (const auto& e : entries) w.str(e.item), w.str(e.payload);
      }
      w.bits(x.bits());
      return;
    }
    case Variant::matrix: {
      const auto& x = as<MatrixBF>(f);
      w.u64(x.m()), w.u64(x.k()), w.u64(static_cast<std::uint64_t>(x.chunker().style));
      w.u64(x.chunker().shingle_words), w.u64(x.chunker().stride), w.u64(x.threshold());
      w.seed_of(x.hashes()), w.u64(x.documents());
      for (std::size_t i = 0; i < x.documents(); ++i) w.bits(x.row(i).bits());
      return;
    }
    case Variant::one_hashing: {
      const auto& x = as<OHBF>(f);
      w.u64(x.moduli().size());
      for (const auto m : x.moduli()) w.u64(m);
      w.u64(x.seed()), w.u64(x.size());
      w.bits(x.bits());
      return;
    }
    case Variant::ultra_fast: {
      const auto& x = as<UFBF>(f);
      w.u64(x.l()), w.u64(x.k()), w.u64(x.w()), w.u64(x.seed()), w.u64(x.size());
      w.bits(x.bits());
      return;
    }
    case Variant::dynamic: {
      const auto& x = as<DynamicBF>(f);
      w.u64(x.m()), w.u64(x.k()), w.u64(x.capacity()), w.seed_of(x.hashes());
      w.u64(x.sub_filters().size());
      for (const auto& s : x.sub_filters()) w.u64(s.size()), w.u64(s.saturation_events());
      for (const auto& s : x.sub_filters()) w.counters(s.counters());
      return;
    }
    case Variant::weighted: {
      const auto& x = as<WeightedBF>(f);
      w.u64(x.bits().size()), w.u64(x.expected_n()), w.u64(x.k_max()), w.u64(x.seed()), w.u64(x.size());
      w.u64(x.profile().size());
      for (const auto& e : x.profile()) w.str(e.key), w.f64(e.query_frequency), w.f64(e.membership);
      w.bits(x.bits());
      return;
    }
    case Variant::iblt: {
      const auto& x = as<IBLT>(f);
      w.u64(x.m()), w.u64(x.k()), w.u64(x.seed()), w.u64(x.size());
      for (const auto c : x.counts()) w.word(static_cast<std::uint64_t>(c));
      w.words(x.key_sums()), w.words(x.value_sums());
      return;
    }
    case Variant::shifting: {
      const auto& x = as<ShiftingBF>(f);
      w.u64(x.m()), w.u64(x.k()), w.u64(x.w_bar()), w.u64(x.seed()), w.u64(x.size());
      w.bits(x.bits());
      return;
    }
    case Variant::deletable: {
      const auto& x = as<DeletableBF>(f);
      w.u64(x.m()), w.u64(x.k()), w.u64(x.regions()), w.seed_of(x.hashes()), w.u64(x.size());
      w.bits(x.bits()), w.bits(x.collision_map());
      return;
    }
    case Variant::distance_sensitive: {
      const auto& x = as<DistanceSensitiveBF>(f);
      const auto& p = x.params();
      w.u64(p.dim), w.f64(p.eps), w.f64(p.delta), w.u64(p.capacity), w.f64(p.beta), w.f64(p.gamma);
      w.f64(p.bucket_bits_per_entry), w.u64(p.bucket_k), w.u64(x.seed()), w.u64(x.size());
      w.u64(x.buckets().m());
      w.bits(x.buckets().bits());
      return;
    }
    case Variant::cuckoo: {
      const auto& x = as<CuckooFilter>(f);
      w.u64(x.bucket_count()), w.u64(x.slots_per_bucket()), w.u64(x.fp_bits()), w.u64(x.max_kicks());
      w.u64(x.seed()), w.u64(x.size());
      const auto& s = x.slots();
      for (std::size_t i = 0; i < s.size(); i += 2) {
        const std::uint64_t hi = i + 1 < s.size() ? s[i + 1] : 0;
        w.word(std::uint64_t{s[i]} | (hi << 32));
      }
      return;
    }
    case Variant::persistent: {
      const auto& x = as<PersistentBF>(f);
      w.i64(x.granularity()), w.u64(x.m()), w.u64(x.k()), w.u64(x.seed()), w.i64(x.clock()), w.u64(x.size());
      w.u64(x.segments().size());
      for (const auto& [slot, bf] : x.segments()) w.i64(slot), w.u64(bf.size());
      for (const auto& [slot, bf] : x.segments()) w.bits(bf.bits());
      return;
    }
    case Variant::high_dimensional: {
      const auto& x = as<HDBF>(f);
      w.u64(x.m()), w.u64(x.k()), w.u64(x.q()), w.f64(x.low()), w.f64(x.high()), w.u64(x.seed()), w.u64(x.size());
      w.counters(x.counters());
      return;
    }
    case Variant::compacted:
      break;
  }
  throw CapabilityError("serialization: variant " + std::string(to_string(f.variant())) + " is not serializable");
}

// ---- load ----

std::uint64_t checked_product(std::initializer_list<std::uint64_t> factors) {
  std::uint64_t out = 1;
  for (const auto f : factors) {
    if (f != 0 && out > std::numeric_limits<std::uint64_t>::max() / f) throw ParameterError("geometry overflows");
    out *= f;
  }
  return out;
}

unsigned narrow_width(std::uint64_t v) {
  if (v > 32) throw ParameterError("width out of range");
  return static_cast<unsigned>(v);
}

std::unique_ptr<MembershipFilter> load_compacted(Reader& r, std::span<const std::uint8_t> bytes,
                                                 std::size_t payload_at) {
  const auto header = r.raw_param(7);
  const auto k = r.size();
  const auto seed = r.u64();
  const auto mode = r.u64();
  const auto n = r.u64();
  r.end_params();
  if (mode > 1) throw FormatError("unknown compaction mode", kHeaderBytes + 7 + 16);
  std::vector<std::uint8_t> wire(header.begin(), header.end());
  wire.insert(wire.end(), bytes.begin() + static_cast<std::ptrdiff_t>(payload_at), bytes.end());
  CompactedBF c = [&] {
    try {
      return CompactedBF::from_wire(wire, k, HashFamily(seed), static_cast<CompactionMode>(mode));
    } catch (const FormatError& e) {
      // Re-base wire offsets onto the file: the header lives in params, the
      // index array at payload_at.
      const auto off = e.offset() < 7 ? kHeaderBytes + e.offset() : payload_at + (e.offset() - 7);
      throw FormatError(e.what(), off);
    }
  }();
  return boxed(CompactedBF::from_indices(c.w(), c.nb(), c.indices(), c.k(), c.hashes(), c.mode(), n));
}

std::unique_ptr<MembershipFilter> load_body(Variant v, Reader& r) {
  switch (v) {
    case Variant::standard: {
      const auto m = r.u64(), k = r.size(), seed = r.u64(), n = r.u64();
      r.end_params(), r.begin_words();
      return boxed(StandardBF::restore(r.bits(m), k, HashFamily(seed), n));
    }
    case Variant::counting: {
      const auto m = r.u64(), k = r.size(), seed = r.u64(), n = r.u64(), sat = r.u64();
      r.end_params(), r.begin_words();
      return boxed(CountingBF::restore(r.counters(m, CountingBF::kCounterWidth), k, HashFamily(seed), n, sat));
    }
    case Variant::spectral: {
      const auto m = r.u64(), k = r.size(), mode = r.u64(), width = r.u64(), seed = r.u64(), n = r.u64(),
                 sat = r.u64();
      r.end_params(), r.begin_words();
      if (mode > 1) throw ParameterError("unknown spectral mode");
      return boxed(SpectralBF::restore(r.counters(m, narrow_width(width)), k, static_cast<SpectralMode>(mode),
                                       HashFamily(seed), n, sat));
    }
    case Variant::adaptive: {
      const auto m = r.u64(), k = r.size(), probe = r.size(), seed = r.u64(), n = r.u64();
      r.end_params(), r.begin_words();
      return boxed(AdaptiveBF::restore(r.bits(m), k, probe, HashFamily(seed), n));
    }
    case Variant::yes_no: {
      const auto p = r.u64(), q = r.u64(), nr = r.size(), k = r.size(), kp = r.size(), seed = r.u64(),
                 n = r.u64(), reported = r.u64();
      r.end_params(), r.begin_words();
      auto yes = r.bits(p);
      std::vector<BitVector> no;
      for (std::size_t i = 0; i < nr; ++i) no.push_back(r.bits(q));
      return boxed(YesNoBF::restore(std::move(yes), std::move(no), k, kp, HashFamily(seed), n, reported));
    }
    case Variant::vicbf: {
      const auto m = r.u64(), k = r.size(), scheme = r.u64(), c1w = r.u64(), c2w = r.u64();
      std::vector<std::uint64_t> L(r.size());
      for (auto& x : L) x = r.u64();
      const auto seed = r.u64(), n = r.u64(), sat = r.u64();
      r.end_params(), r.begin_words();
      if (scheme > 1) throw ParameterError("unknown VI scheme");
      const auto s = static_cast<VIScheme>(scheme);
      CounterVector c1 = s == VIScheme::bh ? r.counters(m, narrow_width(c1w)) : CounterVector{};
      auto c2 = r.counters(m, narrow_width(c2w));
      return boxed(VICBF::restore(s, std::move(L), std::move(c1), std::move(c2), k, HashFamily(seed), n, sat));
    }
    case Variant::fingerprint_cbf: {
      const auto m = r.u64(), k = r.size(), cw = r.u64(), fw = r.u64(), seed = r.u64(), n = r.u64();
      r.end_params(), r.begin_words();
      auto counters = r.counters(m, narrow_width(cw));
      auto fps = r.counters(m, narrow_width(fw));
      return boxed(FPCBF::restore(std::move(counters), std::move(fps), k, HashFamily(seed), n));
    }
    case Variant::retouched: {
      const auto m = r.u64(), k = r.size(), seed = r.u64(), n = r.u64(), cleared = r.size();
      r.end_params(), r.begin_words();
      auto base = StandardBF::restore(r.bits(m), k, HashFamily(seed), n);
      return boxed(RetouchedBF::restore(std::move(base), r.take(cleared)));
    }
    case Variant::accurate_cbf: {
      std::vector<std::uint64_t> sizes(r.size());
      for (auto& s : sizes) s = r.u64();
      const auto k = r.size(), seed = r.u64(), n = r.u64(), overflow_count = r.size();
      r.end_params(), r.begin_words();
      std::vector<BitVector> levels;
      for (const auto s : sizes) levels.push_back(r.bits(s));
      std::map<std::uint64_t, std::uint64_t> overflow;
      for (std::size_t i = 0; i < overflow_count; ++i) {
        const auto pos = r.word();
        overflow[pos] = r.word();
      }
      return boxed(ACBF::restore(std::move(levels), std::move(overflow), k, HashFamily(seed), n));
    }
    case Variant::generalized: {
      const auto m = r.u64(), k1 = r.size(), k2 = r.size(), seed = r.u64(), n = r.u64();
      r.end_params(), r.begin_words();
      return boxed(GeneralizedBF::restore(r.bits(m), k1, k2, HashFamily(seed), n));
    }
    case Variant::multi_class: {
      const auto m = r.u64();
      std::vector<std::size_t> class_k(r.size());
      for (auto& k : class_k) k = r.size();
      const auto seed = r.u64(), n = r.u64();
      r.end_params(), r.begin_words();
      return boxed(MultiClassBF::restore(r.bits(m), std::move(class_k), HashFamily(seed), n));
    }
    case Variant::complement: {
      const auto m = r.u64(), k = r.size(), mc = r.u64(), kc = r.size(), seed = r.u64();
      std::vector<std::string> members(r.size());
      for (auto& s : members) s = r.str();
      std::vector<std::string> universe(r.size());
      for (auto& s : universe) s = r.str();
      r.end_params(), r.begin_words();
      const auto at = r.word_offset();
      const auto bits_s = r.bits(m);
      const auto bits_c = r.bits(mc);
      ComplementBF c(members, universe, m, k, mc, kc, seed);
      if (c.filter_s().bits() != bits_s || c.filter_complement().bits() != bits_c) {
        throw FormatError("complement filter bits do not match the stored sets", at);
      }
      return boxed(std::move(c));
    }
    case Variant::dleft_cbf: {
      const auto d = r.size(), b = r.size(), cells = r.size(), rb = r.u64(), cb = r.u64(), seed = r.u64(),
                 n = r.u64(), overflows = r.u64();
      r.end_params(), r.begin_words();
      const auto packed = r.take(checked_product({d, b, cells}));
      std::vector<std::uint32_t> rem(packed.size()), cnt(packed.size());
      for (std::size_t i = 0; i < packed.size(); ++i) {
        rem[i] = static_cast<std::uint32_t>(packed[i]);
        cnt[i] = static_cast<std::uint32_t>(packed[i] >> 32);
      }
      return boxed(DlCBF::restore(d, b, cells, narrow_width(rb), narrow_width(cb), seed, std::move(rem),
                                  std::move(cnt), n, overflows));
    }
    case Variant::bfah: {
      const auto m = r.u64(), k = r.size(), seed = r.u64(), n = r.u64(), collisions = r.u64();
      std::map<std::uint64_t, std::vector<BFAHEntry>> slots;
      const auto addresses = r.size();
      for (std::size_t i = 0; i < addresses; ++i) {
        const auto addr = r.u64();
        auto& entries = slots[addr];
        entries.resize(r.size());
        for (auto& e : entries) e.item = r.str(), e.payload = r.str();
      }
      r.end_params(), r.begin_words();
      return boxed(BFAH::restore(r.bits(m), k, HashFamily(seed), std::move(slots), n, collisions));
    }
    case Variant::matrix: {
      const auto m = r.u64(), k = r.size(), style = r.u64(), shingle = r.size(), stride = r.size(),
                 threshold = r.size(), seed = r.u64(), rows = r.size();
      r.end_params(), r.begin_words();
      if (style > 1) throw ParameterError("unknown chunk style");
      std::vector<BitVector> bits;
      for (std::size_t i = 0; i < rows; ++i) bits.push_back(r.bits(m));
      ChunkerConfig chunker{static_cast<ChunkStyle>(style), shingle, stride};
      return boxed(MatrixBF::restore(m, k, chunker, threshold, HashFamily(seed), std::move(bits)));
    }
    case Variant::one_hashing: {
      std::vector<std::uint64_t> moduli(r.size());
      std::uint64_t total = 0;
      for (auto& x : moduli) {
        x = r.u64();
        if (x > std::numeric_limits<std::uint64_t>::max() - total) throw ParameterError("partition sizes overflow");
        total += x;
      }
      const auto seed = r.u64(), n = r.u64();
      r.end_params(), r.begin_words();
      return boxed(OHBF::restore(std::move(moduli), seed, r.bits(total), n));
    }
    case Variant::ultra_fast: {
      const auto l = r.size(), k = r.size(), w = r.size(), seed = r.u64(), n = r.u64();
      r.end_params(), r.begin_words();
      return boxed(UFBF::restore(l, k, w, seed, r.bits(checked_product({l, k, w})), n));
    }
    case Variant::dynamic: {
      const auto m = r.u64(), k = r.size(), cap = r.u64(), seed = r.u64();
      std::vector<std::pair<std::uint64_t, std::uint64_t>> meta(r.size());
      for (auto& [n, sat] : meta) n = r.u64(), sat = r.u64();
      r.end_params(), r.begin_words();
      std::vector<CountingBF> subs;
      for (const auto& [n, sat] : meta) {
        subs.push_back(CountingBF::restore(r.counters(m, CountingBF::kCounterWidth), k, HashFamily(seed), n, sat));
      }
      return boxed(DynamicBF::restore(m, k, cap, HashFamily(seed), std::move(subs)));
    }
    case Variant::weighted: {
      const auto m = r.u64(), expected = r.size(), k_max = r.size(), seed = r.u64(), n = r.u64();
      std::vector<WBFProfileEntry> profile(r.size());
      for (auto& e : profile) e.key = r.str(), e.query_frequency = r.f64(), e.membership = r.f64();
      r.end_params(), r.begin_words();
      return boxed(WeightedBF::restore(expected, k_max, std::move(profile), seed, r.bits(m), n));
    }
    case Variant::iblt: {
      const auto m = r.u64(), k = r.size(), seed = r.u64(), n = r.u64();
      r.end_params(), r.begin_words();
      const auto raw_counts = r.take(m);
      std::vector<std::int64_t> counts(raw_counts.size());
      std::transform(raw_counts.begin(), raw_counts.end(), counts.begin(),
                     [](std::uint64_t x) { return static_cast<std::int64_t>(x); });
      auto keys = r.take(m);
      auto values = r.take(m);
      return boxed(IBLT::restore(k, seed, std::move(counts), std::move(keys), std::move(values), n));
    }
    case Variant::shifting: {
      const auto m = r.u64(), k = r.size(), w_bar = r.size(), seed = r.u64(), n = r.u64();
      r.end_params(), r.begin_words();
      if (w_bar == 0) throw ParameterError("w_bar must be positive");
      return boxed(ShiftingBF::restore(m, k, w_bar, seed, r.bits(std::uint64_t{m} + w_bar - 1), n));
    }
    case Variant::deletable: {
      const auto m = r.u64(), k = r.size(), regions = r.u64(), seed = r.u64(), n = r.u64();
      r.end_params(), r.begin_words();
      auto bits = r.bits(m);
      auto collisions = r.bits(regions);
      return boxed(DeletableBF::restore(k, HashFamily(seed), std::move(bits), std::move(collisions), n));
    }
    case Variant::distance_sensitive: {
      DSBFParams p;
      p.dim = r.u64(), p.eps = r.f64(), p.delta = r.f64(), p.capacity = r.u64(), p.beta = r.f64();
      p.gamma = r.f64(), p.bucket_bits_per_entry = r.f64(), p.bucket_k = r.size();
      const auto seed = r.u64(), n = r.u64(), bucket_m = r.u64();
      r.end_params(), r.begin_words();
      if (!(p.bucket_bits_per_entry > 0.0 && p.bucket_bits_per_entry <= 1e6)) {
        throw ParameterError("bucket bits per entry out of range");
      }
      auto bucket_bits = r.bits(bucket_m);
      // Reject geometry that disagrees with the stored array before allocating it.
      if (p.dim > (std::uint64_t{1} << 24)) throw ParameterError("dim out of range");
      const auto geo = dsbf_geometry(p);
      const double expect = std::max(2.0, std::ceil(p.bucket_bits_per_entry * double(geo.k) * double(p.capacity)));
      if (expect != double(bucket_m)) throw ParameterError("bucket array length mismatch");
      return boxed(DistanceSensitiveBF::restore(p, seed, std::move(bucket_bits), n));
    }
    case Variant::cuckoo: {
      const auto buckets = r.u64(), b = r.size(), fbits = r.u64(), kicks = r.size(), seed = r.u64(), n = r.u64();
      r.end_params(), r.begin_words();
      const std::uint64_t total = checked_product({buckets, b});
      const auto packed = r.take((total + 1) / 2);
      std::vector<std::uint32_t> slots(total);
      for (std::size_t i = 0; i < total; ++i) slots[i] = static_cast<std::uint32_t>(packed[i / 2] >> (32 * (i % 2)));
      return boxed(CuckooFilter::restore(buckets, b, narrow_width(fbits), kicks, seed, std::move(slots), n));
    }
    case Variant::persistent: {
      const auto g = r.i64();
      const auto m = r.u64(), k = r.size(), seed = r.u64();
      const auto clock = r.i64();
      const auto n = r.u64();
      std::vector<std::pair<std::int64_t, std::uint64_t>> meta(r.size());
      for (auto& [slot, count] : meta) slot = r.i64(), count = r.u64();
      r.end_params(), r.begin_words();
      std::map<std::int64_t, StandardBF> segments;
      for (const auto& [slot, count] : meta) {
        if (!segments.emplace(slot, StandardBF::restore(r.bits(m), k, HashFamily(seed), count)).second) {
          throw ParameterError("duplicate time slot");
        }
      }
      return boxed(PersistentBF::restore(g, m, k, seed, clock, std::move(segments), n));
    }
    case Variant::high_dimensional: {
      const auto m = r.u64(), k = r.size(), q = r.u64();
      const auto low = r.f64(), high = r.f64();
      const auto seed = r.u64(), n = r.u64();
      r.end_params(), r.begin_words();
      if (q == 0 || q > std::numeric_limits<unsigned>::max()) throw ParameterError("q out of range");
      return boxed(HDBF::restore(k, static_cast<unsigned>(q), low, high, seed, r.counters(m, HDBF::kCounterWidth),
                                 n));
    }
    case Variant::compacted:
      break;
  }
  throw FormatError("unknown variant tag", 5);
}

}  // namespace

bool is_serializable(Variant v) noexcept {
  return static_cast<std::uint8_t>(v) >= static_cast<std::uint8_t>(Variant::standard) &&
         static_cast<std::uint8_t>(v) <= static_cast<std::uint8_t>(Variant::high_dimensional);
}

std::vector<std::uint8_t> save_bytes(const MembershipFilter& filter) {
  if (filter.variant() == Variant::compacted) return save_compacted(as<CompactedBF>(filter));
  Writer w;
  save_params(filter, w);
  return w.finish(filter.variant());
}

std::unique_ptr<MembershipFilter> load_bytes(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw FormatError("file shorter than the magic", bytes.size());
  if (!std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) throw FormatError("bad magic", 0);
  if (bytes.size() < kHeaderBytes) throw FormatError("header truncated", bytes.size());
  if (bytes[4] != kFormatVersion) throw FormatError("unsupported format version " + std::to_string(bytes[4]), 4);
  const auto tag = bytes[5];
  if (tag < static_cast<std::uint8_t>(Variant::standard) || tag > static_cast<std::uint8_t>(Variant::high_dimensional)) {
    throw FormatError("unknown variant tag " + std::to_string(tag), 5);
  }
  const auto variant = static_cast<Variant>(tag);
  const auto params_len = read_le(bytes, 6, 4);
  if (bytes.size() - kHeaderBytes < params_len) throw FormatError("params block truncated", bytes.size());
  const std::size_t params_end = kHeaderBytes + params_len;
  Reader r(bytes, kHeaderBytes, params_end);
  try {
    if (variant == Variant::compacted) return load_compacted(r, bytes, params_end);
    auto filter = load_body(variant, r);
    r.end_words();
    return filter;
  } catch (const FormatError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    // ParameterError / InputError from a restore: the bytes decode but describe
    // an impossible filter.
    throw FormatError(std::string("inconsistent filter state: ") + e.what(), kHeaderBytes);
  } catch (const std::length_error& e) {
    throw FormatError(std::string("implausible sizes: ") + e.what(), kHeaderBytes);
  }
}

void save_file(const MembershipFilter& filter, const std::string& path) {
  const auto bytes = save_bytes(filter);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

std::unique_ptr<MembershipFilter> load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return load_bytes(bytes);
}

}  // namespace bloomsketch
