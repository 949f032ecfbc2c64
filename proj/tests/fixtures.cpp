#include "fixtures.hpp"

#include <string>

#include "bloomsketch/analysis.hpp"
#include "bloomsketch/classic.hpp"
#include "bloomsketch/compute_variants.hpp"
#include "bloomsketch/dynamic_multiset.hpp"
#include "bloomsketch/fpp_variants.hpp"
#include "bloomsketch/space_variants.hpp"
#include "bloomsketch/special_filters.hpp"
#include "support.hpp"

namespace testing {

using namespace bloomsketch;

namespace {

constexpr std::uint64_t kSeed = 42;
constexpr std::size_t kItems = 20;

std::string item(std::size_t i) { return "g" + std::to_string(i); }

DSBFParams dsbf_params() {
  DSBFParams p;
  p.dim = 32;
  p.eps = 1.0;
  p.delta = 12.0;
  p.capacity = 40;
  return p;
}

std::string bits_of(std::uint64_t x, std::size_t dim) {
  std::string s(dim, '0');
  for (std::size_t i = 0; i < dim; ++i) s[i] = ((x >> (i % 64)) & 1) ? '1' : '0';
  return s;
}

std::vector<std::string> universe() { return keys("u", 200); }

template <class F>
std::unique_ptr<F> filled(F f) {
  auto p = std::make_unique<F>(std::move(f));
  for (std::size_t i = 0; i < kItems; ++i) p->insert(item(i));
  return p;
}

}  // namespace

std::unique_ptr<MembershipFilter> make_fixture(Variant v) {
  const HashFamily h(kSeed);
  switch (v) {
    case Variant::standard: return filled(StandardBF(256, 3, h));
    case Variant::counting: {
      auto f = filled(CountingBF(128, 3, h));
      f->insert(item(0));
      f->remove(item(1));
      return f;
    }
    case Variant::spectral: {
      auto f = filled(SpectralBF(128, 3, SpectralMode::minimum_increase, 8, h));
      f->insert(item(0));
      f->insert(item(0));
      return f;
    }
    case Variant::adaptive: {
      auto f = filled(AdaptiveBF(256, 3, 8, h));
      f->insert(item(2));
      return f;
    }
    case Variant::yes_no: {
      auto f = filled(YesNoBF(1024, 4, 64, 4, 2, h));
      f->report_false_positive(item(3));
      return f;
    }
    case Variant::vicbf: {
      auto f = filled(VICBF(96, 3, VIScheme::bh, {2, 3, 4, 5}, 2, 4, h));
      f->remove(item(4));
      return f;
    }
    case Variant::fingerprint_cbf: return filled(FPCBF(96, 3, 4, 8, h));
    case Variant::retouched: {
      auto f = filled(RetouchedBF(256, 3, h));
      f->clear_random(5, kSeed);
      return f;
    }
    case Variant::accurate_cbf: {
      auto f = filled(ACBF(128, 3, 3, h));
      for (int i = 0; i < 4; ++i) f->insert(item(0));
      return f;
    }
    case Variant::generalized: return filled(GeneralizedBF(256, 1, 3, 0.25, kSeed, h));
    case Variant::multi_class: return filled(MultiClassBF(256, {2, 4}, h));
    case Variant::complement: {
      const auto u = universe();
      const std::vector<std::string> s(u.begin(), u.begin() + 30);
      return std::make_unique<ComplementBF>(s, u, 256, 3, 512, 3, kSeed);
    }
    case Variant::dleft_cbf: return filled(DlCBF(4, 16, 8, 12, 2, kSeed));
    case Variant::bfah: {
      auto f = filled(BFAH(256, 3, h));
      f->insert("keyed", "payload");
      return f;
    }
    case Variant::matrix: {
      auto f = std::make_unique<MatrixBF>(256, 3, ChunkerConfig{ChunkStyle::word_shingles, 3, 1}, 2, h);
      f->add_document("the quick brown fox jumps over the lazy dog");
      f->add_document("a quick brown fox jumps over a sleeping cat");
      f->add_document("line one\nline two");
      return f;
    }
    case Variant::compacted: {
      StandardBF base(256, 3, h);
      for (std::size_t i = 0; i < kItems; ++i) base.insert(item(i));
      return std::make_unique<CompactedBF>(compact(base, 8, 4, kSeed));
    }
    case Variant::one_hashing: return filled(OHBF(256, 3, kSeed));
    case Variant::ultra_fast: return filled(UFBF(4, 4, 16, kSeed));
    case Variant::dynamic: return filled(DynamicBF(64, 3, 8, kSeed));
    case Variant::weighted: {
      std::vector<WBFProfileEntry> profile;
      for (std::size_t i = 0; i < kItems; ++i) profile.push_back({item(i), 1.0 + double(i % 4), 0.5});
      return filled(WeightedBF(256, kItems, 8, profile, kSeed));
    }
    case Variant::iblt: {
      auto f = filled(IBLT(60, 3, kSeed));
      f->insert_pair(7, 3);
      return f;
    }
    case Variant::shifting: {
      auto f = filled(ShiftingBF(256, 4, 16, kSeed));
      f->insert("assoc", 5);
      return f;
    }
    case Variant::deletable: {
      auto f = filled(DeletableBF(256, 3, 8, h));
      f->remove(item(5));
      return f;
    }
    case Variant::distance_sensitive: {
      auto f = std::make_unique<DistanceSensitiveBF>(dsbf_params(), kSeed);
      for (std::size_t i = 0; i < kItems; ++i) f->insert(bits_of(mix64(i + 1), 32));
      return f;
    }
    case Variant::cuckoo: {
      auto f = filled(CuckooFilter(16, 4, 12, 100, kSeed));
      f->remove(item(6));
      return f;
    }
    case Variant::persistent: {
      auto f = std::make_unique<PersistentBF>(10, 128, 3, kSeed);
      for (std::size_t i = 0; i < kItems; ++i) f->insert_at(item(i), static_cast<std::int64_t>(i * 7) - 20);
      f->set_clock(99);
      return f;
    }
    case Variant::high_dimensional: {
      auto f = std::make_unique<HDBF>(256, 3, 8, 0.0, 1.0, kSeed);
      for (std::size_t i = 0; i < kItems; ++i) {
        const double x = double(i) / kItems;
        const std::vector<double> vec{x, 1.0 - x, 0.5};
        f->insert_vector(vec);
      }
      f->insert("plain");
      return f;
    }
  }
  return nullptr;
}

std::vector<std::string> fixture_probes(Variant v, std::size_t n, std::uint64_t seed) {
  Gen g(seed);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    switch (v) {
      case Variant::distance_sensitive: out.push_back(bits_of(g.next(), 32)); break;
      case Variant::complement: out.push_back("u" + std::to_string(g.range(0, 199))); break;
      default:
        // Mix members, near-miss keys and arbitrary bytes.
        if (i % 3 == 0) out.push_back(item(g.range(0, kItems + 5)));
        else out.push_back(g.item());
    }
  }
  if (v == Variant::distance_sensitive) {
    for (std::size_t i = 0; i < kItems && i < n; ++i) out[i] = bits_of(mix64(i + 1), 32);
  }
  return out;
}

}  // namespace testing
