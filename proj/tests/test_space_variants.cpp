#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "bloomsketch/errors.hpp"
#include "bloomsketch/space_variants.hpp"
#include "support.hpp"

using namespace bloomsketch;

// ---------------------------------------------------------------- d-left CBF

TEST_CASE("d-left: first insert fills one cell, duplicates share it") {
  DlCBF f(4, 16, 8, 12, 2, 1);
  f.insert("x");
  std::size_t used = 0;
  for (auto c : f.cell_counters()) used += c != 0;
  CHECK(used == 1);
  f.insert("x");
  used = 0;
  std::uint32_t count = 0;
  for (auto c : f.cell_counters()) {
    used += c != 0;
    count = std::max(count, c);
  }
  CHECK(used == 1);
  CHECK(count == 2);
  CHECK(f.count_estimate("x") == 2);
}

TEST_CASE("d-left: placement replays an exact least-loaded-leftmost simulation") {
  const std::size_t d = 4, b = 64, cells = 8;
  DlCBF f(d, b, cells, 12, 4, 7);
  std::vector<std::vector<std::map<std::uint32_t, int>>> sim(d, std::vector<std::map<std::uint32_t, int>>(b));
  testing::Gen g(40);
  const auto items = g.distinct_items(static_cast<std::size_t>(0.7 * d * b * cells));
  for (const auto& x : items) {
    const auto cand = f.candidates(x);
    REQUIRE(cand.size() == d);
    bool dup = false;
    for (std::size_t t = 0; t < d && !dup; ++t) {
      auto& bucket = sim[t][cand[t].bucket];
      if (bucket.contains(cand[t].remainder)) {
        ++bucket[cand[t].remainder];
        dup = true;
      }
    }
    const auto status = f.insert(x);
    if (dup) continue;
    std::size_t best = d;
    for (std::size_t t = 0; t < d; ++t) {
      const auto load = sim[t][cand[t].bucket].size();
      if (load < cells && (best == d || load < sim[best][cand[best].bucket].size())) best = t;
    }
    if (best == d) {
      CHECK(status == InsertStatus::failed);
      continue;
    }
    CHECK(status == InsertStatus::inserted);
    sim[best][cand[best].bucket][cand[best].remainder] = 1;
  }
  std::size_t sim_max = 0;
  for (std::size_t t = 0; t < d; ++t) {
    for (std::size_t i = 0; i < b; ++i) {
      CHECK(f.bucket_load(t, i) == sim[t][i].size());
      sim_max = std::max(sim_max, sim[t][i].size());
    }
  }
  CHECK(f.max_bucket_load() == sim_max);
  CHECK(f.max_bucket_load() <= cells);
}

TEST_CASE("d-left: trace against a multiset oracle") {
  DlCBF f(4, 128, 8, 14, 4, 3);
  testing::Gen g(41);
  const auto pool = g.distinct_items(300);
  std::map<std::string, int> truth;
  for (int step = 0; step < 4000; ++step) {
    const auto& x = pool[g.range(0, pool.size() - 1)];
    if (truth[x] == 0 || g.coin(0.6)) {
      if (f.insert(x) == InsertStatus::inserted) ++truth[x];
    } else {
      CHECK(f.remove(x) == RemoveResult::removed);
      --truth[x];
    }
  }
  for (const auto& [x, c] : truth) {
    if (c > 0) {
      CHECK(f.contains(x));
      CHECK(f.count_estimate(x) >= static_cast<std::uint64_t>(std::min(c, 15)));
    }
  }
}

TEST_CASE("d-left: full buckets overflow and parameters are checked") {
  DlCBF f(2, 1, 1, 8, 2, 0);
  std::size_t failed = 0;
  for (int i = 0; i < 20; ++i) failed += f.insert("k" + std::to_string(i)) == InsertStatus::failed;
  CHECK(failed > 0);
  CHECK(f.overflows() == failed);
  CHECK_THROWS_AS(DlCBF(4, 3, 8, 12), ParameterError);  // b not a power of two
  CHECK_THROWS_AS(DlCBF(0, 16, 8, 12), ParameterError);
  CHECK(f.remove("never") == RemoveResult::not_found);
}

// ---------------------------------------------------------------- BFAH

TEST_CASE("BFAH: scripted addresses and collision detection") {
  // Positions first, then the selector value (taken mod k).
  const auto h = HashFamily::scripted({{"E0", {6, 11, 15, 0}}, {"E1", {0, 6, 13, 1}}});
  BFAH f(16, 3, h);
  CHECK(f.address("E0") == 6);
  CHECK(f.address("E1") == 6);
  f.insert("E0", "p0");
  CHECK_FALSE(f.last_insert_collided());
  f.insert("E1", "p1");
  CHECK(f.last_insert_collided());
  CHECK(f.collisions() == 1);
  CHECK(f.lookup("E0") == std::vector<std::string>{"p0", "p1"});
}

TEST_CASE("BFAH: distinct addresses do not collide") {
  const auto h = HashFamily::scripted({{"E0", {2, 8, 12, 1}}, {"E1", {6, 9, 14, 0}}});
  BFAH f(16, 3, h);
  f.insert("E0");
  f.insert("E1");
  CHECK(f.address("E0") == 8);
  CHECK(f.address("E1") == 6);
  CHECK(f.collisions() == 0);
  CHECK(f.contains("E0"));
  CHECK(f.lookup("E1") == std::vector<std::string>{"E1"});
}

TEST_CASE("BFAH: address is one of the item's positions") {
  testing::Gen g(42);
  BFAH f(1024, 4, HashFamily(3));
  for (int i = 0; i < 300; ++i) {
    const auto x = g.item();
    const auto pos = HashFamily(3).indices(x, 4, 1024);
    CHECK(std::find(pos.begin(), pos.end(), f.address(x)) != pos.end());
    f.insert(x);
    CHECK(f.contains(x));
  }
}

// ---------------------------------------------------------------- Matrix

TEST_CASE("chunkers") {
  const ChunkerConfig shingles{ChunkStyle::word_shingles, 3, 1};
  CHECK(chunk_document("a b c d", shingles) == std::vector<std::string>{"a b c", "b c d"});
  CHECK(chunk_document("a b", shingles) == std::vector<std::string>{"a b"});
  CHECK(chunk_document("", shingles) == std::vector<std::string>{""});
  const ChunkerConfig stride2{ChunkStyle::word_shingles, 2, 2};
  CHECK(chunk_document("a b c d e", stride2) == std::vector<std::string>{"a b", "c d"});
  const ChunkerConfig lines{ChunkStyle::lines, 0, 1};
  CHECK(chunk_document("x\n\ny\n", lines) == std::vector<std::string>{"x", "y"});
}

TEST_CASE("matrix: identical, disjoint and partially copied documents") {
  std::string a, b_half, c;
  for (int i = 0; i < 40; ++i) a += "w" + std::to_string(i) + " ";
  for (int i = 0; i < 20; ++i) b_half += "w" + std::to_string(i) + " ";
  for (int i = 0; i < 20; ++i) b_half += "n" + std::to_string(i) + " ";
  for (int i = 0; i < 40; ++i) c += "z" + std::to_string(i) + " ";

  MatrixBF f(8192, 3, {}, 5, HashFamily(4));
  const auto ia = f.add_document(a);
  const auto ia2 = f.add_document(a);
  const auto ib = f.add_document(b_half);
  const auto ic = f.add_document(c);

  const auto same = f.similarity(ia, ia2);
  CHECK(same.ratio == doctest::Approx(1.0));
  CHECK(same.similar);

  const auto dis = f.similarity(ia, ic);
  CHECK(dis.and_popcount <= 2);  // only accidental bit overlap
  CHECK_FALSE(dis.similar);

  const auto ca = chunk_document(a, f.chunker());
  const auto cb = chunk_document(b_half, f.chunker());
  const std::set<std::string> sa(ca.begin(), ca.end());
  std::size_t common = 0;
  for (const auto& x : std::set<std::string>(cb.begin(), cb.end())) common += sa.contains(x);
  const double containment = double(common) / sa.size();
  const auto part = f.similarity(ia, ib);
  CHECK(std::abs(part.ratio - containment) <= 0.15);

  CHECK(f.similarity(ia, ib).and_popcount == f.similarity(ib, ia).and_popcount);
  CHECK_THROWS_AS((void)f.similarity(0, 99), InputError);
  CHECK(f.contains(a));
  CHECK(f.documents() == 4);
}

// ---------------------------------------------------------------- Compacted

namespace {

StandardBF random_filter(std::size_t m, std::size_t n, std::uint64_t seed) {
  StandardBF bf(m, 3, HashFamily(seed));
  testing::Gen g(seed);
  for (std::size_t i = 0; i < n; ++i) bf.insert(g.item());
  return bf;
}

}  // namespace

TEST_CASE("compact: all-zero filter") {
  const StandardBF bf(256, 3);
  const auto c = compact(bf, 8, 4, 1);
  for (auto i : c.indices()) CHECK(i == 0);
  CHECK(reconstruct(c).bits().popcount() == 0);
}

TEST_CASE("compact: patterns with a single one are lossless") {
  // Set at most one bit per pattern by hand through a scripted family.
  IndexScript script;
  for (std::size_t i = 0; i < 32; i += 2) script["s" + std::to_string(i)] = {(i % 8) * 32 + i};
  StandardBF sb(256, 1, HashFamily::scripted(script));
  for (const auto& [k, v] : script) sb.insert(k);
  const auto c = compact(sb, 8, 4, 3);
  CHECK(reconstruct(c).bits() == sb.bits());
  CHECK(c.stats().zeros_to_ones == 0);
  CHECK(c.stats().ones_to_zeros == 0);
}

TEST_CASE("compact: rule replay predicts every flipped bit") {
  testing::Gen g(43);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t nb = 8, m = 512, bp = m / nb;
    const auto bf = random_filter(m, g.range(5, 150), g.next());
    const auto c = compact(bf, nb, 4, g.next());
    const auto r = reconstruct(c);
    std::uint64_t up = 0, down = 0, fn_patterns = 0;
    for (std::size_t i = 0; i < bp; ++i) {
      std::vector<std::size_t> ones;
      for (std::size_t j = 0; j < nb; ++j) {
        if (bf.bits().test(j * bp + i)) ones.push_back(j);
      }
      const auto cnt = ones.size();
      std::size_t got = 0;
      for (std::size_t j = 0; j < nb; ++j) got += r.bits().test(j * bp + i);
      if (cnt <= 1) {
        for (std::size_t j = 0; j < nb; ++j) CHECK(r.bits().test(j * bp + i) == bf.bits().test(j * bp + i));
      } else if (2 * cnt >= nb) {
        CHECK(got == nb);
        up += nb - cnt;
      } else {
        // One of the original ones survives.
        CHECK(got == 1);
        bool kept_original = false;
        for (auto j : ones) kept_original = kept_original || r.bits().test(j * bp + i);
        CHECK(kept_original);
        down += cnt - 1;
        ++fn_patterns;
      }
    }
    CHECK(c.stats().zeros_to_ones == up);
    CHECK(c.stats().ones_to_zeros == down);
    CHECK(c.stats().rule_hits[3] == fn_patterns);
    CHECK(c.memory_bits() == bp * 4);
    CHECK(c.memory_bits() < m);
  }
}

TEST_CASE("compact: no rule-4 patterns means no false negatives") {
  testing::Gen g(44);
  for (int trial = 0; trial < 30; ++trial) {
    StandardBF bf(256, 2, HashFamily(g.next()));
    std::vector<std::string> items;
    for (int i = 0; i < 3; ++i) {
      items.push_back(g.item());
      bf.insert(items.back());
    }
    const auto c = compact(bf, 8, 4, g.next());
    if (c.stats().rule_hits[3] == 0) {
      for (const auto& x : items) CHECK(c.contains(x));
    }
  }
}

TEST_CASE("compact: value mode stores small patterns verbatim") {
  const auto bf = random_filter(256, 40, 5);
  const auto c = compact(bf, 8, 4, 1, CompactionMode::value);
  const auto r = reconstruct(c);
  const std::size_t bp = 32;
  for (std::size_t i = 0; i < bp; ++i) {
    std::uint32_t value = 0;
    for (std::size_t j = 0; j < 8; ++j) value |= std::uint32_t(bf.bits().test(j * bp + i)) << j;
    if (value < 15) {
      CHECK(c.indices()[i] == value);
      for (std::size_t j = 0; j < 8; ++j) CHECK(r.bits().test(j * bp + i) == bf.bits().test(j * bp + i));
    } else {
      CHECK(c.indices()[i] == 15);
    }
  }
}

TEST_CASE("compact: wire form round-trips and rejects junk") {
  const auto bf = random_filter(512, 60, 6);
  const auto c = compact(bf, 8, 4, 2);
  const auto wire = c.to_wire();
  CHECK(wire.size() == 7 + (c.bp() * 4 + 7) / 8);
  const auto back = CompactedBF::from_wire(wire, c.k(), c.hashes());
  CHECK(back.indices() == c.indices());
  CHECK(reconstruct(back).bits() == reconstruct(c).bits());
  auto truncated = wire;
  truncated.pop_back();
  CHECK_THROWS_AS((void)CompactedBF::from_wire(truncated, c.k(), c.hashes()), FormatError);
  // An index above nb that is not the all-ones marker names no block.
  CHECK_THROWS_AS(
      (void)reconstruct(CompactedBF::from_indices(4, 8, std::vector<std::uint32_t>(64, 9), 3, HashFamily(),
                                                  CompactionMode::rules, 0)),
      FormatError);
}

TEST_CASE("compact: parameter errors") {
  const StandardBF bf(256, 3);
  CHECK_THROWS_AS((void)compact(bf, 7, 4, 0), ParameterError);   // 256 % 7 != 0
  CHECK_THROWS_AS((void)compact(bf, 16, 4, 0), ParameterError);  // nb > 2^w - 2
  CHECK_THROWS_AS((void)compact(bf, 4, 4, 0), ParameterError);   // w must be below nb
  auto c = compact(bf, 8, 4, 0);
  CHECK_THROWS_AS(c.insert("x"), CapabilityError);
}
