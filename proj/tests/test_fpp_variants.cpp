#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "bloomsketch/analysis.hpp"
#include "bloomsketch/classic.hpp"
#include "bloomsketch/errors.hpp"
#include "bloomsketch/fpp_variants.hpp"
#include "support.hpp"

using namespace bloomsketch;

namespace {

std::vector<std::string> members(std::size_t n, std::uint64_t seed) {
  return generate_stream({Distribution::uniform, 1.0, n, 1ULL << 40, true}, seed);
}

std::vector<std::string> probes(std::size_t n, std::uint64_t seed) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(probe_key(seed, i));
  return out;
}

// Every multiset sum of exactly `count` elements of L (brute force).
bool brute_representable(std::uint64_t target, std::uint64_t count, const std::vector<std::uint64_t>& L) {
  if (count == 0) return target == 0;
  for (auto v : L) {
    if (v <= target && brute_representable(target - v, count - 1, L)) return true;
  }
  return false;
}

}  // namespace

// ---------------------------------------------------------------- yes-no

TEST_CASE("yes-no: reported false positives are suppressed") {
  YesNoBF f(1024, 3, 64, 4, 2, HashFamily(1));
  const auto ms = members(40, 1);
  for (const auto& x : ms) f.insert(x);
  for (const auto& x : ms) CHECK(f.contains(x));
  std::size_t reported = 0;
  for (const auto& p : probes(5000, 2)) {
    if (f.contains(p)) {
      CHECK(f.report_false_positive(p));
      CHECK_FALSE(f.contains(p));
      ++reported;
    }
  }
  CHECK(reported > 0);
  CHECK(f.reported() == reported);
}

TEST_CASE("yes-no: a member caught by its no-filter becomes a false negative") {
  const auto h = HashFamily::scripted({{"member", {1, 2, 3}}, {"fp", {1, 2, 3}}});
  YesNoBF f(64, 3, 16, 1, 2, h);
  f.insert("member");
  CHECK(f.contains("fp"));
  REQUIRE(f.report_false_positive("fp"));
  // With one no-filter the member's own no-filter bits are a deterministic
  // function of its key; if they collide with the reported pattern it is lost.
  const bool member_blocked = f.no_positive("member");
  CHECK(f.contains("member") == !member_blocked);
  CHECK(f.select("anything") == 0);
}

TEST_CASE("yes-no: report on a yes-negative item is a no-op") {
  YesNoBF f(1024, 3, 64, 4, 2);
  CHECK_FALSE(f.report_false_positive("nobody"));
  CHECK(f.reported() == 0);
  CHECK_THROWS_AS(YesNoBF(256, 3, 64, 0, 2), ParameterError);
  CHECK_THROWS_AS(YesNoBF(256, 3, 64, 4, 0), ParameterError);
}

TEST_CASE("yes-no: measured rate follows the composite prediction") {
  const std::size_t p = 2048, q = 64, r = 4, k = 4, kp = 2;
  YesNoBF f(p, k, q, r, kp, HashFamily(3));
  const auto ms = members(500, 3);
  for (const auto& x : ms) f.insert(x);
  // Report 60 observed false positives, then measure on fresh probes.
  std::size_t nrep = 0;
  for (const auto& x : probes(20000, 4)) {
    if (nrep < 60 && f.contains(x)) nrep += f.report_false_positive(x);
  }
  REQUIRE(nrep == 60);
  const double yes = sbf_fpp(p, k, 500);
  double blocked = 0.0;  // chance a random probe hits its no-filter
  for (std::size_t i = 0; i < r; ++i) blocked += sbf_fpp(q, kp, double(nrep) / r) / r;
  const double predicted = yes * (1.0 - blocked);
  const double measured = testing::positive_rate(f, probes(100000, 5));
  CHECK(std::abs(testing::rel_err(measured, predicted)) < 0.30);
}

// ---------------------------------------------------------------- VI-CBF

TEST_CASE("VI-CBF cell checks from the worked example") {
  const std::vector<std::uint64_t> L{2, 3, 4, 5};
  CHECK_FALSE(vicbf_membership_check(2, 9, 2, L, VIScheme::bh));  // 9 - 2 = 7 is not in L
  CHECK(vicbf_membership_check(1, 5, 5, L, VIScheme::bh));
  CHECK(vicbf_membership_check(3, 12, 2, L, VIScheme::bh));  // 10 = 5 + 5
  CHECK_FALSE(vicbf_membership_check(0, 0, 2, L, VIScheme::bh));
  CHECK(vicbf_membership_check(2, 9, 2, L, VIScheme::bh, true));  // saturated always passes
  CHECK_THROWS_AS((void)vicbf_membership_check(1, 5, 7, L, VIScheme::bh), ParameterError);
}

TEST_CASE("representable agrees with brute force") {
  const std::vector<std::uint64_t> L{2, 3, 4, 5};
  for (std::uint64_t c = 0; c <= 4; ++c) {
    for (std::uint64_t t = 0; t <= 24; ++t) CHECK(representable(t, c, L) == brute_representable(t, c, L));
  }
  CHECK(representable(7, std::nullopt, L));
  CHECK_FALSE(representable(1, std::nullopt, L));
}

TEST_CASE("VI-CBF: no false negatives under insert/remove traces") {
  testing::Gen g(21);
  for (auto scheme : {VIScheme::bh, VIScheme::vi}) {
    VICBF f(1024, 3, scheme, {2, 3, 4, 5}, 2, 8, HashFamily(9));
    std::map<std::string, int> truth;
    const auto pool = g.distinct_items(120);
    for (int step = 0; step < 3000; ++step) {
      const auto& x = pool[g.range(0, pool.size() - 1)];
      if (truth[x] == 0 || g.coin(0.6)) {
        f.insert(x);
        ++truth[x];
      } else {
        CHECK(f.remove(x) == RemoveResult::removed);
        --truth[x];
      }
    }
    for (const auto& [x, c] : truth) {
      if (c > 0) {
        CHECK(f.contains(x));
        // The 2-bit occupancy counter of the bh scheme saturates at 3.
        const std::uint64_t cap = scheme == VIScheme::bh ? 3 : UINT64_MAX;
        CHECK(f.count_estimate(x) >= std::min<std::uint64_t>(cap, c));
      }
    }
  }
}

TEST_CASE("VI-CBF: beats plain counting at equal memory") {
  const std::size_t n = 2000;
  const auto ms = members(n, 22);
  // 16 bits per element each: CBF 4-bit cells, Bh cells of 2 + 4 bits.
  CountingBF cbf(n * 16 / 4, 3, HashFamily(1));
  VICBF vi(n * 16 / 6, 3, VIScheme::bh, {2, 3, 4, 5}, 2, 4, HashFamily(1));
  CHECK(vi.memory_bits() <= cbf.memory_bits());
  for (const auto& x : ms) {
    cbf.insert(x);
    vi.insert(x);
  }
  const auto ps = probes(200000, 23);
  CHECK(testing::positive_rate(vi, ps) < testing::positive_rate(cbf, ps));
}

TEST_CASE("VI-CBF parameter errors") {
  CHECK_THROWS_AS(VICBF(64, 3, VIScheme::bh, {}), ParameterError);
  CHECK_THROWS_AS(VICBF(64, 3, VIScheme::bh, {0, 2}), ParameterError);
}

// ---------------------------------------------------------------- FP-CBF

TEST_CASE("FP-CBF: insert then remove clears the fingerprint fields") {
  FPCBF f(128, 3, 4, 8, HashFamily(2));
  for (int i = 0; i < 20; ++i) f.insert("m" + std::to_string(i));
  const auto counters = f.counters();
  const auto fps = f.fingerprints();
  f.insert("t");
  CHECK(f.contains("t"));
  CHECK(f.remove("t") == RemoveResult::removed);
  CHECK(f.counters() == counters);
  CHECK(f.fingerprints() == fps);
  FPCBF empty(64, 3);
  for (std::size_t i = 0; i < 64; ++i) CHECK(empty.fingerprints().get(i) == 0);
}

TEST_CASE("FP-CBF: count-one cells must hold the probe fingerprint") {
  testing::Gen g(24);
  FPCBF f(4096, 3, 4, 8, HashFamily(3));
  const auto ms = members(300, 24);
  for (const auto& x : ms) f.insert(x);
  for (const auto& x : ms) CHECK(f.contains(x));
  const auto ps = probes(20000, 25);
  // Fingerprints only ever remove positives relative to the bare counters.
  CountingBF bare(4096, 3, HashFamily(3));
  for (const auto& x : ms) bare.insert(x);
  CHECK(testing::positive_rate(f, ps) <= testing::positive_rate(bare, ps));
}

// ---------------------------------------------------------------- Retouched

TEST_CASE("retouched: targeted clearing removes each observed false positive") {
  RetouchedBF f(1024, 3, HashFamily(4));
  const auto ms = members(200, 26);
  for (const auto& x : ms) f.insert(x);
  std::vector<std::string> fps;
  for (const auto& p : probes(20000, 27)) {
    if (f.contains(p)) fps.push_back(p);
  }
  REQUIRE(!fps.empty());
  const auto rep = f.clear_targeted(fps);
  CHECK(rep.cleared.size() <= fps.size());
  for (const auto& p : fps) CHECK_FALSE(f.contains(p));
}

TEST_CASE("retouched: random clearing of one bit matches a replay oracle") {
  testing::Gen g(28);
  for (int trial = 0; trial < 20; ++trial) {
    RetouchedBF f(256, 3, HashFamily(g.next()));
    const auto ms = g.distinct_items(30);
    for (const auto& x : ms) f.insert(x);
    const auto rep = f.clear_random(1, g.next());
    REQUIRE(rep.cleared.size() == 1);
    const auto bit = rep.cleared[0];
    for (const auto& x : ms) {
      const auto pos = f.base().positions(x);
      const bool covers = std::find(pos.begin(), pos.end(), bit) != pos.end();
      CHECK(f.contains(x) == !covers);
    }
  }
}

TEST_CASE("retouched: clamped random clearing") {
  RetouchedBF f(64, 2);
  f.insert("a");
  const auto rep = f.clear_random(100, 1);
  CHECK(rep.clamped);
  CHECK(f.base().bits().popcount() == 0);
  CHECK(f.cleared_log().size() == rep.cleared.size());
}

// ---------------------------------------------------------------- ACBF

TEST_CASE("ACBF counters equal a reference CBF on random traces") {
  testing::Gen g(29);
  ACBF a(512, 3, 4, HashFamily(5));
  std::vector<std::uint64_t> ref(512);
  std::map<std::string, int> truth;
  const auto pool = g.distinct_items(200);
  for (int step = 0; step < 4000; ++step) {
    const auto& x = pool[g.range(0, pool.size() - 1)];
    if (truth[x] == 0 || g.coin(0.7)) {
      a.insert(x);
      for (auto p : HashFamily(5).indices(x, 3, 512)) ++ref[p];
      ++truth[x];
    } else {
      CHECK(a.remove(x) == RemoveResult::removed);
      for (auto p : HashFamily(5).indices(x, 3, 512)) --ref[p];
      --truth[x];
    }
  }
  for (std::size_t i = 0; i < 512; ++i) CHECK(a.counter(i) == ref[i]);
}

TEST_CASE("ACBF basics") {
  ACBF a(64, 2);
  CHECK(a.count_estimate("x") == 0);
  CHECK_FALSE(a.contains("x"));
  const auto h = HashFamily::scripted({{"x", {3, 9}}});
  ACBF b(64, 2, 3, h);
  b.insert("x");
  CHECK(b.count_estimate("x") == 1);
  for (int i = 0; i < 10; ++i) b.insert("x");  // runs past 3 levels into the overflow map
  CHECK(b.count_estimate("x") == 11);
  CHECK_FALSE(b.overflow().empty());
  CHECK(b.remove("nope") == RemoveResult::not_found);
}

TEST_CASE("ACBF first-level optimum is 4m - kn") {
  CHECK(acbf_optimal_first_level(1000, 3, 100) == 3700);
}

// ---------------------------------------------------------------- GBF

TEST_CASE("GBF worked example with scripted functions") {
  // g (reset) functions first, then h (set) functions.
  const auto h = HashFamily::scripted({{"x", {10, 13, 16, 19, 1, 4, 8}}});
  GeneralizedBF f(20, 4, 3, h);
  BitVector init(20);
  for (auto i : {3, 10, 12, 13, 15, 16, 19}) init.set(i);
  f.set_bits(init);
  f.insert("x");
  for (auto i : {1, 4, 8}) CHECK(f.bits().test(i));
  for (auto i : {10, 13, 16, 19}) CHECK_FALSE(f.bits().test(i));
  for (auto i : {3, 12, 15}) CHECK(f.bits().test(i));
  CHECK(f.bits().popcount() == 6);
  CHECK(f.contains("x"));
}

TEST_CASE("GBF: reset wins on collisions") {
  const auto h = HashFamily::scripted({{"x", {5, 5, 6}}});
  GeneralizedBF f(10, 1, 2, h);
  const auto t = f.touch("x");
  CHECK(t.reset == std::vector<std::uint64_t>{5});
  CHECK(t.set == std::vector<std::uint64_t>{6});
}

TEST_CASE("GBF: an item queries present right after its insert") {
  testing::Gen g(30);
  for (int t = 0; t < 200; ++t) {
    GeneralizedBF f(256, 2, 4, g.unit(), g.next(), HashFamily(g.next()));
    const auto x = g.item();
    f.insert(x);
    CHECK(f.contains(x));
  }
}

TEST_CASE("GBF: single-insert bit statistics follow the closed forms") {
  const double m = 64, k1 = 3, k2 = 4;
  testing::Gen g(31);
  double resets = 0, sets = 0;
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    GeneralizedBF f(64, 3, 4, HashFamily(g.next()));
    const auto touch = f.touch("item");
    for (std::size_t i = 0; i < 64; ++i) {
      const bool r = std::find(touch.reset.begin(), touch.reset.end(), i) != touch.reset.end();
      const bool s = std::find(touch.set.begin(), touch.set.end(), i) != touch.set.end();
      resets += r;
      sets += s;
    }
  }
  const double q_reset = resets / (trials * m);
  const double q_set = sets / (trials * m);
  CHECK(std::abs(testing::rel_err(q_reset, gbf_reset_probability(m, k1))) < 0.10);
  CHECK(std::abs(testing::rel_err(q_set, gbf_set_probability(m, k1, k2))) < 0.10);
}

// ---------------------------------------------------------------- Multi-class

TEST_CASE("multi-class: more hashes give a lower per-class rate") {
  MultiClassBF f(8192, {2, 4, 7}, HashFamily(6));
  const auto ms = members(1200, 32);
  std::size_t load = 0;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const auto cls = i % 3;
    f.insert(ms[i], cls);
    load += f.class_k()[cls];
  }
  for (std::size_t i = 0; i < ms.size(); ++i) CHECK(f.query(ms[i], i % 3).present());
  const auto ps = probes(100000, 33);
  std::vector<double> rate;
  for (std::size_t cls = 0; cls < 3; ++cls) {
    std::size_t hits = 0;
    for (const auto& p : ps) hits += f.query(p, cls).present();
    rate.push_back(double(hits) / ps.size());
    const double pred =
        analytic_fpp(FormulaId::multi_class, {{"m", 8192}, {"k_e", double(f.class_k()[cls])}, {"load", double(load)}});
    CHECK(std::abs(testing::rel_err(rate.back(), pred)) < 0.25);
  }
  CHECK(rate[0] > rate[1]);
  CHECK(rate[1] > rate[2]);
}

TEST_CASE("multi-class: classifier routing and bad class") {
  MultiClassBF f(256, {2, 5}, HashFamily(1), [](std::string_view s) { return s.size() % 2; });
  f.insert("ab");   // class 0
  f.insert("abc");  // class 1
  CHECK(f.classify("abc") == 1);
  CHECK(f.query("abc", 1).present());
  CHECK(f.contains("ab"));
  CHECK_THROWS_AS(f.insert("x", 2), InputError);
  CHECK_THROWS_AS(MultiClassBF(256, {}), ParameterError);
}

// ---------------------------------------------------------------- Complement

TEST_CASE("complement: exhaustive sweep has no joint false positives") {
  const auto universe = testing::keys("u", 2000);
  testing::Gen g(34);
  std::vector<std::string> s;
  std::set<std::string> in_s;
  for (const auto& u : universe) {
    if (g.coin(0.2)) {
      s.push_back(u);
      in_s.insert(u);
    }
  }
  ComplementBF f(s, universe, 4096, 3, 8192, 3, 7);
  std::size_t errors = 0, oracle = 0;
  for (const auto& u : universe) {
    const auto q = f.query(u);
    errors += q.present() != in_s.contains(u);
    oracle += q.needs_oracle;
    // A joint positive is only possible through a constituent false positive.
    const bool joint = f.filter_s().contains(u) && f.filter_complement().contains(u);
    CHECK(q.needs_oracle == joint);
  }
  CHECK(errors == 0);
  CHECK(oracle < universe.size() / 10);
  CHECK_THROWS_AS((void)f.query("not-in-universe"), InputError);
  CHECK_THROWS_AS(f.insert("u1"), CapabilityError);
}

TEST_CASE("complement: joint-positive rate follows the closed form") {
  const auto universe = testing::keys("w", 20000);
  std::vector<std::string> s(universe.begin(), universe.begin() + 4000);
  ComplementBF f(s, universe, 16000, 3, 64000, 3, 11);
  std::size_t joint = 0;
  for (const auto& u : universe) joint += f.query(u).needs_oracle;
  const double measured = double(joint) / universe.size();
  const double pred = analytic_fpp(
      FormulaId::complement,
      {{"m", 16000}, {"k", 3}, {"n", 4000}, {"m_c", 64000}, {"k_c", 3}, {"n_c", 16000}});
  CHECK(std::abs(testing::rel_err(measured, pred)) < 0.20);
}

TEST_CASE("complement: members outside the universe are rejected") {
  const std::vector<std::string> u{"a", "b"};
  const std::vector<std::string> s{"c"};
  CHECK_THROWS_AS(ComplementBF(s, u, 64, 2, 64, 2), InputError);
}
