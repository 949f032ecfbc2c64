// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bloomsketch/analysis.hpp"
#include "bloomsketch/bench.hpp"
#include "bloomsketch/classic.hpp"
#include "bloomsketch/compute_variants.hpp"
#include "bloomsketch/dynamic_multiset.hpp"
#include "bloomsketch/fpp_variants.hpp"
#include "bloomsketch/serialize.hpp"
#include "bloomsketch/special_filters.hpp"
#include "fixtures.hpp"
#include "reference_table.hpp"
#include "support.hpp"

using namespace bloomsketch;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& why) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + why;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<std::string> members(std::size_t n, std::uint64_t seed) {
  return generate_stream({Distribution::uniform, 1.0, n, 1ULL << 40, true}, seed);
}

// ---------------------------------------------------------------------------

Outcome standard_formula() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  StandardBF bf(65536, 8, HashFamily(1));
  const auto ms = members(4096, 1);
  for (const auto& x : ms) bf.insert(x);
  const auto rep = empirical_fpp(bf, ms, 1000000, 2);
  const double pred = sbf_fpp(65536, 8, 4096, false);
  const double secs = seconds_since(t0);
  o.require(std::abs(pred - 5.75e-4) / 5.75e-4 < 0.01, "closed form " + fmt(pred) + " is not 5.75e-4");
  o.require(std::abs(testing::rel_err(rep.measured_fpp, pred)) <= 0.15,
            "measured " + fmt(rep.measured_fpp) + " outside 15% of " + fmt(pred));
  o.require(secs < 10.0, "took " + fmt(secs) + " s");
  o.note("measured " + fmt(rep.measured_fpp) + " vs " + fmt(pred) + " in " + fmt(secs) + " s");
  return o;
}

Outcome worked_example() {
  Outcome o;
  const auto h = HashFamily::scripted({{"x1", {0, 5, 6}},
                                       {"x2", {2, 4, 9}},
                                       {"x3", {1, 7, 8}},
                                       {"x4", {0, 3, 4}},
                                       {"x5", {4, 7, 9}}});
  StandardBF bf(11, 3, h);
  for (auto x : {"x1", "x2", "x3"}) bf.insert(x);
  const auto q4 = bf.query("x4");
  const auto q5 = bf.query("x5");
  o.require(!q4.present(), "x4 reported present");
  o.require(q5.present() && q5.maybe_false_positive, "x5 not reported as a possible false positive");
  o.note("x4 absent, x5 present (false positive)");
  return o;
}

json params_for(Variant v) {
  switch (v) {
    case Variant::yes_no: return {{"p", 4096}, {"k", 3}, {"q", 256}, {"r", 4}, {"k_prime", 2}};
    case Variant::accurate_cbf: return {{"s1", 4096}, {"k", 3}};
    case Variant::generalized: return {{"m", 4096}, {"k1", 1}, {"k2", 3}};
    case Variant::multi_class: return {{"m", 4096}, {"class_k", {3, 5}}};
    case Variant::complement: return {{"m", 4096}, {"k", 3}, {"m_c", 8192}, {"k_c", 3}, {"universe", 5000}};
    case Variant::dleft_cbf: return {{"b", 64}};
    case Variant::compacted: return {{"m", 4096}, {"k", 3}, {"nb", 8}, {"w", 4}};
    case Variant::ultra_fast: return {{"l", 16}};
    case Variant::dynamic: return {{"m", 1024}, {"k", 3}, {"capacity", 40}};
    case Variant::weighted: return {{"m", 4096}, {"n_expected", 100}};
    case Variant::iblt: return {{"m", 600}, {"k", 3}};
    case Variant::shifting: return {{"m", 4096}, {"k", 4}};
    case Variant::deletable: return {{"m", 4096}, {"k", 3}, {"regions", 32}};
    case Variant::distance_sensitive: return {{"dim", 64}, {"capacity", 200}};
    case Variant::cuckoo: return {{"buckets", 64}};
    case Variant::persistent: return {{"m", 4096}, {"k", 3}};
    case Variant::high_dimensional: return {{"m", 4096}, {"k", 3}};
    default: return {{"m", 4096}, {"k", 3}};
  }
}

std::string run_capture(const std::string& cmd) {
  std::string out;
  if (FILE* p = ::popen(cmd.c_str(), "r")) {
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, got);
    ::pclose(p);
  }
  return out;
}

Outcome no_false_negatives() {
  Outcome o;
  std::size_t variants = 0, inserted = 0, misses = 0, fewest = SIZE_MAX;
  std::string fewest_name;
  testing::Gen g(3);
  for (auto v : all_variants()) {
    if (capabilities_of(v).false_negatives_possible) continue;
    ++variants;
    const auto params = params_for(v);
    std::size_t mine = 0;
    for (int trace = 0; trace < 100; ++trace) {
      const auto seed = g.next();
      const auto encode = item_encoder(v, params, seed);
      std::vector<std::string> items;
      std::set<std::string> seen;
      while (items.size() < 100) {
        auto x = encode ? encode(g.item(16)) : g.item(16);
        if (seen.insert(x).second) items.push_back(std::move(x));
      }
      auto f = make_filter(v, params, seed, items);
      std::vector<std::string> live;
      for (const auto& x : items) {
        if (v == Variant::complement) {
          live.push_back(x);  // built from the member set
          continue;
        }
        if (f->insert(x) == InsertStatus::inserted) live.push_back(x);
        if (!f->contains(x)) ++misses;
      }
      for (const auto& x : live) misses += !f->contains(x);
      mine += live.size();
    }
    inserted += mine;
    if (mine < fewest) fewest = mine, fewest_name = to_string(v);
  }
  o.require(misses == 0, std::to_string(misses) + " false negatives");
  o.require(fewest >= 10000, fewest_name + " accepted only " + std::to_string(fewest) + " inserts");

  // The matrix printed by the CLI against the reference rows.
  const auto doc = json::parse(run_capture(std::string(BFSK_EXE) + " capabilities --format json"), nullptr, false);
  if (doc.is_discarded() || !doc.contains("rows")) {
    o.require(false, "capabilities output is not valid JSON");
    return o;
  }
  std::map<std::string, json> by_name;
  for (const auto& r : doc["rows"]) by_name[r["name"].get<std::string>()] = r;
  std::size_t rows_checked = 0;
  std::vector<std::string> missing;
  for (const auto& ref : testing::reference_rows()) {
    const std::string name(ref.name);
    if (!ref.variant) {
      missing.push_back(name);
      o.require(!by_name.contains(name), name + " listed but not implemented");
      continue;
    }
    if (!by_name.contains(name)) {
      o.require(false, name + " missing from the matrix");
      continue;
    }
    const auto& r = by_name[name];
    const bool same = r["C"] == ref.c && r["D"] == ref.d && r["FN"] == ref.fn && r["result"] == ref.result &&
                      r["variant"] == std::string(to_string(*ref.variant));
    o.require(same, name + " row differs");
    ++rows_checked;
  }
  o.require(doc["rows"].size() == all_variants().size(), "row count differs from implemented variants");
  o.require(doc["not_implemented"].get<std::vector<std::string>>() == missing, "footnote differs");
  o.note(std::to_string(variants) + " variants, " + std::to_string(inserted) + " inserts (fewest " + fewest_name +
         " " + std::to_string(fewest) + "), 0 misses; " +
         std::to_string(rows_checked) + " reference rows match");
  return o;
}

Outcome vicbf_improvement() {
  Outcome o;
  const std::vector<Variant> vs{Variant::counting, Variant::vicbf};
  const std::vector<double> budget{16.0};
  const auto cells = compare_budget(vs, budget, 10000, 4, 200000);
  if (cells.size() != 2 || !cells[0].report || !cells[1].report) {
    o.require(false, "comparison did not produce both cells");
    return o;
  }
  const auto& cbf = *cells[0].report;
  const auto& vi = *cells[1].report;
  o.require(vi.ci.hi < cbf.ci.lo, "95% intervals overlap");
  o.note("CBF " + fmt(cbf.measured_fpp) + " [" + fmt(cbf.ci.lo) + ", " + fmt(cbf.ci.hi) + "], VI-CBF " +
         fmt(vi.measured_fpp) + " [" + fmt(vi.ci.lo) + ", " + fmt(vi.ci.hi) + "]");
  return o;
}

Outcome acbf_equals_cbf() {
  Outcome o;
  testing::Gen g(5);
  std::size_t mismatches = 0, ops = 0;
  for (int trace = 0; trace < 5; ++trace) {
    const HashFamily h(g.next());
    const std::size_t m = 2048, k = 3;
    ACBF a(m, k, 4, h);
    std::vector<std::uint64_t> ref(m);
    std::map<std::string, int> truth;
    const auto pool = g.distinct_items(1500);
    for (int step = 0; step < 10000; ++step, ++ops) {
      const auto& x = pool[g.range(0, pool.size() - 1)];
      if (truth[x] == 0 || g.coin(0.65)) {
        a.insert(x);
        for (auto p : h.indices(x, k, m)) ++ref[p];
        ++truth[x];
      } else {
        a.remove(x);
        for (auto p : h.indices(x, k, m)) --ref[p];
        --truth[x];
      }
    }
    for (std::size_t i = 0; i < m; ++i) mismatches += a.counter(i) != ref[i];
  }
  o.require(mismatches == 0, std::to_string(mismatches) + " counters differ");
  o.note(std::to_string(ops) + " mixed operations, all counters equal");
  return o;
}

Outcome iblt_recovery() {
  Outcome o;
  std::size_t complete = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    IBLT t(3000, 4, seed);
    testing::Gen g(seed * 7 + 1);
    std::set<std::pair<std::uint64_t, std::uint64_t>> truth;
    while (truth.size() < 1000) truth.insert({g.next(), g.next()});
    for (const auto& [k, v] : truth) t.insert_pair(k, v);
    const auto l = t.list_entries();
    complete += !l.residue && std::set<std::pair<std::uint64_t, std::uint64_t>>(l.pairs.begin(), l.pairs.end()) == truth;
  }
  o.require(complete >= 99, "complete listings in " + std::to_string(complete) + "/100 seeds");
  testing::Gen g(6);
  std::size_t dirty = 0;
  for (int trial = 0; trial < 100; ++trial) {
    IBLT t(300, 4, g.next());
    std::vector<std::pair<std::uint64_t, std::uint64_t>> ms;
    for (int i = 0; i < 500; ++i) ms.push_back({g.range(0, 50), g.next()});
    for (const auto& [k, v] : ms) t.insert_pair(k, v);
    for (std::size_t i = ms.size(); i-- > 0;) {
      const auto j = g.range(0, i);
      std::swap(ms[i], ms[j]);
      t.erase_pair(ms[i].first, ms[i].second);
    }
    dirty += !t.empty();
  }
  o.require(dirty == 0, std::to_string(dirty) + " tables not all-zero after cancelling");
  o.note("complete listings " + std::to_string(complete) + "/100; 100 multisets cancel to zero");
  return o;
}

Outcome cuckoo_checks() {
  Outcome o;
  testing::Gen g(7);
  std::size_t audits_failed = 0, fn = 0, roundtrip_bad = 0;
  for (int trace = 0; trace < 3; ++trace) {
    CuckooFilter f(1024, 4, 12, 500, g.next());
    std::map<std::string, int> truth;
    std::size_t live = 0;
    const auto pool = g.distinct_items(5000);
    for (int step = 0; step < 100000; ++step) {
      const auto& x = pool[g.range(0, pool.size() - 1)];
      const bool grow = live < 3000 && (truth[x] == 0 || g.coin(0.5));
      if (grow) {
        if (f.insert(x) == InsertStatus::inserted) {
          ++truth[x];
          ++live;
        }
      } else if (truth[x] > 0) {
        f.remove(x);
        --truth[x];
        --live;
      }
      if (step % 10000 == 0) audits_failed += !f.audit();
    }
    audits_failed += !f.audit();
    for (const auto& [x, c] : truth) fn += c > 0 && !f.contains(x);
  }
  for (int i = 0; i < 1000; ++i) {
    CuckooFilter f(64, 4, 12, 500, g.next());
    const auto x = g.item();
    const bool ok = f.insert(x) == InsertStatus::inserted && f.contains(x) && f.remove(x) == RemoveResult::removed &&
                    !f.contains(x) && f.remove(x) == RemoveResult::not_found;
    roundtrip_bad += !ok;
  }
  std::size_t clean = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    CuckooFilter f(1024, 4, 12, 500, seed);
    std::size_t fails = 0;
    for (const auto& x : members(static_cast<std::size_t>(0.84 * 4096), 1000 + seed)) {
      fails += f.insert(x) == InsertStatus::failed;
    }
    clean += fails == 0;
  }
  o.require(audits_failed == 0, std::to_string(audits_failed) + " audits failed");
  o.require(fn == 0, std::to_string(fn) + " false negatives");
  o.require(roundtrip_bad == 0, std::to_string(roundtrip_bad) + " round trips failed");
  o.require(clean >= 95, "84% fill succeeded in " + std::to_string(clean) + "/100 seeds");
  o.note("audits clean over 3 x 1e5 ops; 84% fill clean in " + std::to_string(clean) + "/100 seeds");
  return o;
}

Outcome complement_sweep() {
  Outcome o;
  const auto universe = testing::keys("u", 10000);
  testing::Gen g(8);
  std::vector<std::string> s;
  std::set<std::string> in_s;
  for (const auto& u : universe) {
    if (g.coin(0.3)) {
      s.push_back(u);
      in_s.insert(u);
    }
  }
  ComplementBF f(s, universe, 8 * s.size(), 4, 8 * (universe.size() - s.size()), 4, 9);
  std::size_t joint = 0, constituent_fn = 0, errors = 0;
  for (const auto& u : universe) {
    const auto q = f.query(u);
    const bool a = f.filter_s().contains(u), b = f.filter_complement().contains(u);
    const bool member = in_s.contains(u);
    // Neither side may miss its own members, so a joint positive is always a
    // false positive of exactly one side.
    constituent_fn += member ? !a : !b;
    joint += a && b;
    errors += q.present() != member;
  }
  o.require(errors == 0, std::to_string(errors) + " wrong answers after the exact-set step");
  o.require(constituent_fn == 0, std::to_string(constituent_fn) + " constituent false negatives");
  o.note("universe 10000, " + std::to_string(joint) + " joint positives resolved, 0 errors");
  return o;
}

Outcome retouched_checks() {
  Outcome o;
  // Targeted clearing.
  {
    RetouchedBF f(4096, 4, HashFamily(10));
    const auto ms = members(500, 10);
    for (const auto& x : ms) f.insert(x);
    std::vector<std::string> fps;
    for (std::uint64_t i = 0; i < 50000; ++i) {
      const auto p = probe_key(11, i);
      if (f.contains(p)) fps.push_back(p);
    }
    (void)f.clear_targeted(fps);
    std::size_t still = 0;
    for (const auto& p : fps) still += f.contains(p);
    o.require(!fps.empty(), "no false positives to clear");
    o.require(still == 0, std::to_string(still) + " cleared false positives still present");
  }
  // Random clearing: relative FP reduction over FN rate.
  double sum = 0.0;
  const int trials = 30;
  for (int t = 0; t < trials; ++t) {
    RetouchedBF f(4096, 4, HashFamily(100 + t));
    const auto ms = members(500, 100 + t);
    for (const auto& x : ms) f.insert(x);
    std::vector<std::string> fps;
    for (std::uint64_t i = 0; i < 40000; ++i) {
      const auto p = probe_key(200 + t, i);
      if (f.contains(p)) fps.push_back(p);
    }
    (void)f.clear_random(20, 300 + t);
    std::size_t fp_gone = 0, fn = 0;
    for (const auto& p : fps) fp_gone += !f.contains(p);
    for (const auto& x : ms) fn += !f.contains(x);
    const double delta = double(fp_gone) / fps.size();
    const double fn_rate = double(fn) / ms.size();
    sum += fn_rate > 0 ? delta / fn_rate : 1.0;
  }
  const double mean = sum / trials;
  o.require(mean >= 0.5 && mean <= 2.0, "mean ratio " + fmt(mean) + " outside [0.5, 2]");
  o.note("targeted clearing removes every observed false positive; random-clearing mean ratio " + fmt(mean));
  return o;
}

Outcome formula_band() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  auto band = [&](const std::string& name, double measured, double predicted, double tol) {
    const double e = testing::rel_err(measured, predicted);
    o.require(std::abs(e) <= tol, name + " off by " + fmt(100 * e) + "%");
    o.note(name + " " + fmt(100 * e) + "%");
  };
  {
    const std::size_t m = 40000, k = 8, w = 64;
    ShiftingBF f(m, k, w, 1);
    const auto ms = members(m / 10, 20);
    for (const auto& x : ms) f.insert(x);
    band("shifting",
         empirical_fpp(f, ms, 200000, 21).measured_fpp,
         analytic_fpp(FormulaId::shifting, {{"m", double(m)}, {"k", double(k)}, {"n", double(ms.size())}, {"w_bar", double(w)}}),
         0.25);
  }
  {
    const std::size_t m = 2048, k = 4, C = 200;
    DynamicBF f(m, k, C, 2);
    const auto ms = members(10 * C, 22);
    for (const auto& x : ms) f.insert(x);
    band("dynamic", empirical_fpp(f, ms, 200000, 23).measured_fpp, dbf_fpp(m, k, C, double(ms.size())), 0.25);
  }
  {
    MultiClassBF f(16384, {3, 6}, HashFamily(3));
    const auto ms = members(2000, 24);
    double load = 0;
    for (std::size_t i = 0; i < ms.size(); ++i) {
      f.insert(ms[i], i % 2);
      load += f.class_k()[i % 2];
    }
    for (std::size_t cls = 0; cls < 2; ++cls) {
      std::size_t hits = 0;
      for (std::uint64_t i = 0; i < 200000; ++i) hits += f.query(probe_key(25, i), cls).present();
      band("multi-class k=" + std::to_string(f.class_k()[cls]), hits / 200000.0,
           analytic_fpp(FormulaId::multi_class, {{"m", 16384}, {"k_e", double(f.class_k()[cls])}, {"load", load}}),
           0.25);
    }
  }
  {
    const double m = 128, k1 = 3, k2 = 4;
    testing::Gen g(26);
    double resets = 0, sets = 0;
    const int trials = 10000;
    for (int t = 0; t < trials; ++t) {
      GeneralizedBF f(128, 3, 4, HashFamily(g.next()));
      const auto touch = f.touch(probe_key(27, t));
      resets += touch.reset.size();
      sets += touch.set.size();
    }
    band("generalized reset", resets / (trials * m), gbf_reset_probability(m, k1), 0.10);
    band("generalized set", sets / (trials * m), gbf_set_probability(m, k1, k2), 0.10);
  }
  {
    const std::size_t m = 20000, k = 4, n = 2000;
    HDBF f(m, k, 16, 0.0, 1.0, 5);
    testing::Gen g(28);
    auto vec = [&] {
      std::vector<double> v(8);
      for (auto& x : v) x = g.unit();
      return v;
    };
    for (std::size_t i = 0; i < n; ++i) f.insert_vector(vec());
    std::size_t hits = 0;
    for (int i = 0; i < 200000; ++i) hits += f.query_vector(vec()).present();
    band("high-dimensional", hits / 200000.0,
         analytic_fpp(FormulaId::high_dimensional, {{"m", double(m)}, {"k", double(k)}, {"n", double(n)}}), 0.25);
  }
  for (double load : {0.05, 0.1}) {
    OHBF f(40000, 4, 6);
    const auto n = static_cast<std::size_t>(load * f.memory_bits());
    const auto ms = members(n, 29);
    for (const auto& x : ms) f.insert(x);
    band("one-hashing n/m=" + fmt(load), empirical_fpp(f, ms, 200000, 30).measured_fpp,
         sbf_fpp(double(f.memory_bits()), 4, double(n)), 0.25);
  }
  {
    const std::size_t m = 4096, k = 4, per = 400, slots = 8;
    PersistentBF f(1, m, k, 7);
    for (std::size_t s = 0; s < slots; ++s) {
      for (const auto& x : members(per, 40 + s)) f.insert_at(x, static_cast<std::int64_t>(s));
    }
    std::size_t hits = 0;
    for (std::uint64_t i = 0; i < 100000; ++i) {
      hits += f.query_range(probe_key(31, i), 0, static_cast<std::int64_t>(slots - 1)).present();
    }
    band("persistent range", hits / 100000.0,
         analytic_fpp(FormulaId::persistent_range,
                      {{"m", double(m)}, {"k", double(k)}, {"n", double(per)}, {"slots", double(slots)}}),
         0.25);
  }
  const double secs = seconds_since(t0);
  o.require(secs < 300, "took " + fmt(secs) + " s");
  return o;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome serialization() {
  Outcome o;
  std::size_t variants = 0, mismatches = 0, golden_bad = 0;
  for (auto v : all_variants()) {
    if (!is_serializable(v)) continue;
    ++variants;
    const auto f = testing::make_fixture(v);
    const auto bytes = save_bytes(*f);
    const auto g = load_bytes(bytes);
    for (const auto& p : testing::fixture_probes(v, 10000, 12)) {
      mismatches += !testing::same_outcome(f->query(p), g->query(p));
    }
    const auto path = std::filesystem::path(BFSK_GOLDEN_DIR) / (std::string(to_string(v)) + ".bfsk");
    if (!std::filesystem::exists(path) || read_bytes(path) != bytes) {
      ++golden_bad;
      o.require(false, std::string(to_string(v)) + " golden file differs");
    }
  }
  o.require(mismatches == 0, std::to_string(mismatches) + " probe answers changed");
  o.note(std::to_string(variants) + " variants x 1e4 probes identical; " +
         std::to_string(variants - golden_bad) + " golden files stable");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"standard filter matches the closed form at the desk config", standard_formula},
      {"worked example reproduced under scripted hashing", worked_example},
      {"no false negatives, and the capability matrix matches the reference", no_false_negatives},
      {"VI-CBF beats CBF at 16 bits per element", vicbf_improvement},
      {"ACBF counters equal a reference CBF", acbf_equals_cbf},
      {"IBLT listing and cancellation", iblt_recovery},
      {"cuckoo involution audit, round trips and 84% fill", cuckoo_checks},
      {"complement filter sweep", complement_sweep},
      {"retouched clearing", retouched_checks},
      {"formula agreement band", formula_band},
      {"serialization round trip and golden files", serialization},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.pass;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
