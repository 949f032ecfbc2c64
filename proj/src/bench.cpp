#include "bloomsketch/bench.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "bloomsketch/capability_table.hpp"
#include "bloomsketch/classic.hpp"
#include "bloomsketch/compute_variants.hpp"
#include "bloomsketch/dynamic_multiset.hpp"
#include "bloomsketch/errors.hpp"
#include "bloomsketch/fpp_variants.hpp"
#include "bloomsketch/hash.hpp"
#include "bloomsketch/space_variants.hpp"
#include "bloomsketch/special_filters.hpp"

namespace bloomsketch {

using nlohmann::json;

namespace {

constexpr std::uint64_t kProbeSalt = 0x5bd1e995ULL;
constexpr std::uint64_t kPointSalt = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kInitSalt = 0xd1b54a32d192ed03ULL;

// Typed reads from a JSON object that remember which keys were used, so the
// leftovers can be reported as unknown.
class Fields {
 public:
  Fields(std::string where, const json& j) : where_(std::move(where)), j_(j) {
    if (!j_.is_object()) fail("must be a JSON object");
  }

  [[nodiscard]] bool has(const std::string& key) const { return j_.contains(key); }

  std::uint64_t u64(const std::string& key) {
    const auto& v = at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    fail("'" + key + "' must be a non-negative integer");
  }
  std::uint64_t u64(const std::string& key, std::uint64_t fallback) { return has(key) ? u64(key) : mark(fallback, key); }

  std::int64_t i64(const std::string& key, std::int64_t fallback) {
    if (!has(key)) return mark(fallback, key);
    const auto& v = at(key);
    if (v.is_number_integer()) return v.get<std::int64_t>();
    fail("'" + key + "' must be an integer");
  }

  double f64(const std::string& key, double fallback) {
    if (!has(key)) return mark(fallback, key);
    const auto& v = at(key);
    if (v.is_number()) return v.get<double>();
    fail("'" + key + "' must be a number");
  }

  bool flag(const std::string& key, bool fallback) {
    if (!has(key)) return mark(fallback, key);
    const auto& v = at(key);
    if (v.is_boolean()) return v.get<bool>();
    fail("'" + key + "' must be true or false");
  }

  std::string choice(const std::string& key, std::string fallback, std::initializer_list<std::string_view> allowed) {
    std::string s = std::move(fallback);
    if (has(key)) {
      const auto& v = at(key);
      if (!v.is_string()) fail("'" + key + "' must be a string");
      s = v.get<std::string>();
    } else {
      used_.insert(key);
    }
    if (std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
      std::string list;
      for (const auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
      fail("'" + key + "' must be one of: " + list);
    }
    return s;
  }

  std::string text(const std::string& key, std::string fallback) {
    if (!has(key)) return mark(std::move(fallback), key);
    const auto& v = at(key);
    if (!v.is_string()) fail("'" + key + "' must be a string");
    return v.get<std::string>();
  }

  std::vector<std::uint64_t> list(const std::string& key, std::vector<std::uint64_t> fallback) {
    if (!has(key)) return mark(std::move(fallback), key);
    const auto& v = at(key);
    if (!v.is_array()) fail("'" + key + "' must be an array of non-negative integers");
    std::vector<std::uint64_t> out;
    for (const auto& e : v) {
      if (!e.is_number_unsigned() && !(e.is_number_integer() && e.get<std::int64_t>() >= 0)) {
        fail("'" + key + "' must be an array of non-negative integers");
      }
      out.push_back(e.get<std::uint64_t>());
    }
    return out;
  }

  const json& raw(const std::string& key) { return at(key); }

  void done() const {
    for (const auto& [key, value] : j_.items()) {
      if (!used_.contains(key)) fail("unknown key '" + key + "'");
    }
  }

  [[noreturn]] void fail(const std::string& why) const { throw ConfigError(where_ + ": " + why); }

 private:
  const json& at(const std::string& key) {
    if (!j_.contains(key)) fail("missing required key '" + key + "'");
    used_.insert(key);
    return j_.at(key);
  }
  template <class T>
  T mark(T v, const std::string& key) {
    used_.insert(key);
    return v;
  }

  std::string where_;
  const json& j_;
  std::set<std::string> used_;
};

std::vector<WBFProfileEntry> read_profile(const json& j) {
  if (!j.is_array()) throw ConfigError("weighted: 'profile' must be an array");
  std::vector<WBFProfileEntry> out;
  for (const auto& e : j) {
    Fields f("weighted profile entry", e);
    WBFProfileEntry p;
    p.key = f.text("key", "");
    p.query_frequency = f.f64("f", 1.0);
    p.membership = f.f64("x", 0.0);
    f.done();
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<std::string> universe_keys(std::uint64_t size) {
  std::vector<std::string> out;
  out.reserve(size);
  for (std::uint64_t i = 0; i < size; ++i) out.push_back(member_key(i));
  return out;
}

// Reads every parameter of the variant; constructs the filter only when
// `construct` is set. This lets config validation run the exact same checks
// without allocating.
std::unique_ptr<MembershipFilter> read_variant(Variant v, const json& params, std::uint64_t seed,
                                               std::span<const std::string> members, bool construct) {
  Fields p(std::string(to_string(v)) + " params", params);
  const HashFamily h(seed);
  std::unique_ptr<MembershipFilter> out;
  auto make = [&](auto factory) {
    p.done();
    if (construct) out = factory();
  };
  switch (v) {
    case Variant::standard: {
      const auto m = p.u64("m"), k = p.u64("k");
      make([&] { return std::make_unique<StandardBF>(m, k, h); });
      break;
    }
    case Variant::counting: {
      const auto m = p.u64("m"), k = p.u64("k");
      make([&] { return std::make_unique<CountingBF>(m, k, h); });
      break;
    }
    case Variant::spectral: {
      const auto m = p.u64("m"), k = p.u64("k");
      const auto mode = p.choice("mode", "minimum_increase", {"minimum_increase", "plain"});
      const auto width = p.u64("width", 8);
      make([&] {
        return std::make_unique<SpectralBF>(
            m, k, mode == "plain" ? SpectralMode::plain : SpectralMode::minimum_increase,
            static_cast<unsigned>(std::min<std::uint64_t>(width, 64)), h);
      });
      break;
    }
    case Variant::adaptive: {
      const auto m = p.u64("m"), k = p.u64("k"), probe = p.u64("max_probe", 16);
      make([&] { return std::make_unique<AdaptiveBF>(m, k, probe, h); });
      break;
    }
    case Variant::yes_no: {
      const auto yes = p.u64("p"), k = p.u64("k"), q = p.u64("q"), r = p.u64("r"), kp = p.u64("k_prime");
      make([&] { return std::make_unique<YesNoBF>(yes, k, q, r, kp, h); });
      break;
    }
    case Variant::vicbf: {
      const auto m = p.u64("m"), k = p.u64("k");
      const auto scheme = p.choice("scheme", "bh", {"bh", "vi"});
      auto L = p.list("L", {2, 3, 4, 5});
      const auto c1 = p.u64("c1_bits", 2), c2 = p.u64("c2_bits", 4);
      make([&] {
        return std::make_unique<VICBF>(m, k, scheme == "vi" ? VIScheme::vi : VIScheme::bh, L,
                                       static_cast<unsigned>(std::min<std::uint64_t>(c1, 64)),
                                       static_cast<unsigned>(std::min<std::uint64_t>(c2, 64)), h);
      });
      break;
    }
    case Variant::fingerprint_cbf: {
      const auto m = p.u64("m"), k = p.u64("k"), c = p.u64("counter_bits", 4), f = p.u64("fp_bits", 8);
      make([&] {
        return std::make_unique<FPCBF>(m, k, static_cast<unsigned>(std::min<std::uint64_t>(c, 64)),
                                       static_cast<unsigned>(std::min<std::uint64_t>(f, 64)), h);
      });
      break;
    }
    case Variant::retouched: {
      const auto m = p.u64("m"), k = p.u64("k");
      make([&] { return std::make_unique<RetouchedBF>(m, k, h); });
      break;
    }
    case Variant::accurate_cbf: {
      const auto s1 = p.u64("s1"), k = p.u64("k"), levels = p.u64("levels", 4);
      make([&] { return std::make_unique<ACBF>(s1, k, levels, h); });
      break;
    }
    case Variant::generalized: {
      const auto m = p.u64("m"), k1 = p.u64("k1"), k2 = p.u64("k2");
      const auto ones = p.f64("one_fraction", 0.0);
      make([&] {
        return ones == 0.0 ? std::make_unique<GeneralizedBF>(m, k1, k2, h)
                           : std::make_unique<GeneralizedBF>(m, k1, k2, ones, seed ^ kInitSalt, h);
      });
      break;
    }
    case Variant::multi_class: {
      const auto m = p.u64("m");
      const auto ks = p.list("class_k", {});
      make([&] { return std::make_unique<MultiClassBF>(m, std::vector<std::size_t>(ks.begin(), ks.end()), h); });
      break;
    }
    case Variant::complement: {
      const auto m = p.u64("m"), k = p.u64("k"), mc = p.u64("m_c"), kc = p.u64("k_c"), u = p.u64("universe");
      if (u == 0 || u > (std::uint64_t{1} << 24)) p.fail("'universe' must lie in [1, 2^24]");
      make([&] {
        const auto universe = universe_keys(u);
        return std::make_unique<ComplementBF>(members, universe, m, k, mc, kc, seed);
      });
      break;
    }
    case Variant::dleft_cbf: {
      const auto d = p.u64("d", 4), b = p.u64("b"), cells = p.u64("cells", 8);
      const auto r = p.u64("remainder_bits", 12), c = p.u64("counter_bits", 2);
      make([&] {
        return std::make_unique<DlCBF>(d, b, cells, static_cast<unsigned>(std::min<std::uint64_t>(r, 64)),
                                       static_cast<unsigned>(std::min<std::uint64_t>(c, 64)), seed);
      });
      break;
    }
    case Variant::bfah: {
      const auto m = p.u64("m"), k = p.u64("k");
      make([&] { return std::make_unique<BFAH>(m, k, h); });
      break;
    }
    case Variant::matrix: {
      const auto m = p.u64("m"), k = p.u64("k");
      ChunkerConfig chunker;
      chunker.style = p.choice("style", "word_shingles", {"word_shingles", "lines"}) == "lines"
                          ? ChunkStyle::lines
                          : ChunkStyle::word_shingles;
      chunker.shingle_words = p.u64("shingle_words", 5);
      chunker.stride = p.u64("stride", 1);
      const auto threshold = p.u64("threshold", 0);
      make([&] { return std::make_unique<MatrixBF>(m, k, chunker, threshold, h); });
      break;
    }
    case Variant::compacted: {
      const auto m = p.u64("m"), k = p.u64("k"), nb = p.u64("nb"), w = p.u64("w");
      const auto mode = p.choice("mode", "rules", {"rules", "value"});
      // Compaction happens after the build; the result is read-only.
      make([&] {
        StandardBF base(m, k, h);
        for (const auto& item : members) base.insert(item);
        return std::make_unique<CompactedBF>(compact(base, nb, static_cast<unsigned>(std::min<std::uint64_t>(w, 64)),
                                                     seed, mode == "value" ? CompactionMode::value
                                                                           : CompactionMode::rules));
      });
      break;
    }
    case Variant::one_hashing: {
      const auto m = p.u64("m"), k = p.u64("k");
      make([&] { return std::make_unique<OHBF>(m, k, seed); });
      break;
    }
    case Variant::ultra_fast: {
      const auto l = p.u64("l"), k = p.u64("k", 8), w = p.u64("w", 64);
      make([&] { return std::make_unique<UFBF>(l, k, w, seed); });
      break;
    }
    case Variant::dynamic: {
      const auto m = p.u64("m"), k = p.u64("k"), cap = p.u64("capacity");
      make([&] { return std::make_unique<DynamicBF>(m, k, cap, seed); });
      break;
    }
    case Variant::weighted: {
      const auto m = p.u64("m");
      const auto expected = p.u64("n_expected", members.size());
      const auto k_max = p.u64("k_max", 16);
      std::vector<WBFProfileEntry> profile;
      if (p.has("profile")) profile = read_profile(p.raw("profile"));
      make([&] {
        // Without a profile every member gets the same frequency and an
        // uninformative membership likelihood, which yields uniform k.
        if (profile.empty()) {
          for (const auto& item : members) profile.push_back({item, 1.0, 0.5});
        }
        return std::make_unique<WeightedBF>(m, std::max<std::uint64_t>(expected, 1), k_max, profile, seed);
      });
      break;
    }
    case Variant::iblt: {
      const auto m = p.u64("m"), k = p.u64("k");
      make([&] { return std::make_unique<IBLT>(m, k, seed); });
      break;
    }
    case Variant::shifting: {
      const auto m = p.u64("m"), k = p.u64("k"), w = p.u64("w_bar", 64);
      make([&] { return std::make_unique<ShiftingBF>(m, k, w, seed); });
      break;
    }
    case Variant::deletable: {
      const auto m = p.u64("m"), k = p.u64("k"), regions = p.u64("regions");
      make([&] { return std::make_unique<DeletableBF>(m, k, regions, h); });
      break;
    }
    case Variant::distance_sensitive: {
      DSBFParams d;
      d.dim = p.u64("dim", d.dim);
      d.eps = p.f64("eps", d.eps);
      d.delta = p.f64("delta", d.delta);
      d.capacity = p.u64("capacity", d.capacity);
      d.beta = p.f64("beta", d.beta);
      d.gamma = p.f64("gamma", d.gamma);
      d.bucket_bits_per_entry = p.f64("bucket_bits_per_entry", d.bucket_bits_per_entry);
      d.bucket_k = p.u64("bucket_k", d.bucket_k);
      make([&] { return std::make_unique<DistanceSensitiveBF>(d, seed); });
      break;
    }
    case Variant::cuckoo: {
      const auto buckets = p.u64("buckets"), slots = p.u64("slots", 4), f = p.u64("fp_bits", 12);
      const auto kicks = p.u64("max_kicks", 500);
      make([&] {
        return std::make_unique<CuckooFilter>(buckets, slots, static_cast<unsigned>(std::min<std::uint64_t>(f, 64)),
                                              kicks, seed);
      });
      break;
    }
    case Variant::persistent: {
      const auto g = p.i64("granularity", 1);
      const auto m = p.u64("m"), k = p.u64("k");
      make([&] { return std::make_unique<PersistentBF>(g, m, k, seed); });
      break;
    }
    case Variant::high_dimensional: {
      const auto m = p.u64("m"), k = p.u64("k"), q = p.u64("q", 16);
      const auto lo = p.f64("low", 0.0), hi = p.f64("high", 1.0);
      make([&] {
        return std::make_unique<HDBF>(m, k, static_cast<unsigned>(std::min<std::uint64_t>(q, 1u << 16)), lo, hi, seed);
      });
      break;
    }
  }
  return out;
}

std::uint64_t complement_universe(const json& params) {
  return params.contains("universe") ? params.at("universe").get<std::uint64_t>() : 0;
}

std::size_t hash_count(const MembershipFilter& f) {
  switch (f.variant()) {
    case Variant::standard: return dynamic_cast<const StandardBF&>(f).k();
    case Variant::counting: return dynamic_cast<const CountingBF&>(f).k();
    case Variant::spectral: return dynamic_cast<const SpectralBF&>(f).k();
    case Variant::adaptive: return dynamic_cast<const AdaptiveBF&>(f).k();
    case Variant::yes_no: return dynamic_cast<const YesNoBF&>(f).k();
    case Variant::vicbf: return dynamic_cast<const VICBF&>(f).k();
    case Variant::fingerprint_cbf: return dynamic_cast<const FPCBF&>(f).k();
    case Variant::retouched: return dynamic_cast<const RetouchedBF&>(f).base().k();
    case Variant::accurate_cbf: return dynamic_cast<const ACBF&>(f).k();
    case Variant::generalized: return dynamic_cast<const GeneralizedBF&>(f).k2();
    case Variant::multi_class: return dynamic_cast<const MultiClassBF&>(f).class_k().front();
    case Variant::complement: return dynamic_cast<const ComplementBF&>(f).filter_s().k();
    case Variant::dleft_cbf: return dynamic_cast<const DlCBF&>(f).d();
    case Variant::bfah: return dynamic_cast<const BFAH&>(f).k();
    case Variant::matrix: return dynamic_cast<const MatrixBF&>(f).k();
    case Variant::compacted: return dynamic_cast<const CompactedBF&>(f).k();
    case Variant::one_hashing: return dynamic_cast<const OHBF&>(f).k();
    case Variant::ultra_fast: return dynamic_cast<const UFBF&>(f).k();
    case Variant::dynamic: return dynamic_cast<const DynamicBF&>(f).k();
    case Variant::weighted: return dynamic_cast<const WeightedBF&>(f).k_avg();
    case Variant::iblt: return dynamic_cast<const IBLT&>(f).k();
    case Variant::shifting: return dynamic_cast<const ShiftingBF&>(f).k();
    case Variant::deletable: return dynamic_cast<const DeletableBF&>(f).k();
    case Variant::distance_sensitive: return dynamic_cast<const DistanceSensitiveBF&>(f).geometry().k;
    case Variant::cuckoo: return 2;
    case Variant::persistent: return dynamic_cast<const PersistentBF&>(f).k();
    case Variant::high_dimensional: return dynamic_cast<const HDBF&>(f).k();
  }
  return 0;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::optional<OutputFormat> parse_format(std::string_view s) noexcept {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  return std::nullopt;
}

RunConfig parse_run_config(const json& doc) {
  Fields top("config", doc);
  RunConfig cfg;
  const auto name = top.text("variant", "");
  const auto v = parse_variant(name);
  if (!v) top.fail("unknown variant '" + name + "'");
  cfg.variant = *v;
  if (top.has("params")) cfg.params = top.raw("params");
  cfg.seed = top.u64("seed", 0);
  const auto format = parse_format(top.choice("format", "csv", {"csv", "json"}));
  cfg.format = *format;
  cfg.out = top.text("out", "");
  if (top.has("workload")) {
    Fields w("workload", top.raw("workload"));
    auto& s = cfg.workload.stream;
    s.dist = w.choice("distribution", "uniform", {"uniform", "zipf"}) == "zipf" ? Distribution::zipf
                                                                               : Distribution::uniform;
    s.zipf_s = w.f64("zipf_s", 1.0);
    s.n = w.u64("n", s.n);
    s.universe = w.u64("universe", s.universe);
    s.unique = w.flag("unique", s.dist == Distribution::uniform);
    cfg.workload.probes = w.u64("probes", cfg.workload.probes);
    cfg.workload.deletions = w.u64("deletions", 0);
    w.done();
    if (s.dist == Distribution::zipf && !(s.zipf_s > 0.0)) w.fail("'zipf_s' must be positive");
    if (s.dist == Distribution::zipf && s.unique) w.fail("'unique' draws are only available for uniform streams");
    if (s.universe == 0) w.fail("'universe' must be positive");
    if (s.unique && s.universe < s.n) w.fail("'universe' must be at least 'n' for unique draws");
    if (cfg.workload.probes == 0) w.fail("'probes' must be positive");
    if (cfg.workload.deletions > s.n) w.fail("'deletions' cannot exceed 'n'");
  }
  top.done();
  (void)read_variant(cfg.variant, cfg.params, cfg.seed, {}, false);
  if (cfg.variant == Variant::complement && complement_universe(cfg.params) <= cfg.workload.stream.n) {
    throw ConfigError("complement params: 'universe' must exceed the workload size n");
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
  return parse_run_config(doc);
}

std::unique_ptr<MembershipFilter> make_filter(Variant v, const json& params, std::uint64_t seed,
                                              std::span<const std::string> members) {
  try {
    return read_variant(v, params, seed, members, true);
  } catch (const ParameterError& e) {
    throw ConfigError(std::string(to_string(v)) + " params: " + e.what());
  } catch (const InputError& e) {
    throw ConfigError(std::string(to_string(v)) + " params: " + e.what());
  }
}

std::function<std::string(std::string_view)> item_encoder(Variant v, const json& params, std::uint64_t seed) {
  if (v == Variant::distance_sensitive) {
    const std::size_t dim = params.contains("dim") ? params.at("dim").get<std::size_t>() : DSBFParams{}.dim;
    return [dim, seed](std::string_view key) {
      std::string bits(dim, '0');
      for (std::size_t block = 0; block * 64 < dim; ++block) {
        const auto word = hash64(key, seed ^ (kPointSalt + block));
        for (std::size_t i = block * 64; i < std::min(dim, block * 64 + 64); ++i) {
          if ((word >> (i % 64)) & 1u) bits[i] = '1';
        }
      }
      return bits;
    };
  }
  if (v == Variant::complement) {
    const auto u = complement_universe(params);
    return [u, seed](std::string_view key) { return member_key(hash64(key, seed ^ kPointSalt) % u); };
  }
  return {};
}

std::optional<double> predict_fpp(const MembershipFilter& f, const json& params) {
  const auto n = static_cast<double>(f.size());
  auto sbf = [&](double m, double k) { return sbf_fpp(m, k, n); };
  try {
    switch (f.variant()) {
      case Variant::standard: {
        const auto& x = dynamic_cast<const StandardBF&>(f);
        return sbf(double(x.m()), double(x.k()));
      }
      case Variant::counting: {
        const auto& x = dynamic_cast<const CountingBF&>(f);
        return sbf(double(x.m()), double(x.k()));
      }
      case Variant::spectral: {
        const auto& x = dynamic_cast<const SpectralBF&>(f);
        return sbf(double(x.counters().size()), double(x.k()));
      }
      case Variant::adaptive: {
        const auto& x = dynamic_cast<const AdaptiveBF&>(f);
        return sbf(double(x.bits().size()), double(x.k()));
      }
      case Variant::bfah: {
        const auto& x = dynamic_cast<const BFAH&>(f);
        return sbf(double(x.bits().size()), double(x.k()));
      }
      case Variant::one_hashing:
      case Variant::ultra_fast:
        return sbf(double(f.memory_bits()), double(hash_count(f)));
      case Variant::deletable: {
        const auto& x = dynamic_cast<const DeletableBF&>(f);
        return sbf(double(x.m()), double(x.k()));
      }
      case Variant::yes_no: {
        // A probe is reported present when the yes-filter matches and its
        // no-filter does not.
        const auto& x = dynamic_cast<const YesNoBF&>(f);
        const double yes = 1.0 - std::exp(-double(x.k()) * n / double(x.p()));
        const double per_no = double(x.reported()) / double(x.r());
        const double no = 1.0 - std::exp(-double(x.k_prime()) * per_no / double(x.q()));
        return std::pow(yes, double(x.k())) * (1.0 - std::pow(no, double(x.k_prime())));
      }
      case Variant::vicbf: {
        const auto& x = dynamic_cast<const VICBF&>(f);
        const double L = double(x.increments().size());
        if (x.scheme() == VIScheme::bh) {
          return analytic_fpp(FormulaId::bh, {{"m", double(x.m())}, {"k", double(x.k())}, {"n", n}, {"l", L}});
        }
        return analytic_fpp(FormulaId::vicbf, {{"m", double(x.m())}, {"k", double(x.k())}, {"n", n}, {"L", L}});
      }
      case Variant::fingerprint_cbf: {
        const auto& x = dynamic_cast<const FPCBF&>(f);
        return analytic_fpp(FormulaId::fpcbf, {{"m", double(x.m())},
                                               {"k", double(x.k())},
                                               {"n", n},
                                               {"f", double(x.fingerprints().width())}});
      }
      case Variant::retouched: {
        const auto& x = dynamic_cast<const RetouchedBF&>(f);
        return analytic_fpp(FormulaId::retouched, {{"m", double(x.base().m())},
                                                   {"k", double(x.base().k())},
                                                   {"n", n},
                                                   {"cleared", double(x.cleared_log().size())}});
      }
      case Variant::accurate_cbf: {
        const auto& x = dynamic_cast<const ACBF&>(f);
        return analytic_fpp(FormulaId::acbf,
                            {{"m", double(x.s1())}, {"k", double(x.k())}, {"n", n}, {"first_level", double(x.s1())}});
      }
      case Variant::generalized: {
        const auto& x = dynamic_cast<const GeneralizedBF&>(f);
        const double ones = params.contains("one_fraction") ? params.at("one_fraction").get<double>() : 0.0;
        return analytic_fpp(FormulaId::generalized, {{"m", double(x.m())},
                                                     {"k1", double(x.k1())},
                                                     {"k2", double(x.k2())},
                                                     {"n", n},
                                                     {"one_fraction", ones}});
      }
      case Variant::multi_class: {
        const auto& x = dynamic_cast<const MultiClassBF&>(f);
        const double k = double(x.class_k().front());
        return analytic_fpp(FormulaId::multi_class, {{"m", double(x.m())}, {"k_e", k}, {"load", n * k}});
      }
      case Variant::complement: {
        const auto& x = dynamic_cast<const ComplementBF&>(f);
        return analytic_fpp(FormulaId::complement, {{"m", double(x.filter_s().m())},
                                                    {"k", double(x.filter_s().k())},
                                                    {"n", n},
                                                    {"m_c", double(x.filter_complement().m())},
                                                    {"k_c", double(x.filter_complement().k())},
                                                    {"n_c", double(x.universe_size()) - n}});
      }
      case Variant::shifting: {
        const auto& x = dynamic_cast<const ShiftingBF&>(f);
        return analytic_fpp(FormulaId::shifting,
                            {{"m", double(x.m())}, {"k", double(x.k())}, {"n", n}, {"w_bar", double(x.w_bar())}});
      }
      case Variant::dynamic: {
        const auto& x = dynamic_cast<const DynamicBF&>(f);
        return analytic_fpp(FormulaId::dynamic,
                            {{"m", double(x.m())}, {"k", double(x.k())}, {"capacity", double(x.capacity())}, {"n", n}});
      }
      case Variant::weighted: {
        const auto& x = dynamic_cast<const WeightedBF&>(f);
        return analytic_fpp(FormulaId::weighted,
                            {{"m", double(x.bits().size())}, {"k", double(x.k_avg())}, {"n", n}});
      }
      case Variant::persistent: {
        const auto& x = dynamic_cast<const PersistentBF&>(f);
        const double slots = std::max<double>(1.0, double(x.segments().size()));
        return analytic_fpp(FormulaId::persistent_range,
                            {{"m", double(x.m())}, {"k", double(x.k())}, {"n", n / slots}, {"slots", slots}});
      }
      case Variant::high_dimensional: {
        const auto& x = dynamic_cast<const HDBF&>(f);
        return analytic_fpp(FormulaId::high_dimensional, {{"m", double(x.m())}, {"k", double(x.k())}, {"n", n}});
      }
      default:
        return std::nullopt;
    }
  } catch (const ParameterError&) {
    return std::nullopt;
  }
}

BuiltFilter build_filter(const RunConfig& cfg) {
  const auto& w = cfg.workload;
  if (w.deletions > 0 && !capabilities_of(cfg.variant).deletion) {
    throw CapabilityError(std::string(to_string(cfg.variant)) +
                          " does not support deletion, which the workload requires");
  }
  BuiltFilter out;
  out.members = generate_stream(w.stream, cfg.seed);
  if (const auto encode = item_encoder(cfg.variant, cfg.params, cfg.seed)) {
    for (auto& m : out.members) m = encode(m);
  }
  if (cfg.variant == Variant::complement) {
    std::sort(out.members.begin(), out.members.end());
    out.members.erase(std::unique(out.members.begin(), out.members.end()), out.members.end());
  }
  out.filter = make_filter(cfg.variant, cfg.params, cfg.seed, out.members);
  // Complement and compacted filters are built from the member set at once.
  if (cfg.variant != Variant::complement && cfg.variant != Variant::compacted) {
    try {
      for (const auto& item : out.members) out.filter->insert(item);
    } catch (const InputError& e) {
      throw ConfigError(std::string(to_string(cfg.variant)) + ": " + e.what());
    }
  }
  if (w.deletions > 0) {
    for (std::uint64_t i = 0; i < w.deletions; ++i) (void)out.filter->remove(out.members[i]);
    out.members.erase(out.members.begin(), out.members.begin() + static_cast<std::ptrdiff_t>(w.deletions));
  }
  return out;
}

TrialReport run_trial(const RunConfig& cfg, bool timed) {
  auto built = build_filter(cfg);
  ProbeOptions opts;
  opts.time_queries = timed;
  opts.encode = item_encoder(cfg.variant, cfg.params, cfg.seed);
  const auto predicted = predict_fpp(*built.filter, cfg.params);
  auto rep = empirical_fpp(*built.filter, built.members, cfg.workload.probes, cfg.seed ^ kProbeSalt, predicted, opts);
  rep.k = hash_count(*built.filter);
  return rep;
}

std::string format_reports(std::span<const TrialReport> reports, OutputFormat format, std::uint64_t seed) {
  if (format == OutputFormat::json) {
    json rows = json::array();
    for (const auto& r : reports) {
      json row;
      row["variant"] = r.variant;
      row["m"] = r.m;
      row["k"] = r.k;
      row["n"] = r.n;
      row["bits_per_element"] = r.bits_per_element;
      row["predicted_fpp"] = r.predicted ? json(*r.predicted) : json(nullptr);
      row["measured_fpp"] = r.measured_fpp;
      row["ci_lo"] = r.ci.lo;
      row["ci_hi"] = r.ci.hi;
      row["throughput"] = r.throughput ? json(*r.throughput) : json(nullptr);
      row["n_probes"] = r.n_probes;
      row["seed"] = seed;
      rows.push_back(std::move(row));
    }
    return rows.dump(2) + "\n";
  }
  std::string out = "variant,m,k,n,bits_per_element,predicted_fpp,measured_fpp,ci_lo,ci_hi,throughput,n_probes,seed\n";
  for (const auto& r : reports) {
    out += r.variant + "," + std::to_string(r.m) + "," + std::to_string(r.k) + "," + std::to_string(r.n) + "," +
           fmt(r.bits_per_element) + "," + (r.predicted ? fmt(*r.predicted) : "NA") + "," + fmt(r.measured_fpp) +
           "," + fmt(r.ci.lo) + "," + fmt(r.ci.hi) + "," + (r.throughput ? fmt(*r.throughput) : "NA") + "," +
           std::to_string(r.n_probes) + "," + std::to_string(seed) + "\n";
  }
  return out;
}

std::string capability_matrix(OutputFormat format) {
  const auto& rows = capability_rows();
  const auto& missing = unimplemented_reference_rows();
  if (format == OutputFormat::json) {
    json doc;
    doc["rows"] = json::array();
    for (const auto& r : rows) {
      doc["rows"].push_back({{"variant", to_string(r.variant)},
                             {"name", r.name},
                             {"main_trait", r.main_trait},
                             {"C", r.counting},
                             {"D", r.deletion},
                             {"FN", r.false_negatives},
                             {"result", r.result},
                             {"in_reference_table", r.in_reference_table}});
    }
    doc["not_implemented"] = json::array();
    for (const auto name : missing) doc["not_implemented"].push_back(name);
    return doc.dump(2) + "\n";
  }
  std::string out = "variant,name,main_trait,C,D,FN,result,in_reference_table\n";
  for (const auto& r : rows) {
    out += csv_field(to_string(r.variant)) + "," + csv_field(r.name) + "," + csv_field(r.main_trait) + "," +
           csv_field(r.counting) + "," + csv_field(r.deletion) + "," + csv_field(r.false_negatives) + "," +
           csv_field(r.result) + "," + (r.in_reference_table ? "yes" : "no") + "\n";
  }
  std::string names;
  for (const auto name : missing) names += (names.empty() ? "" : "; ") + std::string(name);
  out += "# not implemented: " + names + "\n";
  return out;
}

}  // namespace bloomsketch
