#include "bloomsketch/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/binomial.hpp>

#include "bloomsketch/classic.hpp"
#include "bloomsketch/compute_variants.hpp"
#include "bloomsketch/dynamic_multiset.hpp"
#include "bloomsketch/errors.hpp"
#include "bloomsketch/fpp_variants.hpp"
#include "bloomsketch/special_filters.hpp"

namespace bloomsketch {

namespace {

struct FormulaInfo {
  FormulaId id;
  std::string_view name;
  std::vector<std::string_view> params;
};

const std::vector<FormulaInfo>& formula_table() {
  static const std::vector<FormulaInfo> table = {
      {FormulaId::sbf, "sbf", {"m", "k", "n", "exact?"}},
      {FormulaId::yes_no, "yes_no", {"p", "q", "k", "k_prime", "n", "n_no?"}},
      {FormulaId::bh, "bh", {"m", "k", "n", "l", "h?"}},
      {FormulaId::vicbf, "vicbf", {"m", "k", "n", "L"}},
      {FormulaId::fpcbf, "fpcbf", {"m", "k", "n", "f", "c?", "budget_bits?"}},
      {FormulaId::retouched, "retouched", {"m", "k", "n", "cleared?"}},
      {FormulaId::acbf, "acbf", {"m", "k", "n", "first_level?"}},
      {FormulaId::generalized, "generalized", {"m", "k1", "k2", "n", "one_fraction?", "exact?"}},
      {FormulaId::multi_class, "multi_class", {"m", "k_e", "load"}},
      {FormulaId::complement, "complement", {"m", "k", "n", "m_c", "k_c", "n_c"}},
      {FormulaId::shifting, "shifting", {"m", "k", "n", "w_bar"}},
      {FormulaId::dynamic, "dynamic", {"m", "k", "capacity", "n"}},
      {FormulaId::weighted, "weighted", {"m", "k", "n"}},
      {FormulaId::deletable, "deletable", {"m", "k", "n", "regions", "literal?"}},
      {FormulaId::cuckoo_space, "cuckoo_space", {"f", "alpha"}},
      {FormulaId::persistent_range, "persistent_range", {"m", "k", "n", "slots"}},
      {FormulaId::high_dimensional, "high_dimensional", {"m", "k", "n"}},
  };
  return table;
}

class Reader {
 public:
  Reader(FormulaId id, const FormulaParams& p) : id_(id), p_(p) {}

  double get(std::string_view name) const {
    const auto it = p_.find(name);
    if (it == p_.end()) {
      throw ParameterError(std::string(to_string(id_)) + ": missing parameter '" + std::string(name) + "'");
    }
    if (!std::isfinite(it->second)) bad(name, "must be finite");
    return it->second;
  }
  double get(std::string_view name, double fallback) const {
    return p_.contains(name) ? get(name) : fallback;
  }
  double positive(std::string_view name) const {
    const double v = get(name);
    if (!(v > 0.0)) bad(name, "must be positive");
    return v;
  }
  double non_negative(std::string_view name) const {
    const double v = get(name);
    if (v < 0.0) bad(name, "must be non-negative");
    return v;
  }
  [[noreturn]] void bad(std::string_view name, std::string_view why) const {
    throw ParameterError(std::string(to_string(id_)) + ": parameter '" + std::string(name) + "' " + std::string(why));
  }

 private:
  FormulaId id_;
  const FormulaParams& p_;
};

double one_minus_inv_pow(double m, double e) { return std::pow(1.0 - 1.0 / m, e); }

double evaluate(FormulaId id, const FormulaParams& params) {
  const Reader r(id, params);
  switch (id) {
    case FormulaId::sbf: {
      const double m = r.positive("m");
      return sbf_fpp(m, r.positive("k"), r.non_negative("n"), r.get("exact", 1.0) != 0.0);
    }
    case FormulaId::yes_no: {
      const double p = r.positive("p");
      const double q = r.positive("q");
      const double k = r.positive("k");
      const double kp = r.positive("k_prime");
      const double n = r.non_negative("n");
      const double n_no = params.contains("n_no") ? r.non_negative("n_no") : n;
      if (kp >= k) r.bad("k_prime", "must be below k");
      return std::pow(1.0 - std::exp(-k * n / p), k) * std::pow(1.0 - std::exp(-kp * n_no / q), kp);
    }
    case FormulaId::bh: {
      const double m = r.positive("m");
      const double k = r.positive("k");
      const double n = r.non_negative("n");
      const double l = r.positive("l");
      if (m < 1.0 || l < 1.0) r.bad("m", "and l must be at least 1");
      const double h = params.contains("h") ? r.non_negative("h") : static_cast<double>(bh_default_cap(m, k, n));
      const auto trials = std::round(n * k);
      if (trials == 0.0) return 0.0;
      const boost::math::binomial_distribution<double> X(trials, 1.0 / m);
      double keep = 0.0;
      for (double j = 0; j <= std::min(h, trials); j += 1.0) keep += boost::math::pdf(X, j) * std::pow(1.0 - 1.0 / l, j);
      return std::pow(std::clamp(1.0 - keep, 0.0, 1.0), k);
    }
    case FormulaId::vicbf: {
      const double m = r.positive("m");
      const double k = r.positive("k");
      const double nk = r.non_negative("n") * k;
      const double L = r.positive("L");
      const double base = one_minus_inv_pow(m, nk);
      const double one = (L - 1.0) / L * nk / m * (nk >= 1.0 ? one_minus_inv_pow(m, nk - 1.0) : 0.0);
      const double two = (L - 1.0) * (L + 1.0) / (6.0 * L * L) * (nk * (nk - 1.0) / 2.0) / (m * m) *
                         (nk >= 2.0 ? one_minus_inv_pow(m, nk - 2.0) : 0.0);
      return std::pow(std::clamp(1.0 - base - one - two, 0.0, 1.0), k);
    }
    case FormulaId::fpcbf: {
      double mp = r.positive("m");
      const double k = r.positive("k");
      const double nk = r.non_negative("n") * k;
      const double f = r.positive("f");
      if (params.contains("budget_bits")) {
        const double c = r.get("c", 4.0);
        if (c <= 0.0) r.bad("c", "must be positive");
        mp = r.positive("budget_bits") / (c + f);
      }
      if (mp < 1.0) r.bad("m", "yields fewer than one cell");
      const double miss = (std::exp2(f) - 1.0) / std::exp2(f);
      const double single = nk >= 1.0 ? miss * nk / mp * one_minus_inv_pow(mp, nk - 1.0) : 0.0;
      return std::pow(std::clamp(1.0 - one_minus_inv_pow(mp, nk) - single, 0.0, 1.0), k);
    }
    case FormulaId::retouched: {
      const double m = r.positive("m");
      const double k = r.positive("k");
      const double n = r.non_negative("n");
      const double s = r.get("cleared", 1.0);
      if (s < 0.0) r.bad("cleared", "must be non-negative");
      const double p1 = 1.0 - one_minus_inv_pow(m, k * n);
      if (p1 * m < 1.0) return s > 0.0 ? 0.0 : sbf_fpp(m, k, n);
      const double d1 = std::pow(1.0 - 1.0 / (p1 * m), k);
      return sbf_fpp(m, k, n) * std::pow(d1, s);
    }
    case FormulaId::acbf: {
      const double m = r.positive("m");
      const double k = r.positive("k");
      const double n = r.non_negative("n");
      const double s = params.contains("first_level") ? r.positive("first_level") : 4.0 * m - k * n;
      if (!(s >= 1.0)) r.bad("m", "too small: 4m - kn must be at least 1");
      return sbf_fpp(s, k, n);
    }
    case FormulaId::generalized: {
      const double m = r.positive("m");
      const double k1 = r.non_negative("k1");
      const double k2 = r.non_negative("k2");
      const double n = r.non_negative("n");
      const double ones = r.get("one_fraction", 0.5);
      if (ones < 0.0 || ones > 1.0) r.bad("one_fraction", "must lie in [0, 1]");
      const bool exact = r.get("exact", 1.0) != 0.0;
      const double p = gbf_zero_probability(m, k1, k2, n, 1.0 - ones);
      const double l1 = m * gbf_reset_probability(m, k1, exact);
      const double l2 = m * gbf_set_probability(m, k1, k2, exact);
      return std::pow(p, l1) * std::pow(1.0 - p, l2);
    }
    case FormulaId::multi_class: {
      const double m = r.positive("m");
      return std::pow(1.0 - one_minus_inv_pow(m, r.non_negative("load")), r.positive("k_e"));
    }
    case FormulaId::complement: {
      const double n = r.non_negative("n");
      const double nc = r.non_negative("n_c");
      if (n + nc <= 0.0) r.bad("n", "and n_c cannot both be zero");
      const double f = sbf_fpp(r.positive("m"), r.positive("k"), n);
      const double fc = sbf_fpp(r.positive("m_c"), r.positive("k_c"), nc);
      return nc / (n + nc) * f + n / (n + nc) * fc;
    }
    case FormulaId::shifting: {
      const double m = r.positive("m");
      const double k = r.positive("k");
      const double w = r.positive("w_bar");
      if (w < 2.0) r.bad("w_bar", "must be at least 2");
      const double p = std::exp(-r.non_negative("n") * k / m);
      return std::pow(1.0 - p, k / 2.0) * std::pow(1.0 - p + p * p / (w - 1.0), k / 2.0);
    }
    case FormulaId::dynamic:
      return dbf_fpp(r.positive("m"), r.positive("k"), r.positive("capacity"), r.non_negative("n"));
    case FormulaId::weighted: {
      const double m = r.positive("m");
      const double k = r.positive("k");
      const double p = std::exp(-r.non_negative("n") * k / m);
      return std::pow(1.0 - p, k);
    }
    case FormulaId::deletable: {
      const double m = r.positive("m");
      const double regions = r.positive("regions");
      if (regions > m) r.bad("regions", "cannot exceed m");
      return deletable_probability(m, r.positive("k"), r.non_negative("n"), regions, r.get("literal", 0.0) != 0.0);
    }
    case FormulaId::cuckoo_space: {
      const double alpha = r.positive("alpha");
      if (alpha > 1.0) r.bad("alpha", "must lie in (0, 1]");
      return r.positive("f") / alpha;
    }
    case FormulaId::persistent_range: {
      const double eps = sbf_fpp(r.positive("m"), r.positive("k"), r.non_negative("n"));
      const double slots = r.positive("slots");
      return 1.0 - std::pow(1.0 - eps, slots);
    }
    case FormulaId::high_dimensional: {
      const double m = r.positive("m");
      const double k = r.positive("k");
      return std::pow(1.0 - std::exp(-k * r.non_negative("n") / m), k);
    }
  }
  throw ParameterError("unknown formula");
}

}  // namespace

const std::vector<FormulaId>& all_formulas() {
  static const std::vector<FormulaId> ids = [] {
    std::vector<FormulaId> out;
    for (const auto& f : formula_table()) out.push_back(f.id);
    return out;
  }();
  return ids;
}

std::string_view to_string(FormulaId id) noexcept {
  for (const auto& f : formula_table()) {
    if (f.id == id) return f.name;
  }
  return "unknown";
}

std::optional<FormulaId> parse_formula(std::string_view name) noexcept {
  for (const auto& f : formula_table()) {
    if (f.name == name) return f.id;
  }
  return std::nullopt;
}

std::vector<std::string_view> formula_parameters(FormulaId id) {
  for (const auto& f : formula_table()) {
    if (f.id == id) return f.params;
  }
  return {};
}

bool formula_is_probability(FormulaId id) noexcept { return id != FormulaId::cuckoo_space; }

std::optional<FormulaId> predictive_formula(Variant v) noexcept {
  switch (v) {
    case Variant::standard:
    case Variant::counting:
    case Variant::spectral:
    case Variant::bfah:
    case Variant::one_hashing:
    case Variant::ultra_fast:
    case Variant::deletable:
      return FormulaId::sbf;
    case Variant::yes_no: return FormulaId::yes_no;
    case Variant::vicbf: return FormulaId::bh;
    case Variant::fingerprint_cbf: return FormulaId::fpcbf;
    case Variant::retouched: return FormulaId::retouched;
    case Variant::accurate_cbf: return FormulaId::acbf;
    case Variant::generalized: return FormulaId::generalized;
    case Variant::multi_class: return FormulaId::multi_class;
    case Variant::complement: return FormulaId::complement;
    case Variant::shifting: return FormulaId::shifting;
    case Variant::dynamic: return FormulaId::dynamic;
    case Variant::weighted: return FormulaId::weighted;
    case Variant::persistent: return FormulaId::persistent_range;
    case Variant::high_dimensional: return FormulaId::high_dimensional;
    default: return std::nullopt;
  }
}

std::vector<FormulaId> formulas_for(Variant v) {
  std::vector<FormulaId> out;
  if (const auto f = predictive_formula(v)) out.push_back(*f);
  switch (v) {
    case Variant::vicbf: out.push_back(FormulaId::vicbf); break;
    case Variant::deletable: out.push_back(FormulaId::deletable); break;
    case Variant::cuckoo: out.push_back(FormulaId::cuckoo_space); break;
    default: break;
  }
  if (out.empty()) out.push_back(FormulaId::sbf);
  return out;
}

double analytic_fpp(FormulaId id, const FormulaParams& params) {
  const double v = evaluate(id, params);
  if (std::isnan(v) || (formula_is_probability(id) && (v < 0.0 || v > 1.0))) {
    throw std::logic_error(std::string(to_string(id)) + ": probability out of range");
  }
  return v;
}

double sbf_fpp(double m, double k, double n, bool exact) {
  if (!(m > 0.0) || !(k > 0.0) || n < 0.0) throw ParameterError("sbf: need m > 0, k > 0, n >= 0");
  const double zero = exact ? one_minus_inv_pow(m, k * n) : std::exp(-k * n / m);
  return std::pow(1.0 - zero, k);
}

double gbf_reset_probability(double m, double k1, bool exact) {
  return exact ? 1.0 - one_minus_inv_pow(m, k1) : 1.0 - std::exp(-k1 / m);
}

double gbf_set_probability(double m, double k1, double k2, bool exact) {
  if (exact) return (1.0 - one_minus_inv_pow(m, k2)) * one_minus_inv_pow(m, k1);
  return (1.0 - std::exp(-k2 / m)) * std::exp(-k1 / m);
}

double gbf_zero_probability(double m, double k1, double k2, double n, double p0) {
  const double q1 = gbf_reset_probability(m, k1, true);
  const double q2 = gbf_set_probability(m, k1, k2, true);
  if (q1 + q2 <= 0.0) return p0;
  const double fixed = q1 / (q1 + q2);
  return fixed + (p0 - fixed) * std::pow(1.0 - q1 - q2, n);
}

double dbf_fpp(double m, double k, double capacity, double total) {
  if (total <= capacity) return sbf_fpp(m, k, total, false);
  const double full = std::floor(total / capacity);
  const double last = total - capacity * full;
  const double f_full = sbf_fpp(m, k, capacity, false);
  const double f_last = last > 0.0 ? sbf_fpp(m, k, last, false) : 0.0;
  return 1.0 - std::pow(1.0 - f_full, full) * (1.0 - f_last);
}

double deletable_probability(double m, double k, double n, double regions, bool literal) {
  const double kn = k * n;
  const double p0 = one_minus_inv_pow(m, kn);
  const double p1 = kn >= 1.0 ? kn / m * one_minus_inv_pow(m, kn - 1.0) : 0.0;
  const double pc = std::clamp(1.0 - p0 - p1, 0.0, 1.0);
  const double region_free = std::pow(1.0 - pc, m / regions);
  const double none = std::pow(1.0 - region_free, k);
  return literal ? none : 1.0 - none;
}

std::size_t bh_default_cap(double m, double k, double n) {
  const auto trials = std::round(n * k);
  if (trials <= 0.0) return 0;
  const boost::math::binomial_distribution<double> X(trials, 1.0 / m);
  std::size_t h = 0;
  while (static_cast<double>(h) < trials &&
         boost::math::cdf(boost::math::complement(X, static_cast<double>(h))) >= 1e-9) {
    ++h;
  }
  return h;
}

// ---- measurement ----

Interval binomial_interval(std::uint64_t successes, std::uint64_t trials, double confidence) {
  if (trials == 0) throw ParameterError("binomial_interval: no trials");
  if (successes > trials) throw ParameterError("binomial_interval: more successes than trials");
  if (!(confidence > 0.0 && confidence < 1.0)) throw ParameterError("binomial_interval: confidence in (0, 1)");
  const double alpha = 1.0 - confidence;
  const auto x = static_cast<double>(successes);
  const auto n = static_cast<double>(trials);
  Interval ci;
  ci.lo = successes == 0 ? 0.0 : boost::math::quantile(boost::math::beta_distribution<double>(x, n - x + 1), alpha / 2);
  ci.hi = successes == trials ? 1.0
                              : boost::math::quantile(boost::math::beta_distribution<double>(x + 1, n - x), 1 - alpha / 2);
  return ci;
}

std::string probe_key(std::uint64_t seed, std::uint64_t i) {
  return "p" + std::to_string(seed) + ":" + std::to_string(i);
}

std::string member_key(std::uint64_t id) { return "m" + std::to_string(id); }

TrialReport empirical_fpp(const MembershipFilter& filter, std::span<const std::string> members, std::uint64_t n_probes,
                          std::uint64_t seed, std::optional<double> predicted, ProbeOptions opts) {
  if (n_probes == 0) throw ParameterError("empirical_fpp: n_probes must be at least 1");
  std::unordered_set<std::string_view> member_set(members.begin(), members.end());

  std::vector<std::string> probes;
  probes.reserve(n_probes);
  for (std::uint64_t i = 0; probes.size() < n_probes; ++i) {
    auto key = probe_key(seed, i);
    if (opts.encode) key = opts.encode(key);
    if (member_set.contains(key)) continue;
    probes.push_back(std::move(key));
  }

  TrialReport rep;
  rep.variant = std::string(to_string(filter.variant()));
  rep.m = filter.memory_bits();
  rep.n = members.size();
  rep.bits_per_element =
      members.empty() ? 0.0 : static_cast<double>(filter.memory_bits()) / static_cast<double>(members.size());
  rep.predicted = predicted;
  rep.n_probes = n_probes;

  const auto start = std::chrono::steady_clock::now();
  std::uint64_t hits = 0;
  for (const auto& p : probes) hits += filter.query(p).present() ? 1 : 0;
  const auto stop = std::chrono::steady_clock::now();

  rep.false_positives = hits;
  rep.measured_fpp = static_cast<double>(hits) / static_cast<double>(n_probes);
  rep.ci = binomial_interval(hits, n_probes);
  if (opts.time_queries) {
    const double secs = std::chrono::duration<double>(stop - start).count();
    rep.throughput = secs > 0.0 ? static_cast<double>(n_probes) / secs : 0.0;
  }
  return rep;
}

// ---- streams ----

namespace {

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::vector<std::uint64_t> generate_ids(const StreamSpec& spec, std::uint64_t seed) {
  if (spec.n == 0) return {};
  if (spec.universe == 0) throw ParameterError("generate_stream: universe must be at least 1");
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> out;
  out.reserve(spec.n);

  if (spec.dist == Distribution::uniform) {
    if (!spec.unique) {
      for (std::uint64_t i = 0; i < spec.n; ++i) out.push_back(rng() % spec.universe);
      return out;
    }
    if (spec.universe < spec.n) throw ParameterError("generate_stream: unique mode needs universe >= n");
    if (spec.n * 2 <= spec.universe) {
      std::unordered_set<std::uint64_t> seen;
      seen.reserve(spec.n * 2);
      while (out.size() < spec.n) {
        const auto id = rng() % spec.universe;
        if (seen.insert(id).second) out.push_back(id);
      }
      return out;
    }
    std::vector<std::uint64_t> all(spec.universe);
    for (std::uint64_t i = 0; i < spec.universe; ++i) all[i] = i;
    for (std::uint64_t i = 0; i < spec.n; ++i) {
      const auto j = i + rng() % (spec.universe - i);
      std::swap(all[i], all[j]);
    }
    all.resize(spec.n);
    return all;
  }

  if (spec.unique) throw ParameterError("generate_stream: unique mode is uniform only");
  if (!(spec.zipf_s > 0.0)) throw ParameterError("generate_stream: zipf exponent must be positive");
  if (spec.universe > (std::uint64_t{1} << 26)) throw ParameterError("generate_stream: zipf universe too large");
  std::vector<double> cdf(spec.universe);
  double acc = 0.0;
  for (std::uint64_t r = 0; r < spec.universe; ++r) {
    acc += std::pow(static_cast<double>(r + 1), -spec.zipf_s);
    cdf[r] = acc;
  }
  for (std::uint64_t i = 0; i < spec.n; ++i) {
    const double u = unit(rng) * acc;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    out.push_back(std::min<std::uint64_t>(static_cast<std::uint64_t>(it - cdf.begin()), spec.universe - 1));
  }
  return out;
}

std::vector<std::string> generate_stream(const StreamSpec& spec, std::uint64_t seed) {
  std::vector<std::string> out;
  for (const auto id : generate_ids(spec, seed)) out.push_back(member_key(id));
  return out;
}

// ---- budget comparison ----

namespace {

std::size_t cells(double bpe, std::uint64_t n, double width) {
  return std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(bpe * static_cast<double>(n) / width)));
}

std::size_t opt_k(std::size_t m, std::uint64_t n) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(std::log(2.0) * static_cast<double>(m) /
                                                                        static_cast<double>(std::max<std::uint64_t>(n, 1)))));
}

struct Built {
  std::unique_ptr<MembershipFilter> filter;
  std::size_t m = 0;
  std::size_t k = 0;
  std::optional<double> predicted;
};

Built build_for_budget(Variant v, double bpe, std::uint64_t n, std::uint64_t seed) {
  Built b;
  const auto nd = static_cast<double>(n);
  const HashFamily h(seed);
  auto sbf_pred = [&](std::size_t m, std::size_t k) { return sbf_fpp(static_cast<double>(m), static_cast<double>(k), nd); };
  switch (v) {
    case Variant::standard:
      b.m = cells(bpe, n, 1), b.k = opt_k(b.m, n);
      b.filter = std::make_unique<StandardBF>(b.m, b.k, h);
      b.predicted = sbf_pred(b.m, b.k);
      break;
    case Variant::counting:
      b.m = cells(bpe, n, 4), b.k = opt_k(b.m, n);
      b.filter = std::make_unique<CountingBF>(b.m, b.k, h);
      b.predicted = sbf_pred(b.m, b.k);
      break;
    case Variant::spectral:
      b.m = cells(bpe, n, 8), b.k = opt_k(b.m, n);
      b.filter = std::make_unique<SpectralBF>(b.m, b.k, SpectralMode::minimum_increase, 8, h);
      b.predicted = sbf_pred(b.m, b.k);
      break;
    case Variant::vicbf:
      b.m = cells(bpe, n, 6), b.k = opt_k(b.m, n);
      b.filter = std::make_unique<VICBF>(b.m, b.k, VIScheme::bh, std::vector<std::uint64_t>{2, 3, 4, 5}, 2, 4, h);
      b.predicted = analytic_fpp(FormulaId::bh, {{"m", double(b.m)}, {"k", double(b.k)}, {"n", nd}, {"l", 4}});
      break;
    case Variant::fingerprint_cbf:
      b.m = cells(bpe, n, 12), b.k = opt_k(b.m, n);
      b.filter = std::make_unique<FPCBF>(b.m, b.k, 4, 8, h);
      b.predicted = analytic_fpp(FormulaId::fpcbf, {{"m", double(b.m)}, {"k", double(b.k)}, {"n", nd}, {"f", 8}});
      break;
    case Variant::accurate_cbf:
      b.m = cells(bpe, n, 1.875), b.k = opt_k(b.m, n);
      b.filter = std::make_unique<ACBF>(b.m, b.k, 4, h);
      b.predicted = sbf_pred(b.m, b.k);
      break;
    case Variant::one_hashing: {
      b.m = cells(bpe, n, 1), b.k = opt_k(b.m, n);
      auto f = std::make_unique<OHBF>(b.m, b.k, seed);
      b.predicted = sbf_pred(f->memory_bits(), b.k);
      b.filter = std::move(f);
      break;
    }
    case Variant::ultra_fast: {
      auto f = std::make_unique<UFBF>(UFBF::for_capacity(n, bpe, seed));
      b.m = f->memory_bits(), b.k = 8;
      b.predicted = sbf_pred(b.m, b.k);
      b.filter = std::move(f);
      break;
    }
    case Variant::shifting: {
      const std::size_t w = 64;
      const auto total = cells(bpe, n, 1);
      if (total <= w) throw ParameterError("shifting: budget too small");
      b.m = total - w + 1;
      b.k = std::max<std::size_t>(2, opt_k(b.m, n) / 2 * 2);
      b.filter = std::make_unique<ShiftingBF>(b.m, b.k, w, seed);
      b.predicted = analytic_fpp(FormulaId::shifting, {{"m", double(b.m)}, {"k", double(b.k)}, {"n", nd}, {"w_bar", 64}});
      break;
    }
    case Variant::deletable: {
      const std::size_t regions = 64;
      const auto total = cells(bpe, n, 1);
      b.m = std::max<std::size_t>(regions, (total - std::min(total, regions)) / regions * regions);
      b.k = opt_k(b.m, n);
      b.filter = std::make_unique<DeletableBF>(b.m, b.k, regions, h);
      b.predicted = sbf_pred(b.m, b.k);
      break;
    }
    case Variant::high_dimensional:
      b.m = cells(bpe, n, 8), b.k = opt_k(b.m, n);
      b.filter = std::make_unique<HDBF>(b.m, b.k, 16, 0.0, 1.0, seed);
      b.predicted = analytic_fpp(FormulaId::high_dimensional, {{"m", double(b.m)}, {"k", double(b.k)}, {"n", nd}});
      break;
    default:
      break;
  }
  return b;
}

}  // namespace

bool supports_budget(Variant v) noexcept {
  switch (v) {
    case Variant::standard:
    case Variant::counting:
    case Variant::spectral:
    case Variant::vicbf:
    case Variant::fingerprint_cbf:
    case Variant::accurate_cbf:
    case Variant::one_hashing:
    case Variant::ultra_fast:
    case Variant::shifting:
    case Variant::deletable:
    case Variant::high_dimensional:
      return true;
    default:
      return false;
  }
}

std::vector<BudgetCell> compare_budget(std::span<const Variant> variants, std::span<const double> bits_per_element,
                                       std::uint64_t n, std::uint64_t seed, std::uint64_t n_probes) {
  if (variants.empty() || bits_per_element.empty()) throw ParameterError("compare_budget: need variants and budgets");
  if (n == 0) throw ParameterError("compare_budget: n must be at least 1");
  const StreamSpec spec{Distribution::uniform, 1.0, n, std::uint64_t{1} << 40, true};
  const auto members = generate_stream(spec, seed);

  std::vector<BudgetCell> out;
  for (const auto bpe : bits_per_element) {
    for (const auto v : variants) {
      BudgetCell cell{v, bpe, std::nullopt, {}};
      if (!supports_budget(v)) {
        cell.error = "no bits-per-element sizing for " + std::string(to_string(v));
        out.push_back(std::move(cell));
        continue;
      }
      try {
        auto built = build_for_budget(v, bpe, n, seed);
        for (const auto& item : members) built.filter->insert(item);
        auto rep = empirical_fpp(*built.filter, members, n_probes, seed ^ 0x5bd1e995ULL, built.predicted);
        rep.m = built.m;
        rep.k = built.k;
        cell.report = std::move(rep);
      } catch (const ParameterError& e) {
        cell.error = e.what();
      }
      out.push_back(std::move(cell));
    }
  }
  return out;
}

}  // namespace bloomsketch
