#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bloomsketch/bench.hpp"
#include "bloomsketch/capability_table.hpp"
#include "bloomsketch/errors.hpp"
#include "bloomsketch/serialize.hpp"
#include "bloomsketch/classic.hpp"
#include "bloomsketch/space_variants.hpp"
#include "fixtures.hpp"
#include "support.hpp"

using namespace bloomsketch;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::vector<std::uint8_t> read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json minimal(const std::string& variant, json params) {
  return {{"variant", variant},
          {"params", std::move(params)},
          {"seed", 5},
          {"workload", {{"n", 300}, {"probes", 2000}}}};
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("bfsk-test-" + std::to_string(::getpid()))) {
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  fs::path operator/(const std::string& name) const { return path_ / name; }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path_ / name) << text;
    return path_ / name;
  }

 private:
  fs::path path_;
};

int run_cli(const std::string& args) {
  const std::string cmd = std::string(BFSK_EXE) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

// ---------------------------------------------------------------- config

TEST_CASE("config validation rejects bad documents") {
  CHECK_THROWS_AS((void)parse_run_config(json{{"variant", "nope"}}), ConfigError);
  CHECK_THROWS_AS((void)parse_run_config(json{{"variant", "standard"}, {"params", {{"m", 64}, {"k", 3}}}, {"bogus", 1}}),
                  ConfigError);
  CHECK_THROWS_AS((void)parse_run_config(minimal("standard", {{"m", 64}})), ConfigError);
  CHECK_THROWS_AS((void)parse_run_config(minimal("standard", {{"m", 64}, {"k", 3}, {"extra", 1}})), ConfigError);
  CHECK_THROWS_AS((void)parse_run_config(minimal("standard", {{"m", "big"}, {"k", 3}})), ConfigError);
  // Constructor constraints surface when the filter is built.
  CHECK_THROWS_AS((void)build_filter(parse_run_config(minimal("standard", {{"m", 1}, {"k", 3}}))), ConfigError);
  auto bad_format = minimal("standard", {{"m", 64}, {"k", 3}});
  bad_format["format"] = "xml";
  CHECK_THROWS_AS((void)parse_run_config(bad_format), ConfigError);
  auto bad_workload = minimal("standard", {{"m", 64}, {"k", 3}});
  bad_workload["workload"]["probes"] = 0;
  CHECK_THROWS_AS((void)parse_run_config(bad_workload), ConfigError);
  bad_workload["workload"] = {{"distribution", "zipf"}, {"unique", true}};
  CHECK_THROWS_AS((void)parse_run_config(bad_workload), ConfigError);
  bad_workload["workload"] = {{"n", 10}, {"deletions", 11}};
  CHECK_THROWS_AS((void)parse_run_config(bad_workload), ConfigError);
  // Absurd sizes are rejected before allocation.
  CHECK_THROWS((void)build_filter(parse_run_config(minimal("standard", {{"m", 1ULL << 62}, {"k", 3}}))));
}

TEST_CASE("config accepts every variant with sensible params") {
  const std::map<std::string, json> params = {
      {"standard", {{"m", 4096}, {"k", 3}}},
      {"counting", {{"m", 4096}, {"k", 3}}},
      {"spectral", {{"m", 4096}, {"k", 3}}},
      {"adaptive", {{"m", 4096}, {"k", 3}}},
      {"yes_no", {{"p", 4096}, {"k", 3}, {"q", 256}, {"r", 4}, {"k_prime", 2}}},
      {"vicbf", {{"m", 2048}, {"k", 3}}},
      {"fingerprint_cbf", {{"m", 2048}, {"k", 3}}},
      {"retouched", {{"m", 4096}, {"k", 3}}},
      {"accurate_cbf", {{"s1", 4096}, {"k", 3}}},
      {"generalized", {{"m", 4096}, {"k1", 1}, {"k2", 3}}},
      {"multi_class", {{"m", 4096}, {"class_k", {3, 5}}}},
      {"complement", {{"m", 4096}, {"k", 3}, {"m_c", 8192}, {"k_c", 3}, {"universe", 2000}}},
      {"dleft_cbf", {{"b", 64}}},
      {"bfah", {{"m", 4096}, {"k", 3}}},
      {"matrix", {{"m", 4096}, {"k", 3}}},
      {"compacted", {{"m", 4096}, {"k", 3}, {"nb", 8}, {"w", 4}}},
      {"one_hashing", {{"m", 4096}, {"k", 3}}},
      {"ultra_fast", {{"l", 8}}},
      {"dynamic", {{"m", 1024}, {"k", 3}, {"capacity", 100}}},
      {"weighted", {{"m", 4096}, {"n_expected", 300}}},
      {"iblt", {{"m", 900}, {"k", 3}}},
      {"shifting", {{"m", 4096}, {"k", 4}}},
      {"deletable", {{"m", 4096}, {"k", 3}, {"regions", 32}}},
      {"distance_sensitive", {{"dim", 64}, {"capacity", 300}}},
      {"cuckoo", {{"buckets", 128}}},
      {"persistent", {{"m", 4096}, {"k", 3}}},
      {"high_dimensional", {{"m", 4096}, {"k", 3}, {"low", 0.0}, {"high", 1.0}}},
  };
  CHECK(params.size() == all_variants().size());
  for (const auto& [name, p] : params) {
    INFO(name);
    const auto cfg = parse_run_config(minimal(name, p));
    const auto rep = run_trial(cfg, false);
    CHECK(rep.variant == name);
    CHECK(rep.n_probes == 2000);
    CHECK(rep.measured_fpp >= 0.0);
    CHECK(rep.measured_fpp <= 1.0);
    // Deterministic given (config, seed).
    const auto again = run_trial(cfg, false);
    CHECK(again.measured_fpp == rep.measured_fpp);
  }
}

TEST_CASE("desk config predicts the standard closed form") {
  auto doc = minimal("standard", {{"m", 65536}, {"k", 8}});
  doc["workload"] = {{"n", 4096}, {"probes", 1000}};
  const auto rep = run_trial(parse_run_config(doc), false);
  REQUIRE(rep.predicted.has_value());
  CHECK(*rep.predicted == doctest::Approx(5.75e-4).epsilon(0.01));
  const auto csv = format_reports(std::span(&rep, 1), OutputFormat::csv, 5);
  CHECK(csv.rfind("variant,m,k,n,bits_per_element,predicted_fpp,measured_fpp,ci_lo,ci_hi,throughput", 0) == 0);
  const auto js = json::parse(format_reports(std::span(&rep, 1), OutputFormat::json, 5));
  CHECK(js.is_array());
  CHECK(js[0]["seed"] == 5);
  CHECK(js[0]["throughput"].is_null());
}

TEST_CASE("deletion workload needs a deleting variant") {
  auto doc = minimal("standard", {{"m", 4096}, {"k", 3}});
  doc["workload"]["deletions"] = 10;
  CHECK_THROWS_AS((void)build_filter(parse_run_config(doc)), CapabilityError);
  auto ok = minimal("counting", {{"m", 4096}, {"k", 3}});
  ok["workload"]["deletions"] = 10;
  const auto built = build_filter(parse_run_config(ok));
  CHECK(built.filter->size() == 290);
  CHECK(built.members.size() == 290);
}

TEST_CASE("capability matrix output") {
  const auto csv = capability_matrix(OutputFormat::csv);
  CHECK(csv.find("Counting BF") != std::string::npos);
  CHECK(csv.find("# not implemented: ") != std::string::npos);
  const auto js = json::parse(capability_matrix(OutputFormat::json));
  CHECK(js["rows"].size() == all_variants().size());
  CHECK(js["not_implemented"].size() == unimplemented_reference_rows().size());
}

// ---------------------------------------------------------------- serialization

TEST_CASE("save and load preserve behaviour for every variant") {
  for (auto v : all_variants()) {
    INFO(to_string(v));
    CHECK(is_serializable(v));
    const auto f = testing::make_fixture(v);
    const auto bytes = save_bytes(*f);
    const auto g = load_bytes(bytes);
    REQUIRE(g);
    CHECK(g->variant() == v);
    CHECK(g->size() == f->size());
    CHECK(g->memory_bits() == f->memory_bits());
    CHECK(save_bytes(*g) == bytes);
    std::size_t mismatches = 0;
    for (const auto& p : testing::fixture_probes(v, 10000, 1)) {
      mismatches += !testing::same_outcome(f->query(p), g->query(p));
    }
    CHECK(mismatches == 0);
  }
}

TEST_CASE("header layout") {
  const auto bytes = save_bytes(*testing::make_fixture(Variant::standard));
  REQUIRE(bytes.size() > kHeaderBytes);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "BFSK");
  CHECK(bytes[4] == kFormatVersion);
  CHECK(bytes[5] == static_cast<std::uint8_t>(Variant::standard));
  const std::uint32_t plen = bytes[6] | bytes[7] << 8 | bytes[8] << 16 | std::uint32_t(bytes[9]) << 24;
  // standard params: m, k, seed, n as u64; payload: word count + 4 words.
  CHECK(plen == 4 * 8);
  CHECK(bytes.size() == kHeaderBytes + plen + 8 + 4 * 8);
}

TEST_CASE("corrupt files are rejected with the offending offset") {
  const auto good = save_bytes(*testing::make_fixture(Variant::counting));
  auto bad = good;
  bad[0] = 'X';
  try {
    (void)load_bytes(bad);
    FAIL("bad magic accepted");
  } catch (const FormatError& e) {
    CHECK(e.offset() == 0);
  }
  bad = good;
  bad[4] = 99;
  try {
    (void)load_bytes(bad);
    FAIL("bad version accepted");
  } catch (const FormatError& e) {
    CHECK(e.offset() == 4);
  }
  bad = good;
  bad[5] = 200;
  try {
    (void)load_bytes(bad);
    FAIL("bad tag accepted");
  } catch (const FormatError& e) {
    CHECK(e.offset() == 5);
  }
  bad = good;
  bad.push_back(0);
  CHECK_THROWS_AS((void)load_bytes(bad), FormatError);
}

TEST_CASE("every truncation of every fixture is rejected") {
  for (auto v : all_variants()) {
    INFO(to_string(v));
    const auto bytes = save_bytes(*testing::make_fixture(v));
    for (std::size_t len = 0; len < bytes.size(); ++len) {
      CHECK_THROWS_AS((void)load_bytes(std::span(bytes.data(), len)), FormatError);
    }
  }
}

TEST_CASE("random byte flips never crash the loader") {
  testing::Gen g(90);
  for (auto v : all_variants()) {
    const auto bytes = save_bytes(*testing::make_fixture(v));
    for (int t = 0; t < 200; ++t) {
      auto b = bytes;
      b[g.range(0, b.size() - 1)] ^= static_cast<std::uint8_t>(g.range(1, 255));
      try {
        const auto f = load_bytes(b);
        (void)f->query("probe");
      } catch (const FormatError&) {
      } catch (const InputError&) {
        // e.g. a complement filter whose universe no longer contains the probe
      }
    }
  }
}

TEST_CASE("scripted hash families cannot be saved") {
  StandardBF bf(16, 2, HashFamily::scripted({{"a", {1, 2}}}));
  CHECK_THROWS_AS((void)save_bytes(bf), CapabilityError);
}

TEST_CASE("compacted file size is header plus packed indices") {
  const auto f = testing::make_fixture(Variant::compacted);
  const auto& c = dynamic_cast<const CompactedBF&>(*f);
  const auto bytes = save_bytes(c);
  // BFSK header, 7-byte wire header, k, seed, mode and n, then bp * w bits.
  CHECK(bytes.size() == kHeaderBytes + 7 + 4 * 8 + (c.bp() * c.w() + 7) / 8);
}

TEST_CASE("golden files are byte-stable") {
  for (auto v : all_variants()) {
    INFO(to_string(v));
    const fs::path p = fs::path(BFSK_GOLDEN_DIR) / (std::string(to_string(v)) + ".bfsk");
    REQUIRE(fs::exists(p));
    const auto golden = read_bytes(p);
    CHECK(save_bytes(*testing::make_fixture(v)) == golden);
    const auto loaded = load_file(p.string());
    CHECK(save_bytes(*loaded) == golden);
  }
}

// ---------------------------------------------------------------- CLI

TEST_CASE("bfsk exit codes and reproducible reports") {
  TempDir dir;
  auto good = minimal("standard", {{"m", 8192}, {"k", 4}});
  const auto cfg = dir.write("good.json", good.dump());
  CHECK(run_cli("bench-fpp --config " + cfg.string() + " --out " + (dir / "a.csv").string()) == 0);
  CHECK(run_cli("bench-fpp --config " + cfg.string() + " --out " + (dir / "b.csv").string()) == 0);
  CHECK(read_text(dir / "a.csv") == read_text(dir / "b.csv"));
  CHECK(read_text(dir / "a.csv").find("standard,8192,4,300,") != std::string::npos);
  CHECK(run_cli("bench-fpp --config " + cfg.string() + " --seed 6 --out " + (dir / "c.csv").string()) == 0);
  CHECK(read_text(dir / "c.csv") != read_text(dir / "a.csv"));
  CHECK(run_cli("bench-fpp --config " + cfg.string() + " --format json --out " + (dir / "a.json").string()) == 0);
  CHECK(json::parse(read_text(dir / "a.json"))[0]["variant"] == "standard");
  CHECK(run_cli("bench-throughput --config " + cfg.string()) == 0);
  CHECK(run_cli("build --config " + cfg.string()) == 0);

  // Save, load, query.
  const auto saved = dir / "f.bfsk";
  CHECK(run_cli("save --config " + cfg.string() + " --out " + saved.string()) == 0);
  CHECK(run_cli("load " + saved.string()) == 0);
  CHECK(run_cli("query " + saved.string() + " a b c --out " + (dir / "q.csv").string()) == 0);
  CHECK(read_text(dir / "q.csv").rfind("item,present,frequency\n", 0) == 0);

  // Bad configuration: exit 2.
  CHECK(run_cli("bench-fpp --config " + dir.write("bad.json", "{not json").string()) == 2);
  CHECK(run_cli("bench-fpp --config " + dir.write("unknown.json", R"({"variant":"standard","params":{"m":64,"k":3},"zzz":1})").string()) == 2);
  CHECK(run_cli("bench-fpp --config " + (dir / "missing.json").string()) == 2);
  CHECK(run_cli("bench-fpp") == 2);
  CHECK(run_cli("bench-fpp --config " + cfg.string() + " --format xml") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("load " + dir.write("junk.bfsk", "nonsense").string()) == 2);

  // Capability violation: exit 3.
  auto del = good;
  del["workload"]["deletions"] = 5;
  CHECK(run_cli("bench-fpp --config " + dir.write("del.json", del.dump()).string()) == 3);

  CHECK(run_cli("capabilities") == 0);
  CHECK(run_cli("capabilities --format json --out " + (dir / "caps.json").string()) == 0);
  CHECK(json::parse(read_text(dir / "caps.json"))["rows"].size() == all_variants().size());
}
