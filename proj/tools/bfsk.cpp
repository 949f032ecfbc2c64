// bfsk: build, query, benchmark and serialize filters from JSON configs.
//
// Exit status: 0 success, 2 invalid configuration or input, 3 the requested
// operation needs a capability the variant lacks, 1 anything else.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bloomsketch/bench.hpp"
#include "bloomsketch/errors.hpp"
#include "bloomsketch/serialize.hpp"

namespace bs = bloomsketch;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitCapability = 3;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format;
  std::string file;
  std::vector<std::string> items;
};

bs::RunConfig resolve(const Options& o) {
  if (o.config.empty()) throw bs::ConfigError("--config is required");
  auto cfg = bs::load_run_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (!o.out.empty()) cfg.out = o.out;
  if (!o.format.empty()) cfg.format = *bs::parse_format(o.format);
  return cfg;
}

bs::OutputFormat format_of(const Options& o) {
  return o.format.empty() ? bs::OutputFormat::csv : *bs::parse_format(o.format);
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string summary(const bs::MembershipFilter& f, bs::OutputFormat format, std::optional<std::uint64_t> seed) {
  const double bpe = f.size() == 0 ? 0.0 : double(f.memory_bits()) / double(f.size());
  const auto variant = std::string(bs::to_string(f.variant()));
  if (format == bs::OutputFormat::json) {
    json j{{"variant", variant}, {"n", f.size()}, {"memory_bits", f.memory_bits()}, {"bits_per_element", bpe}};
    if (seed) j["seed"] = *seed;
    return j.dump(2) + "\n";
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", bpe);
  return "variant,n,memory_bits,bits_per_element,seed\n" + variant + "," + std::to_string(f.size()) + "," +
         std::to_string(f.memory_bits()) + "," + buf + "," + (seed ? std::to_string(*seed) : "NA") + "\n";
}

std::string query_report(const bs::MembershipFilter& f, const std::vector<std::string>& items,
                         bs::OutputFormat format) {
  json rows = json::array();
  std::string csv = "item,present,frequency\n";
  for (const auto& item : items) {
    const auto q = f.query(item);
    if (format == bs::OutputFormat::json) {
      rows.push_back({{"item", item},
                      {"present", q.present()},
                      {"frequency", q.frequency ? json(*q.frequency) : json(nullptr)}});
    } else {
      csv += item + "," + (q.present() ? "1" : "0") + "," + (q.frequency ? std::to_string(*q.frequency) : "NA") +
             "\n";
    }
  }
  return format == bs::OutputFormat::json ? rows.dump(2) + "\n" : csv;
}

int run(const std::string& command, const Options& o) {
  if (command == "capabilities") {
    emit(bs::capability_matrix(format_of(o)), o.out);
  } else if (command == "build") {
    const auto cfg = resolve(o);
    const auto built = bs::build_filter(cfg);
    emit(summary(*built.filter, cfg.format, cfg.seed), cfg.out);
  } else if (command == "save") {
    const auto cfg = resolve(o);
    if (cfg.out.empty()) throw bs::ConfigError("save needs --out (or \"out\" in the config)");
    const auto built = bs::build_filter(cfg);
    bs::save_file(*built.filter, cfg.out);
  } else if (command == "load") {
    const auto f = bs::load_file(o.file);
    emit(summary(*f, format_of(o), std::nullopt), o.out);
  } else if (command == "query") {
    const auto f = bs::load_file(o.file);
    auto items = o.items;
    if (items.empty()) {
      for (std::string line; std::getline(std::cin, line);) items.push_back(line);
    }
    emit(query_report(*f, items, format_of(o)), o.out);
  } else {
    const auto cfg = resolve(o);
    const auto rep = bs::run_trial(cfg, command == "bench-throughput");
    emit(bs::format_reports(std::span(&rep, 1), cfg.format, cfg.seed), cfg.out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Build, query, benchmark and serialize Bloom-filter variants"};
  app.require_subcommand(1);
  Options o;

  auto format_opt = [&](CLI::App* sub) {
    sub->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", o.out, "Output path (default: standard output)");
  };
  auto config_opts = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Run configuration (JSON)")->required();
    sub->add_option("--seed", o.seed, "Override the configured seed");
    format_opt(sub);
  };

  config_opts(app.add_subcommand("build", "Build a filter from a config and print a summary"));
  config_opts(app.add_subcommand("bench-fpp", "Measure the false-positive rate"));
  config_opts(app.add_subcommand("bench-throughput", "Measure the false-positive rate and query throughput"));
  config_opts(app.add_subcommand("save", "Build a filter and write it to --out"));
  format_opt(app.add_subcommand("capabilities", "Print the variant capability matrix"));
  auto* load = app.add_subcommand("load", "Read a saved filter and print a summary");
  load->add_option("file", o.file, "Saved filter")->required();
  format_opt(load);
  auto* query = app.add_subcommand("query", "Query items against a saved filter");
  query->add_option("file", o.file, "Saved filter")->required();
  query->add_option("items", o.items, "Items to query (default: one per line on standard input)");
  format_opt(query);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  const auto command = app.get_subcommands().front()->get_name();
  try {
    return run(command, o);
  } catch (const bs::CapabilityError& e) {
    std::cerr << "bfsk: capability violation: " << e.what() << "\n";
    return kExitCapability;
  } catch (const bs::ConfigError& e) {
    std::cerr << "bfsk: invalid configuration: " << e.what() << "\n";
    return kExitConfig;
  } catch (const bs::FormatError& e) {
    std::cerr << "bfsk: malformed filter file: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "bfsk: invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::bad_alloc&) {
    std::cerr << "bfsk: the configured filter is too large to allocate\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "bfsk: " << e.what() << "\n";
    return 1;
  }
}
