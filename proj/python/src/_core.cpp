#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "bloomsketch/analysis.hpp"
#include "bloomsketch/bench.hpp"
#include "bloomsketch/errors.hpp"
#include "bloomsketch/serialize.hpp"

namespace py = pybind11;
namespace bs = bloomsketch;

namespace {

bs::Variant variant_of(const std::string& name) {
  const auto v = bs::parse_variant(name);
  if (!v) throw bs::ConfigError("unknown variant '" + name + "'");
  return *v;
}

const char* result_kind(bs::ResultKind k) {
  switch (k) {
    case bs::ResultKind::boolean: return "boolean";
    case bs::ResultKind::frequency: return "frequency";
    case bs::ResultKind::boolean_and_frequency: return "boolean_and_frequency";
  }
  return "boolean";
}

py::dict capability_dict(bs::Variant v) {
  const auto c = bs::capabilities_of(v);
  py::dict d;
  d["counting"] = c.counting;
  d["deletion"] = c.deletion;
  d["false_negatives_possible"] = c.false_negatives_possible;
  d["result"] = result_kind(c.result_kind);
  return d;
}

class Filter {
 public:
  explicit Filter(std::unique_ptr<bs::MembershipFilter> f) : f_(std::move(f)) {}

  static Filter build(const std::string& variant, const std::string& params_json, std::uint64_t seed,
                      const std::vector<std::string>& members) {
    nlohmann::json params;
    try {
      params = nlohmann::json::parse(params_json);
    } catch (const nlohmann::json::parse_error& e) {
      throw bs::ConfigError(std::string("params are not valid JSON: ") + e.what());
    }
    return Filter(bs::make_filter(variant_of(variant), params, seed, members));
  }

  static Filter from_bytes(const py::bytes& data) {
    const std::string s = data;
    return Filter(bs::load_bytes(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size())));
  }

  bool insert(const std::string& item) { return f_->insert(item) == bs::InsertStatus::inserted; }

  py::dict query(const std::string& item) const {
    const auto q = f_->query(item);
    py::dict d;
    d["present"] = q.present();
    d["maybe_false_positive"] = q.maybe_false_positive;
    d["frequency"] = q.frequency ? py::cast(*q.frequency) : py::none();
    d["needs_oracle"] = q.needs_oracle;
    return d;
  }

  bool contains(const std::string& item) const { return f_->contains(item); }
  std::string remove(const std::string& item) { return std::string(bs::to_string(f_->remove(item))); }
  std::uint64_t count(const std::string& item) const { return f_->count_estimate(item); }

  py::bytes to_bytes() const {
    const auto b = bs::save_bytes(*f_);
    return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
  }

  std::string variant() const { return std::string(bs::to_string(f_->variant())); }
  py::dict capabilities() const { return capability_dict(f_->variant()); }
  std::uint64_t size() const { return f_->size(); }
  std::size_t memory_bits() const { return f_->memory_bits(); }
  std::optional<double> predicted_fpp(const std::string& params_json) const {
    return bs::predict_fpp(*f_, nlohmann::json::parse(params_json));
  }

 private:
  std::unique_ptr<bs::MembershipFilter> f_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bloom-filter variants";

  py::register_exception<bs::CapabilityError>(m, "CapabilityError", PyExc_TypeError);
  py::register_exception<bs::FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<bs::ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<Filter>(m, "Filter")
      .def_static("build", &Filter::build, py::arg("variant"), py::arg("params_json"), py::arg("seed") = 0,
                  py::arg("members") = std::vector<std::string>{})
      .def_static("from_bytes", &Filter::from_bytes, py::arg("data"))
      .def("insert", &Filter::insert, py::arg("item"))
      .def("query", &Filter::query, py::arg("item"))
      .def("contains", &Filter::contains, py::arg("item"))
      .def("__contains__", &Filter::contains)
      .def("remove", &Filter::remove, py::arg("item"))
      .def("count", &Filter::count, py::arg("item"))
      .def("to_bytes", &Filter::to_bytes)
      .def("predicted_fpp", &Filter::predicted_fpp, py::arg("params_json") = "{}")
      .def("__len__", &Filter::size)
      .def_property_readonly("variant", &Filter::variant)
      .def_property_readonly("capabilities", &Filter::capabilities)
      .def_property_readonly("memory_bits", &Filter::memory_bits);

  m.def("variants", [] {
    std::vector<std::string> out;
    for (auto v : bs::all_variants()) out.emplace_back(bs::to_string(v));
    return out;
  });
  m.def("capabilities", [](const std::string& v) { return capability_dict(variant_of(v)); }, py::arg("variant"));
  m.def(
      "capability_matrix",
      [](const std::string& format) {
        const auto f = bs::parse_format(format);
        if (!f) throw bs::ConfigError("format must be csv or json");
        return bs::capability_matrix(*f);
      },
      py::arg("format") = "json");
  m.def("formulas", [] {
    std::vector<std::string> out;
    for (auto id : bs::all_formulas()) out.emplace_back(bs::to_string(id));
    return out;
  });
  m.def(
      "analytic_fpp",
      [](const std::string& name, const std::map<std::string, double>& params) {
        const auto id = bs::parse_formula(name);
        if (!id) throw bs::ParameterError("unknown formula '" + name + "'");
        return bs::analytic_fpp(*id, bs::FormulaParams(params.begin(), params.end()));
      },
      py::arg("formula"), py::arg("params"));
}
