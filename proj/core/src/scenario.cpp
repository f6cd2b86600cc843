#include "oamplex/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "oamplex/error.hpp"
#include "oamplex/interchange.hpp"
#include "oamplex/tomography.hpp"

namespace oamplex {

using nlohmann::json;

namespace {

constexpr double kConfigWeightTolerance = 1e-9;

[[noreturn]] void invalid(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::ValidationError, field + ": " + what);
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) invalid(path.empty() ? "<root>" : path, "must be an object");
  for (const auto& [key, value] : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
    if (!known) invalid(path.empty() ? key : path + "." + key, "unknown key");
  }
}

const json& require(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) invalid(path.empty() ? key : path + "." + key, "required field is missing");
  return obj.at(key);
}

double number(const json& v, const std::string& field) {
  if (!v.is_number()) invalid(field, "must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) invalid(field, "must be finite");
  return x;
}

int integer(const json& v, const std::string& field) {
  if (!v.is_number_integer()) invalid(field, "must be an integer");
  return v.get<int>();
}

std::string position_of(std::string_view text, std::size_t byte) {
  const std::size_t end = std::min(byte == 0 ? 0 : byte - 1, text.size());
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

SourceConfig parse_source(const json& j, const std::string& path) {
  check_keys(j, path, {"port", "weight", "terms", "wavelength_nm"});
  SourceConfig src;
  const json& port = require(j, path, "port");
  if (port == "A") {
    src.port = Port::A;
  } else if (port == "B") {
    src.port = Port::B;
  } else {
    invalid(path + ".port", "must be \"A\" or \"B\"");
  }
  src.weight = number(require(j, path, "weight"), path + ".weight");
  if (src.weight < 0.0) invalid(path + ".weight", "must be nonnegative");
  if (j.contains("wavelength_nm")) {
    src.wavelength_nm = number(j.at("wavelength_nm"), path + ".wavelength_nm");
    if (!(src.wavelength_nm > 0.0)) invalid(path + ".wavelength_nm", "must be positive");
  }

  const json& terms = require(j, path, "terms");
  if (!terms.is_array() || terms.empty()) invalid(path + ".terms", "must be a nonempty list of [ell, re, im]");
  std::set<int> seen;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    const std::string tp = path + ".terms[" + std::to_string(k) + "]";
    const json& t = terms[k];
    if (!t.is_array() || t.size() != 3) invalid(tp, "must be [ell, re, im]");
    RawTerm term{integer(t[0], tp + "[0]"), number(t[1], tp + "[1]"), number(t[2], tp + "[2]")};
    if (!seen.insert(term.ell).second) invalid(tp, "duplicate OAM index " + std::to_string(term.ell));
    src.terms.push_back(term);
  }
  const bool any_nonzero = std::any_of(src.terms.begin(), src.terms.end(), [](const RawTerm& t) { return t.re != 0.0 || t.im != 0.0; });
  if (!any_nonzero) invalid(path + ".terms", "state has zero norm");
  return src;
}

ScenarioConfig parse_document(const json& root) {
  check_keys(root, "", {"sources", "imperfections", "basis", "measurement", "outputs"});
  ScenarioConfig cfg;

  const json& basis = require(root, "", "basis");
  if (!basis.is_array() || basis.empty()) invalid("basis", "must be a nonempty list of integers");
  for (std::size_t k = 0; k < basis.size(); ++k) cfg.basis.push_back(integer(basis[k], "basis[" + std::to_string(k) + "]"));
  if (std::set<int>(cfg.basis.begin(), cfg.basis.end()).size() != cfg.basis.size()) invalid("basis", "indices must be distinct");

  const json& sources = require(root, "", "sources");
  if (!sources.is_array() || sources.empty()) invalid("sources", "must be a nonempty list");
  double total = 0.0;
  for (std::size_t k = 0; k < sources.size(); ++k) {
    cfg.sources.push_back(parse_source(sources[k], "sources[" + std::to_string(k) + "]"));
    total += cfg.sources.back().weight;
  }
  if (std::abs(total - 1.0) > kConfigWeightTolerance) {
    std::ostringstream msg;
    msg << "source weights must sum to 1 (weight-sum invariant), got " << total;
    invalid("sources[].weight", msg.str());
  }
  for (std::size_t k = 0; k < cfg.sources.size(); ++k) {
    for (const auto& t : cfg.sources[k].terms) {
      if (std::find(cfg.basis.begin(), cfg.basis.end(), t.ell) == cfg.basis.end()) {
        invalid("sources[" + std::to_string(k) + "].terms",
                "OAM index " + std::to_string(t.ell) + " is not covered by the basis (basis coverage invariant)");
      }
    }
  }

  if (root.contains("imperfections")) {
    const json& imp = root.at("imperfections");
    check_keys(imp, "imperfections", {"epsilon_rad", "delta_rad", "eta"});
    if (imp.contains("epsilon_rad")) cfg.imperfections.path_phase_error = number(imp.at("epsilon_rad"), "imperfections.epsilon_rad");
    if (imp.contains("delta_rad")) cfg.imperfections.prism_angle_error = number(imp.at("delta_rad"), "imperfections.delta_rad");
    if (imp.contains("eta")) cfg.imperfections.splitting_imbalance = number(imp.at("eta"), "imperfections.eta");
    const double eta = cfg.imperfections.splitting_imbalance;
    if (!(eta >= 0.0 && eta < 1.0)) invalid("imperfections.eta", "must lie in [0, 1)");
  }

  if (root.contains("measurement")) {
    const json& m = root.at("measurement");
    check_keys(m, "measurement", {"exposure", "seed"});
    MeasurementConfig mc;
    const json& exposure = require(m, "measurement", "exposure");
    if (exposure.is_string()) {
      if (exposure != "infinite") invalid("measurement.exposure", "must be a positive number or \"infinite\"");
    } else {
      const double n = number(exposure, "measurement.exposure");
      if (!(n > 0.0)) invalid("measurement.exposure", "must be > 0");
      mc.exposure = n;
    }
    if (m.contains("seed")) {
      if (!m.at("seed").is_number_unsigned()) invalid("measurement.seed", "must be a nonnegative integer");
      mc.seed = m.at("seed").get<std::uint64_t>();
    }
    cfg.measurement = mc;
  }

  if (root.contains("outputs")) {
    const json& o = root.at("outputs");
    check_keys(o, "outputs", {"directory", "emit_images", "grid"});
    if (o.contains("directory")) {
      if (!o.at("directory").is_string()) invalid("outputs.directory", "must be a string");
      cfg.outputs.directory = o.at("directory").get<std::string>();
    }
    if (o.contains("emit_images")) {
      if (!o.at("emit_images").is_boolean()) invalid("outputs.emit_images", "must be true or false");
      cfg.outputs.emit_images = o.at("emit_images").get<bool>();
    }
    if (o.contains("grid")) {
      const json& g = o.at("grid");
      check_keys(g, "outputs.grid", {"n", "extent"});
      if (g.contains("n")) cfg.outputs.grid_n = integer(g.at("n"), "outputs.grid.n");
      if (g.contains("extent")) cfg.outputs.grid_extent = number(g.at("extent"), "outputs.grid.extent");
    }
    if (cfg.outputs.grid_n < 64 || cfg.outputs.grid_n % 2 != 0) invalid("outputs.grid.n", "must be even and >= 64");
    if (!(cfg.outputs.grid_extent > 0.0)) invalid("outputs.grid.extent", "must be > 0");
  }
  return cfg;
}

std::string report_text(const json& report) { return report.dump(2) + "\n"; }

}  // namespace

ScenarioConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SyntaxError, position_of(text, e.byte) + ": " + e.what());
  }
  return parse_document(root);
}

std::string config_to_text(const ScenarioConfig& cfg) {
  json root;
  json sources = json::array();
  for (const auto& s : cfg.sources) {
    json terms = json::array();
    for (const auto& t : s.terms) terms.push_back({t.ell, t.re, t.im});
    json src{{"port", s.port == Port::A ? "A" : "B"}, {"weight", s.weight}, {"terms", std::move(terms)}};
    if (s.wavelength_nm > 0.0) src["wavelength_nm"] = s.wavelength_nm;
    sources.push_back(std::move(src));
  }
  root["sources"] = std::move(sources);
  root["imperfections"] = {{"epsilon_rad", cfg.imperfections.path_phase_error},
                           {"delta_rad", cfg.imperfections.prism_angle_error},
                           {"eta", cfg.imperfections.splitting_imbalance}};
  root["basis"] = cfg.basis;
  if (cfg.measurement) {
    json m;
    if (cfg.measurement->exposure) {
      m["exposure"] = *cfg.measurement->exposure;
    } else {
      m["exposure"] = "infinite";
    }
    m["seed"] = cfg.measurement->seed;
    root["measurement"] = std::move(m);
  }
  root["outputs"] = {{"directory", cfg.outputs.directory},
                     {"emit_images", cfg.outputs.emit_images},
                     {"grid", {{"n", cfg.outputs.grid_n}, {"extent", cfg.outputs.grid_extent}}}};
  return root.dump(2) + "\n";
}

Superposition source_state(const SourceConfig& src) {
  std::vector<Term> terms;
  terms.reserve(src.terms.size());
  for (const auto& t : src.terms) terms.push_back({t.ell, Complex(t.re, t.im)});
  return make_superposition(terms);
}

GridSpec grid_of(const ScenarioConfig& cfg) {
  GridSpec g{cfg.outputs.grid_n, cfg.outputs.grid_extent, 1.0};
  g.validate();
  return g;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg, const RunOptions& options) {
  const BasisSpec basis(cfg.basis);
  double total_weight = 0.0;
  for (const auto& s : cfg.sources) total_weight += s.weight;

  std::vector<SourceInput> inputs;
  std::vector<WeightedDensity> intended;
  for (const auto& s : cfg.sources) {
    DensityMatrix rho = pure_density(source_state(s), basis);
    inputs.push_back({s.port, s.weight / total_weight, rho});
    intended.push_back({s.weight, std::move(rho)});
  }

  ScenarioResult result{incoherent_mix(intended), duplex(inputs, cfg.imperfections), {}, {}, {}, {}};
  if (result.ports.bright.weight > 0.0) result.dark_bright_ratio = dark_port_ratio(result.ports);

  const std::filesystem::path dir = options.out_dir.value_or(std::filesystem::path(cfg.outputs.directory));
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create output directory " + dir.string() + ": " + ec.message());

  auto emit = [&](const std::string& name, const std::string& text) {
    write_text_file(dir / name, text);
    result.written.push_back(dir / name);
  };
  auto emit_images = [&] {
    const GridSpec grid = grid_of(cfg);
    for (const auto& [name, port] : {std::pair{"bright.pgm", &result.ports.bright}, std::pair{"dark.pgm", &result.ports.dark}}) {
      const IntensityImage image = port->rho ? render_state(*port->rho, grid)
                                             : IntensityImage{grid, std::vector<double>(static_cast<std::size_t>(grid.n) * grid.n, 0.0)};
      write_pgm(dir / name, image);
      result.written.push_back(dir / name);
    }
  };

  if (options.command == Command::Render) {
    emit_images();
    return result;
  }

  emit("ideal_rho.json", density_to_text(result.ideal));
  emit("bright_rho.json", port_state_to_text(basis, result.ports.bright));
  emit("dark_rho.json", port_state_to_text(basis, result.ports.dark));

  json report;
  report["command"] = options.command == Command::Simulate ? "simulate" : "tomography";
  report["bright_weight"] = result.ports.bright.weight;
  report["dark_weight"] = result.ports.dark.weight;
  report["dark_bright_ratio"] = result.dark_bright_ratio ? json(*result.dark_bright_ratio) : json(nullptr);
  report["purity"]["ideal"] = purity(result.ideal);
  report["purity"]["bright"] = result.ports.bright.rho ? json(purity(*result.ports.bright.rho)) : json(nullptr);
  report["imperfections"] = {{"epsilon_rad", cfg.imperfections.path_phase_error},
                             {"delta_rad", cfg.imperfections.prism_angle_error},
                             {"eta", cfg.imperfections.splitting_imbalance}};
  if (result.ports.bright.rho) report["device_fidelity"] = fidelity(result.ideal, *result.ports.bright.rho);

  if (options.command == Command::Tomography) {
    if (!result.ports.bright.rho) throw Error(ErrorCode::BrightPortEmpty, "bright port is empty; nothing to measure");
    TomographyOptions topts;
    const MeasurementConfig m = cfg.measurement.value_or(MeasurementConfig{});
    topts.seed = options.seed.value_or(m.seed);
    if (!options.exact) {
      if (!cfg.measurement) invalid("measurement", "required for tomography unless --exact is given");
      topts.exposure = m.exposure;
    }
    const TomographyResult tomo = run_tomography(*result.ports.bright.rho, result.ideal, topts);
    result.fidelity = tomo.fidelity;
    result.fidelity_squared = tomo.fidelity_squared;

    emit("reconstructed_rho.json", density_to_text(tomo.rho_physical));
    emit("tomography.json", tomography_result_to_text(tomo));
    if (!tomo.records.empty()) emit("counts.json", count_records_to_text(tomo.records));

    report["fidelity"] = tomo.fidelity;
    report["fidelity_squared"] = tomo.fidelity_squared;
    report["purity"]["reconstructed"] = purity(tomo.rho_physical);
    report["exposure"] = topts.exposure ? json(*topts.exposure) : json("infinite");
    report["seed"] = topts.seed;
  }
  emit("report.json", report_text(report));

  if (cfg.outputs.emit_images) emit_images();
  return result;
}

std::string compare_density_files(const std::filesystem::path& target, const std::filesystem::path& measured) {
  const DensityMatrix a = density_from_text(read_text_file(target));
  const DensityMatrix b = density_from_text(read_text_file(measured));
  json out;
  out["fidelity"] = fidelity(a, b);
  out["fidelity_squared"] = fidelity_squared(a, b);
  out["trace_distance"] = trace_distance(a.elements(), b.elements());
  out["purity"] = {{"target", purity(a)}, {"measured", purity(b)}};
  return report_text(out);
}

}  // namespace oamplex
