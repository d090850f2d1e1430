#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "zkb/harness.hpp"

namespace zkb::harness {

using json = nlohmann::ordered_json;

namespace {

constexpr const char* kPaperRef = R"({
  "schema": 1,
  "preset": "paper-ref",
  "geometry": {"B": "pi", "Lx": 100, "Nx": 1024, "Ny": 32, "b": "auto"},
  "solver": {
    "dt": 1e-3,
    "t_end": 40,
    "scheme": "exponential-RK4",
    "dealias": true,
    "convection": 0,
    "output_every": 100,
    "dissipation": "step",
    "absorber": 1000
  },
  "initial": {"kind": "gaussian_mode", "amplitude": 1, "x0": 0, "width": 2, "mode": 1, "norm": 0.16875},
  "experiment": {"norm": "w_l2", "regime": "weak", "tolerance": 0.05}
})";

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// Typed access to one JSON object with unknown-key detection.
class Section {
 public:
  Section(const json& node, std::string path, std::initializer_list<const char*> allowed)
      : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(where() + "expected an object");
    for (const auto& item : node_.items()) {
      bool known = false;
      for (const char* a : allowed) known = known || item.key() == a;
      if (!known) {
        throw ConfigError("unknown key: " + item.key() + (path_.empty() ? "" : " (in " + path_ + ")"));
      }
    }
  }

  bool has(const char* key) const { return node_.contains(key); }

  const json& require(const char* key) const {
    if (!node_.contains(key)) throw ConfigError("missing required key: " + join(path_, key));
    return node_.at(key);
  }

  double number(const char* key) const { return as_number(require(key), key); }
  double number(const char* key, double fallback) const { return has(key) ? as_number(node_.at(key), key) : fallback; }

  std::int64_t integer(const char* key) const { return as_integer(require(key), key); }
  std::int64_t integer(const char* key, std::int64_t fallback) const {
    return has(key) ? as_integer(node_.at(key), key) : fallback;
  }

  bool boolean(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = node_.at(key);
    if (!v.is_boolean()) throw ConfigError(join(path_, key) + ": expected boolean");
    return v.get<bool>();
  }

  std::string string(const char* key) const { return as_string(require(key), key); }
  std::string string(const char* key, const std::string& fallback) const {
    return has(key) ? as_string(node_.at(key), key) : fallback;
  }

  // Number or a length expression such as "pi/2".
  double length(const char* key) const {
    const json& v = require(key);
    if (v.is_string()) {
      try {
        return parse_length(v.get<std::string>());
      } catch (const ConfigError& e) {
        throw ConfigError(join(path_, key) + ": " + e.what());
      }
    }
    return as_number(v, key);
  }

  std::string path(const char* key) const { return join(path_, key); }
  const json& node() const { return node_; }

 private:
  std::string where() const { return path_.empty() ? "" : path_ + ": "; }

  double as_number(const json& v, const char* key) const {
    if (!v.is_number()) throw ConfigError(join(path_, key) + ": expected number");
    return v.get<double>();
  }
  std::int64_t as_integer(const json& v, const char* key) const {
    if (!v.is_number_integer()) {
      if (v.is_number_float()) {
        const double d = v.get<double>();
        if (std::isfinite(d) && d == std::floor(d)) return static_cast<std::int64_t>(d);
      }
      throw ConfigError(join(path_, key) + ": expected integer");
    }
    return v.get<std::int64_t>();
  }
  std::string as_string(const json& v, const char* key) const {
    if (!v.is_string()) throw ConfigError(join(path_, key) + ": expected string");
    return v.get<std::string>();
  }

  const json& node_;
  std::string path_;
};

std::size_t positive_size(std::int64_t v, const std::string& path) {
  if (v < 0) throw ConfigError(path + ": must be >= 0");
  return static_cast<std::size_t>(v);
}

template <typename F>
auto rethrow_as_config(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace

double parse_length(std::string_view text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(static_cast<char>(std::tolower(c)));
  }
  auto parse_plain = [&](std::string_view part) {
    double v = 0.0;
    const auto* end = part.data() + part.size();
    auto [ptr, ec] = std::from_chars(part.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ConfigError("cannot parse length '" + std::string(text) + "'");
    return v;
  };
  const auto pos = s.find("pi");
  if (pos == std::string::npos) return parse_plain(s);
  std::string_view head(s.data(), pos);
  std::string_view tail(s.data() + pos + 2, s.size() - pos - 2);
  if (!head.empty() && head.back() == '*') head.remove_suffix(1);
  double value = std::numbers::pi * (head.empty() ? 1.0 : parse_plain(head));
  if (!tail.empty()) {
    if (tail.front() != '/') throw ConfigError("cannot parse length '" + std::string(text) + "'");
    tail.remove_prefix(1);
    const double d = parse_plain(tail);
    if (d == 0.0) throw ConfigError("division by zero in length '" + std::string(text) + "'");
    value /= d;
  }
  return value;
}

std::string preset_document(std::string_view name) {
  if (name == "paper-ref") return kPaperRef;
  throw ConfigError("unknown preset: " + std::string(name));
}

RunConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  if (doc.contains("preset")) {
    if (!doc["preset"].is_string()) throw ConfigError("preset: expected string");
    json base = json::parse(preset_document(doc["preset"].get<std::string>()));
    base.merge_patch(doc);
    doc = std::move(base);
  }

  Section top(doc, "", {"schema", "preset", "geometry", "solver", "initial", "experiment", "seed"});
  if (top.integer("schema") != 1) throw ConfigError("schema: unsupported version (expected 1)");

  RunConfig cfg;
  cfg.preset = top.string("preset", "");
  const std::int64_t seed = top.integer("seed", 0);
  if (seed < 0) throw ConfigError("seed: must be >= 0");
  cfg.seed = static_cast<std::uint64_t>(seed);

  {
    Section g(top.require("geometry"), "geometry", {"B", "Lx", "Nx", "Ny", "b"});
    const double B = g.length("B");
    const double Lx = g.length("Lx");
    const std::size_t nx = positive_size(g.integer("Nx"), "geometry.Nx");
    const std::size_t ny = positive_size(g.integer("Ny"), "geometry.Ny");
    double b = 0.0;
    const json& bv = g.require("b");
    if (bv.is_string()) {
      if (bv.get<std::string>() != "auto") throw ConfigError("geometry.b: expected number or \"auto\"");
      cfg.b_auto = true;
      b = rethrow_as_config("geometry.B", [&] { return constants_for_width(B).b_star; });
    } else {
      b = g.number("b");
    }
    cfg.geometry = rethrow_as_config("geometry", [&] { return StripGeometry(B, Lx, nx, ny, b); });
  }

  {
    Section s(top.require("solver"), "solver",
              {"dt", "t_end", "scheme", "dealias", "convection", "output_every", "dissipation", "nonlinear",
               "store_snapshots", "tail_guard", "absorber"});
    SolverConfig& sc = cfg.solver;
    sc.dt = s.number("dt");
    sc.t_end = s.number("t_end");
    sc.scheme = parse_scheme(s.string("scheme", "exponential-RK4"));
    sc.dealias = s.boolean("dealias", true);
    sc.convection = static_cast<int>(s.integer("convection", 0));
    const std::int64_t every = s.integer("output_every", 1);
    if (every < 1) throw ConfigError("solver.output_every: must be >= 1");
    sc.output_every = static_cast<std::size_t>(every);
    sc.dissipation = parse_dissipation_mode(s.string("dissipation", "snapshot"));
    sc.nonlinear = s.boolean("nonlinear", true);
    sc.store_snapshots = s.boolean("store_snapshots", false);
    sc.tail_guard = s.boolean("tail_guard", true);
    sc.absorber = s.number("absorber", 0.0);
    rethrow_as_config("solver", [&] {
      sc.validate();
      return 0;
    });
  }

  {
    Section i(top.require("initial"), "initial",
              {"kind", "amplitude", "x0", "width", "mode", "wavenumber", "norm", "samples"});
    InitialData& d = cfg.initial;
    d.kind = parse_initial_kind(i.string("kind"));
    d.amplitude = i.number("amplitude", 1.0);
    d.x0 = i.number("x0", 0.0);
    d.width = i.number("width", 1.0);
    d.mode = static_cast<int>(i.integer("mode", 1));
    d.wavenumber = i.number("wavenumber", 1.0);
    if (i.has("norm")) d.target_norm = i.number("norm");
    if (i.has("samples")) {
      const json& arr = i.node().at("samples");
      if (!arr.is_array()) throw ConfigError("initial.samples: expected array of numbers");
      for (std::size_t k = 0; k < arr.size(); ++k) {
        if (!arr[k].is_number()) throw ConfigError("initial.samples[" + std::to_string(k) + "]: expected number");
        d.samples.push_back(arr[k].get<double>());
      }
    }
    if (d.kind == InitialKind::CustomSamples && d.samples.size() != cfg.geometry.size()) {
      throw ConfigError("initial.samples: expected " + std::to_string(cfg.geometry.size()) + " values");
    }
  }

  if (top.has("experiment")) {
    Section e(top.node().at("experiment"), "experiment", {"norm", "t0", "t1", "regime", "tolerance"});
    ExperimentConfig& x = cfg.experiment;
    x.norm = parse_norm_id(e.string("norm", "w_l2"));
    if (e.has("t0")) x.t0 = e.number("t0");
    if (e.has("t1")) x.t1 = e.number("t1");
    if (x.t0 && x.t1 && !(*x.t0 < *x.t1)) throw ConfigError("experiment: t0 must be < t1");
    x.regime = parse_regime(e.string("regime", "weak"));
    x.tolerance = e.number("tolerance", 0.05);
    if (!(x.tolerance >= 0.0 && x.tolerance < 1.0)) throw ConfigError("experiment.tolerance: must lie in [0, 1)");
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string dump_config(const RunConfig& cfg) {
  json doc;
  doc["schema"] = 1;
  if (!cfg.preset.empty()) doc["preset"] = cfg.preset;
  doc["seed"] = cfg.seed;
  const StripGeometry& g = cfg.geometry;
  doc["geometry"] = {{"B", g.width()}, {"Lx", g.half_length()}, {"Nx", g.nx()}, {"Ny", g.ny()}, {"b", g.weight_rate()}};
  const SolverConfig& s = cfg.solver;
  doc["solver"] = {{"dt", s.dt},
                   {"t_end", s.t_end},
                   {"scheme", std::string(to_string(s.scheme))},
                   {"dealias", s.dealias},
                   {"convection", s.convection},
                   {"output_every", s.output_every},
                   {"dissipation", std::string(to_string(s.dissipation))},
                   {"nonlinear", s.nonlinear},
                   {"store_snapshots", s.store_snapshots},
                   {"tail_guard", s.tail_guard},
                   {"absorber", s.absorber}};
  const InitialData& d = cfg.initial;
  json init = {{"kind", std::string(to_string(d.kind))},
               {"amplitude", d.amplitude},
               {"x0", d.x0},
               {"width", d.width},
               {"mode", d.mode},
               {"wavenumber", d.wavenumber}};
  if (d.target_norm) init["norm"] = *d.target_norm;
  if (d.kind == InitialKind::CustomSamples) init["samples"] = d.samples;
  doc["initial"] = init;
  json exp = {{"norm", std::string(to_string(cfg.experiment.norm))},
              {"regime", std::string(to_string(cfg.experiment.regime))},
              {"tolerance", cfg.experiment.tolerance}};
  if (cfg.experiment.t0) exp["t0"] = *cfg.experiment.t0;
  if (cfg.experiment.t1) exp["t1"] = *cfg.experiment.t1;
  doc["experiment"] = exp;
  return doc.dump(2);
}

}  // namespace zkb::harness
