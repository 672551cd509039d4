#include "config.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "csv.hpp"

namespace fpbh::cli {

using nlohmann::json;

namespace {

const std::map<std::string, std::map<std::string, double>>& unit_table() {
  static const std::map<std::string, std::map<std::string, double>> t{
      {"length", {{"m", 1.0}, {"cm", 1e-2}, {"mm", 1e-3}, {"um", 1e-6}}},
      {"pressure", {{"Pa", 1.0}, {"kPa", 1e3}, {"MPa", 1e6}, {"GPa", 1e9}}},
      {"density", {{"kg/m^3", 1.0}, {"kg/m3", 1.0}, {"g/cm^3", 1e3}, {"g/cm3", 1e3}}},
      {"resistance", {{"Ohm", 1.0}, {"ohm", 1.0}, {"kOhm", 1e3}, {"kohm", 1e3}, {"MOhm", 1e6}, {"Mohm", 1e6}}},
      {"charge_per_force", {{"C/N", 1.0}, {"pC/N", 1e-12}}},
      {"time", {{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}}},
      {"impulse", {{"N*s", 1.0}, {"Ns", 1.0}}},
      {"viscous", {{"N*s/m^2", 1.0}}},
      {"frequency", {{"Hz", 1.0}, {"kHz", 1e3}}},
      {"dimensionless", {}},
  };
  return t;
}

bool parse_double(std::string_view s, double& out) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

// Strict object access: unknown keys are reported with their path.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(path_, "expected a mapping");
  }
  ~Obj() = default;

  bool has(const std::string& k) const {
    used_.insert(k);
    return j_.contains(k) && !j_.at(k).is_null();
  }
  const json& at(const std::string& k) const {
    used_.insert(k);
    if (!j_.contains(k)) throw ValidationError(sub(k), "missing required field");
    return j_.at(k);
  }
  std::string sub(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  double quantity(const std::string& k, const std::string& dim) const { return parse_quantity(at(k), dim, sub(k)); }
  std::optional<double> opt_quantity(const std::string& k, const std::string& dim) const {
    if (!has(k)) return std::nullopt;
    return quantity(k, dim);
  }
  std::string string(const std::string& k) const {
    const auto& v = at(k);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) return v.dump();
    throw ValidationError(sub(k), "expected a string");
  }
  std::size_t count(const std::string& k) const {
    const auto& v = at(k);
    double d = 0.0;
    if (v.is_number()) d = v.get<double>();
    else if (!(v.is_string() && parse_double(v.get<std::string>(), d)))
      throw ValidationError(sub(k), "expected a non-negative integer");
    if (!(d >= 0.0) || d != std::floor(d) || d > 1e9) throw ValidationError(sub(k), "expected a non-negative integer");
    return static_cast<std::size_t>(d);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) throw ValidationError(sub(it.key()), "unknown field");
  }

 private:
  const json& j_;
  std::string path_;
  mutable std::set<std::string> used_;
};

json yaml_to_json(const YAML::Node& n) {
  switch (n.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
      return nullptr;
    case YAML::NodeType::Scalar: {
      const std::string s = n.Scalar();
      if (n.Tag() == "!") return s;  // quoted
      double d = 0.0;
      if (parse_double(s, d)) return d;
      if (s == "true") return true;
      if (s == "false") return false;
      if (s == "null" || s == "~") return nullptr;
      return s;
    }
    case YAML::NodeType::Sequence: {
      json a = json::array();
      for (const auto& e : n) a.push_back(yaml_to_json(e));
      return a;
    }
    case YAML::NodeType::Map: {
      json o = json::object();
      for (const auto& kv : n) o[kv.first.Scalar()] = yaml_to_json(kv.second);
      return o;
    }
  }
  return nullptr;
}

void emit_yaml(YAML::Emitter& e, const json& j) {
  if (j.is_object()) {
    e << YAML::BeginMap;
    for (auto it = j.begin(); it != j.end(); ++it) {
      e << YAML::Key << it.key() << YAML::Value;
      emit_yaml(e, it.value());
    }
    e << YAML::EndMap;
  } else if (j.is_array()) {
    const bool flat = std::all_of(j.begin(), j.end(), [](const json& x) { return x.is_primitive(); });
    if (flat) e << YAML::Flow;
    e << YAML::BeginSeq;
    for (const auto& x : j) emit_yaml(e, x);
    e << YAML::EndSeq;
  } else if (j.is_number()) {
    e << format_double(j.get<double>());
  } else if (j.is_boolean()) {
    e << (j.get<bool>() ? "true" : "false");
  } else if (j.is_string()) {
    e << YAML::DoubleQuoted << j.get<std::string>();
  } else {
    e << YAML::Null;
  }
}

RangeSpec parse_range(const Obj& parent, const std::string& key, const std::string& dim) {
  Obj o(parent.at(key), parent.sub(key));
  RangeSpec r{o.quantity("min", dim), o.quantity("max", dim), o.count("points")};
  o.finish();
  return r;
}

std::vector<double> parse_list(const json& j, const std::string& path, const std::string& dim) {
  if (!j.is_array()) throw ValidationError(path, "expected a list");
  std::vector<double> v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(parse_quantity(j[i], dim, path + "[" + std::to_string(i) + "]"));
  return v;
}

json range_json(const RangeSpec& r) { return {{"min", r.min}, {"max", r.max}, {"points", r.points}}; }

}  // namespace

double parse_quantity(const json& v, const std::string& dimension, const std::string& path) {
  double value = 0.0;
  if (v.is_number()) {
    value = v.get<double>();
  } else if (v.is_string()) {
    std::string s = v.get<std::string>();
    const auto& units = unit_table().at(dimension);
    if (!parse_double(s, value)) {
      const auto sp = s.find_last_of(" ");
      std::string num = sp == std::string::npos ? "" : s.substr(0, sp);
      std::string unit = sp == std::string::npos ? "" : s.substr(sp + 1);
      if (sp == std::string::npos) {
        // "0.3mm": split at the first character that cannot continue a number.
        std::size_t k = 0;
        while (k < s.size() && (std::isdigit(static_cast<unsigned char>(s[k])) || s[k] == '.' || s[k] == '-' ||
                                s[k] == '+' || ((s[k] == 'e' || s[k] == 'E') && k + 1 < s.size() &&
                                                (std::isdigit(static_cast<unsigned char>(s[k + 1])) || s[k + 1] == '-'))))
          ++k;
        num = s.substr(0, k);
        unit = s.substr(k);
      }
      const auto u = units.find(unit);
      if (u == units.end() || !parse_double(num, value))
        throw ValidationError(path, "cannot read quantity '" + s + "' as " + dimension);
      value *= u->second;
    }
  } else {
    throw ValidationError(path, "expected a number");
  }
  if (!std::isfinite(value)) throw ValidationError(path, "must be finite");
  return value;
}

DesignConfig config_from_json(const json& j) {
  DesignConfig c;
  Obj root(j, "");
  c.name = root.has("name") ? root.string("name") : "";
  c.notes = root.has("notes") ? root.string("notes") : "";

  {
    Obj lam(root.at("laminate"), "laminate");
    c.laminate.width = lam.quantity("width", "length");
    c.laminate.wiring = lam.has("wiring") ? [&] {
      try {
        return wiring_from_string(lam.string("wiring"));
      } catch (const std::invalid_argument& e) {
        throw ValidationError("laminate.wiring", e.what());
      }
    }()
                                          : Wiring::single;
    if (lam.has("offset_convention")) {
      const auto s = lam.string("offset_convention");
      if (s == "neutral_axis") c.laminate.offset = OffsetConvention::neutral_axis;
      else if (s == "layer_midplanes") c.laminate.offset = OffsetConvention::layer_midplanes;
      else throw ValidationError("laminate.offset_convention", "expected neutral_axis or layer_midplanes");
    }
    const auto& layers = lam.at("layers");
    if (!layers.is_array()) throw ValidationError("laminate.layers", "expected a list");
    for (std::size_t i = 0; i < layers.size(); ++i) {
      Obj l(layers[i], "laminate.layers[" + std::to_string(i) + "]");
      LayerSpec s;
      s.name = l.has("name") ? l.string("name") : "";
      const auto kind = l.string("kind");
      if (kind == "elastic") s.kind = LayerKind::elastic;
      else if (kind == "piezo") s.kind = LayerKind::piezo;
      else throw ValidationError(l.sub("kind"), "expected elastic or piezo");
      s.thickness = l.quantity("thickness", "length");
      s.density = l.quantity("density", "density");
      s.modulus = l.quantity("modulus", "pressure");
      if (s.kind == LayerKind::piezo) {
        s.d31 = l.quantity("d31", "charge_per_force");
        s.rel_permittivity = l.quantity("rel_permittivity", "dimensionless");
      }
      l.finish();
      c.laminate.layers.push_back(s);
    }
    lam.finish();
  }
  {
    Obj g(root.at("geometry"), "geometry");
    c.geometry.total_length = g.quantity("total_length", "length");
    c.geometry.kappa = g.opt_quantity("kappa", "dimensionless");
    c.geometry.a1 = g.opt_quantity("a1", "length");
    c.geometry.a2 = g.opt_quantity("a2", "length");
    c.geometry.u1 = g.opt_quantity("u1", "length");
    c.geometry.theta = g.opt_quantity("theta", "dimensionless");
    c.geometry.piezo_start = g.opt_quantity("piezo_start", "length");
    c.geometry.piezo_end = g.opt_quantity("piezo_end", "length");
    g.finish();
  }
  {
    Obj d(root.at("damping"), "damping");
    if (d.has("ratios")) c.damping.ratios = parse_list(d.at("ratios"), "damping.ratios", "dimensionless");
    c.damping.viscous = d.opt_quantity("viscous", "viscous");
    d.finish();
  }
  {
    Obj e(root.at("circuit"), "circuit");
    c.circuit.load_resistance = e.quantity("load_resistance", "resistance");
    if (e.has("convention")) {
      const auto s = e.string("convention");
      if (s == "as_printed") c.circuit.convention = CircuitConvention::as_printed;
      else if (s == "conventional") c.circuit.convention = CircuitConvention::conventional;
      else throw ValidationError("circuit.convention", "expected as_printed or conventional");
    }
    e.finish();
  }
  if (root.has("solver")) {
    Obj s(root.at("solver"), "solver");
    auto& v = c.solver;
    if (s.has("modes")) v.modes = s.count("modes");
    if (s.has("psi_form")) {
      const auto f = s.string("psi_form");
      if (f == "resonant") v.psi_form = PsiForm::resonant;
      else if (f == "full") v.psi_form = PsiForm::full;
      else throw ValidationError("solver.psi_form", "expected resonant or full");
    }
    if (s.has("space_points")) v.space_points = s.count("space_points");
    if (s.has("z_points")) v.z_points = s.count("z_points");
    if (s.has("impulse")) v.impulse = s.quantity("impulse", "impulse");
    if (s.has("load_grid")) {
      Obj o(s.at("load_grid"), "solver.load_grid");
      v.load_grid = {o.quantity("min", "resistance"), o.quantity("max", "resistance"), o.count("points")};
      o.finish();
    }
    if (s.has("kappa_grid")) v.kappa_grid = parse_range(s, "kappa_grid", "dimensionless");
    if (s.has("theta_grid")) v.theta_grid = parse_list(s.at("theta_grid"), "solver.theta_grid", "dimensionless");
    if (s.has("span_grid")) v.span_grid = parse_range(s, "span_grid", "dimensionless");
    if (s.has("threshold")) v.threshold = s.quantity("threshold", "dimensionless");
    if (s.has("t_end")) v.t_end = s.quantity("t_end", "time");
    v.time_step = s.opt_quantity("time_step", "time");
    s.finish();
  }
  if (root.has("cantilever")) {
    Obj k(root.at("cantilever"), "cantilever");
    CantileverSpec cs;
    cs.length = k.quantity("length", "length");
    cs.load_position = k.quantity("load_position", "length");
    cs.piezo_start = k.quantity("piezo_start", "length");
    cs.piezo_end = k.quantity("piezo_end", "length");
    k.finish();
    c.cantilever = cs;
  }
  root.finish();
  c.validate();
  return c;
}

json config_to_json(const DesignConfig& c) {
  json j;
  j["name"] = c.name;
  if (!c.notes.empty()) j["notes"] = c.notes;
  json layers = json::array();
  for (const auto& l : c.laminate.layers) {
    json o{{"name", l.name},
           {"kind", l.kind == LayerKind::piezo ? "piezo" : "elastic"},
           {"thickness", l.thickness},
           {"density", l.density},
           {"modulus", l.modulus}};
    if (l.kind == LayerKind::piezo) {
      o["d31"] = l.d31;
      o["rel_permittivity"] = l.rel_permittivity;
    }
    layers.push_back(o);
  }
  j["laminate"] = {{"width", c.laminate.width},
                   {"wiring", to_string(c.laminate.wiring)},
                   {"offset_convention",
                    c.laminate.offset == OffsetConvention::neutral_axis ? "neutral_axis" : "layer_midplanes"},
                   {"layers", layers}};
  json g{{"total_length", c.geometry.total_length}};
  auto put = [](json& o, const char* k, const std::optional<double>& v) {
    if (v) o[k] = *v;
  };
  put(g, "kappa", c.geometry.kappa);
  put(g, "a1", c.geometry.a1);
  put(g, "a2", c.geometry.a2);
  put(g, "u1", c.geometry.u1);
  put(g, "theta", c.geometry.theta);
  put(g, "piezo_start", c.geometry.piezo_start);
  put(g, "piezo_end", c.geometry.piezo_end);
  j["geometry"] = g;
  json d = json::object();
  if (!c.damping.ratios.empty()) d["ratios"] = c.damping.ratios;
  put(d, "viscous", c.damping.viscous);
  j["damping"] = d;
  j["circuit"] = {{"load_resistance", c.circuit.load_resistance},
                  {"convention", c.circuit.convention == CircuitConvention::as_printed ? "as_printed" : "conventional"}};
  const auto& s = c.solver;
  json sj{{"modes", s.modes},
          {"psi_form", to_string(s.psi_form)},
          {"space_points", s.space_points},
          {"z_points", s.z_points},
          {"impulse", s.impulse},
          {"load_grid", {{"min", s.load_grid.min}, {"max", s.load_grid.max}, {"points", s.load_grid.points}}},
          {"kappa_grid", range_json(s.kappa_grid)},
          {"theta_grid", s.theta_grid},
          {"span_grid", range_json(s.span_grid)},
          {"threshold", s.threshold},
          {"t_end", s.t_end}};
  put(sj, "time_step", s.time_step);
  j["solver"] = sj;
  if (c.cantilever) {
    j["cantilever"] = {{"length", c.cantilever->length},
                       {"load_position", c.cantilever->load_position},
                       {"piezo_start", c.cantilever->piezo_start},
                       {"piezo_end", c.cantilever->piezo_end}};
  }
  return j;
}

Laminate DesignConfig::build_laminate() const {
  std::vector<MaterialLayer> ls;
  for (const auto& l : laminate.layers) {
    if (l.kind == LayerKind::piezo)
      ls.push_back(MaterialLayer::piezo(l.name, l.thickness, l.density, l.modulus, l.d31, l.rel_permittivity));
    else
      ls.push_back(MaterialLayer::elastic(l.name, l.thickness, l.density, l.modulus));
  }
  return Laminate(std::move(ls), laminate.width, laminate.wiring, laminate.offset);
}

FpbGeometry DesignConfig::build_geometry() const {
  const auto& g = geometry;
  if (!(g.total_length > 0.0)) throw ValidationError("geometry.total_length", "must be positive");
  FpbGeometry f;
  f.total_length = g.total_length;
  if (g.kappa && (g.a1 || g.a2 || g.u1))
    throw ValidationError("geometry", "give either kappa or a1/a2/u1, not both");
  if (g.kappa) {
    if (!(*g.kappa > 0.0 && *g.kappa < 1.0)) throw ValidationError("geometry.kappa", "kappa must lie in (0, 1)");
    f.overhang_left = f.overhang_right = 0.5 * (1.0 - *g.kappa) * g.total_length;
    f.load_split = 0.5 * *g.kappa * g.total_length;
  } else {
    if (!g.a1) throw ValidationError("geometry.a1", "missing (or give kappa)");
    if (!g.a2) throw ValidationError("geometry.a2", "missing (or give kappa)");
    f.overhang_left = *g.a1;
    f.overhang_right = *g.a2;
    f.load_split = g.u1 ? *g.u1 : 0.5 * (g.total_length - *g.a1 - *g.a2);
  }
  if (g.theta && (g.piezo_start || g.piezo_end))
    throw ValidationError("geometry", "give either theta or piezo_start/piezo_end, not both");
  if (g.theta) {
    if (!(*g.theta > 0.0 && *g.theta <= 1.0)) throw ValidationError("geometry.theta", "theta must lie in (0, 1]");
    f.piezo_start = 0.5 * (1.0 - *g.theta) * g.total_length;
    f.piezo_end = g.total_length - f.piezo_start;
  } else {
    if (!g.piezo_start) throw ValidationError("geometry.piezo_start", "missing (or give theta)");
    if (!g.piezo_end) throw ValidationError("geometry.piezo_end", "missing (or give theta)");
    f.piezo_start = *g.piezo_start;
    f.piezo_end = *g.piezo_end;
  }
  f.validate();
  return f;
}

Damping DesignConfig::build_damping() const {
  if (damping.viscous && !damping.ratios.empty())
    throw ValidationError("damping", "give either ratios or viscous, not both");
  return damping.viscous ? Damping::from_viscous(*damping.viscous) : Damping::per_mode(damping.ratios);
}

HarvesterModel DesignConfig::build_model() const {
  return make_fpb_model(build_laminate(), build_geometry(), build_damping(), solver.modes, circuit.load_resistance,
                        circuit.convention);
}

HarvesterModel DesignConfig::build_cantilever() const {
  if (!cantilever) throw ValidationError("cantilever", "section missing");
  const auto& k = *cantilever;
  return make_cantilever_model(build_laminate(), {k.length, k.load_position, k.piezo_start, k.piezo_end},
                               build_damping(), solver.modes, circuit.load_resistance, circuit.convention);
}

void DesignConfig::validate() const {
  const auto lam = build_laminate();
  if (!lam.has_piezo()) throw ValidationError("laminate.layers", "no piezo layer present");
  build_geometry();
  build_damping().validate(solver.modes);
  if (solver.modes < 1) throw ValidationError("solver.modes", "mode count must be at least 1");
  if (!(circuit.load_resistance > 0.0)) throw ValidationError("circuit.load_resistance", "must be positive");
  if (solver.space_points < 2) throw ValidationError("solver.space_points", "need at least 2");
  if (solver.z_points < 1) throw ValidationError("solver.z_points", "need at least 1");
  if (!(solver.impulse > 0.0)) throw ValidationError("solver.impulse", "must be positive");
  solver.load_grid.validate();
  if (solver.kappa_grid.points < 1 || !(solver.kappa_grid.min > 0.0 && solver.kappa_grid.max < 1.0 &&
                                        solver.kappa_grid.min <= solver.kappa_grid.max))
    throw ValidationError("solver.kappa_grid", "need 0 < min <= max < 1 and points >= 1");
  for (std::size_t i = 0; i < solver.theta_grid.size(); ++i)
    if (!(solver.theta_grid[i] > 0.0 && solver.theta_grid[i] <= 1.0))
      throw ValidationError("solver.theta_grid[" + std::to_string(i) + "]", "must lie in (0, 1]");
  if (solver.span_grid.points < 1 ||
      !(solver.span_grid.min > 0.0 && solver.span_grid.max <= 1.0 && solver.span_grid.min <= solver.span_grid.max))
    throw ValidationError("solver.span_grid", "need 0 < min <= max <= 1 and points >= 1");
  if (!(solver.threshold > 0.0 && solver.threshold <= 1.0))
    throw ValidationError("solver.threshold", "must lie in (0, 1]");
  if (!(solver.t_end > 0.0)) throw ValidationError("solver.t_end", "must be positive");
  if (solver.time_step && !(*solver.time_step > 0.0)) throw ValidationError("solver.time_step", "must be positive");
  if (cantilever) build_cantilever();
}

DesignConfig parse_config(const std::string& text, const std::string& source) {
  YAML::Node node;
  try {
    node = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ValidationError(source, std::string("parse error: ") + e.what());
  }
  return config_from_json(yaml_to_json(node));
}

DesignConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("config", "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  if (path.extension() == ".json") {
    json j;
    try {
      j = json::parse(ss.str());
    } catch (const json::parse_error& e) {
      throw ValidationError(path.string(), std::string("parse error: ") + e.what());
    }
    return config_from_json(j);
  }
  return parse_config(ss.str(), path.string());
}

std::string to_yaml(const DesignConfig& c) {
  YAML::Emitter e;
  emit_yaml(e, config_to_json(c));
  return std::string(e.c_str()) + "\n";
}

std::string to_json_text(const DesignConfig& c) { return config_to_json(c).dump(2) + "\n"; }

std::uint64_t config_hash(const DesignConfig& c) {
  const std::string s = config_to_json(c).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace fpbh::cli
