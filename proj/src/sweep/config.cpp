#include "loopgrating/sweep/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>

#include "loopgrating/error.hpp"
#include "loopgrating/sweep/runner.hpp"

namespace loopgrating::sweep {

namespace {

constexpr double pi = std::numbers::pi;

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Shortest representation that parses back to the same double.
std::string fmt(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? ", " : "") + fmt(v[k]);
  return out;
}

// Recursive-descent parser for the small numeric expression language.
class ExprParser {
 public:
  explicit ExprParser(std::string_view s) : s_(s) {}

  double parse() {
    const double v = expr();
    skip();
    if (pos_ != s_.size()) fail();
    return v;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail() const {
    throw Error(ErrorCode::ParseError, "malformed number '" + std::string(s_) + "'");
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool starts_factor() {
    skip();
    if (pos_ >= s_.size()) return false;
    const char c = s_[pos_];
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == 'p' || c == '(';
  }
  double expr() {
    double v = unary();
    for (;;) {
      skip();
      if (pos_ < s_.size() && (s_[pos_] == '*' || s_[pos_] == '/')) {
        const char op = s_[pos_++];
        const double r = unary();
        v = op == '*' ? v * r : v / r;
      } else if (starts_factor()) {
        v *= unary();  // implicit product, e.g. 3pi
      } else {
        return v;
      }
    }
  }
  double unary() {
    skip();
    if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) {
      const bool neg = s_[pos_++] == '-';
      const double v = unary();
      return neg ? -v : v;
    }
    return primary();
  }
  double primary() {
    skip();
    if (pos_ >= s_.size()) fail();
    if (s_.substr(pos_, 2) == "pi") {
      pos_ += 2;
      return pi;
    }
    if (s_[pos_] == '(') {
      ++pos_;
      const double v = expr();
      skip();
      if (pos_ >= s_.size() || s_[pos_] != ')') fail();
      ++pos_;
      return v;
    }
    const std::string rest(s_.substr(pos_));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(rest, &used);
    } catch (const std::exception&) {
      fail();
    }
    // stod would swallow "inf"/"nan" and hex forms; accept decimal literals only.
    for (std::size_t k = 0; k < used; ++k) {
      const char c = rest[k];
      if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == 'e' || c == 'E' || c == '+' || c == '-'))
        fail();
    }
    pos_ += used;
    return v;
  }
};

std::vector<double> parse_list(std::string_view text) {
  std::vector<double> out;
  std::string item;
  std::stringstream ss{std::string(text)};
  while (std::getline(ss, item, ',')) out.push_back(parse_number(trim(item)));
  if (out.empty()) throw Error(ErrorCode::ParseError, "empty list");
  return out;
}

int parse_int(std::string_view text) {
  const double v = parse_number(text);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw Error(ErrorCode::ParseError, "expected an integer, got '" + std::string(text) + "'");
  }
  return static_cast<int>(v);
}

std::string_view kind_name(grating::YKind k) {
  switch (k) {
    case grating::YKind::None: return "none";
    case grating::YKind::Sin: return "sin";
    case grating::YKind::Cos: return "cos";
  }
  return "none";
}

struct Entry {
  std::string key;
  std::function<void(ScenarioConfig&, const std::string&)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

#define LG_REAL(KEY, FIELD)                                                             \
  Entry {                                                                               \
    KEY, [](ScenarioConfig& c, const std::string& v) { c.FIELD = parse_number(v); },    \
        [](const ScenarioConfig& c) { return fmt(c.FIELD); }                            \
  }
#define LG_INT(KEY, FIELD)                                                              \
  Entry {                                                                               \
    KEY, [](ScenarioConfig& c, const std::string& v) { c.FIELD = parse_int(v); },       \
        [](const ScenarioConfig& c) { return std::to_string(c.FIELD); }                 \
  }

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = {
      {"scenario", [](ScenarioConfig& c, const std::string& v) { c.scenario = v; },
       [](const ScenarioConfig& c) { return c.scenario; }},
      LG_REAL("field.omega_p", field.omega_p),
      LG_REAL("field.omega_c", field.omega_c),
      LG_REAL("field.omega_d", field.omega_d),
      LG_REAL("field.omega_m", field.omega_m),
      LG_REAL("field.phi_p", field.phi_p),
      LG_REAL("field.phi_c", field.phi_c),
      LG_REAL("field.phi_m", field.phi_m),
      LG_REAL("field.delta_p", field.delta_p),
      LG_REAL("field.Delta_c", field.Delta_c),
      LG_REAL("field.delta_d", field.delta_d),
      LG_REAL("decay.Gamma_eg", field.Gamma_eg),
      LG_REAL("decay.Gamma_em", field.Gamma_em),
      LG_REAL("decay.Gamma_bm", field.Gamma_bm),
      LG_REAL("decay.gamma_eg", field.gamma.eg),
      LG_REAL("decay.gamma_em", field.gamma.em),
      LG_REAL("decay.gamma_mb", field.gamma.mb),
      LG_REAL("decay.gamma_gb", field.gamma.gb),
      LG_REAL("decay.gamma_gm", field.gamma.gm),
      LG_REAL("decay.gamma_eb", field.gamma.eb),
      LG_REAL("medium.density_N", medium.density_N),
      LG_REAL("medium.length_L", medium.length_L),
      LG_REAL("medium.lambda_p", medium.lambda_p),
      LG_REAL("medium.chi_scale", medium.chi_scale),
      LG_REAL("modulation.Delta_c0", modulation.x.Delta_c0),
      LG_REAL("modulation.q", modulation.x.q),
      LG_REAL("modulation.x0", modulation.x.x0),
      LG_REAL("modulation.probe_follow", modulation.x.probe_follow),
      {"modulation.kind_y",
       [](ScenarioConfig& c, const std::string& v) {
         if (v == "none") c.modulation.kind_y = grating::YKind::None;
         else if (v == "sin") c.modulation.kind_y = grating::YKind::Sin;
         else if (v == "cos") c.modulation.kind_y = grating::YKind::Cos;
         else throw Error(ErrorCode::OutOfRange, "modulation.kind_y must be none, sin or cos");
       },
       [](const ScenarioConfig& c) { return std::string(kind_name(c.modulation.kind_y)); }},
      LG_REAL("modulation.Delta_cy", modulation.Delta_cy),
      LG_REAL("modulation.y0", modulation.y0),
      LG_REAL("geometry.R", geometry.R),
      LG_INT("geometry.M", geometry.M),
      LG_INT("geometry.n_samples", geometry.n_samples),
      LG_INT("geometry.n_theta", geometry.n_theta),
      LG_INT("geometry.n_samples_2d", geometry_2d.n_samples),
      LG_INT("geometry.n_theta_2d", geometry_2d.n_theta),
      {"sweep.axis", [](ScenarioConfig& c, const std::string& v) { c.sweep.axis = v; },
       [](const ScenarioConfig& c) { return c.sweep.axis; }},
      {"sweep.min", [](ScenarioConfig& c, const std::string& v) { c.sweep.min = parse_number(v); },
       [](const ScenarioConfig& c) { return c.sweep.min ? fmt(*c.sweep.min) : std::string("auto"); }},
      {"sweep.max", [](ScenarioConfig& c, const std::string& v) { c.sweep.max = parse_number(v); },
       [](const ScenarioConfig& c) { return c.sweep.max ? fmt(*c.sweep.max) : std::string("auto"); }},
      {"sweep.count", [](ScenarioConfig& c, const std::string& v) { c.sweep.count = parse_int(v); },
       [](const ScenarioConfig& c) { return c.sweep.count ? std::to_string(*c.sweep.count) : std::string("auto"); }},
      {"sweep.values", [](ScenarioConfig& c, const std::string& v) { c.sweep.values = parse_list(v); },
       [](const ScenarioConfig& c) { return c.sweep.values ? fmt_list(*c.sweep.values) : std::string("auto"); }},
      {"sweep.phi_list", [](ScenarioConfig& c, const std::string& v) { c.phi_list = parse_list(v); },
       [](const ScenarioConfig& c) { return c.phi_list ? fmt_list(*c.phi_list) : std::string("auto"); }},
      LG_REAL("spectrum.delta_span", delta_span),
      LG_INT("spectrum.delta_count", delta_count),
      LG_REAL("special.single_omega_c", special.single_omega_c),
      LG_REAL("special.single_omega_d", special.single_omega_d),
      LG_REAL("special.single_omega_m", special.single_omega_m),
      LG_REAL("special.dammann_omega_c", special.dammann_omega_c),
      LG_REAL("special.equal_tolerance", special.equal_tolerance),
      {"output.dir", [](ScenarioConfig& c, const std::string& v) { c.output_dir = v; },
       [](const ScenarioConfig& c) { return c.output_dir; }},
  };
  return entries;
}

#undef LG_REAL
#undef LG_INT

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::OutOfRange, what);
}

}  // namespace

const std::vector<ScenarioInfo>& list_scenarios() {
  static const std::vector<ScenarioInfo> catalog = {
      {"spectrum_vs_detuning", 2, "Re/Im chi_p versus probe detuning for each loop phase, with parity folds"},
      {"profile_vs_x", 3, "spatial chi_p(x) profiles across a coupling-amplitude sweep (Figs. 3-4), with parity folds"},
      {"lopsided", 5, "far-field spectra and order tables for each loop phase at the default grating"},
      {"eta_vs_Omega_c", 6, "contrast ratios eta_1..3 (exact and expansion) versus Omega_c (Figs. 6-7)"},
      {"special_diffraction", 7, "single-order and Dammann-like diffraction in the APT grating"},
      {"map_2d", 8, "two-dimensional far-field map for additive x/y detuning modulation"},
  };
  return catalog;
}

std::string catalog_digest() {
  std::string text;
  for (const auto& s : list_scenarios()) text += s.name + "\tFig. " + std::to_string(s.figure) + "\t" + s.description + "\n";
  return sha256_hex(text);
}

std::vector<double> SweepSpec::resolve(const std::vector<double>& fallback) const {
  if (values) return *values;
  if (min || max || count) {
    if (!(min && max && count)) throw Error(ErrorCode::OutOfRange, "sweep.min, sweep.max and sweep.count go together");
    if (*count < 1) throw Error(ErrorCode::OutOfRange, "sweep.count must be >= 1");
    if (*count == 1) return {*min};
    std::vector<double> v(*count);
    for (int k = 0; k < *count; ++k) v[k] = *min + (*max - *min) * k / (*count - 1);
    return v;
  }
  return fallback;
}

std::vector<double> ScenarioConfig::phases() const {
  if (phi_list) return *phi_list;
  return {0.0, pi / 2.0, pi, 3.0 * pi / 2.0};
}

double ScenarioConfig::single_phase() const { return phi_list ? phi_list->front() : pi / 2.0; }

std::vector<std::pair<std::string, std::string>> ScenarioConfig::resolved() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : registry()) out.emplace_back(e.key, e.get(*this));
  return out;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  const ScenarioConfig defaults;
  for (const auto& e : registry()) out.push_back(e.key + " = " + e.get(defaults));
  return out;
}

void ScenarioConfig::validate() const {
  bool known = false;
  for (const auto& s : list_scenarios()) known = known || s.name == scenario;
  require(known, "scenario '" + scenario + "' is not in the catalog (see `list`)");
  field.validate();
  medium.validate();
  modulation.validate();
  geometry.validate();
  require(geometry_2d.n_samples >= 256, "geometry.n_samples_2d must be >= 256");
  require(geometry_2d.n_theta >= 3, "geometry.n_theta_2d must be >= 3");
  require(field.omega_p > 0.0, "field.omega_p must be > 0 for a susceptibility");
  require(delta_span > 0.0, "spectrum.delta_span must be > 0");
  require(delta_count >= 3, "spectrum.delta_count must be >= 3");
  for (double v : {special.single_omega_c, special.single_omega_d, special.single_omega_m, special.dammann_omega_c})
    require(v >= 0.0, "special.* amplitudes must be >= 0");
  require(special.equal_tolerance > 0.0 && special.equal_tolerance < 1.0, "special.equal_tolerance must lie in (0, 1)");
  require(sweep.axis == "omega_c" || sweep.axis == "omega_d" || sweep.axis == "omega_m",
          "sweep.axis must be omega_c, omega_d or omega_m");
  const auto values = sweep.resolve({1.0});
  require(values.size() <= 1000, "sweep has more than 1000 points");
  for (double v : values) require(std::isfinite(v) && v >= 0.0, "sweep values must be >= 0");
  if (phi_list) {
    require(!phi_list->empty(), "sweep.phi_list must not be empty");
    for (double v : *phi_list) require(std::isfinite(v), "sweep.phi_list entries must be finite");
  }
  require(!output_dir.empty(), "output.dir must not be empty");
}

double parse_number(std::string_view text) {
  const std::string t = trim(text);
  if (t.empty()) throw Error(ErrorCode::ParseError, "empty value");
  const double v = ExprParser(t).parse();
  if (!std::isfinite(v)) throw Error(ErrorCode::ParseError, "value '" + t + "' is not finite");
  return v;
}

ScenarioConfig parse_config(std::string_view text) {
  ScenarioConfig cfg;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": empty key or value");
    }
    const Entry* entry = nullptr;
    for (const auto& e : registry())
      if (e.key == key) entry = &e;
    if (!entry) throw Error(ErrorCode::UnknownKey, "line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    try {
      entry->set(cfg, value);
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(lineno) + " (" + key + "): " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace loopgrating::sweep
