#include "g2ldp/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "g2ldp/io.hpp"

namespace g2ldp {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (...) {
    throw ConfigError("bad numeric value for " + key + ": '" + v + "'");
  }
}

int parse_int(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    int d = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (...) {
    throw ConfigError("bad integer value for " + key + ": '" + v + "'");
  }
}

uint64_t parse_u64(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    unsigned long long d = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (...) {
    throw ConfigError("bad seed value for " + key + ": '" + v + "'");
  }
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw ConfigError("bad boolean value for " + key + ": '" + v + "'");
}

std::vector<double> parse_double_list(const std::string& v, const std::string& key) {
  std::vector<double> out;
  if (trim(v).empty()) return out;
  for (const auto& item : split(v, ',')) out.push_back(parse_double(trim(item), key));
  return out;
}

std::vector<int> parse_int_list(const std::string& v, const std::string& key) {
  std::vector<int> out;
  if (trim(v).empty()) return out;
  for (const auto& item : split(v, ',')) out.push_back(parse_int(trim(item), key));
  return out;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_double(v[i]);
  return out;
}

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  fluid().validate();
  if (!(dt > 0.0) || !(horizon > 0.0)) throw ConfigError("solver: dt and horizon must be > 0");
  if (paths < 1 || trials < 1 || budget_m < 1) throw ConfigError("mc: counts must be >= 1");
  if (eps_list.empty()) throw ConfigError("mc: eps_list must not be empty");
  for (double e : eps_list)
    if (!(e > 0.0)) throw ConfigError("mc: eps values must be > 0");
  if (family != "default" && family != "zero" && family != "brownian_diagnostic" &&
      family != "jump_diagnostic")
    throw ConfigError("coefficients: unknown family '" + family + "'");
  marks().validate();
}

FluidParams ExperimentConfig::fluid() const {
  FluidParams p;
  p.alpha = alpha;
  p.kappa = kappa;
  p.domain_side = domain_side;
  p.mode_cutoff = mode_cutoff;
  return p;
}

MarkSpace ExperimentConfig::marks() const {
  auto parts = split(marks_spec, ':');
  if (parts[0] == "uniform" && parts.size() == 3)
    return MarkSpace::uniform(static_cast<std::size_t>(parse_int(parts[1], "marks")),
                              parse_double(parts[2], "marks"));
  if (parts[0] == "file" && parts.size() == 2) return read_mark_space_csv(parts[1]);
  throw ConfigError("controls: bad marks spec '" + marks_spec + "'");
}

SpectralField ExperimentConfig::field_from_spec(const std::string& spec) const {
  FluidParams p = fluid();
  auto parts = split(spec, ':');
  if (parts[0] == "zero") return SpectralField(p.mode_cutoff, p.domain_side);
  if (parts[0] == "profile" && parts.size() == 3)
    return smooth_profile_field(p.mode_cutoff, p.domain_side, parse_int(parts[1], "field"),
                                parse_double(parts[2], "field"));
  if (parts[0] == "single" && parts.size() == 5) {
    int k1 = parse_int(parts[1], "field");
    int k2 = parse_int(parts[2], "field");
    Complex amp(parse_double(parts[3], "field"), parse_double(parts[4], "field"));
    SpectralField u(p.mode_cutoff, p.domain_side);
    u.set(k1, k2, amp);
    u.set(-k1, -k2, -std::conj(amp));
    return u;
  }
  if (parts[0] == "file" && parts.size() == 2) return read_field_csv(parts[1]);
  throw ConfigError("bad field spec '" + spec + "'");
}

CoefficientSet ExperimentConfig::coefficients() const {
  FluidParams p = fluid();
  MarkSpace z = marks();
  if (family == "zero") return CoefficientSet::zero(p, std::move(z));
  if (family == "default") {
    DefaultFamilyShape shape;
    shape.drift_scale = drift_scale;
    shape.gain_scale = gain_scale;
    shape.jump_scales = jump_scales;
    shape.jump_couplings = jump_couplings;
    return CoefficientSet::default_family(p, std::move(z), shape);
  }
  if (family == "brownian_diagnostic")
    return CoefficientSet::brownian_diagnostic(p, std::move(z), field_from_spec(gain_field));
  if (family == "jump_diagnostic")
    return CoefficientSet::jump_diagnostic(p, std::move(z), field_from_spec(jump_field),
                                           jump_scales);
  throw ConfigError("coefficients: unknown family '" + family + "'");
}

ScalarControl ExperimentConfig::scalar_control() const {
  auto parts = split(f_spec, ':');
  if (parts[0] == "zero") return ScalarControl::zero(horizon);
  if (parts[0] == "constant" && (parts.size() == 2 || parts.size() == 3))
    return ScalarControl::constant(parse_double(parts[1], "f"), horizon,
                                   parts.size() == 3 ? parse_int(parts[2], "f") : 1);
  if (parts[0] == "file" && parts.size() == 2) return read_scalar_control_csv(parts[1]);
  throw ConfigError("controls: bad f spec '" + f_spec + "'");
}

IntensityControl ExperimentConfig::intensity_control() const {
  std::size_t nmarks = marks().size();
  auto parts = split(g_spec, ':');
  if (parts[0] == "one") return IntensityControl::one(horizon, nmarks);
  if (parts[0] == "constant" && (parts.size() == 2 || parts.size() == 3))
    return IntensityControl::constant(parse_double(parts[1], "g"), horizon, nmarks,
                                      parts.size() == 3 ? parse_int(parts[2], "g") : 1);
  if (parts[0] == "file" && parts.size() == 2) return read_intensity_control_csv(parts[1]);
  throw ConfigError("controls: bad g spec '" + g_spec + "'");
}

SpectralField ExperimentConfig::initial_state() const { return field_from_spec(initial_field); }

namespace {

struct Binding {
  std::function<void(ExperimentConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

const std::map<std::string, std::map<std::string, Binding>>& bindings() {
  static const std::map<std::string, std::map<std::string, Binding>> table = [] {
    std::map<std::string, std::map<std::string, Binding>> t;
    auto dbl = [](double ExperimentConfig::* m) {
      return Binding{[m](ExperimentConfig& c, const std::string& v,
                         const std::string& k) { c.*m = parse_double(v, k); },
                     [m](const ExperimentConfig& c) { return format_double(c.*m); }};
    };
    auto integer = [](int ExperimentConfig::* m) {
      return Binding{[m](ExperimentConfig& c, const std::string& v,
                         const std::string& k) { c.*m = parse_int(v, k); },
                     [m](const ExperimentConfig& c) { return std::to_string(c.*m); }};
    };
    auto str = [](std::string ExperimentConfig::* m) {
      return Binding{[m](ExperimentConfig& c, const std::string& v,
                         const std::string&) { c.*m = v; },
                     [m](const ExperimentConfig& c) { return c.*m; }};
    };
    auto dlist = [](std::vector<double> ExperimentConfig::* m) {
      return Binding{[m](ExperimentConfig& c, const std::string& v,
                         const std::string& k) { c.*m = parse_double_list(v, k); },
                     [m](const ExperimentConfig& c) { return join_doubles(c.*m); }};
    };
    auto ilist = [](std::vector<int> ExperimentConfig::* m) {
      return Binding{[m](ExperimentConfig& c, const std::string& v,
                         const std::string& k) { c.*m = parse_int_list(v, k); },
                     [m](const ExperimentConfig& c) { return join_ints(c.*m); }};
    };

    t["fluid"]["alpha"] = dbl(&ExperimentConfig::alpha);
    t["fluid"]["kappa"] = dbl(&ExperimentConfig::kappa);
    t["fluid"]["domain_side"] = dbl(&ExperimentConfig::domain_side);
    t["fluid"]["mode_cutoff"] = integer(&ExperimentConfig::mode_cutoff);

    t["coefficients"]["family"] = str(&ExperimentConfig::family);
    t["coefficients"]["drift_scale"] = dbl(&ExperimentConfig::drift_scale);
    t["coefficients"]["gain_scale"] = dbl(&ExperimentConfig::gain_scale);
    t["coefficients"]["jump_scales"] = dlist(&ExperimentConfig::jump_scales);
    t["coefficients"]["jump_couplings"] = dlist(&ExperimentConfig::jump_couplings);
    t["coefficients"]["gain_field"] = str(&ExperimentConfig::gain_field);
    t["coefficients"]["jump_field"] = str(&ExperimentConfig::jump_field);

    t["controls"]["f"] = str(&ExperimentConfig::f_spec);
    t["controls"]["g"] = str(&ExperimentConfig::g_spec);
    t["controls"]["marks"] = str(&ExperimentConfig::marks_spec);

    t["solver"]["dt"] = dbl(&ExperimentConfig::dt);
    t["solver"]["horizon"] = dbl(&ExperimentConfig::horizon);
    t["solver"]["nonlinearity"] =
        Binding{[](ExperimentConfig& c, const std::string& v, const std::string& k) {
                  c.nonlinearity = parse_bool(v, k);
                },
                [](const ExperimentConfig& c) { return c.nonlinearity ? "on" : "off"; }};
    t["solver"]["cutoff_level"] = dbl(&ExperimentConfig::cutoff_level);
    t["solver"]["blowup_w"] = dbl(&ExperimentConfig::blowup_w);
    t["solver"]["initial_field"] = str(&ExperimentConfig::initial_field);

    t["mc"]["eps_list"] = dlist(&ExperimentConfig::eps_list);
    t["mc"]["paths"] = integer(&ExperimentConfig::paths);
    t["mc"]["master_seed"] =
        Binding{[](ExperimentConfig& c, const std::string& v, const std::string& k) {
                  c.master_seed = parse_u64(v, k);
                },
                [](const ExperimentConfig& c) { return std::to_string(c.master_seed); }};
    t["mc"]["trials"] = integer(&ExperimentConfig::trials);
    t["mc"]["budget_m"] = integer(&ExperimentConfig::budget_m);

    t["study"]["radius"] = dbl(&ExperimentConfig::radius);
    t["study"]["n_list"] = ilist(&ExperimentConfig::n_list);
    t["study"]["f_intervals"] = integer(&ExperimentConfig::f_intervals);
    t["study"]["g_intervals"] = integer(&ExperimentConfig::g_intervals);
    t["study"]["penalty_schedule"] = dlist(&ExperimentConfig::penalty_schedule);
    t["study"]["ray_tags"] = ilist(&ExperimentConfig::ray_tags);
    t["study"]["osc_delta"] = dbl(&ExperimentConfig::osc_delta);
    t["study"]["girsanov_shift"] = dbl(&ExperimentConfig::girsanov_shift);
    t["study"]["girsanov_tilt"] = dbl(&ExperimentConfig::girsanov_tilt);
    t["study"]["target_field"] = str(&ExperimentConfig::target_field);
    return t;
  }();
  return table;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    if (s.front() == '[' && s.back() == ']') {
      section = trim(s.substr(1, s.size() - 2));
      if (bindings().find(section) == bindings().end())
        throw ConfigError("unknown config section [" + section + "]");
      continue;
    }
    auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (section.empty()) throw ConfigError("key '" + key + "' outside any section");
    const auto& sec = bindings().at(section);
    auto it = sec.find(key);
    if (it == sec.end())
      throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
    it->second.set(cfg, value, section + "." + key);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& [section, keys] : bindings()) {
    out += "[" + section + "]\n";
    for (const auto& [key, binding] : keys) out += key + " = " + binding.get(cfg) + "\n";
    out += "\n";
  }
  return out;
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override must look like section.key=value");
  std::string path = trim(assignment.substr(0, eq));
  std::string value = trim(assignment.substr(eq + 1));
  auto dot = path.find('.');
  if (dot == std::string::npos) throw ConfigError("override must look like section.key=value");
  std::string section = path.substr(0, dot);
  std::string key = path.substr(dot + 1);
  auto sit = bindings().find(section);
  if (sit == bindings().end()) throw ConfigError("unknown config section [" + section + "]");
  auto kit = sit->second.find(key);
  if (kit == sit->second.end())
    throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
  kit->second.set(cfg, value, path);
  cfg.validate();
}

uint64_t config_hash(const ExperimentConfig& cfg) { return fnv1a(serialize_config(cfg)); }

}  // namespace g2ldp
