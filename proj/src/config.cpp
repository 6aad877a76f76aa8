#include "nirb/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace nirb {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::string shortest(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) out += (i ? ", " : "") + parts[i];
  return out;
}

std::string join_numbers(const std::vector<double>& xs) {
  std::vector<std::string> parts;
  for (double x : xs) parts.push_back(shortest(x));
  return join(parts);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : value) {
    if (ch == ',' || ch == ' ' || ch == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double to_number(const std::string& key, const std::string& text) {
  double x = 0.0;
  const char* end = text.data() + text.size();
  auto res = std::from_chars(text.data(), end, x);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(x)) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + text + "'");
  }
  return x;
}

std::map<std::string, std::string> defaults() {
  const HeatStudyConfig h = default_heat_config();
  const BrusselatorStudyConfig b = default_brusselator_config();
  std::vector<std::string> pairs;
  for (const auto& p : h.pairs) pairs.push_back(shortest(p.fine_size) + "/" + shortest(p.coarse_size));
  std::vector<std::string> rows;
  for (const auto& r : b.rows) rows.push_back(params_label(r));
  return {
      {"store", "nirb-store"},
      {"output", "results"},
      {"threads", "0"},

      {"heat.final_time", shortest(h.final_time)},
      {"heat.mus", join_numbers(h.mus)},
      {"heat.pairs", join(pairs)},
      {"heat.allow_uncoupled", "false"},
      {"heat.reference.subdivisions", std::to_string(h.reference_subdivisions)},
      {"heat.reference.steps", std::to_string(h.reference_steps)},
      {"heat.adjoint_reference.subdivisions", std::to_string(h.adjoint_reference_subdivisions)},
      {"heat.adjoint_reference.steps", std::to_string(h.adjoint_reference_steps)},
      {"heat.direct_modes", std::to_string(h.direct_modes)},
      {"heat.adjoint_modes", std::to_string(h.adjoint_modes)},
      {"heat.delta", shortest(h.delta)},
      {"heat.adjoint_delta", shortest(h.adjoint_delta)},
      {"heat.noisy_adjoint_delta", shortest(h.noisy_adjoint_delta)},
      {"heat.noise_sigma", shortest(h.noise_sigma)},
      {"heat.seed", std::to_string(h.seed)},
      {"heat.convergence_mu", shortest(h.convergence_mu)},
      {"heat.gp.kernel", kernel_kind_name(h.gp.kind)},
      {"heat.gp.noise_variance", shortest(h.gp.noise_variance)},
      {"heat.gp.starts", std::to_string(h.gp.starts)},
      {"convergence.coarse_sizes", "0.32, 0.22, 0.14, 0.1"},

      {"brusselator.final_time", shortest(b.final_time)},
      {"brusselator.fine_size", shortest(b.fine_size)},
      {"brusselator.coarse_size", shortest(b.coarse_size)},
      {"brusselator.reference.subdivisions", std::to_string(b.reference_subdivisions)},
      {"brusselator.reference.steps", std::to_string(b.reference_steps)},
      {"brusselator.train.a", "3, 4"},
      {"brusselator.train.b", "2, 3, 4"},
      {"brusselator.train.alpha", "0.01, 0.0005"},
      {"brusselator.rows", join(rows)},
      {"brusselator.outputs", "a, b"},
      {"brusselator.modes", std::to_string(b.modes)},
      {"brusselator.state_modes", std::to_string(b.state_modes)},
      {"brusselator.delta", shortest(b.delta)},
      {"brusselator.noise_sigma", shortest(b.noise_sigma)},
      {"brusselator.seed", std::to_string(b.seed)},
      {"brusselator.gradients", "true"},
      {"brusselator.timing_repeats", std::to_string(b.timing_repeats)},
      {"brusselator.gp.kernel", kernel_kind_name(b.gp.kind)},
      {"brusselator.gp.noise_variance", shortest(b.gp.noise_variance)},
      {"brusselator.gp.starts", std::to_string(b.gp.starts)},
  };
}

GprOptions gp_from(const Config& c, const std::string& section, GprOptions base) {
  base.kind = parse_kernel_kind(c.get(section + ".gp.kernel"));
  base.noise_variance = c.number(section + ".gp.noise_variance");
  base.starts = c.integer(section + ".gp.starts");
  if (base.noise_variance <= 0.0) throw ConfigError("config: " + section + ".gp.noise_variance must be positive");
  if (base.starts < 1) throw ConfigError("config: " + section + ".gp.starts must be at least 1");
  return base;
}

void require_positive(const Config& c, const std::string& key) {
  if (!(c.number(key) > 0.0)) throw ConfigError("config: '" + key + "' must be positive");
}

}  // namespace

Config::Config() : values_(defaults()) {}

Config Config::parse(const std::string& text, const std::string& origin) {
  Config c;
  c.merge(text, origin);
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

void Config::merge(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line, section;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(number);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (!section.empty() && has(section + "." + key)) key = section + "." + key;
    try {
      set(key, trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
}

void Config::set(const std::string& key, const std::string& value) {
  if (!has(key)) throw ConfigError("config: unknown key '" + key + "'");
  values_[key] = value;
}

void Config::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("config: override '" + assignment + "' is not key=value");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

const std::string& Config::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("config: unknown key '" + key + "'");
  return it->second;
}

double Config::number(const std::string& key) const { return to_number(key, get(key)); }

int Config::integer(const std::string& key) const {
  const double x = number(key);
  if (x != std::floor(x) || std::abs(x) > 2e9) throw ConfigError("config: '" + key + "' expects an integer");
  return static_cast<int>(x);
}

std::uint64_t Config::unsigned_integer(const std::string& key) const {
  const std::string& text = get(key);
  std::uint64_t x = 0;
  const char* end = text.data() + text.size();
  auto res = std::from_chars(text.data(), end, x);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ConfigError("config: '" + key + "' expects a non-negative integer, got '" + text + "'");
  }
  return x;
}

bool Config::boolean(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw ConfigError("config: '" + key + "' expects true or false, got '" + v + "'");
}

std::vector<double> Config::numbers(const std::string& key) const {
  std::vector<double> out;
  for (const auto& w : split_list(get(key))) out.push_back(to_number(key, w));
  return out;
}

std::vector<std::string> Config::words(const std::string& key) const { return split_list(get(key)); }

// Numbers are rewritten in shortest form so "1e-8" and "1e-08" hash alike.
std::string Config::canonical() const {
  std::string out;
  for (const auto& [k, v] : values_) {
    std::vector<std::string> words;
    for (const auto& w : split_list(v)) {
      double x = 0.0;
      auto res = std::from_chars(w.data(), w.data() + w.size(), x);
      words.push_back(res.ec == std::errc() && res.ptr == w.data() + w.size() ? shortest(x) : w);
    }
    out += k + " = " + join(words) + "\n";
  }
  return out;
}

std::string Config::hash() const {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : canonical()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

HeatStudyConfig heat_config_from(const Config& c) {
  HeatStudyConfig h;
  h.final_time = c.number("heat.final_time");
  require_positive(c, "heat.final_time");
  h.mus = c.numbers("heat.mus");
  if (h.mus.empty()) throw ConfigError("config: heat.mus is empty");
  for (double mu : h.mus) {
    if (!(mu > 0.0)) throw ConfigError("config: heat.mus entries must be positive");
  }
  const bool uncoupled = c.boolean("heat.allow_uncoupled");
  for (const auto& w : c.words("heat.pairs")) {
    const auto slash = w.find('/');
    if (slash == std::string::npos) throw ConfigError("config: heat.pairs entry '" + w + "' is not h/H");
    const double fine = to_number("heat.pairs", w.substr(0, slash));
    const double coarse = to_number("heat.pairs", w.substr(slash + 1));
    if (!(fine > 0.0 && coarse > fine)) throw ConfigError("config: heat.pairs entry '" + w + "' needs 0 < h < H");
    if (!uncoupled && std::abs(coarse * coarse - fine) > 0.1 * fine) {
      throw ConfigError("config: heat.pairs entry '" + w +
                        "' breaks h ≈ H² (set heat.allow_uncoupled = true to accept it)");
    }
    h.pairs.push_back(make_grid_pair(fine, coarse, h.final_time));
  }
  h.reference_subdivisions = c.integer("heat.reference.subdivisions");
  h.reference_steps = c.integer("heat.reference.steps");
  h.adjoint_reference_subdivisions = c.integer("heat.adjoint_reference.subdivisions");
  h.adjoint_reference_steps = c.integer("heat.adjoint_reference.steps");
  for (const auto& p : h.pairs) {
    if (p.fine_subdivisions > h.reference_subdivisions || p.fine_steps > h.reference_steps) {
      throw ConfigError("config: heat reference is coarser than the fine grid of pair " + p.label());
    }
  }
  if (h.adjoint_reference_subdivisions < 1 || h.adjoint_reference_steps < 1) {
    throw ConfigError("config: heat adjoint reference must be positive");
  }
  h.direct_modes = c.integer("heat.direct_modes");
  h.adjoint_modes = c.integer("heat.adjoint_modes");
  if (h.direct_modes < 1 || h.adjoint_modes < 1) throw ConfigError("config: heat mode counts must be at least 1");
  h.delta = c.number("heat.delta");
  if (h.delta < 0.0) throw ConfigError("config: heat.delta must be non-negative");
  h.adjoint_delta = c.number("heat.adjoint_delta");
  h.noisy_adjoint_delta = c.number("heat.noisy_adjoint_delta");
  if (h.adjoint_delta < 0.0 || h.noisy_adjoint_delta < 0.0) {
    throw ConfigError("config: heat adjoint deltas must be non-negative");
  }
  h.noise_sigma = c.number("heat.noise_sigma");
  if (h.noise_sigma < 0.0) throw ConfigError("config: heat.noise_sigma must be non-negative");
  h.seed = c.unsigned_integer("heat.seed");
  h.convergence_mu = c.number("heat.convergence_mu");
  bool found = false;
  for (double mu : h.mus) found = found || mu == h.convergence_mu;
  if (!found) throw ConfigError("config: heat.convergence_mu must be one of heat.mus");
  h.gp = gp_from(c, "heat", h.gp);
  return h;
}

std::vector<double> coarse_order_sizes(const Config& c) {
  auto sizes = c.numbers("convergence.coarse_sizes");
  if (sizes.size() < 2) throw ConfigError("config: convergence.coarse_sizes needs at least two sizes");
  return sizes;
}

BrusselatorParameter parse_brusselator_parameter(const std::string& name) {
  if (name == "a") return BrusselatorParameter::a;
  if (name == "b") return BrusselatorParameter::b;
  if (name == "alpha") return BrusselatorParameter::alpha;
  throw ConfigError("unknown Brusselator parameter '" + name + "'");
}

BrusselatorParams parse_params_label(const std::string& label) {
  // the last field may carry an exponent sign ("5e-4"), so split on the first two dashes only
  const auto d1 = label.find('-');
  const auto d2 = d1 == std::string::npos ? d1 : label.find('-', d1 + 1);
  if (d2 == std::string::npos) throw ConfigError("config: parameter '" + label + "' is not a-b-alpha");
  BrusselatorParams p;
  p.a = to_number("brusselator.rows", label.substr(0, d1));
  p.b = to_number("brusselator.rows", label.substr(d1 + 1, d2 - d1 - 1));
  p.alpha = to_number("brusselator.rows", label.substr(d2 + 1));
  return p;
}

BrusselatorStudyConfig brusselator_config_from(const Config& c) {
  BrusselatorStudyConfig b = default_brusselator_config();
  b.final_time = c.number("brusselator.final_time");
  b.fine_size = c.number("brusselator.fine_size");
  b.coarse_size = c.number("brusselator.coarse_size");
  require_positive(c, "brusselator.final_time");
  require_positive(c, "brusselator.fine_size");
  if (!(b.coarse_size > b.fine_size)) throw ConfigError("config: brusselator.coarse_size must exceed fine_size");
  b.reference_subdivisions = c.integer("brusselator.reference.subdivisions");
  b.reference_steps = c.integer("brusselator.reference.steps");
  if (b.reference_subdivisions < b.fine_subdivisions() || b.reference_steps < b.fine_grid().steps) {
    throw ConfigError("config: Brusselator reference is coarser than the fine grid");
  }
  const auto as = c.numbers("brusselator.train.a");
  const auto bs = c.numbers("brusselator.train.b");
  const auto alphas = c.numbers("brusselator.train.alpha");
  b.training.clear();
  for (double alpha : alphas) {
    for (double a : as) {
      for (double bb : bs) b.training.push_back({a, bb, alpha});
    }
  }
  if (b.training.size() < 2) throw ConfigError("config: Brusselator training set needs at least two parameters");
  b.rows.clear();
  for (const auto& w : c.words("brusselator.rows")) {
    const BrusselatorParams p = parse_params_label(w);
    bool found = false;
    for (const auto& t : b.training) found = found || (t.a == p.a && t.b == p.b && t.alpha == p.alpha);
    if (!found) throw ConfigError("config: brusselator.rows entry '" + w + "' is not a training parameter");
    b.rows.push_back(p);
  }
  if (b.rows.empty()) throw ConfigError("config: brusselator.rows is empty");
  b.outputs.clear();
  for (const auto& w : c.words("brusselator.outputs")) b.outputs.push_back(parse_brusselator_parameter(w));
  if (b.outputs.empty()) throw ConfigError("config: brusselator.outputs is empty");
  b.modes = c.integer("brusselator.modes");
  b.state_modes = c.integer("brusselator.state_modes");
  if (b.modes < 1 || b.state_modes < 1) throw ConfigError("config: Brusselator mode counts must be at least 1");
  b.delta = c.number("brusselator.delta");
  if (b.delta < 0.0) throw ConfigError("config: brusselator.delta must be non-negative");
  b.noise_sigma = c.number("brusselator.noise_sigma");
  if (b.noise_sigma < 0.0) throw ConfigError("config: brusselator.noise_sigma must be non-negative");
  b.seed = c.unsigned_integer("brusselator.seed");
  b.timing_repeats = c.integer("brusselator.timing_repeats");
  if (b.timing_repeats < 1) throw ConfigError("config: brusselator.timing_repeats must be at least 1");
  b.gp = gp_from(c, "brusselator", b.gp);
  return b;
}

}  // namespace nirb
