#include "vame/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace vame {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void bad(std::size_t line, const std::string& what) {
  throw ConfigError("config line " + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& raw, std::size_t line, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(raw, &pos);
    if (pos != raw.size()) bad(line, "trailing characters in value for '" + key + "'");
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    bad(line, "expected a number for '" + key + "', got '" + raw + "'");
  }
}

Nat parse_nat(const std::string& raw, std::size_t line, const std::string& key) {
  Nat v = 0;
  const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
  if (ec != std::errc{} || ptr != raw.data() + raw.size()) {
    bad(line, "expected a nonnegative integer for '" + key + "', got '" + raw + "'");
  }
  return v;
}

std::vector<std::string> split_list(const std::string& raw) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(raw);
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  if (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

std::vector<double> parse_doubles(const std::string& raw, std::size_t line,
                                  const std::string& key) {
  std::vector<double> out;
  for (const auto& item : split_list(raw)) out.push_back(parse_double(item, line, key));
  return out;
}

std::vector<Nat> parse_nats(const std::string& raw, std::size_t line, const std::string& key) {
  std::vector<Nat> out;
  for (const auto& item : split_list(raw)) out.push_back(parse_nat(item, line, key));
  return out;
}

void require_choice(const std::string& value, std::initializer_list<const char*> allowed,
                    std::size_t line, const std::string& key) {
  for (const char* a : allowed) {
    if (value == a) return;
  }
  std::string list;
  for (const char* a : allowed) {
    if (!list.empty()) list += ", ";
    list += a;
  }
  bad(line, "'" + value + "' is not a valid " + key + " (expected one of: " + list + ")");
}

std::string join(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    os << v[i];
  }
  return os.str();
}

std::string join(const std::vector<Nat>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    os << v[i];
  }
  return os.str();
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string section;
  std::string raw;
  std::size_t line_no = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find_first_of("#;"); hash != std::string::npos) {
      line.resize(hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') bad(line_no, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "operator" && section != "contraction" && section != "schedule" &&
          section != "run") {
        bad(line_no, "unknown section [" + section + "]");
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) bad(line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) bad(line_no, "empty key");
    if (section.empty()) bad(line_no, "key '" + key + "' appears before any section");

    if (section == "operator") {
      if (key == "kind") {
        require_choice(value, {"scaled_identity", "psd_linear", "box", "l1"}, line_no,
                       "operator kind");
        cfg.op_kind = value;
      } else if (key == "dim") {
        cfg.dim = parse_nat(value, line_no, key);
      } else if (key == "c") {
        cfg.op_scale = parse_double(value, line_no, key);
      } else if (key == "spectrum") {
        cfg.spectrum = parse_doubles(value, line_no, key);
      } else if (key == "lo") {
        cfg.box_lo = parse_doubles(value, line_no, key);
      } else if (key == "hi") {
        cfg.box_hi = parse_doubles(value, line_no, key);
      } else if (key == "weight") {
        cfg.l1_weight = parse_double(value, line_no, key);
      } else {
        bad(line_no, "unknown key '" + key + "' in [operator]");
      }
    } else if (section == "contraction") {
      if (key == "kind") {
        require_choice(value, {"affine", "constant"}, line_no, "contraction kind");
        cfg.f_kind = value;
      } else if (key == "alpha") {
        cfg.alpha = parse_double(value, line_no, key);
      } else if (key == "u") {
        cfg.anchor = parse_doubles(value, line_no, key);
      } else if (key == "b") {
        cfg.offset = parse_doubles(value, line_no, key);
      } else if (key == "rotation_seed") {
        cfg.rotation_seed = static_cast<unsigned>(parse_nat(value, line_no, key));
      } else {
        bad(line_no, "unknown key '" + key + "' in [contraction]");
      }
    } else if (section == "schedule") {
      if (key == "preset") {
        require_choice(value, {"example1", "example2", "generic"}, line_no, "schedule preset");
        cfg.preset = value;
      } else if (key == "lambda") {
        cfg.lambda_value = parse_double(value, line_no, key);
      } else if (key == "e_star_norm") {
        cfg.e_star_norm = parse_double(value, line_no, key);
      } else if (key == "error_scale") {
        cfg.error_scale = parse_double(value, line_no, key);
      } else if (key == "brute_horizon") {
        cfg.brute_horizon = parse_nat(value, line_no, key);
      } else {
        bad(line_no, "unknown key '" + key + "' in [schedule]");
      }
    } else {  // run
      if (key == "scheme") {
        require_choice(value, {"vame", "vam", "hppa"}, line_no, "scheme");
        cfg.scheme = value;
      } else if (key == "x0") {
        cfg.x0 = parse_doubles(value, line_no, key);
      } else if (key == "horizon") {
        cfg.horizon = parse_nat(value, line_no, key);
      } else if (key == "k_max") {
        cfg.k_max = parse_nat(value, line_no, key);
      } else if (key == "seed") {
        cfg.seed = static_cast<unsigned>(parse_nat(value, line_no, key));
      } else if (key == "m_list") {
        cfg.m_list = parse_nats(value, line_no, key);
      } else if (key == "negative_control") {
        require_choice(value, {"none", "shrink_moduli", "nonsummable_errors"}, line_no,
                       "negative control");
        cfg.negative_control = value;
      } else if (key == "output_dir") {
        cfg.output_dir = value;
      } else {
        bad(line_no, "unknown key '" + key + "' in [run]");
      }
    }
  }

  // Cross-field validation (independent of any line).
  if (cfg.dim == 0) throw ConfigError("config: dim must be at least 1");
  if (cfg.dim > 4096) throw ConfigError("config: dim is unreasonably large");
  if (!(cfg.op_scale >= 0.0)) throw ConfigError("config: operator scale c must be >= 0");
  if (!(cfg.l1_weight >= 0.0)) throw ConfigError("config: l1 weight must be >= 0");
  if (!(cfg.alpha >= 0.0) || cfg.alpha >= 1.0) {
    throw ConfigError("config: alpha must lie in [0,1)");
  }
  if (!(cfg.lambda_value > 0.0)) throw ConfigError("config: lambda must be positive");
  if (!(cfg.e_star_norm >= 0.0)) throw ConfigError("config: e_star_norm must be >= 0");
  if (!(cfg.error_scale >= 0.0)) throw ConfigError("config: error_scale must be >= 0");
  if (cfg.horizon == 0) throw ConfigError("config: horizon must be at least 1");
  if (cfg.horizon > 50'000'000) throw ConfigError("config: horizon is unreasonably large");
  if (cfg.output_dir.empty()) throw ConfigError("config: output_dir must not be empty");
  if (cfg.negative_control == "nonsummable_errors" && cfg.preset != "example2") {
    throw ConfigError(
        "config: the nonsummable_errors control needs the example2 schedule (its error "
        "claims are the ones being falsified)");
  }
  if (cfg.scheme == "hppa" && cfg.f_kind != "constant") {
    throw ConfigError("config: scheme hppa requires a constant contraction (kind = constant)");
  }
  const auto check_broadcast = [&](const std::vector<double>& v, const char* name) {
    if (!v.empty() && v.size() != 1 && v.size() != cfg.dim) {
      throw ConfigError(std::string("config: ") + name + " must have 1 or dim entries");
    }
  };
  check_broadcast(cfg.box_lo, "lo");
  check_broadcast(cfg.box_hi, "hi");
  check_broadcast(cfg.anchor, "u");
  check_broadcast(cfg.offset, "b");
  check_broadcast(cfg.x0, "x0");
  if (!cfg.spectrum.empty() && cfg.spectrum.size() != 1 && cfg.spectrum.size() != cfg.dim) {
    throw ConfigError("config: spectrum must have 1 or dim entries");
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "[operator]\n";
  os << "kind = " << cfg.op_kind << '\n';
  os << "dim = " << cfg.dim << '\n';
  os << "c = " << cfg.op_scale << '\n';
  if (!cfg.spectrum.empty()) os << "spectrum = " << join(cfg.spectrum) << '\n';
  if (!cfg.box_lo.empty()) os << "lo = " << join(cfg.box_lo) << '\n';
  if (!cfg.box_hi.empty()) os << "hi = " << join(cfg.box_hi) << '\n';
  os << "weight = " << cfg.l1_weight << '\n';
  os << "\n[contraction]\n";
  os << "kind = " << cfg.f_kind << '\n';
  os << "alpha = " << cfg.alpha << '\n';
  if (!cfg.anchor.empty()) os << "u = " << join(cfg.anchor) << '\n';
  if (!cfg.offset.empty()) os << "b = " << join(cfg.offset) << '\n';
  os << "rotation_seed = " << cfg.rotation_seed << '\n';
  os << "\n[schedule]\n";
  os << "preset = " << cfg.preset << '\n';
  os << "lambda = " << cfg.lambda_value << '\n';
  os << "e_star_norm = " << cfg.e_star_norm << '\n';
  os << "error_scale = " << cfg.error_scale << '\n';
  os << "brute_horizon = " << cfg.brute_horizon << '\n';
  os << "\n[run]\n";
  os << "scheme = " << cfg.scheme << '\n';
  if (!cfg.x0.empty()) os << "x0 = " << join(cfg.x0) << '\n';
  os << "horizon = " << cfg.horizon << '\n';
  os << "k_max = " << cfg.k_max << '\n';
  os << "seed = " << cfg.seed << '\n';
  if (!cfg.m_list.empty()) os << "m_list = " << join(cfg.m_list) << '\n';
  os << "negative_control = " << cfg.negative_control << '\n';
  os << "output_dir = " << cfg.output_dir << '\n';
  return os.str();
}

}  // namespace vame
