#pragma once
// Experiment configuration: a single JSON or TOML file (detected by
// extension) describing the model, the dictionary, the estimator list and
// the run parameters. The TOML reader covers the subset used by experiment
// configs: tables, arrays of tables, single-line scalars/arrays/inline
// tables, and # comments.

#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "model.hpp"
#include "rng.hpp"
#include "serialization.hpp"

namespace sparselab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace toml_mini {

inline void skip_ws(const std::string& s, std::size_t& i) {
  while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
}

inline std::string parse_basic_string(const std::string& s, std::size_t& i) {
  if (s[i] != '"') throw ConfigError("toml: expected '\"'");
  ++i;
  std::string out;
  while (i < s.size() && s[i] != '"') {
    if (s[i] == '\\' && i + 1 < s.size()) {
      ++i;
      switch (s[i]) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default: throw ConfigError("toml: unsupported escape");
      }
    } else {
      out += s[i];
    }
    ++i;
  }
  if (i >= s.size()) throw ConfigError("toml: unterminated string");
  ++i;
  return out;
}

inline nlohmann::json parse_value(const std::string& s, std::size_t& i);

inline nlohmann::json parse_array(const std::string& s, std::size_t& i) {
  ++i;  // '['
  nlohmann::json arr = nlohmann::json::array();
  skip_ws(s, i);
  if (i < s.size() && s[i] == ']') {
    ++i;
    return arr;
  }
  while (true) {
    skip_ws(s, i);
    arr.push_back(parse_value(s, i));
    skip_ws(s, i);
    if (i < s.size() && s[i] == ',') {
      ++i;
      continue;
    }
    if (i < s.size() && s[i] == ']') {
      ++i;
      return arr;
    }
    throw ConfigError("toml: malformed array");
  }
}

inline std::string parse_key(const std::string& s, std::size_t& i) {
  skip_ws(s, i);
  if (i < s.size() && s[i] == '"') return parse_basic_string(s, i);
  std::string key;
  while (i < s.size() &&
         (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_' ||
          s[i] == '-')) {
    key += s[i++];
  }
  if (key.empty()) throw ConfigError("toml: expected a key");
  return key;
}

inline nlohmann::json parse_inline_table(const std::string& s,
                                         std::size_t& i) {
  ++i;  // '{'
  nlohmann::json obj = nlohmann::json::object();
  skip_ws(s, i);
  if (i < s.size() && s[i] == '}') {
    ++i;
    return obj;
  }
  while (true) {
    const std::string key = parse_key(s, i);
    skip_ws(s, i);
    if (i >= s.size() || s[i] != '=') throw ConfigError("toml: expected '='");
    ++i;
    skip_ws(s, i);
    obj[key] = parse_value(s, i);
    skip_ws(s, i);
    if (i < s.size() && s[i] == ',') {
      ++i;
      skip_ws(s, i);
      continue;
    }
    if (i < s.size() && s[i] == '}') {
      ++i;
      return obj;
    }
    throw ConfigError("toml: malformed inline table");
  }
}

inline nlohmann::json parse_value(const std::string& s, std::size_t& i) {
  skip_ws(s, i);
  if (i >= s.size()) throw ConfigError("toml: missing value");
  const char c = s[i];
  if (c == '"') return parse_basic_string(s, i);
  if (c == '[') return parse_array(s, i);
  if (c == '{') return parse_inline_table(s, i);
  if (s.compare(i, 4, "true") == 0) {
    i += 4;
    return true;
  }
  if (s.compare(i, 5, "false") == 0) {
    i += 5;
    return false;
  }
  std::string num;
  while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) ||
                          s[i] == '+' || s[i] == '-' || s[i] == '.')) {
    if (s[i] != '_') num += s[i];
    ++i;
  }
  if (num.empty()) throw ConfigError("toml: cannot parse value");
  if (num.find_first_of(".eE") == std::string::npos ||
      (num.size() > 1 && (num.find("0x") == 0))) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(num, &used, 0);
      if (used == num.size()) return v;
    } catch (...) {
      // fall through to double
    }
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(num, &used);
    if (used == num.size()) return v;
  } catch (...) {
  }
  throw ConfigError("toml: cannot parse value '" + num + "'");
}

inline std::vector<std::string> split_path(const std::string& s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i <= s.size()) {
    const std::size_t dot = s.find('.', i);
    const std::string part =
        s.substr(i, dot == std::string::npos ? std::string::npos : dot - i);
    if (part.empty()) throw ConfigError("toml: empty path segment");
    out.push_back(part);
    if (dot == std::string::npos) break;
    i = dot + 1;
  }
  return out;
}

// Strip a trailing comment that is not inside a string.
inline std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_str = !in_str;
    if (line[i] == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

inline nlohmann::json parse(const std::string& text) {
  nlohmann::json root = nlohmann::json::object();
  nlohmann::json* current = &root;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = strip_comment(raw);
    std::size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    std::size_t e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    try {
      if (line.front() == '[') {
        const bool array_of_tables = line.size() > 1 && line[1] == '[';
        const std::size_t close = line.find(array_of_tables ? "]]" : "]");
        if (close == std::string::npos) throw ConfigError("toml: unbalanced '['");
        const auto path =
            split_path(line.substr(array_of_tables ? 2 : 1,
                                   close - (array_of_tables ? 2 : 1)));
        nlohmann::json* node = &root;
        for (std::size_t pi = 0; pi < path.size(); ++pi) {
          const bool last = pi + 1 == path.size();
          nlohmann::json& slot = (*node)[path[pi]];
          if (last && array_of_tables) {
            if (!slot.is_array()) slot = nlohmann::json::array();
            slot.push_back(nlohmann::json::object());
            node = &slot.back();
          } else {
            if (slot.is_array()) {
              node = &slot.back();
            } else {
              if (!slot.is_object()) slot = nlohmann::json::object();
              node = &slot;
            }
          }
        }
        current = node;
      } else {
        std::size_t i = 0;
        const std::string key = parse_key(line, i);
        skip_ws(line, i);
        if (i >= line.size() || line[i] != '=') {
          throw ConfigError("toml: expected '=' after key");
        }
        ++i;
        const nlohmann::json value = parse_value(line, i);
        skip_ws(line, i);
        if (i != line.size()) throw ConfigError("toml: trailing characters");
        (*current)[key] = value;
      }
    } catch (const ConfigError& err) {
      throw ConfigError(std::string(err.what()) + " at line " +
                        std::to_string(lineno));
    }
  }
  return root;
}

}  // namespace toml_mini

// Per-estimator knobs. tau < 0 means "use the default threshold rule with
// constant tau_c"; d < 0 means "use the calibrated minimum degree".
struct EstimatorSpec {
  std::string type;
  std::string id;
  double tau = -1.0;
  double tau_c = 2.0;
  int d = -1;
  double M = -1.0;
  double eps = -1.0;
  std::string eps_rule;  // "tau/m" supported
};

struct ExperimentConfig {
  std::string name = "experiment";
  ModelParams model;
  DictionaryRef dictionary;
  std::vector<EstimatorSpec> estimators;
  long trials = 2000;
  std::uint64_t seed = 1;
  int dmax = 8;
  std::string out;
};

namespace detail {

inline Eigen::VectorXd build_label_vector(const nlohmann::json& spec, int m) {
  if (spec.is_null()) return Eigen::VectorXd::Ones(m);
  const std::string kind = spec.value("kind", "ones");
  if (kind == "ones") return Eigen::VectorXd::Ones(m);
  if (kind == "pm1") {
    Rng rng(spec.value("seed", 1ULL));
    Eigen::VectorXd w(m);
    for (int i = 0; i < m; ++i) w(i) = rng.uniform() < 0.5 ? -1.0 : 1.0;
    return w;
  }
  if (kind == "values") {
    const auto v = spec.at("values").get<std::vector<double>>();
    if (static_cast<int>(v.size()) != m) {
      throw ConfigError("config: w.values must have length m");
    }
    return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
  }
  throw ConfigError("config: unknown label vector kind '" + kind + "'");
}

}  // namespace detail

inline ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
  ExperimentConfig cfg;
  try {
    cfg.name = j.value("name", cfg.name);
    const auto& jm = j.at("model");
    cfg.model.n = jm.at("n").get<int>();
    cfg.model.m = jm.value("m", cfg.model.n);
    cfg.model.k = jm.at("k").get<int>();
    cfg.model.sigma = jm.value("sigma", 1.0);
    cfg.model.gamma = jm.value("gamma", 1.0);
    cfg.model.M = jm.value("M", 0.0);
    cfg.model.latent_mode =
        latent_mode_from_string(jm.value("latent_mode", "spike_gaussian"));
    cfg.model.w = detail::build_label_vector(
        jm.contains("w") ? jm.at("w") : nlohmann::json(), cfg.model.m);
    cfg.model.validate();

    if (j.contains("dictionary")) {
      cfg.dictionary = j.at("dictionary").get<DictionaryRef>();
    } else {
      cfg.dictionary.kind = DictionaryKind::Identity;
      cfg.dictionary.seed = 0;
    }
    if (cfg.dictionary.n == 0) {
      cfg.dictionary.n = cfg.model.n;
      cfg.dictionary.m = cfg.model.m;
    }
    if (cfg.dictionary.n != cfg.model.n || cfg.dictionary.m != cfg.model.m) {
      throw ConfigError("config: dictionary shape must match the model");
    }

    if (j.contains("estimators")) {
      for (const auto& je : j.at("estimators")) {
        EstimatorSpec es;
        es.type = je.at("type").get<std::string>();
        es.id = je.value("id", std::string());
        es.tau = je.value("tau", -1.0);
        es.tau_c = je.value("tau_c", 2.0);
        if (je.contains("d")) {
          if (je.at("d").is_string()) {
            if (je.at("d").get<std::string>() != "auto") {
              throw ConfigError("config: estimator d must be a number or \"auto\"");
            }
          } else {
            es.d = je.at("d").get<int>();
          }
        }
        es.M = je.value("M", -1.0);
        if (je.contains("eps")) {
          if (je.at("eps").is_string()) {
            es.eps_rule = je.at("eps").get<std::string>();
            if (es.eps_rule != "tau/m") {
              throw ConfigError("config: unknown eps rule '" + es.eps_rule + "'");
            }
          } else {
            es.eps = je.at("eps").get<double>();
          }
        }
        cfg.estimators.push_back(std::move(es));
      }
    }

    cfg.trials = j.value("trials", cfg.trials);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.dmax = j.value("dmax", cfg.dmax);
    cfg.out = j.value("out", std::string());
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  nlohmann::json j;
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) {
    try {
      j = nlohmann::json::parse(buf.str());
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config: JSON parse error: ") + e.what());
    }
  } else if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".toml") == 0) {
    j = toml_mini::parse(buf.str());
  } else {
    throw ConfigError("config: '" + path + "' must end in .json or .toml");
  }
  return parse_experiment_config(j);
}

}  // namespace sparselab
