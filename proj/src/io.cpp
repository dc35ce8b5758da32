#include "entrofunc/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "entrofunc/version.hpp"

namespace entrofunc {

namespace {

std::string trim(const std::string& text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) {
    ++begin;
  }
  while (end > begin &&
         std::isspace(static_cast<unsigned char>(text[end - 1]))) {
    --end;
  }
  return text.substr(begin, end - begin);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string current;
  for (char ch : text) {
    if (ch == sep) {
      parts.push_back(current);
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  parts.push_back(current);
  return parts;
}

std::optional<double> parse_number(const std::string& cell) {
  const std::string t = trim(cell);
  if (t.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) return std::nullopt;
  return v;
}

double require_number(const std::string& value, const std::string& key) {
  const auto v = parse_number(value);
  if (!v) throw ConfigError("key '" + key + "': expected a number");
  return *v;
}

std::uint64_t require_u64(const std::string& value, const std::string& key) {
  const std::string t = trim(value);
  if (t.empty() || !std::all_of(t.begin(), t.end(), [](unsigned char c) {
        return std::isdigit(c);
      })) {
    throw ConfigError("key '" + key + "': expected a non-negative integer");
  }
  return std::stoull(t);
}

bool require_bool(const std::string& value, const std::string& key) {
  const std::string t = trim(value);
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  throw ConfigError("key '" + key + "': expected true or false");
}

}  // namespace

std::string format_real(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

Sample read_sample_csv(const std::string& path, Mode mode) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open sample file '" + path + "'");

  std::vector<double> data;
  std::size_t dim = 0;
  std::size_t row_number = 0;
  bool first_data_row = true;
  std::string line;
  while (std::getline(in, line)) {
    ++row_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;

    const std::vector<std::string> cells = split(line, ',');
    std::vector<double> row;
    row.reserve(cells.size());
    bool numeric = true;
    for (const auto& cell : cells) {
      const auto v = parse_number(cell);
      if (!v) {
        numeric = false;
        break;
      }
      row.push_back(*v);
    }
    if (!numeric) {
      if (first_data_row) continue;  // single auto-detected header row
      throw InputError(path + ":" + std::to_string(row_number) +
                       ": non-numeric cell");
    }
    if (first_data_row) {
      dim = row.size();
      first_data_row = false;
    } else if (row.size() != dim) {
      throw InputError(path + ":" + std::to_string(row_number) + ": expected " +
                       std::to_string(dim) + " columns, found " +
                       std::to_string(row.size()));
    }
    for (double v : row) {
      if (!std::isfinite(v)) {
        throw InputError(path + ":" + std::to_string(row_number) +
                         ": non-finite value");
      }
      if (mode == Mode::discrete && v != std::floor(v)) {
        throw InputError(path + ":" + std::to_string(row_number) +
                         ": discrete mode requires integer cells");
      }
    }
    data.insert(data.end(), row.begin(), row.end());
  }
  if (data.empty()) {
    throw InputError("sample file '" + path + "' holds no observations");
  }
  try {
    return Sample(std::move(data), dim, mode);
  } catch (const std::invalid_argument& e) {
    throw InputError(path + ": " + e.what());
  }
}

void write_sample_csv(const std::string& path, const Sample& sample) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write sample file '" + path + "'");
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto p = sample.point(i);
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (k > 0) out << ',';
      out << format_real(p[k]);
    }
    out << '\n';
  }
}

ConfigMap parse_config_text(const std::string& text) {
  ConfigMap config;
  std::string section;
  std::istringstream in(text);
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        throw ConfigError("line " + std::to_string(line_number) +
                          ": unterminated section header");
      }
      section = trim(t.substr(1, t.size() - 2));
      config[section];
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_number) +
                        ": expected key = value");
    }
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(line_number) + ": empty key");
    }
    config[section][key] = trim(t.substr(eq + 1));
  }
  return config;
}

ConfigMap parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

namespace {

DistributionSpec distribution_from_entries(
    const std::string& where, const std::map<std::string, std::string>& entries) {
  auto it = entries.find("family");
  if (it == entries.end()) {
    throw ConfigError(where + ": missing 'family'");
  }
  const std::string family = it->second;

  std::vector<std::string> unknown;
  const auto fetch = [&](const char* key) -> std::optional<std::string> {
    auto found = entries.find(key);
    if (found == entries.end()) return std::nullopt;
    return found->second;
  };
  const auto require = [&](const char* key) {
    auto v = fetch(key);
    if (!v) throw ConfigError(where + ": family " + family + " needs '" +
                              key + "'");
    return *v;
  };
  const auto check_keys = [&](std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : entries) {
      if (key == "family") continue;
      if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
            return key == a;
          }) == allowed.end()) {
        throw ConfigError(where + ": unknown key '" + key + "' for family " +
                          family);
      }
    }
  };

  if (family == "gaussian1d") {
    check_keys({"mu", "sigma2"});
    Gaussian1D g;
    if (auto v = fetch("mu")) g.mean = require_number(*v, "mu");
    if (auto v = fetch("sigma2")) g.variance = require_number(*v, "sigma2");
    return g;
  }
  if (family == "gaussianIso") {
    check_keys({"d"});
    GaussianIso g;
    g.dim = static_cast<std::size_t>(require_u64(require("d"), "d"));
    return g;
  }
  if (family == "exponential") {
    check_keys({"beta"});
    Exponential e;
    e.rate = require_number(require("beta"), "beta");
    return e;
  }
  if (family == "bernoulliProduct") {
    check_keys({"d", "p"});
    BernoulliProduct b;
    b.dim = static_cast<std::size_t>(require_u64(require("d"), "d"));
    b.p = require_number(require("p"), "p");
    return b;
  }
  if (family == "uniformDiscrete") {
    check_keys({"m"});
    UniformDiscrete u;
    u.atoms = static_cast<std::int64_t>(require_u64(require("m"), "m"));
    return u;
  }
  if (family == "studentR") {
    check_keys({"mu", "sigma2", "s"});
    StudentR s;
    s.mean = {0.0};
    s.covariance = SquareMatrix::identity(1);
    if (auto v = fetch("mu")) s.mean[0] = require_number(*v, "mu");
    if (auto v = fetch("sigma2")) {
      s.covariance.at(0, 0) = require_number(*v, "sigma2");
    }
    s.s = static_cast<int>(require_u64(require("s"), "s"));
    return s;
  }
  throw ConfigError(where + ": unknown family '" + family + "'");
}

Target target_from_string(const std::string& text) {
  if (text == "q") return Target::q_value;
  if (text == "h") return Target::entropy;
  if (text == "v") return Target::variability;
  if (text == "bregman") return Target::bregman;
  if (text == "ks-residuals") return Target::ks_residuals;
  if (text == "mse-curve") return Target::mse_curve;
  throw ConfigError("key 'target': unknown value '" + text + "'");
}

std::string target_to_string(Target target) {
  switch (target) {
    case Target::q_value:
      return "q";
    case Target::entropy:
      return "h";
    case Target::variability:
      return "v";
    case Target::bregman:
      return "bregman";
    case Target::ks_residuals:
      return "ks-residuals";
    case Target::mse_curve:
      return "mse-curve";
  }
  return "?";
}

}  // namespace

DistributionSpec parse_distribution(const std::string& text) {
  const std::size_t colon = text.find(':');
  std::map<std::string, std::string> entries;
  entries["family"] = trim(text.substr(0, colon));
  if (colon != std::string::npos) {
    for (const std::string& part : split(text.substr(colon + 1), ',')) {
      if (trim(part).empty()) continue;
      const std::size_t eq = part.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("distribution '" + text + "': expected key=value");
      }
      entries[trim(part.substr(0, eq))] = trim(part.substr(eq + 1));
    }
  }
  DistributionSpec spec =
      distribution_from_entries("distribution '" + text + "'", entries);
  validate_distribution(spec);
  return spec;
}

ExperimentConfig experiment_from_config(const ConfigMap& config) {
  std::vector<std::string> problems;
  for (const auto& [section, entries] : config) {
    if (section.empty()) {
      if (!entries.empty()) {
        problems.push_back("keys outside any section: '" +
                           entries.begin()->first + "'");
      }
      continue;
    }
    if (section != "experiment" && section != "dist_x" &&
        section != "dist_y") {
      problems.push_back("unknown section '[" + section + "]'");
    }
  }
  if (!problems.empty()) {
    std::ostringstream out;
    out << "invalid experiment configuration:";
    for (const auto& p : problems) out << "\n  - " << p;
    throw ConfigError(out.str());
  }

  const auto experiment_it = config.find("experiment");
  if (experiment_it == config.end()) {
    throw ConfigError("missing [experiment] section");
  }
  const auto& exp = experiment_it->second;

  ExperimentConfig result;
  bool mode_given = false;
  bool order_given = false;
  if (auto it = exp.find("preset"); it != exp.end()) {
    result = preset_config(it->second);
    mode_given = true;
    order_given = true;
  }

  for (const auto& [key, value] : exp) {
    try {
      if (key == "preset") {
        continue;
      } else if (key == "target") {
        result.target = target_from_string(value);
      } else if (key == "mode") {
        if (value == "continuous") {
          result.mode = Mode::continuous;
        } else if (value == "discrete") {
          result.mode = Mode::discrete;
        } else {
          throw ConfigError("key 'mode': expected continuous or discrete");
        }
        mode_given = true;
      } else if (key == "r1") {
        result.order.r1 = static_cast<int>(require_u64(value, key));
        order_given = true;
      } else if (key == "r2") {
        result.order.r2 = static_cast<int>(require_u64(value, key));
        order_given = true;
      } else if (key == "n1") {
        result.n1 = static_cast<std::size_t>(require_u64(value, key));
      } else if (key == "n2") {
        result.n2 = static_cast<std::size_t>(require_u64(value, key));
      } else if (key == "n_sim") {
        result.n_sim = static_cast<std::size_t>(require_u64(value, key));
      } else if (key == "seed") {
        result.seed = require_u64(value, key);
      } else if (key == "epsilon_rule") {
        if (value == "fixed") {
          result.epsilon_rule = EpsilonRule::fixed;
        } else if (value == "rate") {
          result.epsilon_rule = EpsilonRule::rate;
        } else if (value == "scaled") {
          result.epsilon_rule = EpsilonRule::scaled;
        } else {
          throw ConfigError(
              "key 'epsilon_rule': expected fixed, rate or scaled");
        }
      } else if (key == "epsilon") {
        result.epsilon = require_number(value, key);
      } else if (key == "alpha") {
        result.alpha = require_number(value, key);
      } else if (key == "c") {
        result.c = require_number(value, key);
      } else if (key == "a_list") {
        result.a_values.clear();
        for (const auto& part : split(value, ',')) {
          result.a_values.push_back(require_number(part, key));
        }
      } else if (key == "n_list") {
        result.n_list.clear();
        for (const auto& part : split(value, ',')) {
          result.n_list.push_back(
              static_cast<std::size_t>(require_u64(trim(part), key)));
        }
      } else if (key == "s") {
        result.bregman_s = static_cast<int>(require_u64(value, key));
      } else if (key == "symmetrized") {
        result.bregman_symmetrized = require_bool(value, key);
      } else if (key == "estimand") {
        result.curve_estimand = target_from_string(value);
      } else if (key == "threads") {
        result.threads = static_cast<unsigned>(require_u64(value, key));
      } else {
        problems.push_back("[experiment] unknown key '" + key + "'");
      }
    } catch (const ConfigError& e) {
      problems.push_back(std::string("[experiment] ") + e.what());
    }
  }

  for (const char* section : {"dist_x", "dist_y"}) {
    const auto it = config.find(section);
    if (it == config.end()) continue;
    try {
      DistributionSpec spec = distribution_from_entries(
          std::string("[") + section + "]", it->second);
      if (std::string(section) == "dist_x") {
        result.dist_x = spec;
      } else {
        result.dist_y = spec;
      }
    } catch (const ConfigError& e) {
      problems.push_back(e.what());
    }
  }

  if (!problems.empty()) {
    std::ostringstream out;
    out << "invalid experiment configuration:";
    for (const auto& p : problems) out << "\n  - " << p;
    throw ConfigError(out.str());
  }

  if (!mode_given) result.mode = distribution_mode(result.dist_x);
  if (!order_given && result.target == Target::variability) {
    result.order = {1, 1};
  }

  validate_config(result);
  return result;
}

namespace {

bool multi_cell(const ReplicationResult& result) {
  return result.cells.size() > 1;
}

}  // namespace

void write_residuals_csv(const std::string& path,
                         const ReplicationResult& result) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  const bool wide = multi_cell(result);
  out << (wide ? "a,n,replication,estimate,k_n,residual\n"
               : "replication,estimate,k_n,residual\n");
  for (const auto& cell : result.cells) {
    for (std::size_t i = 0; i < cell.replications.size(); ++i) {
      const auto& rep = cell.replications[i];
      if (wide) {
        out << format_real(cell.a ? *cell.a
                                  : std::numeric_limits<double>::quiet_NaN())
            << ',' << cell.n1 << ',';
      }
      out << i << ',' << format_real(rep.estimate) << ','
          << format_real(rep.variance) << ',' << format_real(rep.residual)
          << '\n';
    }
  }
}

void write_summary_csv(const std::string& path,
                       const ReplicationResult& result) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  const bool wide = multi_cell(result);
  out << (wide ? "a,n,mean,sd,mse,ks_D,ks_p,truth\n"
               : "mean,sd,mse,ks_D,ks_p,truth\n");
  for (const auto& cell : result.cells) {
    if (wide) {
      out << format_real(cell.a ? *cell.a
                                : std::numeric_limits<double>::quiet_NaN())
          << ',' << cell.n1 << ',';
    }
    out << format_real(cell.mean) << ',' << format_real(cell.sd) << ','
        << format_real(cell.mse) << ',' << format_real(cell.ks_d) << ','
        << format_real(cell.ks_p) << ',' << format_real(cell.truth) << '\n';
  }
}

std::string config_to_json(const ExperimentConfig& config) {
  nlohmann::json j;
  j["target"] = target_to_string(config.target);
  j["mode"] = config.mode == Mode::discrete ? "discrete" : "continuous";
  j["dist_x"] = describe(config.dist_x);
  if (config.dist_y) j["dist_y"] = describe(*config.dist_y);
  j["order"] = {config.order.r1, config.order.r2};
  j["n1"] = config.n1;
  j["n2"] = config.n2;
  switch (config.epsilon_rule) {
    case EpsilonRule::fixed:
      j["epsilon_rule"] = "fixed";
      j["epsilon"] = config.epsilon;
      break;
    case EpsilonRule::rate:
      j["epsilon_rule"] = "rate";
      j["alpha"] = config.alpha;
      j["c"] = config.c;
      break;
    case EpsilonRule::scaled:
      j["epsilon_rule"] = "scaled";
      j["a_list"] = config.a_values;
      break;
  }
  j["n_sim"] = config.n_sim;
  j["seed"] = config.seed;
  if (config.target == Target::bregman ||
      (config.target == Target::mse_curve &&
       config.curve_estimand == Target::bregman)) {
    j["s"] = config.bregman_s;
    j["symmetrized"] = config.bregman_symmetrized;
  }
  if (config.target == Target::mse_curve) {
    j["n_list"] = config.n_list;
    j["estimand"] = target_to_string(config.curve_estimand);
  }
  j["threads"] = config.threads;
  return j.dump();
}

void write_manifest(const std::string& path, const std::string& command,
                    const std::string& resolved_config, std::uint64_t seed,
                    double duration_ms,
                    const std::vector<std::string>& outputs) {
  nlohmann::json j;
  j["command"] = command;
  j["config"] = nlohmann::json::parse(resolved_config);
  j["seed"] = seed;
  j["tool_version"] = kVersion;
  j["duration_ms"] = duration_ms;
  j["outputs"] = outputs;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

}  // namespace entrofunc
