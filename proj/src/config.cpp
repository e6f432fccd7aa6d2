#include "abp/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace abp {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': cannot parse number '" +
                                value + "'");
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': cannot parse integer '" +
                                value + "'");
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void apply_preset(ExperimentConfig& cfg, const std::string& name) {
  if (name == "uniform-smoke") {
    cfg.potential = "uniform";
    cfg.T = 100.0;
    cfg.variants = {Variant::abp};
    cfg.seeds = {1, 2};
    cfg.histogram_bins = 128;
    cfg.checkpoint_count = 80;
    cfg.check_d_final = 0.2;
    cfg.check_bias_sup = 0.05;
  } else if (name == "separable-base") {
    cfg.potential = "separable";
    cfg.T = 1000.0;
    cfg.variants = {Variant::abp, Variant::star};
    cfg.seeds = {1, 2};
    cfg.check_d_final = 0.1;
    cfg.check_bias_sup = 0.05;
  } else if (name == "double-well-acceptance") {
    cfg.potential = "double-well";
    cfg.T = 10000.0;
    cfg.variants = {Variant::unbiased, Variant::star, Variant::abp,
                    Variant::abp_time_changed, Variant::frozen};
    cfg.seeds.clear();
    for (std::uint64_t s = 0; s < 8; ++s) cfg.seeds.push_back(1000 + s);
    cfg.histogram_bins = 256;
    cfg.check_d_final = 0.05;
    cfg.check_bias_sup = 0.025;  // 0.1 / beta at the default beta = 4
  } else {
    throw std::invalid_argument("config key 'preset': unknown preset '" + name +
                                "'");
  }
}

}  // namespace

double ExperimentConfig::nan_value() {
  return std::numeric_limits<double>::quiet_NaN();
}

long long ExperimentConfig::n_steps() const { return std::llround(T / dt); }

Potential ExperimentConfig::make_potential() const {
  if (potential == "uniform") return uniform_potential(d);
  if (potential == "separable") return separable_potential(a1, a2);
  if (potential == "double-well") return double_well_potential(h, c, gamma);
  throw std::invalid_argument("config key 'potential': unknown preset '" +
                              potential + "'");
}

std::vector<double> ExperimentConfig::start_point() const {
  if (!x0.empty()) return x0;
  return std::vector<double>(static_cast<std::size_t>(d), 0.25);
}

std::vector<double> ExperimentConfig::checkpoint_times() const {
  std::vector<double> times;
  if (checkpoint_count < 1) return times;
  if (checkpoint_spacing == "linear") {
    for (int k = 1; k <= checkpoint_count; ++k)
      times.push_back(T * static_cast<double>(k) / checkpoint_count);
  } else {
    const double t_min = std::max(10.0 * dt, T * 1e-4);
    for (int k = 0; k < checkpoint_count; ++k) {
      const double f = checkpoint_count == 1
                           ? 1.0
                           : static_cast<double>(k) / (checkpoint_count - 1);
      times.push_back(t_min * std::pow(T / t_min, f));
    }
  }
  return times;
}

void ExperimentConfig::validate() const {
  if (d < 2 || d > 4)
    throw std::invalid_argument("config key 'd': must lie in [2, 4]");
  if (m < 1 || m > d - 1)
    throw std::invalid_argument(
        "config key 'm': the reaction coordinate needs 1 <= m <= d-1");
  if (!(beta > 0.0)) throw std::invalid_argument("config key 'beta': must be > 0");
  if (!(epsilon > 0.0) || !(epsilon < 1.0))
    throw std::invalid_argument("config key 'epsilon': must lie in (0, 1)");
  if (!(floor_delta > 0.0) || floor_delta > 1.0)
    throw std::invalid_argument("config key 'floor_delta': must lie in (0, 1]");
  if (!(dt > 0.0) || dt > 1e-2)
    throw std::invalid_argument(
        "config key 'dt': must lie in (0, 1e-2] (stability guard)");
  if (!(T > 0.0)) throw std::invalid_argument("config key 'T': must be > 0");
  if (seeds.empty()) throw std::invalid_argument("config key 'seeds': need >= 1 seed");
  if (variants.empty())
    throw std::invalid_argument("config key 'variants': need >= 1 variant");
  if (refresh_every < 1)
    throw std::invalid_argument("config key 'refresh_every': must be >= 1");
  if (family_size < 20)
    throw std::invalid_argument("config key 'family_size': must be >= 20");
  if (histogram_bins < 64)
    throw std::invalid_argument("config key 'histogram_bins': must be >= 64");
  if (checkpoint_count < 2)
    throw std::invalid_argument("config key 'checkpoint_count': must be >= 2");
  if (checkpoint_spacing != "log" && checkpoint_spacing != "linear")
    throw std::invalid_argument(
        "config key 'checkpoint_spacing': must be 'log' or 'linear'");
  if (oracle_resolution < 64)
    throw std::invalid_argument("config key 'oracle_resolution': must be >= 64");
  if (!x0.empty() && static_cast<int>(x0.size()) != d)
    throw std::invalid_argument("config key 'x0': needs d entries");
  if (mu0 != "uniform" && mu0 != "point")
    throw std::invalid_argument("config key 'mu0': must be 'uniform' or 'point'");
  if (!(prior_weight > 0.0))
    throw std::invalid_argument("config key 'prior_weight': must be > 0");
  if (frozen_bias != "zero" && frozen_bias != "a-infinity")
    throw std::invalid_argument(
        "config key 'frozen_bias': must be 'zero' or 'a-infinity'");
  if (potential != "uniform" && d != 2)
    throw std::invalid_argument(
        "config key 'd': potential preset '" + potential + "' is defined on T^2");
  if (threads < 0)
    throw std::invalid_argument("config key 'threads': must be >= 0");
}

std::string ExperimentConfig::canonical_text() const {
  std::ostringstream out;
  out << "potential = " << potential << "\n";
  out << "d = " << d << "\n";
  out << "m = " << m << "\n";
  out << "beta = " << format_double(beta) << "\n";
  if (potential == "double-well") {
    out << "h = " << format_double(h) << "\n";
    out << "c = " << format_double(c) << "\n";
    out << "gamma = " << format_double(gamma) << "\n";
  }
  if (potential == "separable") {
    out << "a1 = " << format_double(a1) << "\n";
    out << "a2 = " << format_double(a2) << "\n";
  }
  out << "epsilon = " << format_double(epsilon) << "\n";
  out << "floor_delta = " << format_double(floor_delta) << "\n";
  out << "dt = " << format_double(dt) << "\n";
  out << "T = " << format_double(T) << "\n";
  out << "seeds = ";
  for (std::size_t i = 0; i < seeds.size(); ++i)
    out << (i ? "," : "") << seeds[i];
  out << "\n";
  out << "variants = ";
  for (std::size_t i = 0; i < variants.size(); ++i)
    out << (i ? "," : "") << variant_name(variants[i]);
  out << "\n";
  out << "refresh_every = " << refresh_every << "\n";
  out << "family_size = " << family_size << "\n";
  out << "histogram_bins = " << histogram_bins << "\n";
  out << "checkpoint_count = " << checkpoint_count << "\n";
  out << "checkpoint_spacing = " << checkpoint_spacing << "\n";
  out << "oracle_resolution = " << oracle_resolution << "\n";
  const std::vector<double> start = start_point();
  out << "x0 = ";
  for (std::size_t i = 0; i < start.size(); ++i)
    out << (i ? "," : "") << format_double(start[i]);
  out << "\n";
  out << "mu0 = " << mu0 << "\n";
  out << "prior_weight = " << format_double(prior_weight) << "\n";
  out << "noise_scale = " << format_double(noise_scale) << "\n";
  out << "lambda_dt_cap = " << format_double(lambda_dt_cap) << "\n";
  out << "frozen_bias = " << frozen_bias << "\n";
  out << "output_dir = " << output_dir << "\n";
  out << "threads = " << threads << "\n";
  if (!std::isnan(check_d_final))
    out << "check_d_final = " << format_double(check_d_final) << "\n";
  if (!std::isnan(check_bias_sup))
    out << "check_bias_sup = " << format_double(check_bias_sup) << "\n";
  if (!std::isnan(check_flat_dev))
    out << "check_flat_dev = " << format_double(check_flat_dev) << "\n";
  return out.str();
}

ExperimentConfig parse_config(const std::string& text) {
  // First pass: collect key/value pairs in order, catching duplicates.
  std::vector<std::pair<std::string, std::string>> pairs;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": empty key or value");
    pairs.emplace_back(key, value);
  }

  ExperimentConfig cfg;
  bool seen_seed_base = false, seen_seed_count = false;
  std::uint64_t seed_base = 1;
  int seed_count = 1;
  bool seeds_explicit = false;

  // Apply the preset bundle first so explicit keys override it.
  for (const auto& [key, value] : pairs)
    if (key == "preset") {
      cfg.preset = value;
      apply_preset(cfg, value);
    }

  for (const auto& [key, value] : pairs) {
    if (key == "preset") {
      continue;
    } else if (key == "potential") {
      cfg.potential = value;
    } else if (key == "d") {
      cfg.d = static_cast<int>(parse_int(key, value));
    } else if (key == "m") {
      cfg.m = static_cast<int>(parse_int(key, value));
    } else if (key == "beta") {
      cfg.beta = parse_double(key, value);
    } else if (key == "h") {
      cfg.h = parse_double(key, value);
    } else if (key == "c") {
      cfg.c = parse_double(key, value);
    } else if (key == "gamma") {
      cfg.gamma = parse_double(key, value);
    } else if (key == "a1") {
      cfg.a1 = parse_double(key, value);
    } else if (key == "a2") {
      cfg.a2 = parse_double(key, value);
    } else if (key == "epsilon") {
      cfg.epsilon = parse_double(key, value);
    } else if (key == "floor_delta") {
      cfg.floor_delta = parse_double(key, value);
    } else if (key == "dt") {
      cfg.dt = parse_double(key, value);
    } else if (key == "T") {
      cfg.T = parse_double(key, value);
    } else if (key == "seeds") {
      cfg.seeds.clear();
      for (const std::string& s : split_list(value))
        cfg.seeds.push_back(static_cast<std::uint64_t>(parse_int(key, s)));
      seeds_explicit = true;
    } else if (key == "seed_base") {
      seed_base = static_cast<std::uint64_t>(parse_int(key, value));
      seen_seed_base = true;
    } else if (key == "seed_count") {
      seed_count = static_cast<int>(parse_int(key, value));
      seen_seed_count = true;
    } else if (key == "variants") {
      cfg.variants.clear();
      for (const std::string& s : split_list(value)) {
        if (s == "all") {
          cfg.variants = {Variant::unbiased, Variant::star, Variant::abp,
                          Variant::abp_time_changed, Variant::frozen};
          break;
        }
        cfg.variants.push_back(variant_from_name(s));
      }
    } else if (key == "refresh_every") {
      cfg.refresh_every = static_cast<int>(parse_int(key, value));
    } else if (key == "family_size") {
      cfg.family_size = static_cast<int>(parse_int(key, value));
    } else if (key == "histogram_bins") {
      cfg.histogram_bins = static_cast<int>(parse_int(key, value));
    } else if (key == "checkpoint_count") {
      cfg.checkpoint_count = static_cast<int>(parse_int(key, value));
    } else if (key == "checkpoint_spacing") {
      cfg.checkpoint_spacing = value;
    } else if (key == "oracle_resolution") {
      cfg.oracle_resolution = static_cast<int>(parse_int(key, value));
    } else if (key == "x0") {
      cfg.x0.clear();
      for (const std::string& s : split_list(value))
        cfg.x0.push_back(parse_double(key, s));
    } else if (key == "mu0") {
      cfg.mu0 = value;
    } else if (key == "prior_weight") {
      cfg.prior_weight = parse_double(key, value);
    } else if (key == "noise_scale") {
      cfg.noise_scale = parse_double(key, value);
    } else if (key == "lambda_dt_cap") {
      cfg.lambda_dt_cap = parse_double(key, value);
    } else if (key == "frozen_bias") {
      cfg.frozen_bias = value;
    } else if (key == "output_dir") {
      cfg.output_dir = value;
    } else if (key == "threads") {
      cfg.threads = static_cast<int>(parse_int(key, value));
    } else if (key == "check_d_final") {
      cfg.check_d_final = parse_double(key, value);
    } else if (key == "check_bias_sup") {
      cfg.check_bias_sup = parse_double(key, value);
    } else if (key == "check_flat_dev") {
      cfg.check_flat_dev = parse_double(key, value);
    } else {
      throw std::invalid_argument("config key '" + key + "': unknown key");
    }
  }

  if (seen_seed_base || seen_seed_count) {
    if (seeds_explicit)
      throw std::invalid_argument(
          "config key 'seeds': cannot combine with seed_base/seed_count");
    if (seed_count < 1)
      throw std::invalid_argument("config key 'seed_count': must be >= 1");
    cfg.seeds.clear();
    for (int i = 0; i < seed_count; ++i)
      cfg.seeds.push_back(seed_base + static_cast<std::uint64_t>(i));
  }

  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace abp
