#include "lyapnet/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "lyapnet/error.hpp"

namespace lyapnet {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw ConfigError("invalid value '" + std::string(value) + "' for " + std::string(key) + " (expected " +
                    std::string(expected) + ")");
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out)) bad_value(key, v, "a real number");
  return out;
}

template <typename Int>
Int to_int(std::string_view key, std::string_view v) {
  Int out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad_value(key, v, "an integer");
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad_value(key, v, "true or false");
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value) {
  const std::string_view v = trim(value);
  if (key == "system") {
    if (v.empty()) bad_value(key, v, "a system name");
    cfg.system = v;
  } else if (key == "system.name") {
    cfg.custom_name = v;
  } else if (key == "system.dim") {
    cfg.custom_dim = to_int<int>(key, v);
    if (cfg.custom_dim < 1) bad_value(key, v, "a positive integer");
  } else if (key.starts_with("system.rhs")) {
    const int index = to_int<int>(key, key.substr(10));
    if (index < 1 || index > 64) throw ConfigError("unknown key '" + std::string(key) + "'");
    if (static_cast<int>(cfg.custom_rhs.size()) < index) cfg.custom_rhs.resize(static_cast<std::size_t>(index));
    cfg.custom_rhs[static_cast<std::size_t>(index - 1)] = v;
  } else if (key == "seed") {
    cfg.seed = to_int<std::uint64_t>(key, v);
  } else if (key == "output") {
    cfg.output = std::string(v);
  } else if (key == "allow_nonequilibrium") {
    cfg.allow_nonequilibrium = to_bool(key, v);
  } else if (key == "domain.radius") {
    cfg.radius = to_double(key, v);
  } else if (key == "domain.delta") {
    cfg.delta = to_double(key, v);
  } else if (key == "domain.scheme") {
    cfg.scheme = parse_sampling_scheme(v);
  } else if (key == "domain.inner_radius") {
    cfg.inner_radius = to_double(key, v);
  } else if (key == "network.preset") {
    preset_architecture(v, 1);  // validates the name
    cfg.preset = v;
  } else if (key == "network.layers") {
    cfg.layers = parse_layer_spec(v);
  } else if (key == "network.zero_anchor") {
    cfg.zero_anchor = to_bool(key, v);
  } else if (key == "loss.m1") {
    cfg.loss.m1 = to_double(key, v);
  } else if (key == "loss.m2") {
    cfg.loss.m2 = to_double(key, v);
  } else if (key == "loss.margin_mode") {
    cfg.loss.margin_mode = parse_margin_mode(v);
  } else if (key == "train.batch_size") {
    cfg.train.batch_size = to_int<int>(key, v);
  } else if (key == "train.learning_rate") {
    cfg.train.learning_rate = to_double(key, v);
  } else if (key == "train.max_steps") {
    cfg.train.max_steps = to_int<int>(key, v);
  } else if (key == "train.eval_every") {
    cfg.train.eval_every = to_int<int>(key, v);
  } else if (key == "train.eval_sample_count") {
    cfg.train.eval_sample_count = to_int<int>(key, v);
  } else if (key == "train.loss_tol") {
    cfg.train.loss_tol = to_double(key, v);
  } else if (key == "train.patience_windows") {
    cfg.train.patience_windows = to_int<int>(key, v);
  } else if (key == "verify.pass_threshold") {
    cfg.train.pass_threshold = to_double(key, v);
  } else if (key == "grid.resolution") {
    cfg.grid_resolution = to_int<int>(key, v);
  } else {
    throw ConfigError("unknown key '" + std::string(key) + "'");
  }
}

void apply_config_text(RunConfig& cfg, std::istream& in, std::string_view source) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view text = line;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    const std::string where = std::string(source) + ":" + std::to_string(lineno) + ": ";
    if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
    try {
      set_config_value(cfg, trim(text.substr(0, eq)), text.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  apply_config_text(cfg, in, path.string());
}

void write_config(const RunConfig& cfg, std::ostream& out) {
  out << "system = " << cfg.system << "\n";
  if (cfg.system == "custom") {
    out << "system.name = " << cfg.custom_name << "\n";
    out << "system.dim = " << cfg.custom_dim << "\n";
    for (std::size_t i = 0; i < cfg.custom_rhs.size(); ++i) {
      out << "system.rhs" << i + 1 << " = " << cfg.custom_rhs[i] << "\n";
    }
  }
  out << "seed = " << cfg.seed << "\n";
  out << "output = " << cfg.output.string() << "\n";
  out << "allow_nonequilibrium = " << (cfg.allow_nonequilibrium ? "true" : "false") << "\n";
  out << "domain.radius = " << fmt_double(cfg.radius) << "\n";
  out << "domain.delta = " << fmt_double(cfg.delta) << "\n";
  out << "domain.scheme = " << to_string(cfg.scheme) << "\n";
  out << "domain.inner_radius = " << fmt_double(cfg.resolved_inner_radius()) << "\n";
  out << "network.preset = " << cfg.preset << "\n";
  if (cfg.layers) out << "network.layers = " << format_layer_spec(*cfg.layers) << "\n";
  out << "network.zero_anchor = " << (cfg.zero_anchor ? "true" : "false") << "\n";
  out << "loss.m1 = " << fmt_double(cfg.loss.m1) << "\n";
  out << "loss.m2 = " << fmt_double(cfg.loss.m2) << "\n";
  out << "loss.margin_mode = " << to_string(cfg.loss.margin_mode) << "\n";
  out << "train.batch_size = " << cfg.train.batch_size << "\n";
  out << "train.learning_rate = " << fmt_double(cfg.train.learning_rate) << "\n";
  out << "train.max_steps = " << cfg.train.max_steps << "\n";
  out << "train.eval_every = " << cfg.train.eval_every << "\n";
  out << "train.eval_sample_count = " << cfg.train.eval_sample_count << "\n";
  out << "train.loss_tol = " << fmt_double(cfg.train.loss_tol) << "\n";
  out << "train.patience_windows = " << cfg.train.patience_windows << "\n";
  out << "verify.pass_threshold = " << fmt_double(cfg.train.pass_threshold) << "\n";
  out << "grid.resolution = " << cfg.grid_resolution << "\n";
}

DynamicalSystem resolve_system(const RunConfig& cfg) {
  if (cfg.system != "custom") {
    if (cfg.custom_dim != 0 || !cfg.custom_rhs.empty()) {
      throw ConfigError("system.dim/system.rhsN given but system = " + cfg.system + " (use system = custom)");
    }
    if (auto sys = find_builtin(cfg.system)) return *sys;
    std::string names;
    for (const auto& s : builtin_systems()) names += (names.empty() ? "" : ", ") + s.name();
    throw ConfigError("unknown system '" + cfg.system + "' (builtins: " + names + ", or custom)");
  }
  if (cfg.custom_dim < 1) throw ConfigError("system.dim must be set for a custom system");
  if (static_cast<int>(cfg.custom_rhs.size()) != cfg.custom_dim) {
    throw ConfigError("custom system needs exactly system.rhs1..system.rhs" + std::to_string(cfg.custom_dim));
  }
  for (std::size_t i = 0; i < cfg.custom_rhs.size(); ++i) {
    if (cfg.custom_rhs[i].empty()) throw ConfigError("system.rhs" + std::to_string(i + 1) + " is missing");
  }
  return DynamicalSystem::from_strings(cfg.custom_name, cfg.custom_dim, cfg.custom_rhs);
}

SamplingDomain resolve_domain(const RunConfig& cfg, int dim) {
  SamplingDomain d{dim, cfg.radius, cfg.delta, cfg.scheme, cfg.resolved_inner_radius(), cfg.seed};
  d.validate();
  return d;
}

Architecture resolve_architecture(const RunConfig& cfg, int dim) {
  Architecture arch = cfg.layers ? Architecture{dim, *cfg.layers} : preset_architecture(cfg.preset, dim);
  arch.validate();
  return arch;
}

}  // namespace lyapnet
