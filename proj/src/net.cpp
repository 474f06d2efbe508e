#include "lyapnet/net.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "lyapnet/rng.hpp"

namespace lyapnet {

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::kPoly2: return "poly2";
    case Activation::kPoly3: return "poly3";
    case Activation::kTanh: return "tanh";
    case Activation::kLinear: return "linear";
  }
  return "linear";
}

Activation parse_activation(std::string_view text) {
  if (text == "poly2") return Activation::kPoly2;
  if (text == "poly3") return Activation::kPoly3;
  if (text == "tanh") return Activation::kTanh;
  if (text == "linear") return Activation::kLinear;
  throw ConfigError("unknown activation '" + std::string(text) + "' (expected poly2, poly3, tanh, linear)");
}

ActivationValue activate(Activation a, double t) {
  switch (a) {
    case Activation::kPoly2:
      return {t * t, 2.0 * t, 2.0};
    case Activation::kPoly3:
      return {t * t * t, 3.0 * t * t, 6.0 * t};
    case Activation::kTanh: {
      const double y = std::tanh(t);
      const double d = 1.0 - y * y;
      return {y, d, -2.0 * y * d};
    }
    case Activation::kLinear:
      return {t, 1.0, 0.0};
  }
  return {t, 1.0, 0.0};
}

void Architecture::validate() const {
  if (input_dim < 1) throw ConfigError("network input dimension must be positive");
  if (layers.empty()) throw ConfigError("network needs at least one layer");
  for (const auto& l : layers) {
    if (l.width < 1) throw ConfigError("layer width must be positive");
  }
  if (layers.back().width != 1) throw ConfigError("last layer must have width 1");
}

Architecture poly_preset(int input_dim) {
  return {input_dim, {{5, Activation::kPoly3}, {5, Activation::kPoly2}, {1, Activation::kLinear}}};
}

Architecture tanh3_preset(int input_dim) {
  return {input_dim, {{5, Activation::kTanh}, {5, Activation::kTanh}, {1, Activation::kLinear}}};
}

Architecture preset_architecture(std::string_view name, int input_dim) {
  if (name == "poly") return poly_preset(input_dim);
  if (name == "tanh3") return tanh3_preset(input_dim);
  throw ConfigError("unknown network preset '" + std::string(name) + "' (expected poly or tanh3)");
}

std::vector<LayerSpec> parse_layer_spec(std::string_view text) {
  std::vector<LayerSpec> layers;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    std::string item(text.substr(pos, comma - pos));
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw ConfigError("layer '" + item + "' must look like <width>:<activation>");
    }
    LayerSpec spec;
    try {
      std::size_t used = 0;
      spec.width = std::stoi(item.substr(0, colon), &used);
      if (used != colon) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ConfigError("layer '" + item + "' has a malformed width");
    }
    spec.activation = parse_activation(item.substr(colon + 1));
    layers.push_back(spec);
    pos = comma + 1;
  }
  return layers;
}

std::string format_layer_spec(const std::vector<LayerSpec>& layers) {
  std::string out;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(layers[i].width) + ":" + std::string(to_string(layers[i].activation));
  }
  return out;
}

LyapunovNetwork::LyapunovNetwork(int input_dim, std::vector<Layer> layers, bool zero_anchor)
    : input_dim_(input_dim), layers_(std::move(layers)), zero_anchor_(zero_anchor) {
  if (input_dim_ < 1) throw std::invalid_argument("input dimension must be positive");
  if (layers_.empty()) throw std::invalid_argument("network needs at least one layer");
  int in = input_dim_;
  for (const auto& l : layers_) {
    if (l.in != in || l.out < 1 || l.weights.size() != static_cast<std::size_t>(l.in * l.out) ||
        l.bias.size() != static_cast<std::size_t>(l.out)) {
      throw std::invalid_argument("layer dimensions do not chain");
    }
    in = l.out;
  }
  if (in != 1) throw std::invalid_argument("network output must be scalar");
}

LyapunovNetwork LyapunovNetwork::init(const Architecture& arch, std::uint64_t seed, bool zero_anchor) {
  arch.validate();
  Rng rng(seed);
  std::vector<Layer> layers;
  int in = arch.input_dim;
  for (const auto& spec : arch.layers) {
    Layer l;
    l.in = in;
    l.out = spec.width;
    l.activation = spec.activation;
    const double a = std::sqrt(6.0 / static_cast<double>(l.in + l.out));
    l.weights.resize(static_cast<std::size_t>(l.in * l.out));
    for (auto& w : l.weights) w = rng.uniform(-a, a);
    l.bias.assign(static_cast<std::size_t>(l.out), 0.0);
    layers.push_back(std::move(l));
    in = spec.width;
  }
  return LyapunovNetwork(arch.input_dim, std::move(layers), zero_anchor);
}

Architecture LyapunovNetwork::architecture() const {
  Architecture arch{input_dim_, {}};
  for (const auto& l : layers_) arch.layers.push_back({l.out, l.activation});
  return arch;
}

std::size_t LyapunovNetwork::param_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weights.size() + l.bias.size();
  return n;
}

ParamVector LyapunovNetwork::params() const {
  ParamVector theta;
  theta.reserve(param_count());
  for (const auto& l : layers_) {
    theta.insert(theta.end(), l.weights.begin(), l.weights.end());
    theta.insert(theta.end(), l.bias.begin(), l.bias.end());
  }
  return theta;
}

void LyapunovNetwork::set_params(std::span<const double> theta) {
  if (theta.size() != param_count()) {
    throw std::invalid_argument("parameter vector has " + std::to_string(theta.size()) +
                                " entries, network has " + std::to_string(param_count()));
  }
  auto it = theta.begin();
  for (auto& l : layers_) {
    std::copy(it, it + static_cast<std::ptrdiff_t>(l.weights.size()), l.weights.begin());
    it += static_cast<std::ptrdiff_t>(l.weights.size());
    std::copy(it, it + static_cast<std::ptrdiff_t>(l.bias.size()), l.bias.begin());
    it += static_cast<std::ptrdiff_t>(l.bias.size());
  }
}

namespace {

void check_input(std::span<const double> x, int dim) {
  if (static_cast<int>(x.size()) != dim) {
    throw std::invalid_argument("input has " + std::to_string(x.size()) + " components, network expects " +
                                std::to_string(dim));
  }
}

}  // namespace

double LyapunovNetwork::raw_value(std::span<const double> x) const {
  check_input(x, input_dim_);
  std::vector<double> a(x.begin(), x.end());
  std::vector<double> next;
  for (const auto& l : layers_) {
    next.assign(static_cast<std::size_t>(l.out), 0.0);
    for (int i = 0; i < l.out; ++i) {
      double z = l.bias[static_cast<std::size_t>(i)];
      const double* w = &l.weights[static_cast<std::size_t>(i * l.in)];
      for (int j = 0; j < l.in; ++j) z += w[j] * a[static_cast<std::size_t>(j)];
      next[static_cast<std::size_t>(i)] = activate(l.activation, z).value;
    }
    a.swap(next);
  }
  return a[0];
}

double LyapunovNetwork::value(std::span<const double> x) const {
  const double v = raw_value(x);
  if (!zero_anchor_) return v;
  const std::vector<double> origin(static_cast<std::size_t>(input_dim_), 0.0);
  return v - raw_value(origin);
}

State LyapunovNetwork::input_gradient(std::span<const double> x) const {
  check_input(x, input_dim_);
  // Forward pass keeping sigma'(z) per layer.
  std::vector<std::vector<double>> slopes;
  slopes.reserve(layers_.size());
  std::vector<double> a(x.begin(), x.end());
  for (const auto& l : layers_) {
    std::vector<double> next(static_cast<std::size_t>(l.out));
    std::vector<double> slope(static_cast<std::size_t>(l.out));
    for (int i = 0; i < l.out; ++i) {
      double z = l.bias[static_cast<std::size_t>(i)];
      const double* w = &l.weights[static_cast<std::size_t>(i * l.in)];
      for (int j = 0; j < l.in; ++j) z += w[j] * a[static_cast<std::size_t>(j)];
      const auto act = activate(l.activation, z);
      next[static_cast<std::size_t>(i)] = act.value;
      slope[static_cast<std::size_t>(i)] = act.first;
    }
    slopes.push_back(std::move(slope));
    a.swap(next);
  }
  std::vector<double> adj{1.0};
  for (std::size_t k = layers_.size(); k-- > 0;) {
    const Layer& l = layers_[k];
    std::vector<double> prev(static_cast<std::size_t>(l.in), 0.0);
    for (int i = 0; i < l.out; ++i) {
      const double zbar = adj[static_cast<std::size_t>(i)] * slopes[k][static_cast<std::size_t>(i)];
      const double* w = &l.weights[static_cast<std::size_t>(i * l.in)];
      for (int j = 0; j < l.in; ++j) prev[static_cast<std::size_t>(j)] += w[j] * zbar;
    }
    adj.swap(prev);
  }
  return adj;
}

double LyapunovNetwork::vdot(const DynamicalSystem& sys, std::span<const double> x) const {
  if (sys.dim() != input_dim_) throw std::invalid_argument("system and network dimensions differ");
  const State f = sys.evaluate(x);
  const State g = input_gradient(x);
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g[i] * f[i];
  return s;
}

double LyapunovNetwork::directional_derivative(std::span<const double> x,
                                               std::span<const double> direction) const {
  check_input(x, input_dim_);
  check_input(direction, input_dim_);
  std::vector<double> a(x.begin(), x.end());
  std::vector<double> t(direction.begin(), direction.end());
  for (const auto& l : layers_) {
    std::vector<double> na(static_cast<std::size_t>(l.out));
    std::vector<double> nt(static_cast<std::size_t>(l.out));
    for (int i = 0; i < l.out; ++i) {
      double z = l.bias[static_cast<std::size_t>(i)];
      double zt = 0.0;
      const double* w = &l.weights[static_cast<std::size_t>(i * l.in)];
      for (int j = 0; j < l.in; ++j) {
        z += w[j] * a[static_cast<std::size_t>(j)];
        zt += w[j] * t[static_cast<std::size_t>(j)];
      }
      const auto act = activate(l.activation, z);
      na[static_cast<std::size_t>(i)] = act.value;
      nt[static_cast<std::size_t>(i)] = act.first * zt;
    }
    a.swap(na);
    t.swap(nt);
  }
  return t[0];
}

void LyapunovNetwork::accumulate_raw(std::span<const double> x, std::span<const double> direction,
                                     double value_weight, double slope_weight,
                                     std::span<double> grad) const {
  const std::size_t depth = layers_.size();
  // acts[k], tangents[k]: input to layer k (acts[depth] is the output).
  std::vector<std::vector<double>> acts(depth + 1), tangents(depth + 1);
  std::vector<std::vector<double>> ztan(depth), d1(depth), d2(depth);
  acts[0].assign(x.begin(), x.end());
  tangents[0].assign(direction.begin(), direction.end());

  for (std::size_t k = 0; k < depth; ++k) {
    const Layer& l = layers_[k];
    const auto out = static_cast<std::size_t>(l.out);
    acts[k + 1].resize(out);
    tangents[k + 1].resize(out);
    ztan[k].resize(out);
    d1[k].resize(out);
    d2[k].resize(out);
    for (std::size_t i = 0; i < out; ++i) {
      double z = l.bias[i];
      double zt = 0.0;
      const double* w = &l.weights[i * static_cast<std::size_t>(l.in)];
      for (std::size_t j = 0; j < static_cast<std::size_t>(l.in); ++j) {
        z += w[j] * acts[k][j];
        zt += w[j] * tangents[k][j];
      }
      const auto act = activate(l.activation, z);
      acts[k + 1][i] = act.value;
      tangents[k + 1][i] = act.first * zt;
      ztan[k][i] = zt;
      d1[k][i] = act.first;
      d2[k][i] = act.second;
    }
  }

  // Reverse sweep over (a, a_dot). With a = sigma(z), a_dot = sigma'(z) z_dot:
  //   z_bar     = a_bar sigma'(z) + a_dot_bar sigma''(z) z_dot
  //   z_dot_bar = a_dot_bar sigma'(z)
  std::vector<double> abar{value_weight};
  std::vector<double> tbar{slope_weight};
  std::vector<std::size_t> offsets(depth);
  std::size_t off = 0;
  for (std::size_t k = 0; k < depth; ++k) {
    offsets[k] = off;
    off += layers_[k].weights.size() + layers_[k].bias.size();
  }
  for (std::size_t k = depth; k-- > 0;) {
    const Layer& l = layers_[k];
    const auto in = static_cast<std::size_t>(l.in);
    const auto out = static_cast<std::size_t>(l.out);
    std::vector<double> prev_a(in, 0.0), prev_t(in, 0.0);
    double* gw = &grad[offsets[k]];
    double* gb = gw + in * out;
    for (std::size_t i = 0; i < out; ++i) {
      const double zbar = abar[i] * d1[k][i] + tbar[i] * d2[k][i] * ztan[k][i];
      const double ztbar = tbar[i] * d1[k][i];
      const double* w = &l.weights[i * in];
      for (std::size_t j = 0; j < in; ++j) {
        gw[i * in + j] += zbar * acts[k][j] + ztbar * tangents[k][j];
        prev_a[j] += w[j] * zbar;
        prev_t[j] += w[j] * ztbar;
      }
      gb[i] += zbar;
    }
    abar.swap(prev_a);
    tbar.swap(prev_t);
  }
}

void LyapunovNetwork::accumulate_param_gradient(std::span<const double> x,
                                                std::span<const double> direction,
                                                double value_weight, double slope_weight,
                                                std::span<double> grad) const {
  check_input(x, input_dim_);
  check_input(direction, input_dim_);
  if (grad.size() != param_count()) throw std::invalid_argument("gradient buffer has wrong size");
  if (value_weight == 0.0 && slope_weight == 0.0) return;
  accumulate_raw(x, direction, value_weight, slope_weight, grad);
  if (zero_anchor_ && value_weight != 0.0) {
    const std::vector<double> zeros(static_cast<std::size_t>(input_dim_), 0.0);
    accumulate_raw(zeros, zeros, -value_weight, 0.0, grad);
  }
}

void write_checkpoint(const LyapunovNetwork& net, std::uint64_t seed, std::ostream& out) {
  out << "lyapnet-checkpoint v1\n";
  out << "input_dim " << net.input_dim() << "\n";
  out << "zero_anchor " << (net.zero_anchor() ? 1 : 0) << "\n";
  out << "seed " << seed << "\n";
  out << "layers " << format_layer_spec(net.architecture().layers) << "\n";
  const auto theta = net.params();
  out << "params " << theta.size() << "\n";
  char buf[64];
  for (double v : theta) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v);
    out << buf;
  }
}

void save_checkpoint(const LyapunovNetwork& net, std::uint64_t seed, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path.string());
  write_checkpoint(net, seed, out);
  if (!out) throw std::runtime_error("failed writing checkpoint: " + path.string());
}

namespace {

std::string expect_key(std::istream& in, const std::string& key) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("checkpoint truncated before '" + key + "'");
  if (line.rfind(key + " ", 0) != 0) throw ConfigError("checkpoint: expected '" + key + "', got '" + line + "'");
  return line.substr(key.size() + 1);
}

}  // namespace

Checkpoint read_checkpoint(std::istream& in) {
  std::string header;
  std::getline(in, header);
  if (header != "lyapnet-checkpoint v1") throw ConfigError("not a v1 checkpoint: '" + header + "'");
  try {
    const int dim = std::stoi(expect_key(in, "input_dim"));
    const bool anchor = std::stoi(expect_key(in, "zero_anchor")) != 0;
    const std::uint64_t seed = std::stoull(expect_key(in, "seed"));
    Architecture arch{dim, parse_layer_spec(expect_key(in, "layers"))};
    const std::size_t count = std::stoull(expect_key(in, "params"));
    auto net = LyapunovNetwork::init(arch, 0, anchor);
    if (count != net.param_count()) throw ConfigError("checkpoint parameter count does not match layers");
    ParamVector theta(count);
    for (auto& v : theta) {
      std::string line;
      if (!std::getline(in, line)) throw ConfigError("checkpoint truncated in parameter block");
      v = std::stod(line);
    }
    net.set_params(theta);
    return {std::move(net), seed};
  } catch (const std::logic_error& e) {
    throw ConfigError(std::string("malformed checkpoint: ") + e.what());
  }
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open checkpoint: " + path.string());
  return read_checkpoint(in);
}

}  // namespace lyapnet
