#include "vwpinn/network.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "json_util.hpp"

namespace vwpinn::net {

std::size_t MlpConfig::parameter_count() const {
  std::size_t n = 0;
  for (int l = 0; l + 1 < static_cast<int>(layer_widths.size()); ++l)
    n += static_cast<std::size_t>(layer_widths[l]) * layer_widths[l + 1] + layer_widths[l + 1];
  return n;
}

void MlpConfig::validate() const {
  if (layer_widths.size() < 3)
    throw ConfigError("MlpConfig: need at least one hidden layer");
  for (int w : layer_widths)
    if (w < 1) throw ConfigError("MlpConfig: all layer widths must be >= 1");
  if (input_scaling) {
    const auto d = static_cast<std::size_t>(input_dim());
    if (input_scaling->offset.size() != d || input_scaling->scale.size() != d)
      throw ConfigError("MlpConfig: input scaling dimension mismatch");
  }
}

namespace {
// Portable uniform in [0,1) from the standard mt19937_64 stream.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}
}  // namespace

ParameterVector init_glorot(const MlpConfig& config, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  ParameterVector p;
  p.values.reserve(config.parameter_count());
  for (int l = 0; l + 1 < static_cast<int>(config.layer_widths.size()); ++l) {
    const int fan_in = config.layer_widths[l];
    const int fan_out = config.layer_widths[l + 1];
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    for (int i = 0; i < fan_in * fan_out; ++i)
      p.values.push_back(bound * (2.0 * unit_uniform(rng) - 1.0));
    for (int i = 0; i < fan_out; ++i) p.values.push_back(0.0);
  }
  return p;
}

std::vector<Array> unflatten(const MlpConfig& config, std::span<const double> flat) {
  config.validate();
  if (flat.size() != config.parameter_count())
    throw ShapeError("unflatten: parameter length mismatch");
  std::vector<Array> layers;
  std::size_t o = 0;
  for (int l = 0; l + 1 < static_cast<int>(config.layer_widths.size()); ++l) {
    const int in = config.layer_widths[l];
    const int out = config.layer_widths[l + 1];
    Array w(in, out);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = flat[o + i];
    o += w.size();
    Array b(1, out);
    for (int i = 0; i < out; ++i) b[i] = flat[o + i];
    o += out;
    layers.push_back(std::move(w));
    layers.push_back(std::move(b));
  }
  return layers;
}

ParameterVector flatten(const MlpConfig& config, std::span<const Array> layers) {
  config.validate();
  if (layers.size() != static_cast<std::size_t>(2 * config.n_affine()))
    throw ShapeError("flatten: wrong number of layer arrays");
  ParameterVector p;
  p.values.reserve(config.parameter_count());
  for (int l = 0; l + 1 < static_cast<int>(config.layer_widths.size()); ++l) {
    const Array& w = layers[2 * l];
    const Array& b = layers[2 * l + 1];
    if (w.rows() != config.layer_widths[l] || w.cols() != config.layer_widths[l + 1] ||
        b.rows() != 1 || b.cols() != config.layer_widths[l + 1])
      throw ShapeError("flatten: layer array shape mismatch");
    for (std::size_t i = 0; i < w.size(); ++i) p.values.push_back(w[i]);
    for (std::size_t i = 0; i < b.size(); ++i) p.values.push_back(b[i]);
  }
  return p;
}

ad::Expr TapeNet::forward(ad::Expr x) const {
  const MlpConfig& c = *config;
  if (x.value().cols() != c.input_dim())
    throw ShapeError("forward: input dimension mismatch");
  ad::Tape& t = *tape;
  ad::Expr h = x;
  if (c.input_scaling) {
    Array off(1, c.input_dim()), sc(1, c.input_dim());
    for (int j = 0; j < c.input_dim(); ++j) {
      off[j] = c.input_scaling->offset[j];
      sc[j] = c.input_scaling->scale[j];
    }
    h = t.mul(t.sub(h, t.constant(off)), t.constant(sc));
  }
  const int n_aff = c.n_affine();
  for (int l = 0; l < n_aff; ++l) {
    ad::Expr w{&t, param_ids[2 * l]};
    ad::Expr b{&t, param_ids[2 * l + 1]};
    h = t.affine(h, w, b);
    if (l + 1 < n_aff) h = c.activation == Activation::kTanh ? t.tanh(h) : t.sin(h);
  }
  return h;
}

TapeNet make_tape_net(ad::Tape& tape, const MlpConfig& config, std::span<const double> params) {
  config.validate();
  TapeNet net;
  net.tape = &tape;
  net.config = &config;
  for (Array& layer : unflatten(config, params)) net.param_ids.push_back(tape.input(std::move(layer)).id);
  return net;
}

ad::Expr forward(ad::Tape& tape, const MlpConfig& config, std::span<const double> params,
                 const Array& inputs) {
  TapeNet net = make_tape_net(tape, config, params);
  return net.forward(tape.input(inputs));
}

Array forward_plain(const MlpConfig& config, std::span<const double> params, const Array& inputs) {
  ad::Tape tape;
  return forward(tape, config, params, inputs).value();
}

void save_checkpoint(const std::string& path_prefix, const MlpConfig& config,
                     const ParameterVector& params, std::uint64_t seed, long step) {
  {
    std::ofstream bin(path_prefix + ".bin", std::ios::binary);
    bin.write(reinterpret_cast<const char*>(params.values.data()),
              static_cast<std::streamsize>(params.values.size() * sizeof(double)));
    if (!bin) throw std::runtime_error("save_checkpoint: failed to write " + path_prefix + ".bin");
  }
  nlohmann::json j;
  j["layer_widths"] = config.layer_widths;
  j["activation"] = config.activation == Activation::kTanh ? "tanh" : "sin";
  if (config.input_scaling) {
    j["input_offset"] = config.input_scaling->offset;
    j["input_scale"] = config.input_scaling->scale;
  }
  j["seed"] = seed;
  j["step"] = step;
  j["count"] = params.values.size();
  std::ofstream hdr(path_prefix + ".json");
  hdr << j.dump(2) << "\n";
  if (!hdr) throw std::runtime_error("save_checkpoint: failed to write " + path_prefix + ".json");
}

Checkpoint load_checkpoint(const std::string& path_prefix) {
  std::ifstream hdr(path_prefix + ".json");
  if (!hdr) throw std::runtime_error("load_checkpoint: cannot open " + path_prefix + ".json");
  nlohmann::json j;
  hdr >> j;
  Checkpoint ck;
  ck.config.layer_widths = j.at("layer_widths").get<std::vector<int>>();
  ck.config.activation =
      j.at("activation").get<std::string>() == "sin" ? Activation::kSin : Activation::kTanh;
  if (j.contains("input_offset")) {
    InputScaling sc;
    sc.offset = j.at("input_offset").get<std::vector<double>>();
    sc.scale = j.at("input_scale").get<std::vector<double>>();
    ck.config.input_scaling = std::move(sc);
  }
  ck.seed = j.at("seed").get<std::uint64_t>();
  ck.step = j.at("step").get<long>();
  const auto count = j.at("count").get<std::size_t>();
  ck.params.values.resize(count);
  std::ifstream bin(path_prefix + ".bin", std::ios::binary);
  if (!bin) throw std::runtime_error("load_checkpoint: cannot open " + path_prefix + ".bin");
  bin.read(reinterpret_cast<char*>(ck.params.values.data()),
           static_cast<std::streamsize>(count * sizeof(double)));
  if (bin.gcount() != static_cast<std::streamsize>(count * sizeof(double)))
    throw std::runtime_error("load_checkpoint: truncated " + path_prefix + ".bin");
  if (count != ck.config.parameter_count())
    throw ShapeError("load_checkpoint: parameter count does not match config");
  return ck;
}

}  // namespace vwpinn::net
