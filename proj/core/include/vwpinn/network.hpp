#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vwpinn/autodiff.hpp"

namespace vwpinn::net {

enum class Activation { kTanh, kSin };

/// Optional affine rescaling of the raw coordinates before the first layer.
struct InputScaling {
  std::vector<double> offset;
  std::vector<double> scale;
};

struct MlpConfig {
  std::vector<int> layer_widths;  // input dim, hidden widths..., output dim
  Activation activation = Activation::kTanh;
  std::optional<InputScaling> input_scaling;

  int input_dim() const { return layer_widths.front(); }
  int output_dim() const { return layer_widths.back(); }
  int n_affine() const { return static_cast<int>(layer_widths.size()) - 1; }
  std::size_t parameter_count() const;
  void validate() const;  // at least one hidden layer, all widths >= 1
};

/// Flat parameters; per layer the row-major weight block precedes the biases.
struct ParameterVector {
  std::vector<double> values;
  std::size_t size() const { return values.size(); }
};

ParameterVector init_glorot(const MlpConfig& config, std::uint64_t seed);

std::vector<Array> unflatten(const MlpConfig& config, std::span<const double> flat);
ParameterVector flatten(const MlpConfig& config, std::span<const Array> layers);

/// Network recorded on a tape with one input node per weight/bias block, so
/// the same parameters can drive forwards over several point batches.
struct TapeNet {
  ad::Tape* tape = nullptr;
  const MlpConfig* config = nullptr;
  std::vector<ad::NodeId> param_ids;  // W0, b0, W1, b1, ...

  ad::Expr forward(ad::Expr x) const;
};

TapeNet make_tape_net(ad::Tape& tape, const MlpConfig& config, std::span<const double> params);

/// Records inputs and parameters on a tape and returns the output batch.
ad::Expr forward(ad::Tape& tape, const MlpConfig& config, std::span<const double> params,
                 const Array& inputs);

/// Plain (tape-free) forward pass for evaluation and export.
Array forward_plain(const MlpConfig& config, std::span<const double> params, const Array& inputs);

/// Checkpoints: <path>.bin holds the flat float64 parameters, <path>.json the
/// config, seed and step count.
void save_checkpoint(const std::string& path_prefix, const MlpConfig& config,
                     const ParameterVector& params, std::uint64_t seed, long step);
struct Checkpoint {
  MlpConfig config;
  ParameterVector params;
  std::uint64_t seed = 0;
  long step = 0;
};
Checkpoint load_checkpoint(const std::string& path_prefix);

}  // namespace vwpinn::net
