#pragma once

#include <optional>
#include <span>
#include <vector>

#include "vwpinn/autodiff.hpp"
#include "vwpinn/kde_volumes.hpp"
#include "vwpinn/residuals.hpp"

namespace vwpinn::loss {

struct LossWeights {
  double ic = 1.0;
  double bc = 1.0;
  double r = 1.0;
  double da = 1.0;
};

enum class WeightingMode { kUniform, kVolumeWeighted };

/// Per-step log record. Both PDE-loss variants are always filled in so the
/// one not driving optimization can still be tracked.
struct LossBreakdown {
  double ic = 0.0;
  double bc = 0.0;
  double da = 0.0;
  double r_uniform = 0.0;
  double r_vw = 0.0;
  double total = 0.0;
  long step = -1;
};

// Plain-value forms.
double mse_condition_loss(std::span<const double> predicted, std::span<const double> target);
double pde_loss_uniform(const residuals::ResidualBatch& batch);
double pde_loss_volume_weighted(const residuals::ResidualBatch& batch,
                                const kde::VolumeSet& volumes);

struct TotalLossInputs {
  std::optional<double> ic;
  std::optional<double> bc;
  std::optional<double> da;
  double r_uniform = 0.0;
  double r_vw = 0.0;
};
/// Weighted sum with the selected PDE-loss variant; the breakdown records
/// both variants. L_da is required for inverse problems and must be absent
/// otherwise.
LossBreakdown total_loss(const TotalLossInputs& in, const LossWeights& w, WeightingMode mode,
                         bool inverse_problem);

// Tape builders used during training.

/// (1/N) sum of squared entries of (pred - target), N = rows of pred.
ad::Expr mse_condition_loss_expr(ad::Tape& tape, ad::Expr pred, const Array& target);

/// Mean over points of the per-point sum of squared equation residuals.
ad::Expr pde_loss_uniform_expr(ad::Tape& tape, std::span<const ad::Expr> eqs);

/// sum_i |r_i V_i|^2 / sum_i V_i^2 with per-point |.|^2 summed over equations.
ad::Expr pde_loss_volume_weighted_expr(ad::Tape& tape, std::span<const ad::Expr> eqs,
                                       std::span<const double> volumes);

}  // namespace vwpinn::loss
