#pragma once

#include <deque>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "vwpinn/loss.hpp"

namespace vwpinn::optim {

/// One full loss/gradient evaluation at a parameter vector.
struct EvalResult {
  double loss = 0.0;
  std::vector<double> grad;
  loss::LossBreakdown breakdown;
};
using LossFn = std::function<EvalResult(std::span<const double>)>;

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::vector<double> m, v;
  long t = 0;
};

/// Bias-corrected Adam update in place. Throws NonFiniteGradientError on any
/// non-finite gradient component, leaving the parameters untouched.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads);

struct LbfgsConfig {
  int history = 50;
  int max_inner = 20;
  double c1 = 1e-4;          // sufficient decrease
  double c2 = 0.9;           // curvature
  double grad_tol = 1e-12;   // early stop on gradient norm
  int max_line_evals = 30;
  int max_halvings = 20;     // non-finite trial handling
};

struct LbfgsState {
  LbfgsConfig config;
  std::deque<std::pair<std::vector<double>, std::vector<double>>> history;  // (s, y)
  long line_search_failures = 0;
};

struct LbfgsOuterReport {
  int inner_done = 0;
  int evals = 0;
  bool line_search_failed = false;
  bool converged = false;
};

/// Up to max_inner iterations of two-loop direction + strong Wolfe search.
/// `current` holds the evaluation at `params` on entry and on exit.
LbfgsOuterReport lbfgs_outer_step(LbfgsState& state, const LossFn& loss_fn,
                                  std::vector<double>& params, EvalResult& current);

/// Two-loop recursion producing -H g (the search direction) for the given
/// history; exposed for verification against an explicit matrix product.
std::vector<double> lbfgs_two_loop(
    const std::deque<std::pair<std::vector<double>, std::vector<double>>>& history,
    std::span<const double> grad);

struct Phase {
  enum class Kind { kAdam, kLbfgs } kind = Kind::kAdam;
  int steps = 0;
  AdamConfig adam;
  LbfgsConfig lbfgs;
  std::string label;
};

struct StepLog {
  long step = 0;
  std::string phase;
  loss::LossBreakdown breakdown;
};

using StepCallback = std::function<void(const StepLog&)>;

/// Executes the phases in order, logging one record per step. Optimizer state
/// is fresh in every phase. `first_step` offsets the logged step counter so a
/// schedule can be split across collocation resamples.
long run_schedule(const LossFn& loss_fn, std::vector<double>& params,
                  std::span<const Phase> phases, const StepCallback& on_step,
                  long first_step = 0);

}  // namespace vwpinn::optim
