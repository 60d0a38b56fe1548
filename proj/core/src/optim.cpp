#include "vwpinn/optim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vwpinn::optim {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

bool all_finite(std::span<const double> a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads) {
  if (params.size() != grads.size()) throw ShapeError("adam_step: length mismatch");
  if (!all_finite(grads))
    throw NonFiniteGradientError("adam_step: non-finite gradient component");
  if (state.m.empty()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  if (state.m.size() != params.size()) throw ShapeError("adam_step: state length mismatch");
  const AdamConfig& c = state.config;
  state.t += 1;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * grads[i];
    state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * grads[i] * grads[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] -= c.lr * mhat / (std::sqrt(vhat) + c.eps);
  }
}

std::vector<double> lbfgs_two_loop(
    const std::deque<std::pair<std::vector<double>, std::vector<double>>>& history,
    std::span<const double> grad) {
  std::vector<double> q(grad.begin(), grad.end());
  const std::size_t m = history.size();
  std::vector<double> alpha(m), rho(m);
  for (std::size_t k = m; k-- > 0;) {
    const auto& [s, y] = history[k];
    rho[k] = 1.0 / dot(s, y);
    alpha[k] = rho[k] * dot(s, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] -= alpha[k] * y[i];
  }
  double gamma = 1.0;
  if (m > 0) {
    const auto& [s, y] = history.back();
    gamma = dot(s, y) / dot(y, y);
  }
  for (double& v : q) v *= gamma;
  for (std::size_t k = 0; k < m; ++k) {
    const auto& [s, y] = history[k];
    const double beta = rho[k] * dot(y, q);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] += s[i] * (alpha[k] - beta);
  }
  for (double& v : q) v = -v;
  return q;
}

namespace {

struct LineSearchResult {
  bool ok = false;
  double alpha = 0.0;
  EvalResult eval;
  int evals = 0;
};

// Strong Wolfe search (bracket + zoom with bisection), with non-finite trial
// values handled by halving the step.
LineSearchResult strong_wolfe(const LossFn& loss_fn, std::span<const double> x,
                              std::span<const double> d, const EvalResult& at_zero,
                              const LbfgsConfig& cfg) {
  LineSearchResult res;
  const double phi0 = at_zero.loss;
  const double dphi0 = dot(at_zero.grad, d);
  if (dphi0 >= 0) return res;

  std::vector<double> xt(x.size());
  auto eval_at = [&](double a) {
    for (std::size_t i = 0; i < x.size(); ++i) xt[i] = x[i] + a * d[i];
    ++res.evals;
    return loss_fn(xt);
  };
  auto finite_eval = [&](double& a) -> std::pair<bool, EvalResult> {
    for (int h = 0; h <= cfg.max_halvings; ++h) {
      EvalResult e = eval_at(a);
      if (std::isfinite(e.loss) && all_finite(e.grad)) return {true, std::move(e)};
      a *= 0.5;
    }
    return {false, {}};
  };
  auto wolfe_ok = [&](double a, const EvalResult& e) {
    return e.loss <= phi0 + cfg.c1 * a * dphi0 && std::abs(dot(e.grad, d)) <= -cfg.c2 * dphi0;
  };

  auto zoom = [&](double lo, double phi_lo, EvalResult e_lo, double hi) -> LineSearchResult {
    LineSearchResult out;
    while (res.evals < cfg.max_line_evals) {
      double a = 0.5 * (lo + hi);
      auto [fin, e] = finite_eval(a);
      if (!fin) break;
      if (e.loss > phi0 + cfg.c1 * a * dphi0 || e.loss >= phi_lo) {
        hi = a;
      } else {
        const double dphi = dot(e.grad, d);
        if (std::abs(dphi) <= -cfg.c2 * dphi0) {
          out.ok = true;
          out.alpha = a;
          out.eval = std::move(e);
          out.evals = res.evals;
          return out;
        }
        if (dphi * (hi - lo) >= 0) hi = lo;
        lo = a;
        phi_lo = e.loss;
        e_lo = std::move(e);
      }
      if (std::abs(hi - lo) < 1e-16 * std::max(1.0, std::abs(lo))) break;
    }
    // Accept the best sufficient-decrease point even if curvature was not met.
    if (phi_lo < phi0 && e_lo.grad.size() == x.size()) {
      out.ok = true;
      out.alpha = lo;
      out.eval = std::move(e_lo);
    }
    out.evals = res.evals;
    return out;
  };

  double a_prev = 0.0, phi_prev = phi0;
  EvalResult e_prev = at_zero;
  double a = 1.0;
  for (int it = 0; res.evals < cfg.max_line_evals; ++it) {
    auto [fin, e] = finite_eval(a);
    if (!fin) return res;
    if (e.loss > phi0 + cfg.c1 * a * dphi0 || (it > 0 && e.loss >= phi_prev)) {
      LineSearchResult z = zoom(a_prev, phi_prev, std::move(e_prev), a);
      z.evals = res.evals;
      return z;
    }
    const double dphi = dot(e.grad, d);
    if (std::abs(dphi) <= -cfg.c2 * dphi0) {
      res.ok = true;
      res.alpha = a;
      res.eval = std::move(e);
      return res;
    }
    if (dphi >= 0) {
      LineSearchResult z = zoom(a, e.loss, std::move(e), a_prev);
      z.evals = res.evals;
      return z;
    }
    a_prev = a;
    phi_prev = e.loss;
    e_prev = std::move(e);
    a = std::min(2.0 * a, 1e10);
  }
  // Out of evaluations: fall back to the last point if it already decreased.
  if (phi_prev < phi0 && a_prev > 0) {
    res.ok = true;
    res.alpha = a_prev;
    res.eval = std::move(e_prev);
  }
  return res;
}

}  // namespace

LbfgsOuterReport lbfgs_outer_step(LbfgsState& state, const LossFn& loss_fn,
                                  std::vector<double>& params, EvalResult& current) {
  LbfgsOuterReport rep;
  const LbfgsConfig& cfg = state.config;
  for (int inner = 0; inner < cfg.max_inner; ++inner) {
    if (norm2(current.grad) < cfg.grad_tol) {
      rep.converged = true;
      break;
    }
    std::vector<double> d = lbfgs_two_loop(state.history, current.grad);
    if (dot(d, current.grad) >= 0) {
      state.history.clear();
      d = lbfgs_two_loop(state.history, current.grad);  // steepest descent
    }
    LineSearchResult ls = strong_wolfe(loss_fn, params, d, current, cfg);
    rep.evals += ls.evals;
    if (!ls.ok) {
      // Reported failure: drop the history and try plain steepest descent
      // with a backtracking (Armijo) search.
      state.line_search_failures += 1;
      rep.line_search_failed = true;
      state.history.clear();
      std::vector<double> sd(current.grad.size());
      for (std::size_t i = 0; i < sd.size(); ++i) sd[i] = -current.grad[i];
      const double g2 = dot(current.grad, current.grad);
      double a = 1.0 / std::max(1.0, std::sqrt(g2));
      bool moved = false;
      std::vector<double> xt(params.size());
      for (int h = 0; h < cfg.max_halvings + cfg.max_line_evals; ++h) {
        for (std::size_t i = 0; i < params.size(); ++i) xt[i] = params[i] + a * sd[i];
        EvalResult e = loss_fn(xt);
        ++rep.evals;
        if (std::isfinite(e.loss) && all_finite(e.grad) && e.loss < current.loss - cfg.c1 * a * g2) {
          params = xt;
          current = std::move(e);
          moved = true;
          break;
        }
        a *= 0.5;
      }
      if (!moved) break;  // stuck; keep params unchanged
      ++rep.inner_done;
      continue;
    }
    std::vector<double> s(params.size()), y(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      s[i] = ls.alpha * d[i];
      params[i] += s[i];
      y[i] = ls.eval.grad[i] - current.grad[i];
    }
    if (dot(s, y) > 0) {
      state.history.emplace_back(std::move(s), std::move(y));
      if (static_cast<int>(state.history.size()) > cfg.history) state.history.pop_front();
    }
    current = std::move(ls.eval);
    ++rep.inner_done;
  }
  return rep;
}

long run_schedule(const LossFn& loss_fn, std::vector<double>& params,
                  std::span<const Phase> phases, const StepCallback& on_step, long first_step) {
  if (phases.empty()) throw ConfigError("run_schedule: empty schedule");
  long step = first_step;
  EvalResult current;
  bool have_current = false;
  for (const Phase& phase : phases) {
    try {
      if (phase.kind == Phase::Kind::kAdam) {
        AdamState st;
        st.config = phase.adam;
        for (int i = 0; i < phase.steps; ++i) {
          current = loss_fn(params);
          adam_step(st, params, current.grad);
          if (on_step) {
            StepLog log{step, phase.label, current.breakdown};
            log.breakdown.step = step;
            on_step(log);
          }
          ++step;
        }
        have_current = false;
      } else {
        LbfgsState st;
        st.config = phase.lbfgs;
        if (phase.steps > 0 && !have_current) {
          current = loss_fn(params);
          have_current = true;
        }
        for (int i = 0; i < phase.steps; ++i) {
          lbfgs_outer_step(st, loss_fn, params, current);
          if (on_step) {
            StepLog log{step, phase.label, current.breakdown};
            log.breakdown.step = step;
            on_step(log);
          }
          ++step;
        }
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("run_schedule: phase '" + phase.label + "' at step " +
                               std::to_string(step) + ": " + e.what());
    }
  }
  return step;
}

}  // namespace vwpinn::optim
