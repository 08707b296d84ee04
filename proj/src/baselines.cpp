#include "adm/baselines.hpp"

#include <cmath>

namespace adm {

BaselineState fobos_step(const BaselineState& s, const LossTerm& f,
                         const Regularizer& g, double rho_t) {
  if (rho_t <= 0.0) throw ParameterError("fobos: rho_t <= 0");
  BaselineState next;
  const Vector half = s.z - f.subgradient(s.z) / rho_t;
  next.z = g.prox(half, rho_t);
  next.grad_sum = s.grad_sum;
  next.t = s.t + 1;
  return next;
}

BaselineState ogd_step(const BaselineState& s, const LossTerm& f,
                       const Regularizer& feasible_set, double step) {
  if (step <= 0.0) throw ParameterError("ogd: step <= 0");
  if (!feasible_set.is_indicator()) {
    throw ParameterError("ogd: feasible set must be an indicator regularizer");
  }
  BaselineState next;
  next.z = feasible_set.prox(s.z - step * f.subgradient(s.z), 1.0);
  next.grad_sum = s.grad_sum;
  next.t = s.t + 1;
  return next;
}

BaselineState rda_step(const BaselineState& s, const LossTerm& f,
                       const Regularizer& g, double gamma) {
  if (gamma <= 0.0) throw ParameterError("rda: gamma <= 0");
  BaselineState next;
  next.grad_sum = s.grad_sum + f.subgradient(s.z);
  next.t = s.t + 1;
  const double sqt = std::sqrt(static_cast<double>(next.t));
  const Vector gbar = next.grad_sum / static_cast<double>(next.t);
  // argmin <gbar, z> + g(z) + (gamma / sqrt(t)) 1/2 ||z||^2
  //   = prox of g at -sqrt(t) gbar / gamma with weight gamma / sqrt(t)
  next.z = g.prox(-sqt * gbar / gamma, gamma / sqt);
  return next;
}

}  // namespace adm
