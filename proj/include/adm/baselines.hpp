#pragma once

#include "adm/dense.hpp"
#include "adm/problems.hpp"

namespace adm {

// State shared by the reference online learners. grad_sum accumulates
// subgradients for the dual-averaging update; grad_sum / t is the running
// average.
struct BaselineState {
  Vector z;
  Vector grad_sum;
  long t = 0;

  static BaselineState zeros(Eigen::Index n) {
    return BaselineState{Vector::Zero(n), Vector::Zero(n), 0};
  }
};

// Forward-backward step: half step z - f'(z)/rho_t, then the prox of g.
BaselineState fobos_step(const BaselineState& s, const LossTerm& f,
                         const Regularizer& g, double rho_t);

// Projected gradient step; feasible_set must be an indicator regularizer.
BaselineState ogd_step(const BaselineState& s, const LossTerm& f,
                       const Regularizer& feasible_set, double step);

// Dual averaging with the l2 proximal function:
//   z_{t+1} = argmin <gbar_t, z> + g(z) + (gamma / sqrt(t)) * 1/2 ||z||^2.
BaselineState rda_step(const BaselineState& s, const LossTerm& f,
                       const Regularizer& g, double gamma);

}  // namespace adm
