#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "adm/batch.hpp"
#include "adm/online.hpp"

namespace adm {

struct ReferenceSolution {
  Vector x;
  Vector z;
  Vector y;
  double p_star = 0.0;
  bool converged = false;
  long iterations = 0;
};

// Comparator oracle: batch ADM run until R(t+1, t+1) <= tol. A cap hit
// returns the best-so-far iterate flagged as approximate.
ReferenceSolution reference_optimum(const BatchProblem& p, double rho = 1.0,
                                    double tol = 1e-12,
                                    long max_iters = 1000000);

struct GrowthFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Least-squares slope of log(total) against log(horizon); needs at least 4
// points and positive totals.
GrowthFit fit_growth_exponent(const std::vector<double>& horizons,
                              const std::vector<double>& totals);

// min c.x  s.t.  A x = a, B x <= b
struct LinearProgram {
  Vector cost;
  Matrix a_eq;
  Vector a_rhs;
  Matrix b_in;
  Vector b_rhs;
};

// Random LP with a planted interior point and box rows keeping it bounded.
LinearProgram gen_feasible_lp(std::uint64_t seed, int dim, int n_ineq);

struct LpSolution {
  Vector x;
  double value = 0.0;
  bool converged = false;
  long iterations = 0;
};

// Batch solve of the LP through the slack-variable splitting, iterated until
// the equality and slack residuals fall below tol.
LpSolution solve_lp_adm(const LinearProgram& lp, double rho = 1.0,
                        long max_iters = 200000, double tol = 1e-16);

struct ExperimentConfig {
  std::string problem = "lasso";  // lasso | tv | consensus | lp
  std::string solver = "oadm";    // batch-adm | oadm | oadm-eta0 | oadm-inexact
                                  // | oadm-stochastic | projection-free
                                  // | fobos | rda | ogd
  std::string inexact_case = "linearized-f";  // linearized-penalty |
                                              // linearized-f | mda | comid
  std::string schedule = "constant";  // constant | sqrt-horizon |
                                      // strongly-convex | eta-zero |
                                      // eta-zero-sqrt |
                                      // eta-zero-strongly-convex | eta-linear
  double rho = 1.0;
  double eta = 0.0;
  double gamma = 100.0;
  double beta1 = 1.0;
  double beta2 = 1.0;
  double q = 0.5;        // lambda = q ||A^T b||_inf / N
  double lambda = -1.0;  // absolute lambda; wins over q when >= 0
  int n = 200;
  int k = 10;
  int n_examples = 100;
  int num_blocks = 5;
  int n_ineq = 4;  // lp only
  double noise_sigma = 1e-2;
  std::uint64_t seed = 1;
  long rounds = 0;  // 0: passes * n_examples
  int passes = 1;
  double nnz_threshold = 1e-4;
  std::string out = "run.csv";
};

// Flat key=value text file; '#' starts a comment.
ExperimentConfig parse_config_file(const std::string& path);
void apply_override(ExperimentConfig& cfg, const std::string& key,
                    const std::string& value);

// A configured instance: stream data, coupling, regularizer. The aggregate
// batch problem (mean loss + g under the coupling) backs the comparator.
struct ProblemInstance {
  Dataset data;
  ConstraintSpec cs;
  Regularizer g;
  double lambda = 0.0;

  BatchProblem batch() const;
};

ProblemInstance make_instance(const ExperimentConfig& cfg);
Dataset make_tv_dataset(std::uint64_t seed, int n_examples, int dim,
                        int num_blocks, double noise_sigma);

struct MetricSummary {
  long rounds = 0;
  double final_objective = 0.0;
  double p_star = 0.0;
  bool has_r1 = false;
  double r1 = 0.0;
  double rc = 0.0;
  bool has_r2 = false;
  double r2 = 0.0;
  bool has_growth = false;
  GrowthFit growth;
  double seconds_per_round = 0.0;
  int final_nnz = -1;
};

// Runs the configured experiment, writes the per-round CSV (plus an
// <out>.nnz.csv sparsity trace for the regularized block) and returns the
// summary, re-derived from the written CSV.
MetricSummary run_experiment(const ExperimentConfig& cfg);

// Summary fields that live in the CSV: totals, final objective, growth fit.
MetricSummary summarize_round_csv(std::istream& is, double p_star);

void write_round_csv(std::ostream& os, const std::vector<RoundRecord>& log);

void print_summary(std::ostream& os, const ExperimentConfig& cfg,
                   const MetricSummary& s);

int count_nnz(const Eigen::Ref<const Vector>& v, double threshold);

}  // namespace adm
