#include <CLI11.hpp>
#include <iostream>
#include <utility>
#include <vector>

#include "adm/harness.hpp"

// Experiment runner: an optional key=value config file, then flag overrides.
// Exit codes: 0 success, 2 invariant failure, 3 capability error, 1 anything
// else.
int main(int argc, char** argv) {
  CLI::App app{"alternating direction method solvers: batch, online, baselines"};
  std::string config_path;
  app.add_option("config", config_path, "key=value config file");

  std::vector<std::pair<std::string, std::string>> overrides;
  auto add = [&](const std::string& flag, const std::string& key,
                 const std::string& help) {
    app.add_option_function<std::string>(
        flag,
        [&overrides, key](const std::string& v) {
          overrides.emplace_back(key, v);
        },
        help);
  };
  add("--problem", "problem", "lasso | tv | consensus | lp");
  add("--solver", "solver",
      "batch-adm | oadm | oadm-eta0 | oadm-inexact | oadm-stochastic | "
      "projection-free | fobos | rda | ogd");
  add("--case", "case", "linearized-penalty | linearized-f | mda | comid");
  add("--schedule", "schedule",
      "constant | sqrt-horizon | strongly-convex | eta-zero | eta-zero-sqrt | "
      "eta-zero-strongly-convex | eta-linear");
  add("--rho", "rho", "penalty parameter");
  add("--eta", "eta", "learning rate of the proximal term");
  add("--gamma", "gamma", "dual-averaging weight");
  add("--beta1", "beta1", "strong-convexity rate of the eta schedule");
  add("--beta2", "beta2", "strong-convexity rate of the rho schedule");
  add("--q", "q", "lambda as a fraction of ||A^T b||_inf / N");
  add("--lambda", "lambda", "absolute regularization weight (overrides --q)");
  add("--n", "n", "variable dimension");
  add("--k", "k", "planted nonzeros");
  add("--N", "N", "examples per pass");
  add("--num-blocks", "num-blocks", "blocks in the tv signal");
  add("--n-ineq", "n-ineq", "extra inequality rows of the lp");
  add("--noise", "noise", "observation noise sigma");
  add("--seed", "seed", "64-bit seed");
  add("--rounds", "rounds", "total rounds (overrides --passes)");
  add("--passes", "passes", "passes over the examples");
  add("--nnz-threshold", "nnz-threshold", "|x_i| above this counts as nonzero");
  add("--out", "out", "per-round csv path");

  CLI11_PARSE(app, argc, argv);

  try {
    adm::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = adm::parse_config_file(config_path);
    for (const auto& [key, value] : overrides) {
      adm::apply_override(cfg, key, value);
    }
    const adm::MetricSummary summary = adm::run_experiment(cfg);
    adm::print_summary(std::cout, cfg, summary);
    return 0;
  } catch (const adm::CapabilityError& e) {
    std::cerr << "capability error: " << e.what() << '\n';
    return 3;
  } catch (const adm::InvariantError& e) {
    std::cerr << "invariant failure: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
