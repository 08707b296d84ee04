#include "adm/harness.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "adm/baselines.hpp"
#include "adm/linalg.hpp"
#include "adm/rng.hpp"

namespace adm {

ReferenceSolution reference_optimum(const BatchProblem& p, double rho,
                                    double tol, long max_iters) {
  BatchAdm solver(p, rho);
  IterateState s = solver.initial_state();
  for (long t = 0; t < max_iters; ++t) {
    auto [next, rr] = solver.step(s);
    s = std::move(next);
    if (rr.r_full <= tol) {
      return ReferenceSolution{s.x, s.z, s.y, p.objective(s.x, s.z), true,
                               t + 1};
    }
  }
  return ReferenceSolution{s.x, s.z, s.y, p.objective(s.x, s.z), false,
                           max_iters};
}

GrowthFit fit_growth_exponent(const std::vector<double>& horizons,
                              const std::vector<double>& totals) {
  if (horizons.size() != totals.size()) {
    throw DimensionError("fit_growth_exponent: size mismatch");
  }
  if (horizons.size() < 4) {
    throw ParameterError("fit_growth_exponent: need at least 4 points");
  }
  const std::size_t n = horizons.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (horizons[i] <= 0.0 || totals[i] <= 0.0) {
      throw ParameterError("fit_growth_exponent: nonpositive point");
    }
    const double x = std::log(horizons[i]);
    const double y = std::log(totals[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double dn = static_cast<double>(n);
  const double sxx_c = sxx - sx * sx / dn;
  const double sxy_c = sxy - sx * sy / dn;
  const double syy_c = syy - sy * sy / dn;
  GrowthFit fit;
  fit.exponent = sxy_c / sxx_c;
  fit.intercept = (sy - fit.exponent * sx) / dn;
  fit.r_squared = syy_c > 0.0 ? (sxy_c * sxy_c) / (sxx_c * syy_c) : 1.0;
  return fit;
}

LinearProgram gen_feasible_lp(std::uint64_t seed, int dim, int n_ineq) {
  if (dim < 1) throw ParameterError("gen_feasible_lp: dim >= 1");
  if (n_ineq < 0) throw ParameterError("gen_feasible_lp: n_ineq >= 0");
  Rng rng(seed);
  Vector x0(dim);
  for (int i = 0; i < dim; ++i) x0[i] = rng.uniform(-1.0, 1.0);

  LinearProgram lp;
  lp.a_eq.resize(1, dim);
  for (int j = 0; j < dim; ++j) lp.a_eq(0, j) = rng.normal();
  lp.a_eq.row(0) /= lp.a_eq.row(0).norm();
  lp.a_rhs = lp.a_eq * x0;

  // random cutting rows with slack at x0, then box rows keeping it bounded
  const int rows = n_ineq + 2 * dim;
  lp.b_in.resize(rows, dim);
  lp.b_rhs.resize(rows);
  for (int i = 0; i < n_ineq; ++i) {
    for (int j = 0; j < dim; ++j) lp.b_in(i, j) = rng.normal();
    lp.b_in.row(i) /= lp.b_in.row(i).norm();
    lp.b_rhs[i] = lp.b_in.row(i).dot(x0) + rng.uniform(0.2, 1.5);
  }
  lp.b_in.block(n_ineq, 0, dim, dim) = Matrix::Identity(dim, dim);
  lp.b_in.block(n_ineq + dim, 0, dim, dim) = -Matrix::Identity(dim, dim);
  lp.b_rhs.segment(n_ineq, 2 * dim).setConstant(3.0);

  lp.cost.resize(dim);
  for (int j = 0; j < dim; ++j) lp.cost[j] = rng.normal();
  lp.cost /= lp.cost.norm();
  return lp;
}

LpSolution solve_lp_adm(const LinearProgram& lp, double rho, long max_iters,
                        double tol) {
  ProjectionFreeAdm solver(lp.a_eq, lp.a_rhs, lp.b_in, lp.b_rhs,
                           {rho, rho, 0.0});
  const LossTerm f = LossTerm::linear(lp.cost);
  Vector prev = solver.state().x;
  for (long t = 0; t < max_iters; ++t) {
    solver.step(f);
    const double drift = (solver.state().x - prev).squaredNorm();
    prev = solver.state().x;
    if (solver.equality_violation_sq() + solver.slack_violation_sq() + drift <=
        tol) {
      return LpSolution{solver.state().x, lp.cost.dot(solver.state().x), true,
                        t + 1};
    }
  }
  return LpSolution{solver.state().x, lp.cost.dot(solver.state().x), false,
                    max_iters};
}

void apply_override(ExperimentConfig& cfg, const std::string& key,
                    const std::string& value) {
  auto as_double = [&] { return std::stod(value); };
  auto as_int = [&] { return std::stoi(value); };
  if (key == "problem") cfg.problem = value;
  else if (key == "solver") cfg.solver = value;
  else if (key == "case") cfg.inexact_case = value;
  else if (key == "schedule") cfg.schedule = value;
  else if (key == "rho") cfg.rho = as_double();
  else if (key == "eta") cfg.eta = as_double();
  else if (key == "gamma") cfg.gamma = as_double();
  else if (key == "beta1") cfg.beta1 = as_double();
  else if (key == "beta2") cfg.beta2 = as_double();
  else if (key == "q") cfg.q = as_double();
  else if (key == "lambda") cfg.lambda = as_double();
  else if (key == "n") cfg.n = as_int();
  else if (key == "k") cfg.k = as_int();
  else if (key == "N") cfg.n_examples = as_int();
  else if (key == "num-blocks") cfg.num_blocks = as_int();
  else if (key == "n-ineq") cfg.n_ineq = as_int();
  else if (key == "noise") cfg.noise_sigma = as_double();
  else if (key == "seed") cfg.seed = std::stoull(value);
  else if (key == "rounds") cfg.rounds = std::stol(value);
  else if (key == "passes") cfg.passes = as_int();
  else if (key == "nnz-threshold") cfg.nnz_threshold = as_double();
  else if (key == "out") cfg.out = value;
  else throw ParameterError("unknown config key: " + key);
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open config file: " + path);
  ExperimentConfig cfg;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto first = s.find_first_not_of(" \t\r");
      const auto last = s.find_last_not_of(" \t\r");
      if (first == std::string::npos) return std::string();
      return s.substr(first, last - first + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) continue;
    apply_override(cfg, key, value);
  }
  return cfg;
}

Dataset make_tv_dataset(std::uint64_t seed, int n_examples, int dim,
                        int num_blocks, double noise_sigma) {
  Rng rng(seed);
  Dataset data;
  data.seed = seed;
  data.nnz = 0;
  data.noise_sigma = noise_sigma;
  data.features.resize(n_examples, dim);
  for (int i = 0; i < n_examples; ++i) {
    for (int j = 0; j < dim; ++j) data.features(i, j) = rng.normal();
  }
  for (int j = 0; j < dim; ++j) {
    const double norm = data.features.col(j).norm();
    if (norm > 0.0) data.features.col(j) /= norm;
  }
  data.x0 = gen_tv_signal(seed ^ 0x74765f626c6f636bULL, dim, num_blocks);
  data.targets = data.features * data.x0 / static_cast<double>(n_examples);
  if (noise_sigma > 0.0) {
    for (int i = 0; i < n_examples; ++i) {
      data.targets[i] += noise_sigma * rng.normal();
    }
  }
  return data;
}

BatchProblem ProblemInstance::batch() const {
  return BatchProblem{
      cs,
      QuadraticObjective::least_squares(data.features, data.targets,
                                        1.0 / data.size()),
      g};
}

ProblemInstance make_instance(const ExperimentConfig& cfg) {
  ProblemInstance inst;
  const int n = cfg.n;
  if (cfg.problem == "lasso" || cfg.problem == "consensus") {
    inst.data = gen_lasso_stream(cfg.seed, cfg.n_examples, n, cfg.k,
                                 cfg.noise_sigma);
    inst.cs = ConstraintSpec::make(Matrix::Identity(n, n),
                                   -Matrix::Identity(n, n), Vector::Zero(n));
  } else if (cfg.problem == "tv") {
    inst.data = make_tv_dataset(cfg.seed, cfg.n_examples, n, cfg.num_blocks,
                                cfg.noise_sigma);
    inst.cs = ConstraintSpec::make(bidiagonal_matrix(n),
                                   -Matrix::Identity(n, n), Vector::Zero(n));
  } else {
    throw ParameterError("make_instance: unknown problem kind " + cfg.problem);
  }
  inst.lambda =
      cfg.lambda >= 0.0 ? cfg.lambda : lambda_from_fraction(cfg.q, inst.data);
  inst.g = cfg.problem == "consensus" ? Regularizer::squared_l2(inst.lambda)
                                      : Regularizer::l1(inst.lambda);
  return inst;
}

int count_nnz(const Eigen::Ref<const Vector>& v, double threshold) {
  int count = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > threshold) ++count;
  }
  return count;
}

void write_round_csv(std::ostream& os, const std::vector<RoundRecord>& log) {
  os << "t,loss,g_value,violation_sq,r1_cum,r2_cum,rc_cum,rho_t,eta_t\n";
  double r1 = 0.0, rc = 0.0, r2 = 0.0;
  bool any_r2 = false;
  for (const RoundRecord& r : log) {
    r1 += r.r1_increment;
    rc += r.rc_increment;
    if (r.r2_increment) {
      r2 += *r.r2_increment;
      any_r2 = true;
    }
    os << r.t << ',' << format_double(r.loss) << ',' << format_double(r.g_value)
       << ',' << format_double(r.violation_sq) << ',' << format_double(r1)
       << ',';
    if (r.r2_increment && any_r2) os << format_double(r2);
    os << ',' << format_double(rc) << ',' << format_double(r.rho) << ','
       << format_double(r.eta) << '\n';
  }
}

namespace {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable parse_csv(std::istream& is) {
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.push_back("");
    if (first) {
      table.header = std::move(cells);
      first = false;
    } else {
      table.rows.push_back(std::move(cells));
    }
  }
  return table;
}

int column_index(const CsvTable& t, const std::string& name) {
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (t.header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

// log-spaced prefix horizons for the in-run growth fit
std::vector<std::size_t> growth_horizons(std::size_t rounds) {
  std::vector<std::size_t> out;
  if (rounds < 16) return out;
  const int points = 5;
  for (int j = 0; j < points; ++j) {
    const double frac =
        std::pow(10.0, -2.0 * (points - 1 - j) / (points - 1));  // 1e-2 .. 1
    auto idx = static_cast<std::size_t>(std::llround(frac * rounds));
    if (idx < 1) idx = 1;
    if (out.empty() || idx > out.back()) out.push_back(idx);
  }
  return out;
}

}  // namespace

MetricSummary summarize_round_csv(std::istream& is, double p_star) {
  CsvTable table = parse_csv(is);
  MetricSummary s;
  s.p_star = p_star;
  s.rounds = static_cast<long>(table.rows.size());
  if (table.rows.empty()) return s;
  const auto& last = table.rows.back();

  if (!table.header.empty() && table.header[1] == "objective") {
    // batch schema: t, objective, r_cross, r_full, y_norm
    s.final_objective = std::stod(last[1]);
    const int rf = column_index(table, "r_full");
    std::vector<double> hs, totals;
    for (std::size_t idx : growth_horizons(table.rows.size())) {
      const double v = std::stod(table.rows[idx - 1][rf]);
      if (v <= 0.0) return s;
      hs.push_back(static_cast<double>(idx));
      totals.push_back(v);
    }
    if (hs.size() >= 4) {
      s.growth = fit_growth_exponent(hs, totals);
      s.has_growth = true;
    }
    return s;
  }

  const int loss_col = column_index(table, "loss");
  const int g_col = column_index(table, "g_value");
  const int r1_col = column_index(table, "r1_cum");
  const int r2_col = column_index(table, "r2_cum");
  const int rc_col = column_index(table, "rc_cum");
  s.final_objective = std::stod(last[loss_col]) + std::stod(last[g_col]);
  s.r1 = std::stod(last[r1_col]);
  s.has_r1 = true;
  s.rc = std::stod(last[rc_col]);
  if (!last[r2_col].empty()) {
    s.r2 = std::stod(last[r2_col]);
    s.has_r2 = true;
  }
  std::vector<double> hs, totals;
  for (std::size_t idx : growth_horizons(table.rows.size())) {
    const double v = std::stod(table.rows[idx - 1][r1_col]);
    if (v <= 0.0) break;
    hs.push_back(static_cast<double>(idx));
    totals.push_back(v);
  }
  if (hs.size() >= 4) {
    s.growth = fit_growth_exponent(hs, totals);
    s.has_growth = true;
  }
  return s;
}

namespace {

XUpdateMode mode_from_string(const std::string& name) {
  if (name == "linearized-penalty") return XUpdateMode::LinearizedPenalty;
  if (name == "linearized-f") return XUpdateMode::LinearizedLoss;
  if (name == "mda") return XUpdateMode::MirrorDescent;
  if (name == "comid") return XUpdateMode::Comid;
  throw ParameterError("unknown inexact case: " + name);
}

Schedule build_schedule(const ExperimentConfig& cfg, const ProblemInstance& inst,
                        const ReferenceSolution& ref, long rounds) {
  std::string kind = cfg.schedule;
  if (cfg.solver == "oadm-eta0" && kind == "constant") kind = "eta-zero";
  const Divergence phi = Divergence::quadratic();
  if (kind == "constant") return Schedule::constant(cfg.rho, cfg.eta);
  if (kind == "sqrt-horizon") {
    const double gf = estimate_subgradient_bound(inst.data);
    const double dx = std::sqrt(
        phi.value(ref.x, Vector::Zero(ref.x.size())));
    return Schedule::sqrt_horizon(rounds, gf, dx, phi.alpha());
  }
  if (kind == "strongly-convex") {
    const double b2 =
        inst.g.strong_convexity() > 0.0 ? inst.g.strong_convexity() : cfg.beta2;
    return Schedule::strongly_convex(cfg.beta1, b2, inst.cs.lambda_max_b);
  }
  if (kind == "eta-zero") return Schedule::eta_zero(cfg.rho);
  if (kind == "eta-zero-sqrt") {
    const double gf = estimate_subgradient_bound(inst.data);
    return Schedule::eta_zero_sqrt_horizon(rounds, gf, ref.z.norm(),
                                           inst.cs.lambda_min_a,
                                           inst.cs.lambda_max_b);
  }
  if (kind == "eta-zero-strongly-convex") {
    const double b2 =
        inst.g.strong_convexity() > 0.0 ? inst.g.strong_convexity() : cfg.beta2;
    return Schedule::eta_zero_strongly_convex(b2, inst.cs.lambda_max_b);
  }
  if (kind == "eta-linear") return Schedule::eta_linear(cfg.rho, cfg.beta1);
  throw ParameterError("unknown schedule kind: " + cfg.schedule);
}

void write_nnz_csv(const std::string& path, const std::vector<int>& nnz) {
  std::ofstream os(path);
  os << "t,nnz\n";
  for (std::size_t i = 0; i < nnz.size(); ++i) {
    os << (i + 1) << ',' << nnz[i] << '\n';
  }
}

MetricSummary summarize_file(const std::string& path, double p_star) {
  std::ifstream is(path);
  if (!is) throw ParameterError("cannot reopen csv: " + path);
  return summarize_round_csv(is, p_star);
}

MetricSummary run_projection_free(const ExperimentConfig& cfg, long rounds) {
  const LinearProgram lp = gen_feasible_lp(cfg.seed, cfg.n, cfg.n_ineq);
  const LpSolution ref = solve_lp_adm(lp);
  ProjectionFreeAdm solver(lp.a_eq, lp.a_rhs, lp.b_in, lp.b_rhs,
                           {cfg.rho, cfg.rho, cfg.eta});
  const LossTerm f = LossTerm::linear(lp.cost);
  std::vector<RoundRecord> log;
  log.reserve(rounds);
  std::vector<int> nnz;
  nnz.reserve(rounds);
  const auto start = std::chrono::steady_clock::now();
  for (long t = 1; t <= rounds; ++t) {
    RoundRecord rec;
    rec.t = t;
    rec.loss = f.value(solver.state().x);
    rec.g_value = 0.0;
    rec.violation_sq =
        solver.equality_violation_sq() + solver.slack_violation_sq();
    rec.r1_increment = rec.loss - ref.value;
    const Vector z_prev = solver.state().z;
    solver.step(f);
    rec.rc_increment = solver.equality_violation_sq() +
                       solver.slack_violation_sq() +
                       (solver.state().z - z_prev).squaredNorm();
    rec.rho = cfg.rho;
    rec.eta = cfg.eta;
    log.push_back(rec);
    nnz.push_back(count_nnz(solver.state().x, cfg.nnz_threshold));
  }
  const auto stop = std::chrono::steady_clock::now();
  {
    std::ofstream os(cfg.out);
    write_round_csv(os, log);
  }
  write_nnz_csv(cfg.out + ".nnz.csv", nnz);
  MetricSummary s = summarize_file(cfg.out, ref.value);
  s.seconds_per_round =
      std::chrono::duration<double>(stop - start).count() / rounds;
  s.final_nnz = nnz.empty() ? -1 : nnz.back();
  return s;
}

MetricSummary run_baseline(const ExperimentConfig& cfg,
                           const ProblemInstance& inst, long rounds) {
  // FOBOS/RDA solve the unsplit composite problem; the TV penalty is mapped
  // to the lasso form through y = D x, so the stream is transformed by D^{-1}.
  Dataset data = inst.data;
  if (cfg.problem == "tv") {
    Matrix dinv = Matrix::Zero(cfg.n, cfg.n);  // (D^{-1})_{ij} = 1 for j >= i
    for (int i = 0; i < cfg.n; ++i) {
      for (int j = i; j < cfg.n; ++j) dinv(i, j) = 1.0;
    }
    data.features = inst.data.features * dinv;
  }
  const Eigen::Index n = data.dim();
  ConstraintSpec cs = ConstraintSpec::make(
      Matrix::Identity(n, n), -Matrix::Identity(n, n), Vector::Zero(n));
  BatchProblem agg{cs,
                   QuadraticObjective::least_squares(data.features, data.targets,
                                                     1.0 / data.size()),
                   inst.g};
  const ReferenceSolution ref = reference_optimum(agg);

  RegretLedger ledger(ref.z, ref.z);
  BaselineState state = BaselineState::zeros(n);
  std::vector<int> nnz;
  nnz.reserve(rounds);
  const auto start = std::chrono::steady_clock::now();
  for (long t = 1; t <= rounds; ++t) {
    const LossTerm f = data.loss(static_cast<int>((t - 1) % data.size()));
    RoundRecord rec;
    rec.t = t;
    rec.loss = f.value(state.z);
    rec.g_value = inst.g.value(state.z);
    rec.violation_sq = 0.0;
    rec.r1_increment = rec.loss + rec.g_value - f.value(ref.z) -
                       inst.g.value(ref.z);
    rec.rc_increment = 0.0;
    const double sqt = std::sqrt(static_cast<double>(t));
    if (cfg.solver == "fobos") {
      rec.rho = cfg.rho * sqt;  // divisor rho_t = rho sqrt(t)
      state = fobos_step(state, f, inst.g, rec.rho);
    } else if (cfg.solver == "rda") {
      rec.rho = cfg.gamma / sqt;
      state = rda_step(state, f, inst.g, cfg.gamma);
    } else if (cfg.solver == "ogd") {
      rec.rho = cfg.rho * sqt;
      state = ogd_step(state, f, inst.g, 1.0 / rec.rho);
    } else {
      throw ParameterError("unknown baseline solver: " + cfg.solver);
    }
    rec.eta = 0.0;
    ledger.record(rec);
    nnz.push_back(count_nnz(state.z, cfg.nnz_threshold));
  }
  const auto stop = std::chrono::steady_clock::now();
  {
    std::ofstream os(cfg.out);
    write_round_csv(os, ledger.log());
  }
  write_nnz_csv(cfg.out + ".nnz.csv", nnz);
  MetricSummary s = summarize_file(cfg.out, ref.p_star);
  s.seconds_per_round =
      std::chrono::duration<double>(stop - start).count() / rounds;
  s.final_nnz = nnz.empty() ? -1 : nnz.back();
  return s;
}

}  // namespace

MetricSummary run_experiment(const ExperimentConfig& cfg) {
  const long rounds =
      cfg.rounds > 0
          ? cfg.rounds
          : static_cast<long>(cfg.passes) * static_cast<long>(cfg.n_examples);
  if (rounds < 1) throw ParameterError("run_experiment: rounds >= 1");

  if (cfg.solver == "projection-free" || cfg.problem == "lp") {
    if (cfg.solver != "projection-free" || cfg.problem != "lp") {
      throw ParameterError("lp problems pair with the projection-free solver");
    }
    return run_projection_free(cfg, rounds);
  }

  const ProblemInstance inst = make_instance(cfg);

  if (cfg.solver == "batch-adm") {
    const BatchProblem batch = inst.batch();
    BatchAdm solver(batch, cfg.rho);
    const auto start = std::chrono::steady_clock::now();
    const BatchAdm::Trajectory traj = solver.run(rounds);
    const auto stop = std::chrono::steady_clock::now();
    {
      std::ofstream os(cfg.out);
      write_trajectory_csv(os, traj);
    }
    std::vector<int> nnz;
    nnz.reserve(rounds);
    for (std::size_t i = 1; i < traj.states.size(); ++i) {
      nnz.push_back(count_nnz(traj.states[i].z, cfg.nnz_threshold));
    }
    write_nnz_csv(cfg.out + ".nnz.csv", nnz);
    const ReferenceSolution ref = reference_optimum(batch);
    MetricSummary s = summarize_file(cfg.out, ref.p_star);
    s.seconds_per_round =
        std::chrono::duration<double>(stop - start).count() / rounds;
    s.final_nnz = nnz.empty() ? -1 : nnz.back();
    return s;
  }

  if (cfg.solver == "fobos" || cfg.solver == "rda" || cfg.solver == "ogd") {
    return run_baseline(cfg, inst, rounds);
  }

  if (cfg.solver != "oadm" && cfg.solver != "oadm-eta0" &&
      cfg.solver != "oadm-inexact" && cfg.solver != "oadm-stochastic") {
    throw ParameterError("unknown solver kind: " + cfg.solver);
  }

  const BatchProblem batch = inst.batch();
  const ReferenceSolution ref = reference_optimum(batch);
  const Schedule schedule = build_schedule(cfg, inst, ref, rounds);

  XUpdateOptions opts;
  if (cfg.solver == "oadm-inexact") {
    opts.mode = mode_from_string(cfg.inexact_case);
  } else if (cfg.solver == "oadm-stochastic") {
    opts.mode = mode_from_string(cfg.inexact_case);
  }
  OnlineAdm solver(OnlineProblem{inst.cs, inst.g}, schedule, opts);
  const bool track_r2 =
      cfg.solver == "oadm-eta0" && solver.xhat_available();

  RegretLedger ledger(ref.x, ref.z);
  Rng sampler(cfg.seed ^ 0x5b8c4d9e2fa31c07ULL);
  std::vector<int> nnz;
  nnz.reserve(rounds);
  const auto start = std::chrono::steady_clock::now();
  for (long t = 1; t <= rounds; ++t) {
    const int idx = cfg.solver == "oadm-stochastic"
                        ? static_cast<int>(sampler.uniform_int(inst.data.size()))
                        : static_cast<int>((t - 1) % inst.data.size());
    const LossTerm f = inst.data.loss(idx);
    const IterateState presented = solver.state();
    std::optional<Vector> xh;
    if (track_r2) xh = solver.xhat();
    const OnlineAdm::StepRecord sr = solver.step(f);
    ledger.record(make_round_record(f, inst.g, inst.cs, presented,
                                    solver.state(), xh, ledger, sr.rho,
                                    sr.eta));
    nnz.push_back(count_nnz(solver.state().z, cfg.nnz_threshold));
  }
  const auto stop = std::chrono::steady_clock::now();
  {
    std::ofstream os(cfg.out);
    write_round_csv(os, ledger.log());
  }
  write_nnz_csv(cfg.out + ".nnz.csv", nnz);
  MetricSummary s = summarize_file(cfg.out, ref.p_star);
  s.seconds_per_round =
      std::chrono::duration<double>(stop - start).count() / rounds;
  s.final_nnz = nnz.empty() ? -1 : nnz.back();
  return s;
}

void print_summary(std::ostream& os, const ExperimentConfig& cfg,
                   const MetricSummary& s) {
  os << "solver=" << cfg.solver << " problem=" << cfg.problem
     << " seed=" << cfg.seed << " rounds=" << s.rounds << '\n';
  os << "p_star=" << format_double(s.p_star) << '\n';
  os << "final_objective=" << format_double(s.final_objective) << '\n';
  if (s.has_r1) os << "r1=" << format_double(s.r1) << '\n';
  if (s.has_r1) os << "rc=" << format_double(s.rc) << '\n';
  if (s.has_r2) os << "r2=" << format_double(s.r2) << '\n';
  if (s.has_growth) {
    os << "growth_exponent=" << format_double(s.growth.exponent)
       << " growth_intercept=" << format_double(s.growth.intercept)
       << " growth_r_squared=" << format_double(s.growth.r_squared) << '\n';
  }
  if (s.final_nnz >= 0) os << "final_nnz=" << s.final_nnz << '\n';
  os << "seconds_per_round=" << format_double(s.seconds_per_round) << '\n';
}

}  // namespace adm
