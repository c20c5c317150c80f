#include "simprof/runner.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "simprof/entropy.hpp"
#include "simprof/quadrature.hpp"
#include "simprof/reduction.hpp"
#include "simprof/scalar_profile.hpp"
#include "simprof/vector_profile.hpp"

namespace simprof {

namespace {

using json = nlohmann::ordered_json;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Doubles go into JSON as numbers when finite, as "inf"/"-inf"/"nan"
/// strings otherwise (locale-independent in both cases).
json jnum(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json checks_to_json(const std::vector<CheckResult>& checks) {
  json arr = json::array();
  for (const auto& c : checks)
    arr.push_back({{"name", c.name}, {"value", jnum(c.value)}, {"bound", jnum(c.bound)},
                   {"pass", c.pass}});
  return arr;
}

struct ReportWriter {
  json report;
  std::string path;

  ReportWriter(const RunConfig& config, const std::string& out_dir) {
    report["command"] = command_to_string(config.command);
    report["seed"] = config.seed;
    path = (std::filesystem::path(out_dir) / "report.json").string();
  }

  int finish(int code, const std::vector<CheckResult>& checks,
             const std::vector<std::string>& errors) {
    static const char* categories[] = {"ok", "", "validation", "solver", "check"};
    report["status"] = categories[code];
    report["errors"] = errors;
    report["checks"] = checks_to_json(checks);
    std::ofstream out(path, std::ios::binary);
    out << report.dump(2) << "\n";
    return code;
  }
};

// ---------------------------------------------------------------------------
// problem -> solver inputs

ScalarDiffusivity build_diffusivity(const ProblemDescription& d, double um, double up) {
  std::function<double(double)> fn;
  if (d.diffusivity_name == "linear") {
    double c = d.diffusivity_param;
    fn = [c](double) { return c; };
  } else if (d.diffusivity_name == "pme") {
    double m = d.diffusivity_param;
    fn = [m](double u) { return m * std::pow(std::max(u, 0.0), m - 1.0); };
  } else if (d.diffusivity_name == "degen_I") {
    fn = oracle_diffusivity(OracleId::DegenI).D;
  } else if (d.diffusivity_name == "degen_II") {
    fn = oracle_diffusivity(OracleId::DegenII).D;
  } else if (d.diffusivity_name == "degen_III") {
    fn = oracle_diffusivity(OracleId::DegenIII).D;
  } else if (d.diffusivity_name == "gl_phase") {
    fn = oracle_diffusivity(OracleId::GlPhase).D;
  } else {
    throw std::invalid_argument("unknown diffusivity: " + d.diffusivity_name);
  }
  return make_scalar_diffusivity(fn, um, up);
}

/// Default certification box: componentwise hull of the two limits, padded by
/// 10% of the spread (or 0.1 when flat).
Box default_box(const VectorXd& um, const VectorXd& up) {
  Box box;
  box.lo = um.cwiseMin(up);
  box.hi = um.cwiseMax(up);
  VectorXd pad = 0.1 * (box.hi - box.lo).cwiseMax(VectorXd::Ones(um.size()));
  box.lo -= pad;
  box.hi += pad;
  return box;
}

struct VectorProblem {
  VectorFluxMap A;
  BoundaryPair boundary;
};

VectorProblem build_vector_problem(const ProblemDescription& d) {
  VectorProblem vp;
  if (d.fluxmap_reduced || (!d.has_fluxmap && d.has_network)) {
    MatrixXd Q = build_Q(d.network);
    VectorXd um, up;
    if (d.has_boundary) {
      um = d.U_minus;
      up = d.U_plus;
    } else {
      um = Q * d.C_minus;
      up = Q * d.C_plus;
    }
    if (um.size() != Q.rows())
      throw std::invalid_argument("boundary dimension does not match the reduced map");
    Box box = d.has_box ? Box{d.box_lo, d.box_hi} : default_box(um, up);
    vp.A = reduced_flux_map(d.network, d.d_diag, Q, box);
    vp.boundary = BoundaryPair(um, up);
  } else {
    vp.A = make_linear_flux_map(d.fluxmap_matrix);
    vp.boundary = BoundaryPair(d.U_minus, d.U_plus);
  }
  return vp;
}

Grid problem_grid(const ProblemDescription& d, double diff_scale) {
  if (d.has_grid) return Grid(d.half_width, d.n_points);
  return default_grid(diff_scale);
}

// ---------------------------------------------------------------------------
// verification check lists (shared between solve commands and `verify`)

std::vector<CheckResult> scalar_checks(const Profile& profile, const ScalarDiffusivity& D) {
  std::vector<CheckResult> checks;
  int n = profile.grid.n_points;
  double um = profile.boundary.U_minus(0), up = profile.boundary.U_plus(0);
  double mismatch = std::max(std::abs(profile.U.front()(0) - um),
                             std::abs(profile.U.back()(0) - up));
  checks.push_back({"boundary_mismatch", mismatch, 1e-6, mismatch <= 1e-6});

  double U0 = profile.U[static_cast<size_t>(profile.grid.center_index())](0);
  double Q0 = profile.Q[static_cast<size_t>(profile.grid.center_index())](0);
  if (D.D_star > 0.0) {
    auto [u0b, q0b] = q0_u0_brackets(D.D_star, D.D_sup, um, up);
    double slack = 1e-9 * std::max(1.0, std::abs(up - um));
    checks.push_back({"u0_bracket_low", U0, u0b.lo, U0 >= u0b.lo - slack});
    checks.push_back({"u0_bracket_high", U0, u0b.hi, U0 <= u0b.hi + slack});
    checks.push_back({"q0_bracket_low", Q0, q0b.lo, Q0 >= q0b.lo - slack});
    checks.push_back({"q0_bracket_high", Q0, q0b.hi, Q0 <= q0b.hi + slack});
    GaussianBoundReport gb = verify_gaussian_bounds(profile, D.D_sup, 1.02);
    checks.push_back({"gaussian_envelope", gb.worst_ratio, 1.02, gb.ok});
  } else {
    SupportEndpoints se = support_endpoints(D, um, up, U0, Q0);
    checks.push_back({"free_boundary_left_bound", se.y_minus, 0.0, se.y_minus <= 0.0});
    checks.push_back({"free_boundary_right_bound", se.y_plus, 0.0, se.y_plus >= 0.0});
  }
  (void)n;
  return checks;
}

std::vector<CheckResult> vector_checks(const Profile& profile, const VectorFluxMap& A) {
  std::vector<CheckResult> checks;
  double h = profile.grid.spacing;
  double delta = profile.boundary.delta_pm();
  double mismatch = 0.0;
  for (int c = 0; c < profile.dim(); ++c)
    mismatch = std::max({mismatch, std::abs(profile.U.front()(c) - profile.boundary.U_minus(c)),
                         std::abs(profile.U.back()(c) - profile.boundary.U_plus(c))});
  checks.push_back({"boundary_mismatch", mismatch, 1e-6, mismatch <= 1e-6});

  double weak = verify_weak_residual(profile, A);
  double weak_bound = h * h * std::max(1.0, delta);
  checks.push_back({"weak_residual", weak, weak_bound, weak <= weak_bound});

  IntegralRelations rel = integral_relations(profile, A);
  double m0 = rel.moment0.lpNorm<Eigen::Infinity>() / std::max(delta, 1.0);
  VectorXd ajump = A.A(profile.boundary.U_plus) - A.A(profile.boundary.U_minus);
  double m1 = rel.moment1_residual.lpNorm<Eigen::Infinity>() /
              std::max(ajump.lpNorm<Eigen::Infinity>(), 1.0);
  // trapezoid moments converge at O(h^2); 1e-5 is attainable on the default grid
  double moment_bound = std::max(1e-5, 0.2 * h * h);
  checks.push_back({"moment0_residual", m0, moment_bound, m0 <= moment_bound});
  checks.push_back({"moment1_residual", m1, moment_bound, m1 <= moment_bound});
  checks.push_back({"tail_decay", rel.decay_ok ? 1.0 : 0.0, 1.0, rel.decay_ok});

  if (A.delta > 0.0 && A.a_lo > 0.0) {
    CertifiedConstants constants;
    constants.a_lo_est = A.a_lo;
    constants.a_up_est = A.a_up;
    constants.delta_est = A.delta;
    TildeU tilde(profile.boundary, A.a_up);
    double slack = 1.02 + h;  // envelope check carries the discretization slack
    TheoremEstimates est = verify_theorem_estimates(profile, A, constants, tilde, slack);
    checks.push_back({"flux_envelope", est.flux_envelope_worst_ratio, slack,
                      est.flux_envelope_ok});
  }
  return checks;
}

// ---------------------------------------------------------------------------
// command implementations

int run_profile_scalar(const ProblemDescription& d, const RunConfig& config,
                       ReportWriter& report, const std::string& out_dir) {
  (void)config;
  ScalarDiffusivity D = build_diffusivity(d, d.U_minus(0), d.U_plus(0));
  ScalarSolveConfig cfg;
  cfg.grid = problem_grid(d, D.D_sup);
  if (!d.eps_schedule.empty()) cfg.eps_schedule = d.eps_schedule;
  cfg.shoot_tol = d.shoot_tol;

  Profile profile;
  ScalarReport srep;
  try {
    std::tie(profile, srep) = solve_scalar(D, d.U_minus(0), d.U_plus(0), cfg);
  } catch (const std::exception& e) {
    return report.finish(kExitSolver, {}, {std::string("solver failure: ") + e.what()});
  }
  write_profile_csv((std::filesystem::path(out_dir) / "profile.csv").string(), profile);
  report.report["solver"] = {{"U0", jnum(srep.U0)},
                             {"Q0", jnum(srep.Q0)},
                             {"y_minus_star", jnum(srep.y_minus_star)},
                             {"y_plus_star", jnum(srep.y_plus_star)}};
  std::vector<CheckResult> checks = scalar_checks(profile, D);
  bool all = true;
  for (const auto& c : checks) all = all && c.pass;
  return report.finish(all ? kExitOk : kExitCheck, checks, {});
}

int run_profile_vector(const ProblemDescription& d, const RunConfig& config,
                       ReportWriter& report, const std::string& out_dir) {
  VectorProblem vp = build_vector_problem(d);
  VectorSolveConfig cfg;
  cfg.grid = problem_grid(d, vp.A.a_up);
  cfg.eps_schedule = d.eps_schedule;
  cfg.newton_tol = d.newton_tol;
  cfg.newton_max_iter = d.newton_max_iter;
  cfg.damping = d.damping;
  cfg.initial_noise = d.initial_noise;
  cfg.seed = config.seed;

  Profile profile;
  VectorSolveReport vrep;
  try {
    profile = solve_vector(vp.A, vp.boundary, cfg, &vrep);
  } catch (const std::exception& e) {
    return report.finish(kExitSolver, {}, {std::string("solver failure: ") + e.what()});
  }
  write_profile_csv((std::filesystem::path(out_dir) / "profile.csv").string(), profile);
  report.report["solver"] = {{"final_eps", jnum(vrep.final_eps)},
                             {"final_residual", jnum(vrep.final_residual)},
                             {"regularized", vrep.regularized},
                             {"newton_iterations", vrep.total_newton_iterations}};
  std::vector<CheckResult> checks = vector_checks(profile, vp.A);
  bool all = true;
  for (const auto& c : checks) all = all && c.pass;
  return report.finish(all ? kExitOk : kExitCheck, checks, {});
}

int run_reduce(const ProblemDescription& d, const RunConfig& config, ReportWriter& report,
               const std::string& out_dir) {
  MatrixXd Q = build_Q(d.network);
  {
    std::ofstream out(std::filesystem::path(out_dir) / "q_matrix.csv", std::ios::binary);
    for (Eigen::Index i = 0; i < Q.rows(); ++i) {
      for (Eigen::Index j = 0; j < Q.cols(); ++j)
        out << (j ? "," : "") << fmt17(Q(i, j));
      out << "\n";
    }
  }
  report.report["reduced_dimension"] = Q.rows();

  // spot-check the equilibrium parametrization on seeded random states
  std::mt19937 rng(config.seed);
  std::uniform_real_distribution<double> unif(0.1, 2.0);
  double worst_identity = 0.0, worst_rate = 0.0;
  bool converged = true;
  for (int s = 0; s < 100; ++s) {
    VectorXd c(d.network.species_count);
    for (int i = 0; i < c.size(); ++i) c(i) = unif(rng);
    VectorXd u = Q * c;
    PsiResult psi = psi_general(d.network, Q, u);
    converged = converged && psi.converged;
    worst_identity = std::max(worst_identity, (Q * psi.c - u).lpNorm<Eigen::Infinity>() /
                                                  std::max(1.0, u.lpNorm<Eigen::Infinity>()));
    worst_rate = std::max(worst_rate, d.network.rate(psi.c).lpNorm<Eigen::Infinity>());
  }
  std::vector<CheckResult> checks;
  checks.push_back({"psi_right_inverse", worst_identity, 1e-9, worst_identity <= 1e-9});
  checks.push_back({"psi_equilibrates_rate", worst_rate, 1e-9, worst_rate <= 1e-9});
  checks.push_back({"psi_converged", converged ? 1.0 : 0.0, 1.0, converged});

  if (config.check_monotonicity) {
    if (d.network.species_count != 3 || d.d_diag.size() != 3)
      return report.finish(kExitValidation, checks,
                           {"--check-monotonicity needs a three-species network with d"});
    bool ok = monotonicity_lemma_check(d.d_diag(0), d.d_diag(1), d.d_diag(2));
    double ratio = std::max(d.d_diag(0), d.d_diag(1)) / d.d_diag(2);
    checks.push_back({"monotonicity_lemma", ratio, 3.0 + std::sqrt(8.0), ok});
  }
  bool all = true;
  for (const auto& c : checks) all = all && c.pass;
  return report.finish(all ? kExitOk : kExitCheck, checks, {});
}

int run_lift(const ProblemDescription& d, const RunConfig& config, ReportWriter& report,
             const std::string& out_dir) {
  VectorProblem vp = build_vector_problem(d);
  VectorSolveConfig cfg;
  cfg.grid = problem_grid(d, vp.A.a_up);
  cfg.eps_schedule = d.eps_schedule;
  cfg.newton_tol = d.newton_tol;
  cfg.newton_max_iter = d.newton_max_iter;
  cfg.damping = d.damping;
  cfg.seed = config.seed;

  Profile profile;
  try {
    profile = solve_vector(vp.A, vp.boundary, cfg);
  } catch (const std::exception& e) {
    return report.finish(kExitSolver, {}, {std::string("solver failure: ") + e.what()});
  }

  MatrixXd Q = build_Q(d.network);
  LiftedProfile lifted = lift_profile(profile, [&](const VectorXd& u) {
    return psi_general(d.network, Q, u).c;
  });
  lifted.C.boundary = BoundaryPair(d.C_minus, d.C_plus);
  write_profile_csv((std::filesystem::path(out_dir) / "profile.csv").string(), lifted.C);

  std::vector<CheckResult> checks;
  double mismatch = 0.0;
  for (int c = 0; c < d.network.species_count; ++c)
    mismatch = std::max({mismatch, std::abs(lifted.C.U.front()(c) - d.C_minus(c)),
                         std::abs(lifted.C.U.back()(c) - d.C_plus(c))});
  checks.push_back({"c_boundary_mismatch", mismatch, 0.1, mismatch <= 0.1});
  checks.push_back(
      {"lift_feasible", lifted.all_feasible ? 1.0 : 0.0, 1.0, lifted.all_feasible});
  MultiplierReport mult = lagrange_multiplier(lifted.C, d.d_diag, d.network);
  checks.push_back({"multiplier_off_residual", mult.max_off_residual, 1e-2,
                    mult.max_off_residual <= 1e-2});
  report.report["solver"] = {{"max_lambda_norm", jnum(mult.max_lambda_norm)}};
  bool all = true;
  for (const auto& c : checks) all = all && c.pass;
  return report.finish(all ? kExitOk : kExitCheck, checks, {});
}

int run_evolve(const ProblemDescription& d, const RunConfig& config, ReportWriter& report,
               const std::string& out_dir) {
  (void)config;
  double um = d.U_minus(0), up = d.U_plus(0);
  ScalarDiffusivity D = build_diffusivity(d, um, up);
  ScalarSolveConfig cfg;
  cfg.grid = problem_grid(d, D.D_sup);
  if (!d.eps_schedule.empty()) cfg.eps_schedule = d.eps_schedule;
  cfg.shoot_tol = d.shoot_tol;

  bool is_pme = d.diffusivity_name == "pme";
  double m = is_pme ? d.diffusivity_param : 1.0;
  ScalarFluxMap A = is_pme ? pme_flux(m) : linear_flux(d.diffusivity_param);
  EntropyDensity phi = is_pme ? make_phi_m(m) : make_phi_pq(0.5, -1.0);

  Profile profile;
  ScalarReport srep;
  std::vector<CheckResult> checks;
  try {
    std::tie(profile, srep) = solve_scalar(D, um, up, cfg);

    const Grid& grid = cfg.grid;
    int n = grid.n_points;
    VectorXd U(n);
    for (int i = 0; i < n; ++i) U(i) = profile.U[static_cast<size_t>(i)](0);

    SigmaReport sigma =
        is_pme ? sigma_check_pme(profile, m)
               : sigma_check_lipschitz(profile, /*C_A=*/0.0, /*a_lo=*/d.diffusivity_param);

    EvolutionState state;
    state.grid = grid;
    state.tau = 0.0;
    state.u = VectorXd(n);
    for (int i = 0; i < n; ++i) {
      double t = (grid.node(i) - d.bump_center) / d.bump_width;
      double b = std::abs(t) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - t * t)) : 0.0;
      state.u(i) = U(i) * (1.0 + d.bump_amplitude * b);
    }

    std::ostringstream traj;
    traj << "tau,H_phi,hellinger,moment0,moment1\n";
    std::vector<double> taus, entropies;
    double max_increase = 0.0, prev_H = kInf;
    auto record = [&](const EvolutionState& s) {
      double H = relative_entropy(s.u, U, phi, grid);
      double hel = hellinger(s.u, U, grid);
      VectorXd f0(n), f1(n);
      for (int i = 0; i < n; ++i) {
        double y = grid.node(i);
        double dev = s.u(i) - profile.boundary.step(y)(0);
        f0(i) = dev;
        f1(i) = -y * dev;
      }
      double m0 = trapezoid(std::vector<double>(f0.data(), f0.data() + n), grid.spacing);
      double m1 = trapezoid(std::vector<double>(f1.data(), f1.data() + n), grid.spacing);
      traj << fmt17(s.tau) << "," << fmt17(H) << "," << fmt17(hel) << "," << fmt17(m0) << ","
           << fmt17(m1) << "\n";
      if (std::isfinite(prev_H) && prev_H > 0.0)
        max_increase = std::max(max_increase, H / prev_H - 1.0);
      prev_H = H;
      if (s.tau >= d.fit_tau_min && H > 0.0) {
        taus.push_back(s.tau);
        entropies.push_back(H);
      }
    };

    record(state);
    int step = 0;
    while (state.tau < d.tau_end - 1e-12) {
      double dt = suggested_dt(state, A);
      state = step_pde(state, A, dt);
      if (++step % d.record_stride == 0) record(state);
    }
    std::ofstream out(std::filesystem::path(out_dir) / "trajectory.csv", std::ios::binary);
    out << traj.str();

    double cap = m * (m - 1.0) * (m - 1.0);
    checks.push_back({"sigma_hypothesis", sigma.Sigma, cap > 0.0 ? 1.0 / cap : kInf,
                      sigma.hypothesis_ok});
    checks.push_back({"entropy_monotone", max_increase, 1e-10, max_increase <= 1e-10});
    if (taus.size() >= 10) {
      DecayFit fit = decay_rate_fit(taus, entropies);
      checks.push_back({"lambda_est", fit.lambda, sigma.Lambda_predicted - 0.02,
                        fit.lambda >= sigma.Lambda_predicted - 0.02});
      report.report["solver"] = {{"Lambda_predicted", jnum(sigma.Lambda_predicted)},
                                 {"Lambda_est", jnum(fit.lambda)},
                                 {"fit_residual", jnum(fit.residual)}};
    } else {
      checks.push_back({"lambda_est", 0.0, 0.0, false});
    }
  } catch (const std::exception& e) {
    return report.finish(kExitSolver, {}, {std::string("solver failure: ") + e.what()});
  }
  bool all = true;
  for (const auto& c : checks) all = all && c.pass;
  return report.finish(all ? kExitOk : kExitCheck, checks, {});
}

int run_verify(const ProblemDescription& d, const RunConfig& config, ReportWriter& report,
               const std::string& out_dir) {
  (void)config;
  (void)out_dir;
  std::vector<CheckResult> checks;
  try {
    if (d.has_fluxmap || d.has_network) {
      VectorProblem vp = build_vector_problem(d);
      Profile profile = read_profile_csv(d.profile_csv, vp.boundary);
      checks = vector_checks(profile, vp.A);
    } else {
      BoundaryPair boundary(d.U_minus, d.U_plus);
      Profile profile = read_profile_csv(d.profile_csv, boundary);
      ScalarDiffusivity D = build_diffusivity(d, d.U_minus(0), d.U_plus(0));
      checks = scalar_checks(profile, D);
    }
  } catch (const std::exception& e) {
    return report.finish(kExitValidation, {}, {std::string("verify: ") + e.what()});
  }
  bool all = true;
  for (const auto& c : checks) all = all && c.pass;
  return report.finish(all ? kExitOk : kExitCheck, checks, {});
}

int run_oracle(const ProblemDescription& d, const RunConfig& config, ReportWriter& report,
               const std::string& out_dir) {
  (void)config;
  Profile profile;
  try {
    OracleId id = oracle_id_from_string(d.diffusivity_name);
    Grid grid = problem_grid(d, d.diffusivity_name == "linear" ? d.diffusivity_param : 1.0);
    profile = closed_form_oracle(id, grid, d.diffusivity_param);
  } catch (const std::exception& e) {
    return report.finish(kExitValidation, {}, {std::string("oracle: ") + e.what()});
  }
  write_profile_csv((std::filesystem::path(out_dir) / "profile.csv").string(), profile);
  return report.finish(kExitOk, {}, {});
}

}  // namespace

void write_profile_csv(const std::string& path, const Profile& profile) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  int m = profile.dim();
  out << "y";
  for (int c = 1; c <= m; ++c) out << ",U_" << c;
  for (int c = 1; c <= m; ++c) out << ",Q_" << c;
  out << "\n";
  for (int i = 0; i < profile.grid.n_points; ++i) {
    out << fmt17(profile.grid.nodes()[static_cast<size_t>(i)]);
    for (int c = 0; c < m; ++c) out << "," << fmt17(profile.U[static_cast<size_t>(i)](c));
    for (int c = 0; c < m; ++c) out << "," << fmt17(profile.Q[static_cast<size_t>(i)](c));
    out << "\n";
  }
}

Profile read_profile_csv(const std::string& path, const BoundaryPair& boundary) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error(path + ": empty file");
  int columns = 1 + static_cast<int>(std::count(header.begin(), header.end(), ','));
  if (columns < 3 || columns % 2 == 0)
    throw std::runtime_error(path + ": expected columns y, U_1..U_m, Q_1..Q_m");
  int m = (columns - 1) / 2;
  if (m != boundary.dim())
    throw std::runtime_error(path + ": profile dimension does not match the boundary data");

  std::vector<double> ys;
  std::vector<VectorXd> us, qs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    row.imbue(std::locale::classic());
    std::vector<double> vals;
    std::string cell;
    while (std::getline(row, cell, ',')) {
      std::istringstream num(cell);
      num.imbue(std::locale::classic());
      double v;
      if (!(num >> v)) throw std::runtime_error(path + ": bad number '" + cell + "'");
      vals.push_back(v);
    }
    if (static_cast<int>(vals.size()) != columns)
      throw std::runtime_error(path + ": ragged row");
    ys.push_back(vals[0]);
    us.push_back(Eigen::Map<VectorXd>(vals.data() + 1, m));
    qs.push_back(Eigen::Map<VectorXd>(vals.data() + 1 + m, m));
  }
  int n = static_cast<int>(ys.size());
  if (n < 3 || n % 2 == 0) throw std::runtime_error(path + ": need an odd number of rows >= 3");
  Profile profile;
  profile.grid = Grid(ys.back(), n);
  profile.U = std::move(us);
  profile.Q = std::move(qs);
  profile.boundary = boundary;
  return profile;
}

int run(const RunConfig& config) {
  std::filesystem::create_directories(config.out_dir);
  ReportWriter report(config, config.out_dir);

  ParseResult parsed = parse_problem(config.problem_path, config.overrides);
  std::vector<std::string> errors = parsed.errors;
  std::vector<std::string> missing = validate_for_command(parsed.description, config.command);
  errors.insert(errors.end(), missing.begin(), missing.end());
  if (!errors.empty()) return report.finish(kExitValidation, {}, errors);

  const ProblemDescription& d = parsed.description;
  try {
    switch (config.command) {
      case Command::ProfileScalar: return run_profile_scalar(d, config, report, config.out_dir);
      case Command::ProfileVector: return run_profile_vector(d, config, report, config.out_dir);
      case Command::Reduce: return run_reduce(d, config, report, config.out_dir);
      case Command::Lift: return run_lift(d, config, report, config.out_dir);
      case Command::Evolve: return run_evolve(d, config, report, config.out_dir);
      case Command::Verify: return run_verify(d, config, report, config.out_dir);
      case Command::Oracle: return run_oracle(d, config, report, config.out_dir);
    }
  } catch (const std::exception& e) {
    return report.finish(kExitSolver, {}, {std::string("failure: ") + e.what()});
  }
  return report.finish(kExitValidation, {}, {"unknown command"});
}

}  // namespace simprof
