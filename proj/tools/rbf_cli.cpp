// rbf: command-line front end for the solvers, generators and metrics.
//
// Exit codes: 0 success, 1 I/O or parse failure, 2 bad flags or invalid
// configuration, 3 max_iter reached (results are still written).

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rbf/cpcp.hpp"
#include "rbf/data.hpp"
#include "rbf/errors.hpp"
#include "rbf/measurement.hpp"
#include "rbf/metrics.hpp"
#include "rbf/rmc.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitMaxIter = 3;

// Thrown for configuration problems detected after flag parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Reads key=value lines and files section-less keys under the subcommand that
// was selected on the command line, so `rbf rmc --config f` sees `tol=...`.
class SubcommandConfig : public CLI::ConfigINI {
 public:
  explicit SubcommandConfig(const CLI::App* app) : app_(app) {}

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    auto items = CLI::ConfigINI::from_config(input);
    const auto active = app_->get_subcommands();
    if (active.empty()) return items;
    for (auto& item : items)
      if (item.parents.empty()) item.parents = {active.front()->get_name()};
    return items;
  }

 private:
  const CLI::App* app_;
};

struct SolverFlags {
  std::optional<double> lambda;
  std::size_t rank = 10;
  double rho = 1.1;
  std::optional<double> alpha0;
  double alpha_max = 1e10;
  double tol = 1e-4;
  std::optional<int> max_iter;
  bool adjust_rank = false;
  std::uint64_t seed = 0;
  std::string out_dir;

  rbf::SolverConfig config() const {
    rbf::SolverConfig cfg;
    cfg.lambda = lambda;
    cfg.rank = rank;
    cfg.rho = rho;
    cfg.alpha0 = alpha0;
    cfg.alpha_max = alpha_max;
    cfg.tol = tol;
    cfg.max_iter = max_iter;
    cfg.adjust_rank = adjust_rank;
    cfg.seed = seed;
    return cfg;
  }
};

void add_solver_flags(CLI::App& cmd, SolverFlags& f) {
  cmd.add_option("--lambda", f.lambda, "trace-norm weight (default sqrt(max(m, n)))");
  cmd.add_option("--rank", f.rank, "initial working rank d")->capture_default_str();
  cmd.add_option("--rho", f.rho, "penalty growth factor")->capture_default_str();
  cmd.add_option("--alpha0", f.alpha0, "initial penalty (default 1/||data||)");
  cmd.add_option("--alpha-max", f.alpha_max, "penalty cap")->capture_default_str();
  cmd.add_option("--tol", f.tol, "stopping tolerance")->capture_default_str();
  cmd.add_option("--max-iter", f.max_iter, "iteration cap");
  cmd.add_flag("--adjust-rank", f.adjust_rank, "reduce d once at a clear spectral gap");
  cmd.add_option("--seed", f.seed, "seed for randomized steps")->capture_default_str();
  cmd.add_option("--out-dir", f.out_dir, "directory for u.txt, v.txt, s.txt, trace.csv")->required();
}

// Validates before any file is touched so configuration errors win over I/O.
rbf::SolverConfig checked_config(const SolverFlags& f) {
  const rbf::SolverConfig cfg = f.config();
  std::vector<std::string> warnings;
  try {
    warnings = cfg.validate();
  } catch (const rbf::ArgumentError& e) {
    throw UsageError(e.what());
  }
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  return cfg;
}

fs::path ensure_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw std::runtime_error("cannot create " + dir + ": " + ec.message());
  return p;
}

int report(const rbf::SolveResult& res, const fs::path& out, bool with_ratio) {
  rbf::save_matrix(out / "u.txt", res.u);
  rbf::save_matrix(out / "v.txt", res.v);
  rbf::save_matrix(out / "s.txt", res.s);
  rbf::save_trace_csv(out / "trace.csv", res.trace, with_ratio);
  const double residual = res.trace.empty() ? 0.0 : res.trace.back().residual;
  std::cout << "termination=" << rbf::to_string(res.termination) << " iters=" << res.iterations()
            << " residual=" << rbf::format_double(residual, 6) << '\n';
  return res.termination == rbf::Termination::converged ? kExitOk : kExitMaxIter;
}

rbf::DenseMatrix as_matrix(std::span<const double> v) {
  return rbf::DenseMatrix(v.size(), 1, std::vector<double>(v.begin(), v.end()));
}

std::string format_metric(double v) { return v == 0.0 ? "0.000000" : rbf::format_double(v, 6); }

// ---------------------------------------------------------------------------

struct SynthFlags {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t rank = 0;
  double spike_frac = 0.0;
  double magnitude = 1.0;
  double obs_frac = 1.0;
  std::uint64_t seed = 0;
  std::optional<std::size_t> subspace_dim;
  std::uint64_t subspace_seed = 0;
  std::string out_dir;
};

int run_synth(const SynthFlags& f) {
  rbf::PlantedSpec spec{f.rows, f.cols, f.rank, f.spike_frac, f.magnitude, f.obs_frac, f.seed};
  rbf::PlantedProblem prob;
  try {
    prob = rbf::generate_planted(spec);
  } catch (const rbf::ArgumentError& e) {
    throw UsageError(e.what());
  }
  std::optional<rbf::SubspaceOperator> q;
  if (f.subspace_dim) {
    try {
      q = rbf::draw_random_subspace(f.rows, f.cols, *f.subspace_dim, f.subspace_seed);
    } catch (const rbf::ArgumentError& e) {
      throw UsageError(e.what());
    }
  }
  const fs::path out = ensure_dir(f.out_dir);
  rbf::save_matrix(out / "d_obs.txt", prob.d_obs);
  rbf::save_mask(out / "mask.txt", prob.mask);
  rbf::save_matrix(out / "l0.txt", prob.l0);
  rbf::save_matrix(out / "s0.txt", prob.s0);
  if (q) rbf::save_matrix(out / "measurements.txt", as_matrix(q->forward(prob.l0 + prob.s0)));
  return kExitOk;
}

struct RatingsFlags {
  std::string input;
  std::size_t users = 300;
  std::size_t items = 200;
  std::size_t rank = 5;
  double density = 0.3;
  double noise = 0.3;
  std::uint64_t seed = 0;
  std::string out_dir;
};

int run_ratings(const RatingsFlags& f) {
  rbf::RatingDataset data;
  if (!f.input.empty()) {
    data = rbf::load_ratings(f.input, f.seed);
  } else {
    try {
      data = rbf::generate_ratings({f.users, f.items, f.rank, f.density, f.noise, f.seed});
    } catch (const rbf::ArgumentError& e) {
      throw UsageError(e.what());
    }
  }
  const rbf::RatingMatrix train = rbf::ratings_to_matrix(data, data.train);
  std::vector<rbf::Rating> test;
  test.reserve(data.test.size());
  for (std::size_t k : data.test) test.push_back(data.triplets[k]);

  const fs::path out = ensure_dir(f.out_dir);
  rbf::save_matrix(out / "d_obs.txt", train.values);
  rbf::save_mask(out / "mask.txt", train.mask);
  rbf::save_triplets(out / "test.txt", test);
  return kExitOk;
}

struct MatrixInputFlags {
  std::string data;
  std::string mask;
};

enum class Solver { rmc, rpca, mc };

int run_matrix_solver(Solver which, const MatrixInputFlags& in, const SolverFlags& f) {
  const rbf::SolverConfig cfg = checked_config(f);
  const rbf::DenseMatrix d = rbf::load_matrix(in.data);
  std::optional<rbf::ObservationMask> mask;
  if (which != Solver::rpca) mask = rbf::load_mask(in.mask);
  const fs::path out = ensure_dir(f.out_dir);

  rbf::SolveResult res;
  try {
    switch (which) {
      case Solver::rmc: res = rbf::solve_rmc(d, *mask, cfg); break;
      case Solver::rpca: res = rbf::solve_rpca(d, cfg); break;
      case Solver::mc: res = rbf::solve_mc(d, *mask, cfg); break;
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return report(res, out, false);
}

struct CpcpFlags {
  std::string measurements;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t subspace_dim = 0;
  std::uint64_t subspace_seed = 0;
};

int run_cpcp(const CpcpFlags& in, const SolverFlags& f) {
  const rbf::SolverConfig cfg = checked_config(f);
  const rbf::DenseMatrix y = rbf::load_matrix(in.measurements);
  if (y.cols() != 1) throw UsageError("measurements file must hold a single column");
  const fs::path out = ensure_dir(f.out_dir);

  rbf::SolveResult res;
  try {
    const rbf::SubspaceOperator q =
        rbf::draw_random_subspace(in.rows, in.cols, in.subspace_dim, in.subspace_seed);
    res = rbf::solve_cpcp(y.data(), q, cfg);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return report(res, out, true);
}

struct EvalFlags {
  std::string estimate_dir;
  std::string truth_dir;
  std::string metric;
  std::string test_file;
};

int run_eval(const EvalFlags& f) {
  const fs::path est(f.estimate_dir);
  double value = 0.0;
  if (f.metric == "rmse") {
    if (f.test_file.empty()) throw UsageError("--metric rmse requires --test-file");
    const rbf::DenseMatrix l = rbf::matmul_nt(rbf::load_matrix(est / "u.txt"), rbf::load_matrix(est / "v.txt"));
    const std::vector<rbf::Rating> test = rbf::load_triplets(f.test_file);
    try {
      value = rbf::rmse(l, test);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  } else {
    if (f.truth_dir.empty()) throw UsageError("--metric " + f.metric + " requires --truth-dir");
    const fs::path truth(f.truth_dir);
    try {
      if (f.metric == "relerr") {
        const rbf::DenseMatrix l =
            rbf::matmul_nt(rbf::load_matrix(est / "u.txt"), rbf::load_matrix(est / "v.txt"));
        value = rbf::relative_error(l, rbf::load_matrix(truth / "l0.txt"));
      } else {
        const auto scored = rbf::outlier_scores(rbf::load_matrix(est / "s.txt"),
                                                rbf::load_matrix(truth / "s0.txt"),
                                                rbf::load_mask(truth / "mask.txt"));
        value = rbf::auc(scored.scores, scored.labels);
      }
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  std::cout << "metric=" << f.metric << " value=" << format_metric(value) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust bilinear factorization: RMC, RPCA, matrix completion and CPCP"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file for the subcommand; explicit flags take precedence");
  app.config_formatter(std::make_shared<SubcommandConfig>(&app));
  app.fallthrough();

  SynthFlags synth;
  auto* synth_cmd = app.add_subcommand("synth", "generate a planted low-rank + sparse problem");
  synth_cmd->add_option("--rows", synth.rows)->required()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--cols", synth.cols)->required()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--rank", synth.rank)->required()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--spike-frac", synth.spike_frac)->capture_default_str()->check(CLI::Range(0.0, 1.0));
  synth_cmd->add_option("--magnitude", synth.magnitude, "spike magnitude")->capture_default_str();
  synth_cmd->add_option("--obs-frac", synth.obs_frac)->capture_default_str()->check(CLI::Range(0.0, 1.0));
  synth_cmd->add_option("--seed", synth.seed)->capture_default_str();
  synth_cmd->add_option("--subspace-dim", synth.subspace_dim, "also write p random measurements");
  synth_cmd->add_option("--subspace-seed", synth.subspace_seed)->capture_default_str();
  synth_cmd->add_option("--out-dir", synth.out_dir)->required();

  RatingsFlags ratings;
  auto* ratings_cmd =
      app.add_subcommand("ratings", "split a ratings file (or synthetic ratings) 9:1 into train/test");
  ratings_cmd->add_option("--input", ratings.input, "\"user item rating [timestamp]\" file");
  ratings_cmd->add_option("--users", ratings.users)->capture_default_str();
  ratings_cmd->add_option("--items", ratings.items)->capture_default_str();
  ratings_cmd->add_option("--rank", ratings.rank)->capture_default_str();
  ratings_cmd->add_option("--density", ratings.density)->capture_default_str();
  ratings_cmd->add_option("--noise", ratings.noise)->capture_default_str();
  ratings_cmd->add_option("--seed", ratings.seed)->capture_default_str();
  ratings_cmd->add_option("--out-dir", ratings.out_dir)->required();

  SolverFlags solver;
  MatrixInputFlags matrix_in;
  auto add_matrix_cmd = [&](const char* name, const char* help, bool needs_mask) {
    auto* cmd = app.add_subcommand(name, help);
    cmd->add_option("--data", matrix_in.data, "observation matrix file")->required();
    auto* m = cmd->add_option("--mask", matrix_in.mask, "observation mask file");
    if (needs_mask) m->required();
    add_solver_flags(*cmd, solver);
    return cmd;
  };
  auto* rmc_cmd = add_matrix_cmd("rmc", "robust matrix completion", true);
  auto* rpca_cmd = add_matrix_cmd("rpca", "robust PCA (fully observed)", false);
  auto* mc_cmd = add_matrix_cmd("mc", "matrix completion", true);

  CpcpFlags cpcp;
  auto* cpcp_cmd = app.add_subcommand("cpcp", "compressive principal component pursuit");
  cpcp_cmd->add_option("--measurements", cpcp.measurements, "single-column measurement file")->required();
  cpcp_cmd->add_option("--rows", cpcp.rows)->required()->check(CLI::PositiveNumber);
  cpcp_cmd->add_option("--cols", cpcp.cols)->required()->check(CLI::PositiveNumber);
  cpcp_cmd->add_option("--subspace-dim", cpcp.subspace_dim)->required()->check(CLI::PositiveNumber);
  cpcp_cmd->add_option("--subspace-seed", cpcp.subspace_seed)->required();
  add_solver_flags(*cpcp_cmd, solver);

  EvalFlags eval;
  auto* eval_cmd = app.add_subcommand("eval", "score a solver output");
  eval_cmd->add_option("--estimate-dir", eval.estimate_dir)->required();
  eval_cmd->add_option("--truth-dir", eval.truth_dir);
  eval_cmd->add_option("--metric", eval.metric)->required()->check(CLI::IsMember({"relerr", "auc", "rmse"}));
  eval_cmd->add_option("--test-file", eval.test_file);

  app.allow_config_extras(CLI::config_extras_mode::error);
  for (auto* cmd : app.get_subcommands({})) cmd->allow_config_extras(CLI::config_extras_mode::error);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    const auto active = app.get_subcommands();
    std::cerr << (active.empty() ? app.help() : active.front()->help());
    return kExitUsage;
  }

  try {
    if (*synth_cmd) return run_synth(synth);
    if (*ratings_cmd) return run_ratings(ratings);
    if (*rmc_cmd) return run_matrix_solver(Solver::rmc, matrix_in, solver);
    if (*rpca_cmd) return run_matrix_solver(Solver::rpca, matrix_in, solver);
    if (*mc_cmd) return run_matrix_solver(Solver::mc, matrix_in, solver);
    if (*cpcp_cmd) return run_cpcp(cpcp, solver);
    if (*eval_cmd) return run_eval(eval);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}
