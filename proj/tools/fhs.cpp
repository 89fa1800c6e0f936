#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fhs/config.hpp"
#include "fhs/csv.hpp"
#include "fhs/errors.hpp"
#include "fhs/experiment.hpp"
#include "fhs/extmodels.hpp"
#include "fhs/metrics.hpp"
#include "fhs/realdata.hpp"
#include "fhs/summary.hpp"
#include "fhs/svg.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct Common {
  std::string config;
  int kn = -1;
  double a = -1.0;
  std::string b;
  int iters = -1;
  int burnin = -1;
  long long seed = -1;
  std::string out;
  bool save_draws = false;
  std::string null;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "INI file with [prior], [sampler], [simulation] sections");
  app->add_option("--kn", c.kn, "number of B-spline basis functions (default 8)");
  app->add_option("--a", c.a, "Beta(a, b) shape near omega = 0 (default 0.5)");
  app->add_option("--b", c.b, "Beta(a, b) shape near omega = 1, or 'auto' for exp(-kn log(n) / 2)");
  app->add_option("--iters", c.iters, "MCMC iterations (default 30000)");
  app->add_option("--burnin", c.burnin, "discarded iterations (default 10000)");
  app->add_option("--seed", c.seed, "master seed");
  app->add_option("--out", c.out, "output directory");
  app->add_flag("--save-draws", c.save_draws, "write per-iteration draws");
  app->add_option("--null", c.null, "null class: none, constant, linear, quadratic, piecewise-linear");
}

void apply_common(const Common& c, fhs::FhsConfig& cfg, fhs::SimulationSpec& spec) {
  if (!c.config.empty()) fhs::load_config(std::filesystem::path(c.config), cfg, spec);
  if (c.kn != -1) cfg.k_n = c.kn;
  if (c.a != -1.0) cfg.a = c.a;
  if (!c.b.empty()) {
    if (c.b == "auto") {
      cfg.b.reset();
    } else {
      try {
        cfg.b = std::stod(c.b);
      } catch (const std::exception&) {
        throw fhs::ConfigError("--b must be a number or 'auto'");
      }
    }
  }
  if (c.iters != -1) cfg.n_iter = c.iters;
  if (c.burnin != -1) cfg.n_burnin = c.burnin;
  if (c.seed != -1) {
    if (c.seed < 0) throw fhs::ConfigError("--seed must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(c.seed);
    spec.master_seed = cfg.seed;
  }
  if (!c.null.empty()) spec.null = fhs::parse_null_space(c.null);
  cfg.validate();
}

std::filesystem::path prepare_out(const std::string& out) {
  if (out.empty()) return {};
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw fhs::DataError("cannot create " + out + ": " + ec.message());
  return out;
}

void print_report(const fhs::MetricsReport& r) {
  std::cout << "model " << fhs::to_string(r.spec.model) << ", truth " << r.spec.truth << ", n " << r.spec.n << ", "
            << r.replicates.size() << " replicates (" << r.failures << " failed)\n"
            << "  100xMSE fHS      " << r.mse_fhs_mean << " (" << r.mse_fhs_sd << ")\n"
            << "  100xMSE baseline " << r.mse_baseline_mean << " (" << r.mse_baseline_sd << ")\n"
            << "  mean omega       " << r.omega_mean << '\n';
  if (r.spec.model == fhs::ModelKind::kAdditive) {
    std::cout << "  MCC              " << r.mcc_mean << '\n'
              << "  true model rate  " << r.true_model_rate << '\n'
              << "  spurious         " << r.spurious_mean << '\n';
  }
}

int cmd_simulate(const Common& c, fhs::SimulationSpec spec, const std::string& model, double snr, bool no_plots) {
  fhs::FhsConfig cfg;
  apply_common(c, cfg, spec);
  if (!model.empty()) spec.model = fhs::parse_model(model);
  if (snr > 0.0) spec.snr = snr;
  fhs::ExperimentOptions opts;
  opts.save_draws = c.save_draws;
  opts.plots = !no_plots;
  const auto report = fhs::run_experiment(spec, cfg, prepare_out(c.out), opts);
  print_report(report);
  return report.failures == static_cast<int>(report.replicates.size()) ? kExitNumerical : 0;
}

int cmd_fit(const Common& c, const std::string& model_name, const std::string& data, const std::string& xcol,
            const std::string& ycol, const std::string& wcol) {
  fhs::FhsConfig cfg;
  fhs::SimulationSpec spec;
  apply_common(c, cfg, spec);
  const fhs::ModelKind model = fhs::parse_model(model_name);
  if (model == fhs::ModelKind::kAdditive) throw fhs::ConfigError("use fit-additive for additive models");
  const fhs::CsvTable table = fhs::read_csv(data);
  const Eigen::VectorXd y = table.col(ycol);
  const auto out = prepare_out(c.out);

  fhs::ChainDraws draws;
  std::optional<fhs::BSplineBasis> basis;
  Eigen::VectorXd px, py;
  if (model == fhs::ModelKind::kDensity) {
    auto fit = fhs::fit_logspline(y, cfg);
    basis = fit.model.basis();
    draws = std::move(fit.draws);
    std::cout << "acceptance " << fit.acceptance_rate << '\n';
  } else {
    const Eigen::VectorXd x = table.col(xcol);
    const fhs::NullSpace null = spec.null.value_or(fhs::default_null(model));
    auto fit = model == fhs::ModelKind::kSimple ? fhs::fit_regression(x, y, null, cfg)
                                                : fhs::fit_varying_coefficient({y, table.col(wcol), x}, null, cfg);
    basis = fit.basis;
    draws = std::move(fit.draws);
    if (model == fhs::ModelKind::kSimple) {
      px = x;
      py = y;
    }
  }
  const fhs::FitSummary s =
      fhs::posterior_summary(draws, *basis, spec.level, fhs::linspace(basis->lower(), basis->upper(), 200));
  std::cout << "posterior mean omega " << s.omega_mean << ", sigma2 " << s.sigma2_mean << '\n';
  if (!out.empty()) {
    fhs::CsvTable t{{"x", "mean", "lower", "upper"}, Eigen::MatrixXd(s.grid.size(), 4)};
    t.values << s.grid, s.mean, s.lower, s.upper;
    fhs::write_csv(out / "summary.csv", t);
    fhs::write_band_svg(out / "fit.svg", {"fHS fit", s.grid, s.mean, s.lower, s.upper, {}, px, py});
    if (c.save_draws) {
      std::ofstream d(out / "draws.csv");
      fhs::write_draws_csv(d, draws);
    }
  }
  return 0;
}

int cmd_realdata(const Common& c, fhs::RealDataSpec rd) {
  fhs::FhsConfig cfg;
  fhs::SimulationSpec spec;
  apply_common(c, cfg, spec);
  rd.level = spec.level;
  const auto report = fhs::run_realdata(rd, cfg, prepare_out(c.out));
  std::cout << "folds " << report.folds.size() << ", test error " << report.test_error_mean << " ("
            << report.test_error_sd << "), spurious selected " << report.spurious_mean << '\n'
            << "modal model " << report.modal_model << '\n';
  return 0;
}

int cmd_sample_gp(const Common& c, int n, int paths, const std::string& kernel) {
  fhs::FhsConfig cfg;
  fhs::SimulationSpec spec;
  apply_common(c, cfg, spec);
  if (n < 2) throw fhs::ConfigError("--n must be at least 2");
  fhs::GpShrinkagePrior prior;
  prior.null = spec.null.value_or(fhs::NullSpace::kLinear);
  prior.a = cfg.a;
  prior.b = cfg.b.value_or(1.0 / (static_cast<double>(n) * n));
  if (kernel == "exponential") prior.kernel = fhs::KernelKind::kExponential;
  else if (kernel == "squared-exponential") prior.kernel = fhs::KernelKind::kSquaredExponential;
  else throw fhs::ConfigError("kernel must be exponential or squared-exponential");

  fhs::RandomStream rng(cfg.seed);
  Eigen::VectorXd xs(n);
  for (int i = 0; i < n; ++i) xs[i] = -M_PI + 2.0 * M_PI * rng.uniform();
  const fhs::GpPaths gp = fhs::gp_prior_sample(prior, xs, paths, rng);
  const Eigen::VectorXd frac = fhs::off_null_fraction(gp.paths, fhs::null_design(prior.null, xs));
  std::cout << "mean ||(I-Q0)F||/||F|| " << frac.mean() << " over " << paths << " paths\n";
  const auto out = prepare_out(c.out);
  if (!out.empty()) {
    std::ofstream f(out / "paths.csv");
    f << "x";
    for (int r = 0; r < gp.paths.rows(); ++r) f << ",path" << r + 1;
    f << '\n';
    for (int i = 0; i < n; ++i) {
      f << fhs::format_double(xs[i]);
      for (int r = 0; r < gp.paths.rows(); ++r) f << ',' << fhs::format_double(gp.paths(r, i));
      f << '\n';
    }
    fhs::write_paths_svg(out / "paths.svg", std::string("GP prior paths, null ") + fhs::to_string(prior.null), xs,
                         gp.paths);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Functional horseshoe regression, density estimation and additive selection"};
  app.require_subcommand(1);

  Common common;
  fhs::SimulationSpec sim_spec;
  std::string model, data, xcol = "x", ycol = "y", wcol = "w", kernel = "exponential";
  double snr = -1.0;
  bool no_plots = false;
  int gp_n = 100, gp_paths = 5;
  fhs::RealDataSpec rd;
  std::string covariates;

  auto* simulate = app.add_subcommand("simulate", "run a replicated simulation study");
  add_common(simulate, common);
  simulate->add_option("--model", model, "simple, vc, density or additive");
  simulate->add_option("--truth", sim_spec.truth, "truth name, or additive setting 1-3");
  simulate->add_option("--n", sim_spec.n, "sample size");
  simulate->add_option("--replicates", sim_spec.replicates, "number of replicates");
  simulate->add_option("--snr", snr, "signal-to-noise ratio (simple and vc)");
  simulate->add_option("--p", sim_spec.p, "additive covariate count (0 keeps the setting's)");
  simulate->add_flag("--no-plots", no_plots, "skip SVG output");

  auto* fit = app.add_subcommand("fit", "fit a univariate model to CSV data");
  add_common(fit, common);
  fit->add_option("--model", model, "simple, vc or density")->required();
  fit->add_option("--data", data, "CSV with a header row")->required();
  fit->add_option("--x", xcol, "covariate column");
  fit->add_option("--y", ycol, "response column");
  fit->add_option("--w", wcol, "multiplier column (vc)");

  auto* fit_add = app.add_subcommand("fit-additive", "fit an additive model with component selection");
  add_common(fit_add, common);
  fit_add->add_option("--data", data, "CSV with a header row")->required();
  fit_add->add_option("--response", rd.response, "response column")->required();
  fit_add->add_option("--covariates", covariates, "comma-separated covariates (default: all others)");

  auto* gp = app.add_subcommand("sample-gp", "draw paths from the shrinkage GP prior");
  add_common(gp, common);
  gp->add_option("--n", gp_n, "number of locations");
  gp->add_option("--paths", gp_paths, "number of paths");
  gp->add_option("--kernel", kernel, "exponential or squared-exponential");

  auto* real = app.add_subcommand("realdata", "held-out evaluation with spurious covariates");
  add_common(real, common);
  real->add_option("--data", data, "CSV with a header row")->required();
  real->add_option("--response", rd.response, "response column")->required();
  real->add_option("--covariates", covariates, "comma-separated covariates (default: all others)");
  real->add_option("--spurious", rd.spurious, "number of N(0,1) columns to append");
  real->add_option("--test-size", rd.test_size, "held-out rows per fold");
  real->add_option("--folds", rd.folds, "number of random splits");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (!covariates.empty()) rd.covariates = fhs::split_csv_line(covariates);
    if (*simulate) return cmd_simulate(common, sim_spec, model, snr, no_plots);
    if (*fit) return cmd_fit(common, model, data, xcol, ycol, wcol);
    if (*gp) return cmd_sample_gp(common, gp_n, gp_paths, kernel);
    rd.csv_path = data;
    if (*fit_add) {
      rd.spurious = 0;
      rd.test_size = 0;
      rd.folds = 1;
    }
    return cmd_realdata(common, rd);
  } catch (const fhs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const fhs::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const fhs::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}
