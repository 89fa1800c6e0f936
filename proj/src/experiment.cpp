#include "fhs/experiment.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fhs/additive.hpp"
#include "fhs/csv.hpp"
#include "fhs/errors.hpp"
#include "fhs/extmodels.hpp"
#include "fhs/metrics.hpp"
#include "fhs/summary.hpp"
#include "fhs/svg.hpp"

namespace fhs {

std::uint64_t replicate_data_seed(std::uint64_t master, int index) {
  return mix_seed(master, 2 * static_cast<std::uint64_t>(index));
}

std::uint64_t replicate_chain_seed(std::uint64_t master, int index) {
  return mix_seed(master, 2 * static_cast<std::uint64_t>(index) + 1);
}

namespace {

std::string numbered(const char* stem, int index, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%03d%s", stem, index, ext);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

Eigen::VectorXd eval_curve(const BSplineBasis& basis, const Eigen::VectorXd& x, const Eigen::VectorXd& beta) {
  return design_matrix(basis, x).values * beta;
}

void regression_replicate(const SimulationSpec& spec, const FhsConfig& cfg, int index,
                          const std::filesystem::path& out_dir, const ExperimentOptions& opts, ReplicateResult& r) {
  const UnivariateData data = gen_univariate(spec.model, spec.truth, spec.n, spec.snr, r.seed);
  const NullSpace null = spec.null.value_or(default_null(spec.model));
  RegressionFit fit = spec.model == ModelKind::kSimple
                          ? fit_regression(data.x, data.y, null, cfg)
                          : fit_varying_coefficient({data.y, data.w, data.x}, null, cfg);
  const Eigen::VectorXd fhat = eval_curve(fit.basis, data.x, posterior_mean_beta(fit.draws));
  const Eigen::VectorXd base = eval_curve(fit.basis, data.x, fit.ls_beta);
  r.mse_fhs = 100.0 * empirical_mse(fhat, data.f_true);
  r.mse_baseline = 100.0 * empirical_mse(base, data.f_true);
  r.omega_mean = fit.draws.omegas.mean();
  r.sigma2_mean = fit.draws.sigma2s.mean();

  if (out_dir.empty()) return;
  if (opts.save_draws) {
    std::ofstream out = open_out(out_dir / numbered("draws_rep", index, ".csv"));
    write_draws_csv(out, fit.draws);
  }
  if (opts.plots && index == 0) {
    const Eigen::VectorXd grid = linspace(fit.basis.lower(), fit.basis.upper(), 200);
    const FitSummary s = posterior_summary(fit.draws, fit.basis, spec.level, grid);
    const double scale = truth_scale(spec.model, spec.truth, spec.snr);
    BandPlot plot{std::string(to_string(spec.model)) + " / " + spec.truth + " (n=" + std::to_string(spec.n) + ")",
                  grid, s.mean, s.lower, s.upper,
                  grid.unaryExpr([&](double x) { return scale * raw_truth(spec.truth, x); }), {}, {}};
    if (spec.model == ModelKind::kSimple) {
      plot.points_x = data.x;
      plot.points_y = data.y;
    }
    write_band_svg(out_dir / "fit.svg", plot);
  }
}

void density_replicate(const SimulationSpec& spec, const FhsConfig& cfg, int index,
                       const std::filesystem::path& out_dir, const ExperimentOptions& opts, ReplicateResult& r) {
  const UnivariateData data = gen_univariate(spec.model, spec.truth, spec.n, spec.snr, r.seed);
  const LogSplineFit fit = fit_logspline(data.y, cfg);
  const BSplineBasis& basis = fit.model.basis();
  const Eigen::VectorXd fhat = eval_curve(basis, data.y, posterior_mean_beta(fit.draws));
  const Eigen::VectorXd base = eval_curve(basis, data.y, fit.mle_beta);
  r.mse_fhs = 100.0 * gauge_aligned_mse(fhat, data.f_true);
  r.mse_baseline = 100.0 * gauge_aligned_mse(base, data.f_true);
  r.omega_mean = fit.draws.omegas.mean();
  r.sigma2_mean = 1.0;
  r.acceptance = fit.acceptance_rate;

  if (out_dir.empty()) return;
  if (opts.save_draws) {
    std::ofstream out = open_out(out_dir / numbered("draws_rep", index, ".csv"));
    write_draws_csv(out, fit.draws);
  }
  if (opts.plots && index == 0) {
    // Normalized log density per draw.
    const Eigen::VectorXd grid = linspace(basis.lower(), basis.upper(), 200);
    const Eigen::MatrixXd eval = design_matrix(basis, grid).values;
    Eigen::MatrixXd curves = eval * fit.draws.betas.transpose();
    for (Eigen::Index d = 0; d < curves.cols(); ++d) {
      curves.col(d).array() -= fit.model.log_normalizer(fit.draws.betas.row(d).transpose());
    }
    const PointwiseBands bands = kernels::pointwise_bands(curves, spec.level);
    BandPlot plot{"density / " + spec.truth + " (n=" + std::to_string(spec.n) + "), log density",
                  grid, bands.mean, bands.lower, bands.upper,
                  grid.unaryExpr([&](double y) { return log_density_truth(spec.truth, y); }), {}, {}};
    if (spec.truth == "lognormal") plot.truth = plot.truth.cwiseMax(bands.lower.minCoeff());
    write_band_svg(out_dir / "fit.svg", plot);
  }
}

void additive_replicate(const SimulationSpec& spec, const FhsConfig& cfg, int index,
                        const std::filesystem::path& out_dir, const ExperimentOptions& opts, ReplicateResult& r) {
  const int setting = std::stoi(spec.truth);
  const AdditiveData data = gen_additive_setting(setting, spec.n, r.seed, spec.p);
  const AdditiveDesign design = make_additive_design(data.x, data.y, cfg.k_n, cfg.degree);
  const AdditiveDraws draws = backfit_chain(design, cfg);
  const SelectionResult sel = select_components(draws, design, spec.level);
  const ConfusionCounts counts = confusion(sel.included, data.active);
  r.mcc = mcc(counts);
  r.true_model = counts.fp == 0 && counts.fn == 0;
  r.spurious = static_cast<int>(counts.fp);
  r.selected = static_cast<int>(counts.tp + counts.fp);
  const Eigen::VectorXd truth = data.f_true.array() - data.f_true.mean();
  r.mse_fhs = 100.0 * empirical_mse(additive_fitted_mean(design, draws), truth);
  r.mse_baseline = 100.0 * empirical_mse(additive_fitted(design, backfit_least_squares(design)), truth);
  r.omega_mean = draws.omegas.mean();
  r.sigma2_mean = draws.sigma2s.mean();

  if (out_dir.empty()) return;
  {
    std::ofstream out = open_out(out_dir / numbered("selection_rep", index, ".csv"));
    out << "component,active,included,max_abs_band_center,mean_band_width\n";
    for (int j = 0; j < design.p(); ++j) {
      out << design.components[j].id << ',' << int(data.active[j]) << ',' << int(sel.included[j]) << ','
          << format_double(sel.max_abs_center[j]) << ',' << format_double(sel.mean_width[j]) << '\n';
    }
  }
  if (opts.save_draws) {
    for (int j = 0; j < design.p(); ++j) {
      std::ofstream out = open_out(out_dir / (numbered("draws_rep", index, "_comp") + std::to_string(j) + ".csv"));
      const auto& c = design.components[j];
      for (int l = 0; l < c.dim(); ++l) out << "beta_" << (l + 1) << ',';
      out << "omega,sigma2\n";
      const Eigen::MatrixXd betas = draws.thetas[j] * c.r_inv.transpose();
      for (Eigen::Index t = 0; t < draws.n_kept(); ++t) {
        for (int l = 0; l < c.dim(); ++l) out << format_double(betas(t, l)) << ',';
        out << format_double(draws.omegas(t, j)) << ',' << format_double(draws.sigma2s[t]) << '\n';
      }
    }
  }
  if (opts.plots && index == 0) {
    for (int j = 0; j < design.p() && j < 4; ++j) {
      const Eigen::VectorXd& grid = sel.grids[j];
      const Eigen::VectorXd col = data.x.col(j);
      auto component = [&](double x) {
        return setting == 1 ? setting1_component(j, x) : setting23_component(j, x);
      };
      const double centre = col.unaryExpr(component).mean();
      double weight = 1.0;
      if (setting == 2) weight = std::array<double, 4>{5.0, 3.0, 4.0, 6.0}[j];
      BandPlot plot{"setting " + spec.truth + ", component " + std::to_string(j + 1), grid,
                    sel.bands[j].mean, sel.bands[j].lower, sel.bands[j].upper,
                    grid.unaryExpr([&](double x) { return weight * (component(x) - centre); }), {}, {}};
      write_band_svg(out_dir / ("component_" + std::to_string(j + 1) + ".svg"), plot);
    }
  }
}

}  // namespace

ReplicateResult run_replicate(const SimulationSpec& spec, const FhsConfig& cfg, int index,
                              const std::filesystem::path& out_dir, const ExperimentOptions& opts) {
  ReplicateResult r;
  r.index = index;
  r.seed = replicate_data_seed(spec.master_seed, index);
  FhsConfig chain = cfg;
  chain.seed = replicate_chain_seed(spec.master_seed, index);
  try {
    switch (spec.model) {
      case ModelKind::kSimple:
      case ModelKind::kVaryingCoefficient: regression_replicate(spec, chain, index, out_dir, opts, r); break;
      case ModelKind::kDensity: density_replicate(spec, chain, index, out_dir, opts, r); break;
      case ModelKind::kAdditive: additive_replicate(spec, chain, index, out_dir, opts, r); break;
    }
  } catch (const NumericalError& e) {
    r.failed = true;
    r.error = e.what();
  } catch (const DataError& e) {
    r.failed = true;
    r.error = e.what();
  }
  if (r.failed) {
    r.mse_fhs = r.mse_baseline = r.omega_mean = r.sigma2_mean = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

MetricsReport aggregate(const SimulationSpec& spec, std::vector<ReplicateResult> replicates) {
  MetricsReport rep;
  rep.spec = spec;
  rep.replicates = std::move(replicates);
  std::vector<double> fhs, base, omega, sigma2, mccs, truth, spurious;
  int better = 0;
  for (const auto& r : rep.replicates) {
    if (r.failed) {
      ++rep.failures;
      continue;
    }
    fhs.push_back(r.mse_fhs);
    base.push_back(r.mse_baseline);
    omega.push_back(r.omega_mean);
    sigma2.push_back(r.sigma2_mean);
    better += r.mse_fhs < r.mse_baseline;
    if (spec.model == ModelKind::kAdditive) {
      mccs.push_back(r.mcc);
      truth.push_back(r.true_model);
      spurious.push_back(r.spurious);
    }
  }
  rep.mse_fhs_mean = mean(fhs);
  rep.mse_fhs_sd = sample_sd(fhs);
  rep.mse_baseline_mean = mean(base);
  rep.mse_baseline_sd = sample_sd(base);
  rep.omega_mean = mean(omega);
  rep.sigma2_mean = mean(sigma2);
  rep.fhs_better_rate = fhs.empty() ? 0.0 : static_cast<double>(better) / static_cast<double>(fhs.size());
  if (spec.model == ModelKind::kAdditive && !mccs.empty()) {
    rep.mcc_mean = mean(mccs);
    rep.true_model_rate = mean(truth);
    rep.spurious_mean = mean(spurious);
  }
  return rep;
}

MetricsReport run_experiment(const SimulationSpec& spec, const FhsConfig& cfg, const std::filesystem::path& out_dir,
                             const ExperimentOptions& opts) {
  spec.validate();
  cfg.validate();
  if (!out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw DataError("cannot create " + out_dir.string() + ": " + ec.message());
  }
  std::vector<ReplicateResult> results(static_cast<std::size_t>(spec.replicates));
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < spec.replicates; ++i) results[i] = run_replicate(spec, cfg, i, out_dir, opts);

  MetricsReport rep = aggregate(spec, std::move(results));
  if (!out_dir.empty()) {
    {
      std::ofstream out = open_out(out_dir / "replicates.csv");
      write_replicates_csv(out, rep.replicates);
    }
    {
      std::ofstream out = open_out(out_dir / "aggregate.csv");
      write_aggregate_csv(out, rep);
    }
    {
      std::ofstream out = open_out(out_dir / "config.ini");
      write_config(out, cfg, spec);
    }
    if (rep.failures > 0) {
      std::ofstream out = open_out(out_dir / "failures.txt");
      for (const auto& r : rep.replicates) {
        if (r.failed) out << "replicate " << r.index << ": " << r.error << '\n';
      }
    }
  }
  return rep;
}

void write_replicates_csv(std::ostream& out, const std::vector<ReplicateResult>& rows) {
  out << "replicate,seed,failed,mse_fhs,mse_baseline,omega_mean,sigma2_mean,mcc,true_model,spurious,selected,"
         "acceptance\n";
  for (const auto& r : rows) {
    out << r.index << ',' << r.seed << ',' << int(r.failed) << ',' << format_double(r.mse_fhs) << ','
        << format_double(r.mse_baseline) << ',' << format_double(r.omega_mean) << ',' << format_double(r.sigma2_mean)
        << ',' << format_double(r.mcc) << ',' << r.true_model << ',' << r.spurious << ',' << r.selected << ','
        << format_double(r.acceptance) << '\n';
  }
}

std::vector<ReplicateResult> read_replicates_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty replicate table");
  std::vector<ReplicateResult> rows;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++row;
    const auto c = split_csv_line(line);
    if (c.size() != 12) throw DataError("replicate table row " + std::to_string(row) + " has wrong width");
    try {
      ReplicateResult r;
      r.index = std::stoi(c[0]);
      r.seed = std::stoull(c[1]);
      r.failed = c[2] == "1";
      r.mse_fhs = std::stod(c[3]);
      r.mse_baseline = std::stod(c[4]);
      r.omega_mean = std::stod(c[5]);
      r.sigma2_mean = std::stod(c[6]);
      r.mcc = std::stod(c[7]);
      r.true_model = std::stoi(c[8]);
      r.spurious = std::stoi(c[9]);
      r.selected = std::stoi(c[10]);
      r.acceptance = std::stod(c[11]);
      rows.push_back(r);
    } catch (const std::logic_error&) {
      throw DataError("replicate table row " + std::to_string(row) + " is malformed");
    }
  }
  return rows;
}

void write_aggregate_csv(std::ostream& out, const MetricsReport& rep) {
  out << "metric,value\n"
      << "model," << to_string(rep.spec.model) << '\n'
      << "truth," << rep.spec.truth << '\n'
      << "n," << rep.spec.n << '\n'
      << "replicates," << rep.replicates.size() << '\n'
      << "failures," << rep.failures << '\n'
      << "mse_fhs_mean," << format_double(rep.mse_fhs_mean) << '\n'
      << "mse_fhs_sd," << format_double(rep.mse_fhs_sd) << '\n'
      << "mse_baseline_mean," << format_double(rep.mse_baseline_mean) << '\n'
      << "mse_baseline_sd," << format_double(rep.mse_baseline_sd) << '\n'
      << "mse_ratio," << format_double(rep.mse_ratio()) << '\n'
      << "fhs_better_rate," << format_double(rep.fhs_better_rate) << '\n'
      << "omega_mean," << format_double(rep.omega_mean) << '\n'
      << "sigma2_mean," << format_double(rep.sigma2_mean) << '\n';
  if (rep.spec.model == ModelKind::kAdditive) {
    out << "mcc_mean," << format_double(rep.mcc_mean) << '\n'
        << "true_model_rate," << format_double(rep.true_model_rate) << '\n'
        << "spurious_mean," << format_double(rep.spurious_mean) << '\n';
  }
  out << "generator_version," << kGeneratorVersion << '\n';
}

}  // namespace fhs
