#include "fhs/realdata.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>

#include "fhs/additive.hpp"
#include "fhs/csv.hpp"
#include "fhs/errors.hpp"
#include "fhs/metrics.hpp"

namespace fhs {

namespace {

struct Standardizer {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd sd;

  static Standardizer fit(const Eigen::MatrixXd& m) {
    Standardizer s;
    s.mean = m.colwise().mean();
    const Eigen::MatrixXd centered = m.rowwise() - s.mean;
    s.sd = (centered.colwise().squaredNorm() / std::max<double>(1.0, static_cast<double>(m.rows() - 1))).cwiseSqrt();
    return s;
  }

  Eigen::MatrixXd apply(const Eigen::MatrixXd& m) const {
    return (m.rowwise() - mean).array().rowwise() / sd.array();
  }
};

std::string join(const std::vector<std::string>& names) {
  if (names.empty()) return "(none)";
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : "+") + n;
  return out;
}

}  // namespace

RealDataReport run_realdata(const RealDataSpec& spec, const FhsConfig& cfg, const std::filesystem::path& out_dir) {
  cfg.validate();
  if (spec.spurious < 0 || spec.test_size < 0 || spec.folds < 1) {
    throw ConfigError("spurious and test size must be non-negative and folds positive");
  }
  const CsvTable table = read_csv(spec.csv_path);
  const Eigen::VectorXd y_raw = table.col(spec.response);

  RealDataReport rep;
  std::vector<std::string> names = spec.covariates;
  if (names.empty()) {
    for (const auto& h : table.header) {
      if (h != spec.response) names.push_back(h);
    }
  }
  std::vector<Eigen::VectorXd> cols;
  for (const auto& name : names) {
    Eigen::VectorXd c = table.col(name);
    if (c.maxCoeff() == c.minCoeff()) {
      std::cerr << "warning: dropping constant column '" << name << "'\n";
      rep.dropped.push_back(name);
      continue;
    }
    rep.covariates.push_back(name);
    cols.push_back(std::move(c));
  }
  const Eigen::Index n = table.values.rows();
  if (spec.test_size >= n - 10) throw ConfigError("test size leaves too few training rows");

  RandomStream noise(mix_seed(cfg.seed, 0x5eed));
  for (int s = 0; s < spec.spurious; ++s) {
    Eigen::VectorXd c(n);
    for (Eigen::Index i = 0; i < n; ++i) c[i] = noise.normal();
    rep.covariates.push_back("spurious" + std::to_string(s + 1));
    cols.push_back(std::move(c));
  }
  if (cols.empty()) throw DataError("no usable covariates");
  const auto n_real = static_cast<int>(rep.covariates.size()) - spec.spurious;
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) x.col(static_cast<Eigen::Index>(j)) = cols[j];

  std::map<std::string, int> model_counts;
  std::vector<double> errors;
  for (int fold = 0; fold < spec.folds; ++fold) {
    RandomStream split(mix_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(fold)));
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), split.engine());
    const Eigen::Index n_test = spec.test_size;
    const Eigen::Index n_train = n - n_test;
    Eigen::MatrixXd x_train(n_train, x.cols()), x_test(n_test, x.cols());
    Eigen::VectorXd y_train(n_train), y_test(n_test);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Index src = perm[static_cast<std::size_t>(i)];
      if (i < n_test) {
        x_test.row(i) = x.row(src);
        y_test[i] = y_raw[src];
      } else {
        x_train.row(i - n_test) = x.row(src);
        y_train[i - n_test] = y_raw[src];
      }
    }
    const Standardizer sx = Standardizer::fit(x_train);
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (!(sx.sd[j] > 0.0)) throw DataError("covariate '" + rep.covariates[j] + "' is constant on a training split");
    }
    const double y_mean = y_train.mean();
    const double y_sd = std::sqrt((y_train.array() - y_mean).square().sum() / std::max<double>(1.0, n_train - 1.0));
    if (!(y_sd > 0.0)) throw DataError("response is constant on a training split");
    const Eigen::MatrixXd zx_train = sx.apply(x_train);
    const Eigen::VectorXd zy_train = (y_train.array() - y_mean) / y_sd;

    FhsConfig chain = cfg;
    chain.seed = mix_seed(cfg.seed, 2000 + static_cast<std::uint64_t>(fold));
    const AdditiveDesign design = make_additive_design(zx_train, zy_train, cfg.k_n, cfg.degree);
    const AdditiveDraws draws = backfit_chain(design, chain);
    const SelectionResult sel = select_components(draws, design, spec.level);

    FoldResult fr;
    fr.fold = fold;
    for (int j = 0; j < design.p(); ++j) {
      if (!sel.included[j]) continue;
      fr.selected.push_back(rep.covariates[j]);
      if (j >= n_real) ++fr.spurious_selected;
    }
    if (n_test > 0) {
      const Eigen::MatrixXd zx_test = sx.apply(x_test);
      Eigen::VectorXd pred = Eigen::VectorXd::Constant(n_test, design.intercept);
      for (int j = 0; j < design.p(); ++j) {
        const auto& c = design.components[j];
        const Eigen::VectorXd xt = zx_test.col(j).cwiseMax(c.basis.lower()).cwiseMin(c.basis.upper());
        const Eigen::VectorXd beta = c.r_inv * draws.thetas[j].colwise().mean().transpose();
        pred += c.eval(xt) * beta;
      }
      const Eigen::VectorXd zy_test = (y_test.array() - y_mean) / y_sd;
      fr.test_error = empirical_mse(pred, zy_test);
      errors.push_back(fr.test_error);
    } else {
      fr.test_error = std::numeric_limits<double>::quiet_NaN();
    }
    ++model_counts[join(fr.selected)];
    rep.folds.push_back(std::move(fr));
  }

  rep.test_error_mean = errors.empty() ? std::numeric_limits<double>::quiet_NaN() : mean(errors);
  rep.test_error_sd = sample_sd(errors);
  double nn = 0.0;
  for (const auto& f : rep.folds) nn += f.spurious_selected;
  rep.spurious_mean = nn / static_cast<double>(rep.folds.size());
  int best = -1;
  for (const auto& [model, count] : model_counts) {
    if (count > best) {
      best = count;
      rep.modal_model = model;
    }
  }

  if (!out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw DataError("cannot create " + out_dir.string());
    std::ofstream folds(out_dir / "folds.csv");
    if (!folds) throw DataError("cannot write " + (out_dir / "folds.csv").string());
    folds << "fold,test_error,spurious_selected,selected\n";
    for (const auto& f : rep.folds) {
      folds << f.fold << ',' << format_double(f.test_error) << ',' << f.spurious_selected << ',' << join(f.selected)
            << '\n';
    }
    std::ofstream agg(out_dir / "aggregate.csv");
    if (!agg) throw DataError("cannot write " + (out_dir / "aggregate.csv").string());
    agg << "metric,value\n"
        << "folds," << rep.folds.size() << '\n'
        << "test_error_mean," << format_double(rep.test_error_mean) << '\n'
        << "test_error_sd," << format_double(rep.test_error_sd) << '\n'
        << "spurious_mean," << format_double(rep.spurious_mean) << '\n'
        << "modal_model," << rep.modal_model << '\n';
  }
  return rep;
}

}  // namespace fhs
