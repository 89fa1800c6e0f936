#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "fhs/config.hpp"
#include "fhs/csv.hpp"
#include "fhs/errors.hpp"
#include "fhs/experiment.hpp"
#include "fhs/generators.hpp"
#include "fhs/metrics.hpp"
#include "fhs/random.hpp"
#include "fhs/realdata.hpp"

using namespace fhs;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fhs_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double sample_var(const Eigen::VectorXd& v) {
  return (v.array() - v.mean()).square().sum() / static_cast<double>(v.size() - 1);
}

}  // namespace

TEST_CASE("regression truths are standardized") {
  RandomStream rng(1);
  const int n = 1000000;
  Eigen::VectorXd f(n), fq(n), fs_(n), vc(n);
  const double s_lin = truth_scale(ModelKind::kSimple, "linear", 1.0);
  const double s_quad = truth_scale(ModelKind::kSimple, "quadratic", 1.0);
  const double s_sin = truth_scale(ModelKind::kSimple, "sine", 1.0);
  const double s_vc = truth_scale(ModelKind::kVaryingCoefficient, "quadratic", 1.0);
  for (int i = 0; i < n; ++i) {
    const double x = -M_PI + 2 * M_PI * rng.uniform();
    const double w = -M_PI + 2 * M_PI * rng.uniform();
    f[i] = s_lin * raw_truth("linear", x);
    fq[i] = s_quad * raw_truth("quadratic", x);
    fs_[i] = s_sin * raw_truth("sine", x);
    vc[i] = w * s_vc * raw_truth("quadratic", x);
  }
  CHECK(sample_var(f) > 0.99);
  CHECK(sample_var(f) < 1.01);
  CHECK(sample_var(fq) == doctest::Approx(1.0).epsilon(0.01));
  CHECK(sample_var(fs_) == doctest::Approx(1.0).epsilon(0.01));
  CHECK(vc.squaredNorm() / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK_THROWS_AS(truth_scale(ModelKind::kSimple, "cubic", 1.0), ConfigError);
}

TEST_CASE("univariate generators") {
  const auto a = gen_univariate(ModelKind::kSimple, "sine", 300, 1.0, 7);
  const auto b = gen_univariate(ModelKind::kSimple, "sine", 300, 1.0, 7);
  CHECK(a.y == b.y);
  CHECK(a.x.minCoeff() >= -M_PI);
  CHECK(a.x.maxCoeff() <= M_PI);
  CHECK(a.w.size() == 0);
  const auto vc = gen_univariate(ModelKind::kVaryingCoefficient, "constant", 300, 1.0, 7);
  CHECK(vc.w.size() == 300);

  const auto mix = gen_univariate(ModelKind::kDensity, "mixture", 20000, 1.0, 9);
  const double sd = std::sqrt(sample_var(mix.y));
  CHECK(std::abs(mix.y.mean() + 0.1) < 3 * sd / std::sqrt(20000.0));
  const auto ln = gen_univariate(ModelKind::kDensity, "lognormal", 100, 1.0, 9);
  CHECK(ln.y.minCoeff() > 0.0);
  CHECK(ln.f_true[0] == doctest::Approx(log_density_truth("lognormal", ln.y[0])));
  CHECK(log_density_truth("normal", 0.0) == doctest::Approx(-0.5 * std::log(2 * M_PI)));
  CHECK_THROWS_AS(gen_univariate(ModelKind::kDensity, "cauchy", 10, 1.0, 1), ConfigError);
}

TEST_CASE("additive settings") {
  const auto s1 = gen_additive_setting(1, 2000, 3);
  CHECK(s1.x.cols() == 200);
  CHECK(std::count(s1.active.begin(), s1.active.end(), true) == 4);
  for (Eigen::Index i = 0; i < 2000; ++i) {
    double f = 0;
    for (int j = 0; j < 4; ++j) f += setting1_component(j, s1.x(i, j));
    CHECK(f == s1.f_true[i]);
  }
  CHECK(sample_var(s1.f_true) == doctest::Approx(15.0).epsilon(0.1));
  CHECK(setting1_component(1, 0.5) == doctest::Approx(0.25 - 25.0 / 12));

  const auto s2 = gen_additive_setting(2, 2000, 4);
  CHECK(s2.x.cols() == 80);
  const Eigen::MatrixXd c = s2.x.rowwise() - s2.x.colwise().mean();
  const Eigen::MatrixXd cov = c.transpose() * c / 1999.0;
  const double rho = cov(3, 17) / std::sqrt(cov(3, 3) * cov(17, 17));
  CHECK(std::abs(rho - 0.5) < 3 * 0.75 / std::sqrt(2000.0));
  CHECK(s2.x.minCoeff() >= 0.0);
  CHECK(s2.x.maxCoeff() <= 1.0);

  const auto s3 = gen_additive_setting(3, 500, 5, 30);
  CHECK(s3.x.cols() == 30);
  CHECK(std::count(s3.active.begin(), s3.active.end(), true) == 12);
  CHECK_THROWS_AS(gen_additive_setting(3, 500, 5, 10), ConfigError);
  CHECK_THROWS_AS(gen_additive_setting(4, 500, 5), ConfigError);
}

TEST_CASE("mse") {
  RandomStream rng(2);
  Eigen::VectorXd a(57), b(57);
  for (int i = 0; i < 57; ++i) {
    a[i] = rng.normal();
    b[i] = rng.normal();
  }
  double loop = 0;
  for (int i = 0; i < 57; ++i) loop += (a[i] - b[i]) * (a[i] - b[i]);
  loop /= 57;
  CHECK(std::abs(empirical_mse(a, b) - loop) < 1e-14);
  CHECK(empirical_mse(a, a) == 0.0);
  CHECK(empirical_mse(a.array() + 0.3, a) == doctest::Approx(0.09));
  CHECK(gauge_aligned_mse(a.array() + 5.0, a) < 1e-24);
  CHECK_THROWS_AS(empirical_mse(a, b.head(3)), ConfigError);
  const std::vector<double> v{1, 2, 3, 4};
  CHECK(mean(v) == 2.5);
  CHECK(sample_sd(v) == doctest::Approx(std::sqrt(5.0 / 3)));
}

TEST_CASE("csv parsing and round trip") {
  std::istringstream in("a, b ,c\n1,2,3\n4.5,-1e-3,7\n");
  const auto t = parse_csv(in);
  CHECK(t.header == std::vector<std::string>{"a", "b", "c"});
  CHECK(t.values(1, 1) == -1e-3);
  CHECK(t.col("c")[1] == 7.0);
  CHECK_THROWS_AS(t.column("d"), DataError);

  std::istringstream bad("a,b\n1,2\n3,x\n");
  CHECK_THROWS_WITH_AS(parse_csv(bad), doctest::Contains("row 2, column 'b'"), DataError);
  std::istringstream ragged("a,b\n1\n");
  CHECK_THROWS_AS(parse_csv(ragged), DataError);

  const fs::path dir = scratch("csv");
  CsvTable out{{"x", "y"}, Eigen::MatrixXd(2, 2)};
  out.values << 0.1, 1.0 / 3.0, -2e-300, 12345.678;
  write_csv(dir / "t.csv", out);
  const auto back = read_csv(dir / "t.csv");
  CHECK(back.header == out.header);
  CHECK(back.values == out.values);
  CHECK(std::stod(format_double(0.1 + 0.2)) == 0.1 + 0.2);
}

TEST_CASE("config round trip") {
  FhsConfig cfg;
  SimulationSpec spec;
  std::istringstream in(
      "[prior]\na = 0.3\nb = 1e-4\nkn = 10\nsigma2 = inverse-gamma\nsigma2_shape = 0.5\n"
      "[sampler]\niters = 500\nburnin = 100\nseed = 42\n"
      "[simulation]\nmodel = vc\ntruth = sine\nn = 150\nreplicates = 3\nnull = linear\n");
  load_config(in, cfg, spec);
  CHECK(cfg.a == 0.3);
  CHECK(*cfg.b == 1e-4);
  CHECK(cfg.k_n == 10);
  CHECK(cfg.sigma2_prior->shape == 0.5);
  CHECK(cfg.n_iter == 500);
  CHECK(cfg.seed == 42);
  CHECK(spec.master_seed == 42);
  CHECK(spec.model == ModelKind::kVaryingCoefficient);
  CHECK(*spec.null == NullSpace::kLinear);

  std::ostringstream first;
  write_config(first, cfg, spec);
  FhsConfig cfg2;
  SimulationSpec spec2;
  std::istringstream again(first.str());
  load_config(again, cfg2, spec2);
  std::ostringstream second;
  write_config(second, cfg2, spec2);
  CHECK(first.str() == second.str());

  std::istringstream unknown("[prior]\nalpha = 1\n");
  CHECK_THROWS_AS(load_config(unknown, cfg, spec), ConfigError);
  std::istringstream badnum("[sampler]\niters = many\n");
  CHECK_THROWS_AS(load_config(badnum, cfg, spec), ConfigError);
  std::istringstream fixed("[prior]\nsigma2 = 2.5\nb = auto\n");
  load_config(fixed, cfg, spec);
  CHECK(!cfg.sigma2_prior);
  CHECK(cfg.fixed_sigma2 == 2.5);
  CHECK(!cfg.b);
}

TEST_CASE("experiment: consistency, round trip, determinism") {
  SimulationSpec spec;
  spec.truth = "linear";
  spec.n = 100;
  spec.replicates = 4;
  FhsConfig cfg;
  cfg.n_iter = 1500;
  cfg.n_burnin = 500;
  const fs::path d1 = scratch("exp1");
  const fs::path d2 = scratch("exp2");
  const auto r1 = run_experiment(spec, cfg, d1, {false, false});
  (void)run_experiment(spec, cfg, d2, {false, false});
  CHECK(slurp(d1 / "aggregate.csv") == slurp(d2 / "aggregate.csv"));
  CHECK(slurp(d1 / "replicates.csv") == slurp(d2 / "replicates.csv"));

  double m = 0;
  for (const auto& r : r1.replicates) m += r.mse_fhs;
  CHECK(std::abs(m / 4 - r1.mse_fhs_mean) < 1e-12);
  CHECK(r1.failures == 0);
  CHECK(r1.fhs_better_rate >= 0.0);
  CHECK(r1.fhs_better_rate <= 1.0);

  std::ifstream in(d1 / "replicates.csv");
  const auto back = read_replicates_csv(in);
  REQUIRE(back.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(back[i].seed == r1.replicates[i].seed);
    CHECK(back[i].mse_fhs == r1.replicates[i].mse_fhs);
    CHECK(back[i].omega_mean == r1.replicates[i].omega_mean);
  }
  std::ostringstream a, b;
  write_aggregate_csv(a, r1);
  write_aggregate_csv(b, aggregate(spec, back));
  CHECK(a.str() == b.str());

  std::set<std::uint64_t> seeds;
  for (int i = 0; i < 100; ++i) {
    seeds.insert(replicate_data_seed(1, i));
    seeds.insert(replicate_chain_seed(1, i));
  }
  CHECK(seeds.size() == 200);
  CHECK(slurp(d1 / "config.ini").find("generator_version") != std::string::npos);
}

TEST_CASE("real data workflow") {
  const fs::path dir = scratch("real");
  RandomStream rng(3);
  {
    std::ofstream out(dir / "data.csv");
    out << "y,a,b,flat\n";
    for (int i = 0; i < 120; ++i) {
      const double a = rng.uniform() * 4 - 2;
      const double b = rng.uniform() * 4 - 2;
      out << format_double(std::sin(2 * a) * 2 + 0.5 * rng.normal()) << ',' << format_double(a) << ','
          << format_double(b) << ",1\n";
    }
  }
  FhsConfig cfg;
  cfg.n_iter = 1500;
  cfg.n_burnin = 500;
  cfg.k_n = 5;
  RealDataSpec spec;
  spec.csv_path = dir / "data.csv";
  spec.response = "y";
  spec.spurious = 3;
  spec.test_size = 20;
  spec.folds = 3;
  const auto r1 = run_realdata(spec, cfg, dir / "out1");
  const auto r2 = run_realdata(spec, cfg, dir / "out2");
  CHECK(r1.dropped == std::vector<std::string>{"flat"});
  CHECK(r1.covariates.size() == 5);
  CHECK(r1.folds.size() == 3);
  CHECK(std::isfinite(r1.test_error_mean));
  CHECK(slurp(dir / "out1" / "aggregate.csv") == slurp(dir / "out2" / "aggregate.csv"));
  CHECK(slurp(dir / "out1" / "folds.csv") == slurp(dir / "out2" / "folds.csv"));
  CHECK(r1.modal_model.find('a') != std::string::npos);

  spec.spurious = 0;
  spec.test_size = 0;
  spec.folds = 1;
  const auto full = run_realdata(spec, cfg);
  CHECK(full.folds.size() == 1);
  CHECK(std::isnan(full.folds[0].test_error));

  spec.response = "missing";
  CHECK_THROWS_AS(run_realdata(spec, cfg), DataError);
}
