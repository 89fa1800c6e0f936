#include "fhs/config.hpp"

#include <fstream>
#include <ostream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "fhs/csv.hpp"
#include "fhs/errors.hpp"

namespace fhs {

namespace pt = boost::property_tree;

NullSpace default_null(ModelKind model) {
  switch (model) {
    case ModelKind::kSimple: return NullSpace::kLinear;
    case ModelKind::kVaryingCoefficient: return NullSpace::kConstant;
    case ModelKind::kDensity: return NullSpace::kQuadratic;
    case ModelKind::kAdditive: return NullSpace::kNone;
  }
  return NullSpace::kNone;
}

void SimulationSpec::validate() const {
  if (n < 1) throw ConfigError("n must be positive");
  if (replicates < 1) throw ConfigError("replicates must be positive");
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("level must lie in (0, 1)");
  if (model == ModelKind::kAdditive) {
    if (truth != "1" && truth != "2" && truth != "3") throw ConfigError("additive truth must be setting 1, 2 or 3");
  } else if (model == ModelKind::kDensity) {
    if (truth != "normal" && truth != "lognormal" && truth != "mixture") {
      throw ConfigError("density truth must be normal, lognormal or mixture");
    }
  } else {
    truth_scale(model, truth, snr);
  }
}

namespace {

template <class T>
T get(const pt::ptree& node, const std::string& key) {
  try {
    return node.get_value<T>();
  } catch (const pt::ptree_error&) {
    throw ConfigError("bad value '" + node.data() + "' for " + key);
  }
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "off" || v == "0" || v == "no") return false;
  throw ConfigError("bad boolean '" + v + "' for " + key);
}

}  // namespace

void load_config(std::istream& in, FhsConfig& cfg, SimulationSpec& spec) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    for (const auto& [key, node] : body) {
      const std::string name = section + "." + key;
      const std::string v = node.data();
      if (name == "prior.a") {
        cfg.a = get<double>(node, name);
      } else if (name == "prior.b") {
        if (v == "auto") cfg.b.reset();
        else cfg.b = get<double>(node, name);
      } else if (name == "prior.kn") {
        cfg.k_n = get<int>(node, name);
      } else if (name == "prior.degree") {
        cfg.degree = get<int>(node, name);
      } else if (name == "prior.knots") {
        if (v == "uniform") cfg.knots = KnotPlacement::kUniform;
        else if (v == "quantile") cfg.knots = KnotPlacement::kQuantile;
        else throw ConfigError("knots must be uniform or quantile");
      } else if (name == "prior.sigma2") {
        if (v == "inverse-gamma") {
          if (!cfg.sigma2_prior) cfg.sigma2_prior = InverseGammaPrior{};
        } else {
          cfg.sigma2_prior.reset();
          cfg.fixed_sigma2 = get<double>(node, name);
        }
      } else if (name == "prior.sigma2_shape") {
        if (!cfg.sigma2_prior) cfg.sigma2_prior = InverseGammaPrior{};
        cfg.sigma2_prior->shape = get<double>(node, name);
      } else if (name == "prior.sigma2_rate") {
        if (!cfg.sigma2_prior) cfg.sigma2_prior = InverseGammaPrior{};
        cfg.sigma2_prior->rate = get<double>(node, name);
      } else if (name == "prior.sigma2_beta_term") {
        cfg.sigma2_prior_includes_beta_term = parse_bool(v, name);
      } else if (name == "sampler.iters") {
        cfg.n_iter = get<int>(node, name);
      } else if (name == "sampler.burnin") {
        cfg.n_burnin = get<int>(node, name);
      } else if (name == "sampler.seed") {
        cfg.seed = get<std::uint64_t>(node, name);
        spec.master_seed = cfg.seed;
      } else if (name == "simulation.model") {
        spec.model = parse_model(v);
      } else if (name == "simulation.truth") {
        spec.truth = v;
      } else if (name == "simulation.n") {
        spec.n = get<int>(node, name);
      } else if (name == "simulation.replicates") {
        spec.replicates = get<int>(node, name);
      } else if (name == "simulation.snr") {
        spec.snr = get<double>(node, name);
      } else if (name == "simulation.p") {
        spec.p = get<int>(node, name);
      } else if (name == "simulation.null") {
        spec.null = parse_null_space(v);
      } else if (name == "simulation.level") {
        spec.level = get<double>(node, name);
      } else if (name == "simulation.generator_version") {
        if (get<int>(node, name) != kGeneratorVersion) throw ConfigError("config written by another generator version");
      } else {
        throw ConfigError("unknown config key " + name);
      }
    }
  }
}

void load_config(const std::filesystem::path& path, FhsConfig& cfg, SimulationSpec& spec) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  load_config(in, cfg, spec);
}

void write_config(std::ostream& out, const FhsConfig& cfg, const SimulationSpec& spec) {
  out << "[prior]\n"
      << "a = " << format_double(cfg.a) << '\n'
      << "b = " << (cfg.b ? format_double(*cfg.b) : std::string("auto")) << '\n'
      << "kn = " << cfg.k_n << '\n'
      << "degree = " << cfg.degree << '\n'
      << "knots = " << (cfg.knots == KnotPlacement::kUniform ? "uniform" : "quantile") << '\n';
  if (cfg.sigma2_prior) {
    out << "sigma2 = inverse-gamma\n"
        << "sigma2_shape = " << format_double(cfg.sigma2_prior->shape) << '\n'
        << "sigma2_rate = " << format_double(cfg.sigma2_prior->rate) << '\n';
  } else {
    out << "sigma2 = " << format_double(cfg.fixed_sigma2) << '\n';
  }
  out << "sigma2_beta_term = " << (cfg.sigma2_prior_includes_beta_term ? "true" : "false") << '\n'
      << "\n[sampler]\n"
      << "iters = " << cfg.n_iter << '\n'
      << "burnin = " << cfg.n_burnin << '\n'
      << "seed = " << cfg.seed << '\n'
      << "\n[simulation]\n"
      << "model = " << to_string(spec.model) << '\n'
      << "truth = " << spec.truth << '\n'
      << "n = " << spec.n << '\n'
      << "replicates = " << spec.replicates << '\n'
      << "snr = " << format_double(spec.snr) << '\n'
      << "p = " << spec.p << '\n'
      << "null = " << to_string(spec.null.value_or(default_null(spec.model))) << '\n'
      << "level = " << format_double(spec.level) << '\n'
      << "generator_version = " << kGeneratorVersion << '\n';
}

}  // namespace fhs
