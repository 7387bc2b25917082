#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "levy_gibbs/basis.hpp"
#include "levy_gibbs/errors.hpp"
#include "levy_gibbs/estimator.hpp"
#include "levy_gibbs/experiment.hpp"
#include "levy_gibbs/gibbs_posterior.hpp"
#include "levy_gibbs/io.hpp"
#include "levy_gibbs/process_sim.hpp"

namespace {

using namespace levy;
using nlohmann::json;
namespace fs = std::filesystem;

enum ExitCode { kOk = 0, kFailure = 1, kUsage = 2, kParse = 3, kResource = 4 };

struct ProcessFlags {
  std::string process = "vg";
  double mu = 0.0;
  double sigma = study_process().sigma;
  double nu = study_process().nu;
  std::optional<double> lambda;
  std::optional<std::string> jump;
};

struct SchemeFlags {
  std::optional<int> j;
  std::optional<double> delta;
  std::optional<std::uint64_t> n;
};

struct BasisFlags {
  std::string family = "trig";
  double a = 0.005;
  double b = 0.015;
  std::optional<std::size_t> k;
  std::size_t degrees = 3;
  std::size_t pieces = 4;
};

struct GibbsFlags {
  double omega = 1e-5;
  double sigma0 = 1e3;
  double beta = 0.5;
  std::optional<std::size_t> k_max;
  double region_a = 0.006;
  double region_b = 0.014;
  std::size_t grid_points = kMinGridPoints;
};

struct Flags {
  std::string config_path;
  ProcessFlags process;
  SchemeFlags scheme;
  BasisFlags basis;
  GibbsFlags gibbs;
  std::uint64_t seed = 0;
  std::string out;
  std::string in;
  std::string coefficients;
  std::string out_dir = ".";
  std::optional<std::string> truth;
  std::string exponent = "minus";
  std::optional<std::size_t> fixed_k;
  std::size_t draws = 1000;
  double level = 0.9;
  std::string metric = "sup";
  int tag = 0;
  std::vector<int> regimes{1, 2};
  double alpha = 2.0;
  double tau = 2.0;
  double radius_fraction = 0.5;
  std::uint64_t max_increments = std::uint64_t{1} << 31;
  std::string complexity = "prior-on-K";
  double bound = 1.0;
  std::optional<double> psi_sup;
};

void add_process_flags(CLI::App& cmd, ProcessFlags& p) {
  cmd.add_option("--process", p.process, "vg or cpois")
      ->check(CLI::IsMember({"vg", "cpois"}))
      ->capture_default_str();
  cmd.add_option("--mu", p.mu, "VG drift")->capture_default_str();
  cmd.add_option("--sigma", p.sigma, "VG volatility")->capture_default_str();
  cmd.add_option("--nu", p.nu, "VG variance rate")->capture_default_str();
}

void add_scheme_flags(CLI::App& cmd, SchemeFlags& s) {
  auto* j = cmd.add_option("--j", s.j, "regime index: delta = 1e-3 * 2^(-3j)");
  auto* delta = cmd.add_option("--delta", s.delta, "sampling interval");
  auto* n = cmd.add_option("--n", s.n, "number of increments");
  j->excludes(delta)->excludes(n);
}

void add_basis_flags(CLI::App& cmd, BasisFlags& b) {
  cmd.add_option("--family", b.family, "trig or legendre")
      ->check(CLI::IsMember({"trig", "trigonometric", "legendre", "piecewise-legendre"}))
      ->capture_default_str();
  cmd.add_option("--a", b.a, "basis window left end")->capture_default_str();
  cmd.add_option("--b", b.b, "basis window right end")->capture_default_str();
  cmd.add_option("--K", b.k, "trig basis size (default ceil(t_n))");
  cmd.add_option("--J", b.degrees, "Legendre degrees per piece")->capture_default_str();
  cmd.add_option("--L", b.pieces, "Legendre pieces")->capture_default_str();
}

void add_gibbs_flags(CLI::App& cmd, GibbsFlags& g) {
  cmd.add_option("--omega", g.omega, "learning rate")->capture_default_str();
  cmd.add_option("--sigma0", g.sigma0, "prior sd")->capture_default_str();
  cmd.add_option("--beta", g.beta, "complexity prior coefficient")->capture_default_str();
  cmd.add_option("--k-max", g.k_max, "prior truncation");
  cmd.add_option("--region-a", g.region_a, "left end of D")->capture_default_str();
  cmd.add_option("--region-b", g.region_b, "right end of D")->capture_default_str();
  cmd.add_option("--grid-points", g.grid_points, "grid size on D")->capture_default_str();
}

void add_truth_flags(CLI::App& cmd, Flags& f) {
  cmd.add_option("--truth", f.truth, "true density for error columns")
      ->check(CLI::IsMember({"vg"}));
  cmd.add_option("--exponent", f.exponent, "sign on the positive VG branch")
      ->check(CLI::IsMember({"plus", "minus"}))
      ->capture_default_str();
}

VarianceGammaParams vg_params(const ProcessFlags& p) {
  VarianceGammaParams params{p.mu, p.sigma, p.nu};
  params.validate();
  return params;
}

VgExponent exponent_from(const std::string& name) {
  return name == "plus" ? VgExponent::plus : VgExponent::minus;
}

SamplingScheme scheme_from(const SchemeFlags& s) {
  if (s.j) return RegimeSpec::from_index(*s.j).scheme();
  if (!s.delta || !s.n) throw ParameterError("give either --j or both --delta and --n");
  return SamplingScheme(*s.delta, *s.n);
}

BasisSystem basis_from(const BasisFlags& b, double horizon) {
  const Window window{b.a, b.b};
  window.validate_excludes_origin();
  if (basis_family_from_string(b.family) == BasisFamily::piecewise_legendre) {
    return BasisSystem::piecewise_legendre(window, b.degrees, b.pieces);
  }
  const std::size_t size =
      b.k ? *b.k : std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(horizon)));
  return BasisSystem::trigonometric(window, size);
}

GibbsConfig gibbs_from(const GibbsFlags& g, const BasisSystem& basis) {
  GibbsConfig config;
  config.omega = g.omega;
  config.sigma0 = g.sigma0;
  config.beta = g.beta;
  config.k_max = g.k_max;
  config.region = Window{g.region_a, g.region_b};
  config.basis_window = basis.window();
  config.grid_points = g.grid_points;
  config.validate();
  return config;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

IncrementSeries load_increments(const std::string& path, std::optional<double> delta) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open increment file '" + path + "'");
  return io::read_increments(in, delta);
}

int run_simulate(const Flags& f) {
  const SamplingScheme scheme = scheme_from(f.scheme);
  if (scheme.n() > f.max_increments) {
    throw ResourceError("n = " + std::to_string(scheme.n()) + " exceeds --max-increments " +
                        std::to_string(f.max_increments));
  }
  // With --j the seed fans out exactly as in the experiment harness, so the
  // file matches the regime's simulated path.
  const std::uint64_t seed =
      f.scheme.j ? SeedPlan::derive(f.seed, *f.scheme.j).simulation : f.seed;
  const IncrementStream stream = [&] {
    if (f.process.process == "vg") return vg_stream(vg_params(f.process), scheme, seed);
    if (!f.process.lambda || !f.process.jump) {
      throw ParameterError("--process cpois needs --lambda and --jump");
    }
    CompoundPoissonParams params{*f.process.lambda, JumpDistribution::parse(*f.process.jump)};
    params.validate();
    return compound_poisson_stream(params, scheme, seed);
  }();

  std::ofstream file;
  if (f.out != "-") file = open_output(f.out);
  std::ostream& out = f.out == "-" ? std::cout : file;
  out << "# delta=" << io::format_double(scheme.delta()) << " n=" << scheme.n()
      << " seed=" << seed << '\n';
  stream.for_each_chunk([&](std::uint64_t, std::span<const double> values) {
    for (double y : values) out << io::format_double(y) << '\n';
  });
  out.flush();
  if (!out) throw std::runtime_error("write failed");

  std::ostream& log = f.out == "-" ? std::cerr : std::cout;
  log << "process=" << f.process.process << " delta=" << io::format_double(scheme.delta())
      << " n=" << scheme.n() << " t_n=" << io::format_double(scheme.horizon())
      << " seed=" << seed << '\n';
  return kOk;
}

int run_estimate(const Flags& f) {
  const IncrementSeries series = load_increments(f.in, f.scheme.delta);
  const double horizon = series.scheme.horizon();
  const BasisSystem basis = basis_from(f.basis, horizon);
  const Window region{f.gibbs.region_a, f.gibbs.region_b};
  std::optional<TrueLevyDensity> truth;
  if (f.truth) {
    region.validate_excludes_origin();
    truth = true_density_vg(vg_params(f.process), exponent_from(f.exponent));
  }

  const CoefficientVector theta_hat = empirical_coefficients(series, basis);
  const std::string text = io::to_json(theta_hat).dump(1) + "\n";
  if (f.out.empty() || f.out == "-") {
    std::cout << text;
  } else {
    auto out = open_output(f.out);
    out << text;
  }
  std::ostream& log = f.out.empty() || f.out == "-" ? std::cerr : std::cout;
  log << "n=" << series.scheme.n() << " t_n=" << io::format_double(horizon)
      << " K=" << basis.size() << '\n';
  if (truth) {
    log << "l2_error=" << io::format_double(l2_error_on_window(theta_hat, *truth, region,
                                                               f.gibbs.grid_points))
        << '\n';
  }
  return kOk;
}

int run_posterior(const Flags& f) {
  std::optional<CoefficientVector> loaded;
  if (!f.coefficients.empty()) {
    std::ifstream in(f.coefficients, std::ios::binary);
    if (!in) throw ParseError("cannot open coefficient file '" + f.coefficients + "'");
    json doc;
    try {
      in >> doc;
    } catch (const json::exception& e) {
      throw ParseError(std::string("coefficient file: ") + e.what());
    }
    loaded = io::coefficients_from_json(doc);
  } else if (!f.in.empty()) {
    const IncrementSeries series = load_increments(f.in, f.scheme.delta);
    loaded = empirical_coefficients(series, basis_from(f.basis, series.scheme.horizon()));
  } else {
    throw ParameterError("posterior needs --coefficients or --in");
  }
  CoefficientVector theta_hat = std::move(*loaded);
  const double horizon = theta_hat.horizon;
  if (!(horizon > 0.0)) throw ParameterError("coefficients carry no t_n; they must be empirical");

  GibbsConfig config = gibbs_from(f.gibbs, theta_hat.basis);
  const std::size_t k_max = config.k_max.value_or(theta_hat.size());
  if (k_max > theta_hat.size()) {
    throw ParameterError("--k-max " + std::to_string(k_max) + " exceeds the " +
                         std::to_string(theta_hat.size()) + " available coefficients");
  }
  if (k_max < theta_hat.size()) {
    if (!theta_hat.basis.nested()) throw ParameterError("--k-max needs a nested basis");
    theta_hat = CoefficientVector(theta_hat.basis.truncated(k_max),
                                  {theta_hat.values.begin(),
                                   theta_hat.values.begin() + static_cast<std::ptrdiff_t>(k_max)},
                                  theta_hat.role, horizon);
  }
  config.k_max = k_max;
  const BandMetric metric = band_metric_from_string(f.metric);
  if (!(f.level > 0.0 && f.level < 1.0)) throw ParameterError("--level must lie in (0, 1)");
  if (f.draws < 1) throw ParameterError("--draws must be at least 1");
  if (static_cast<std::uint64_t>(f.draws) * config.grid_points > (std::uint64_t{1} << 27)) {
    throw ResourceError("--draws times --grid-points exceeds 2^27 grid values");
  }
  std::optional<TrueLevyDensity> truth;
  if (f.truth) truth = true_density_vg(vg_params(f.process), exponent_from(f.exponent));

  const MarginalK pmf = f.fixed_k ? MarginalK::point_mass(*f.fixed_k, k_max)
                                  : marginal_k(theta_hat, horizon, config);
  const PosteriorDraws draws = f.fixed_k
                                   ? sample_fixed_k(theta_hat, horizon, config, *f.fixed_k,
                                                    f.draws, f.seed)
                                   : sample_posterior(theta_hat, horizon, config, pmf, f.draws,
                                                      f.seed);
  const CredibleBand band = credible_band(draws, f.level, metric);

  const fs::path dir(f.out_dir);
  fs::create_directories(dir);
  {
    auto out = open_output(dir / "draws.jsonl");
    io::write_draws_jsonl(out, draws);
  }
  {
    auto out = open_output(dir / "k_posterior.csv");
    const auto rows = io::k_posterior_rows(f.tag, pmf);
    io::write_k_posterior_csv(out, rows);
  }
  {
    auto out = open_output(dir / "band.csv");
    std::vector<double> psi_true;
    if (truth) {
      for (double x : draws.grid) psi_true.push_back((*truth)(x));
    }
    io::write_band_csv(out, draws.grid,
                       truth ? std::optional<std::span<const double>>(psi_true) : std::nullopt,
                       band.center.values, band.lower, band.upper);
  }
  std::cout << "t_n=" << io::format_double(horizon) << " k_max=" << k_max
            << " K_mode=" << pmf.mode() << " draws=" << draws.count()
            << " band_radius=" << io::format_double(band.radius) << '\n';
  return kOk;
}

int run_experiment(const Flags& f) {
  if (f.regimes.empty()) throw ParameterError("give at least one --j");
  ExperimentOptions options;
  options.process = vg_params(f.process);
  options.truth_exponent = exponent_from(f.exponent);
  options.gibbs.omega = f.gibbs.omega;
  options.gibbs.sigma0 = f.gibbs.sigma0;
  options.gibbs.beta = f.gibbs.beta;
  options.gibbs.region = Window{f.gibbs.region_a, f.gibbs.region_b};
  options.gibbs.basis_window = Window{f.basis.a, f.basis.b};
  options.gibbs.grid_points = f.gibbs.grid_points;
  options.gibbs.validate();
  options.num_draws = f.draws;
  options.band_level = f.level;
  options.band_metric = band_metric_from_string(f.metric);
  options.radius_fraction = f.radius_fraction;
  options.tau = f.tau;
  options.max_increments = f.max_increments;
  if (!(f.tau > 1.0)) throw ParameterError("--tau must exceed 1");
  if (!(f.alpha > 0.0)) throw ParameterError("--alpha must be positive");
  std::vector<RegimeSpec> specs;
  for (int j : f.regimes) {
    specs.push_back(RegimeSpec::from_index(j));
    if (!(specs.back().horizon() > 1.0)) throw ParameterError("t_n must exceed 1 for the rate");
    if (specs.back().n > options.max_increments) {
      throw ResourceError("regime j=" + std::to_string(j) + " needs " +
                          std::to_string(specs.back().n) + " increments, above --max-increments " +
                          std::to_string(options.max_increments));
    }
  }

  std::vector<ExperimentReport> reports;
  for (const auto& spec : specs) {
    reports.push_back(run_regime(spec, options, f.seed));
    const auto& r = reports.back();
    std::cerr << "j=" << spec.j << " n=" << spec.n << " t_n=" << io::format_double(spec.horizon())
              << " K_mode=" << r.k_mode << " err_postmean=" << io::format_double(r.err_posterior_mean)
              << " runtime_s=" << io::format_double(r.runtime_seconds) << '\n';
  }

  std::vector<io::ErrorRow> error_rows;
  for (const auto& r : reports) {
    const double eps = rate_epsilon(r.regime.horizon(), f.alpha);
    error_rows.push_back({r.regime.j, r.regime.horizon(), r.err_projection, r.err_posterior_mean,
                          eps, r.err_posterior_mean / eps});
  }
  const auto no_overfit = no_overfit_diagnostic(reports, f.tau, f.alpha);

  json doc;
  doc["seed"] = f.seed;
  doc["alpha"] = f.alpha;
  doc["tau"] = f.tau;
  doc["regimes"] = json::array();
  for (const auto& r : reports) doc["regimes"].push_back(io::to_json(r));
  doc["no_overfit"] = json::array();
  for (const auto& row : no_overfit) {
    doc["no_overfit"].push_back({{"j", row.j},
                                 {"t_n", row.horizon},
                                 {"K_n", row.oracle_k},
                                 {"threshold", row.threshold},
                                 {"mass", row.mass}});
  }
  doc["rate_table"] = json::array();
  for (const auto& row : error_rows) {
    doc["rate_table"].push_back(
        {{"j", row.j}, {"t_n", row.horizon}, {"error", row.err_posterior_mean}, {"eps_n", row.eps},
         {"ratio", row.ratio}});
  }

  const fs::path dir(f.out_dir);
  fs::create_directories(dir);
  {
    auto out = open_output(dir / "report.json");
    out << doc.dump(1) << '\n';
  }
  {
    auto out = open_output(dir / "errors.csv");
    io::write_errors_csv(out, error_rows);
  }
  {
    auto out = open_output(dir / "k_posterior.csv");
    std::vector<io::KPosteriorRow> rows;
    for (const auto& r : reports) {
      const auto part = io::k_posterior_rows(r.regime.j, r.k_posterior);
      rows.insert(rows.end(), part.begin(), part.end());
    }
    io::write_k_posterior_csv(out, rows);
  }
  auto write_band = [](const fs::path& path, const ExperimentReport& r) {
    auto out = open_output(path);
    io::write_band_csv(out, r.grid, std::span<const double>(r.psi_true), r.psi_mean, r.band_lower,
                       r.band_upper);
  };
  const auto last = std::max_element(reports.begin(), reports.end(), [](const auto& x, const auto& y) {
    return x.regime.j < y.regime.j;
  });
  write_band(dir / "band.csv", *last);
  if (reports.size() > 1) {
    for (const auto& r : reports) write_band(dir / ("band_j" + std::to_string(r.regime.j) + ".csv"), r);
  }
  std::cout << "wrote report.json, errors.csv, k_posterior.csv, band.csv to " << dir.string()
            << '\n';
  return kOk;
}

int run_check(const Flags& f) {
  const SamplingScheme scheme = scheme_from(f.scheme);
  const BasisSystem basis = basis_from(f.basis, scheme.horizon());
  const ComplexityCase complexity = complexity_case_from_string(f.complexity);
  GibbsConfig config;
  config.omega = f.gibbs.omega;
  config.sigma0 = f.gibbs.sigma0;
  config.beta = f.gibbs.beta;
  config.region = Window{f.gibbs.region_a, f.gibbs.region_b};
  config.basis_window = basis.window();

  double psi_sup = 0.0;
  if (f.psi_sup) {
    psi_sup = *f.psi_sup;
  } else {
    config.region.validate_excludes_origin();
    const TrueLevyDensity truth = true_density_vg(vg_params(f.process), exponent_from(f.exponent));
    for (double x : uniform_grid(config.region, f.gibbs.grid_points)) {
      psi_sup = std::max(psi_sup, truth(x));
    }
  }

  const DeltaDiagnostics delta = delta_condition(features(basis), scheme, complexity, f.bound);
  const ConfigDiagnostics cfg = validate_config(config, psi_sup, f.tau);
  json doc;
  doc["scheme"] = {{"delta", scheme.delta()}, {"n", scheme.n()}, {"t_n", scheme.horizon()}};
  doc["basis"] = io::to_json(basis);
  doc["psi_sup"] = psi_sup;
  doc["delta_check"] = io::to_json(delta);
  doc["config_check"] = io::to_json(cfg);
  std::cout << doc.dump(1) << '\n';
  return kOk;
}

bool has_flag(const std::vector<std::string>& args, const std::string& key) {
  const std::string flag = "--" + key;
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

// Appends "--key=value" for every config-file key the chosen subcommand
// accepts and the command line does not already set. Keys meant for other
// subcommands are ignored, so one file can serve all of them.
std::vector<std::string> merge_config(CLI::App& app, std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  CLI::App* sub = nullptr;
  for (const auto& a : args) {
    if ((sub = app.get_subcommand_no_throw(a)) != nullptr) break;
  }
  if (sub == nullptr) return args;
  for (const auto& [key, value] : io::read_key_value_file(path)) {
    if (key == "config" || has_flag(args, key)) continue;
    if (sub->get_option_no_throw("--" + key) == nullptr) {
      if (app.get_option_no_throw("--" + key) == nullptr) {
        std::cerr << "note: config key '" << key << "' is not used by " << sub->get_name() << '\n';
      }
      continue;
    }
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gibbs-posterior inference on Levy densities", "levy-gibbs"};
  app.require_subcommand(1);
  Flags f;
  app.add_option("--config", f.config_path, "flat key = value file; flags take precedence");

  auto* simulate = app.add_subcommand("simulate", "simulate increments to a text file");
  add_process_flags(*simulate, f.process);
  simulate->add_option("--lambda", f.process.lambda, "compound Poisson intensity");
  simulate->add_option("--jump", f.process.jump, "jump law: point:<c> or normal:<m>,<s>");
  add_scheme_flags(*simulate, f.scheme);
  simulate->add_option("--seed", f.seed, "seed")->capture_default_str();
  simulate->add_option("--out", f.out, "output file, - for stdout")->required();
  simulate->add_option("--max-increments", f.max_increments, "resource guard on n")
      ->capture_default_str();

  auto* estimate = app.add_subcommand("estimate", "empirical coefficients from increments");
  estimate->add_option("--in", f.in, "increment file")->required();
  estimate->add_option("--delta", f.scheme.delta, "sampling interval if the file has no header");
  add_basis_flags(*estimate, f.basis);
  estimate->add_option("--out", f.out, "coefficient JSON file (default stdout)");
  add_truth_flags(*estimate, f);
  add_process_flags(*estimate, f.process);
  estimate->add_option("--region-a", f.gibbs.region_a, "left end of D")->capture_default_str();
  estimate->add_option("--region-b", f.gibbs.region_b, "right end of D")->capture_default_str();
  estimate->add_option("--grid-points", f.gibbs.grid_points, "grid size on D")
      ->capture_default_str();

  auto* posterior = app.add_subcommand("posterior", "sample the Gibbs posterior");
  auto* coef = posterior->add_option("--coefficients", f.coefficients, "coefficient JSON file");
  auto* in = posterior->add_option("--in", f.in, "increment file (estimates first)");
  coef->excludes(in);
  posterior->add_option("--delta", f.scheme.delta, "sampling interval if the file has no header");
  add_basis_flags(*posterior, f.basis);
  add_gibbs_flags(*posterior, f.gibbs);
  posterior->add_option("--fixed-K", f.fixed_k, "bypass the prior on K");
  posterior->add_option("--draws", f.draws, "number of draws")->capture_default_str();
  posterior->add_option("--seed", f.seed, "seed")->capture_default_str();
  posterior->add_option("--level", f.level, "credible level")->capture_default_str();
  posterior->add_option("--metric", f.metric, "sup or l2")
      ->check(CLI::IsMember({"sup", "l2"}))
      ->capture_default_str();
  posterior->add_option("--tag", f.tag, "value of the j column in k_posterior.csv")
      ->capture_default_str();
  posterior->add_option("--out-dir", f.out_dir, "output directory")->capture_default_str();
  add_truth_flags(*posterior, f);
  add_process_flags(*posterior, f.process);

  auto* experiment = app.add_subcommand("experiment", "run the variance-gamma study");
  experiment->add_option("--j", f.regimes, "regime indices")->delimiter(',')->capture_default_str();
  experiment->add_option("--seed", f.seed, "master seed")->capture_default_str();
  experiment->add_option("--draws", f.draws, "draws per regime")->capture_default_str();
  experiment->add_option("--level", f.level, "credible level")->capture_default_str();
  experiment->add_option("--metric", f.metric, "sup or l2")
      ->check(CLI::IsMember({"sup", "l2"}))
      ->capture_default_str();
  experiment->add_option("--alpha", f.alpha, "assumed smoothness")->capture_default_str();
  experiment->add_option("--tau", f.tau, "no-overfit multiple")->capture_default_str();
  experiment->add_option("--radius-fraction", f.radius_fraction,
                         "concentration radius over ||psi||_L2(D)")
      ->capture_default_str();
  experiment->add_option("--max-increments", f.max_increments, "resource guard on n")
      ->capture_default_str();
  experiment->add_option("--out-dir", f.out_dir, "output directory")->capture_default_str();
  experiment->add_option("--a", f.basis.a, "basis window left end")->capture_default_str();
  experiment->add_option("--b", f.basis.b, "basis window right end")->capture_default_str();
  experiment->add_option("--omega", f.gibbs.omega, "learning rate")->capture_default_str();
  experiment->add_option("--sigma0", f.gibbs.sigma0, "prior sd")->capture_default_str();
  experiment->add_option("--beta", f.gibbs.beta, "complexity prior coefficient")
      ->capture_default_str();
  experiment->add_option("--region-a", f.gibbs.region_a, "left end of D")->capture_default_str();
  experiment->add_option("--region-b", f.gibbs.region_b, "right end of D")->capture_default_str();
  experiment->add_option("--grid-points", f.gibbs.grid_points, "grid size on D")
      ->capture_default_str();
  experiment->add_option("--exponent", f.exponent, "sign on the positive VG branch")
      ->check(CLI::IsMember({"plus", "minus"}))
      ->capture_default_str();
  add_process_flags(*experiment, f.process);

  auto* check = app.add_subcommand("check", "regime and configuration diagnostics");
  add_scheme_flags(*check, f.scheme);
  add_basis_flags(*check, f.basis);
  check->add_option("--case", f.complexity, "fixed-K, increasing-K or prior-on-K")
      ->capture_default_str();
  check->add_option("--bound", f.bound, "bound for the delta conditions")->capture_default_str();
  check->add_option("--omega", f.gibbs.omega, "learning rate")->capture_default_str();
  check->add_option("--sigma0", f.gibbs.sigma0, "prior sd")->capture_default_str();
  check->add_option("--beta", f.gibbs.beta, "complexity prior coefficient")->capture_default_str();
  check->add_option("--tau", f.tau, "no-overfit multiple")->capture_default_str();
  check->add_option("--psi-sup", f.psi_sup, "sup of psi on D (default: VG truth)");
  check->add_option("--region-a", f.gibbs.region_a, "left end of D")->capture_default_str();
  check->add_option("--region-b", f.gibbs.region_b, "right end of D")->capture_default_str();
  check->add_option("--grid-points", f.gibbs.grid_points, "grid size on D")->capture_default_str();
  check->add_option("--exponent", f.exponent, "sign on the positive VG branch")
      ->check(CLI::IsMember({"plus", "minus"}))
      ->capture_default_str();
  add_process_flags(*check, f.process);

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    std::vector<std::string> args = merge_config(app, {argv + 1, argv + argc});
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  } catch (const levy::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kParse;
  }

  try {
    if (simulate->parsed()) return run_simulate(f);
    if (estimate->parsed()) return run_estimate(f);
    if (posterior->parsed()) return run_posterior(f);
    if (experiment->parsed()) return run_experiment(f);
    if (check->parsed()) return run_check(f);
  } catch (const levy::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const levy::ResourceError& e) {
    std::cerr << "resource guard: " << e.what() << '\n';
    return kResource;
  } catch (const levy::ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const levy::RangeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const levy::WindowError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const levy::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
