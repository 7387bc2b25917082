#include "levy_gibbs/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "levy_gibbs/errors.hpp"

namespace levy::io {

using nlohmann::json;

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw RangeError("cannot format double");
  return std::string(buf, ptr);
}

std::optional<double> parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

void write_increments(std::ostream& out, const IncrementSeries& series, bool header) {
  if (header) {
    out << "# delta=" << format_double(series.scheme.delta()) << " n=" << series.scheme.n()
        << " seed=" << series.seed << '\n';
  }
  for (double y : series.values) out << format_double(y) << '\n';
}

namespace {

std::uint64_t parse_unsigned(std::string_view text, std::size_t line, const char* what) {
  std::uint64_t value = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(std::string("malformed ") + what + " '" + std::string(text) + "'", line);
  }
  return value;
}

}  // namespace

IncrementSeries read_increments(std::istream& in, std::optional<double> delta) {
  std::optional<std::uint64_t> header_n;
  std::uint64_t seed = 0;
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (view.find_first_not_of(" \t") == std::string_view::npos) continue;
    if (view.front() == '#') {
      if (seen_data || line_no > 1) continue;
      std::istringstream tokens{std::string(view.substr(1))};
      std::string token;
      while (tokens >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = token.substr(0, eq);
        const std::string_view value = std::string_view(token).substr(eq + 1);
        if (key == "delta") {
          const auto d = parse_double(value);
          if (!d) throw ParseError("malformed delta '" + std::string(value) + "'", line_no);
          delta = *d;
        } else if (key == "n") {
          header_n = parse_unsigned(value, line_no, "n");
        } else if (key == "seed") {
          seed = parse_unsigned(value, line_no, "seed");
        }
      }
      continue;
    }
    seen_data = true;
    const auto y = parse_double(view);
    if (!y || !std::isfinite(*y)) {
      throw ParseError("cannot parse increment '" + std::string(view) + "'", line_no);
    }
    values.push_back(*y);
  }
  if (!delta) throw ParseError("increment file has no '# delta=' header and no delta was given");
  if (header_n && *header_n != values.size()) {
    throw ParseError("header announces n=" + std::to_string(*header_n) + " but the file holds " +
                     std::to_string(values.size()) + " increments");
  }
  if (values.empty()) throw ParseError("increment file holds no values");
  try {
    return IncrementSeries{SamplingScheme(*delta, values.size()), std::move(values), seed};
  } catch (const Error& e) {
    throw ParseError(e.what());
  }
}

json to_json(const BasisSystem& basis) {
  json doc{{"family", to_string(basis.family())},
           {"a", basis.window().a},
           {"b", basis.window().b},
           {"K", basis.size()}};
  if (basis.family() == BasisFamily::piecewise_legendre) {
    doc["J"] = basis.degrees();
    doc["L"] = basis.pieces();
  }
  return doc;
}

BasisSystem basis_from_json(const json& doc) {
  try {
    const auto family = basis_family_from_string(doc.at("family").get<std::string>());
    const Window window{doc.at("a").get<double>(), doc.at("b").get<double>()};
    const auto size = doc.at("K").get<std::size_t>();
    if (family == BasisFamily::trigonometric) return BasisSystem::trigonometric(window, size);
    const auto basis = BasisSystem::piecewise_legendre(window, doc.at("J").get<std::size_t>(),
                                                       doc.at("L").get<std::size_t>());
    if (basis.size() != size) throw ParseError("basis descriptor: K must equal J * L");
    return basis;
  } catch (const json::exception& e) {
    throw ParseError(std::string("basis descriptor: ") + e.what());
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string("basis descriptor: ") + e.what());
  }
}

json to_json(const CoefficientVector& theta) {
  return json{{"basis", to_json(theta.basis)},
              {"role", to_string(theta.role)},
              {"t_n", theta.horizon},
              {"values", theta.values}};
}

CoefficientVector coefficients_from_json(const json& doc) {
  try {
    return CoefficientVector(basis_from_json(doc.at("basis")),
                             doc.at("values").get<std::vector<double>>(),
                             coefficient_role_from_string(doc.at("role").get<std::string>()),
                             doc.value("t_n", 0.0));
  } catch (const json::exception& e) {
    throw ParseError(std::string("coefficient document: ") + e.what());
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string("coefficient document: ") + e.what());
  }
}

void write_draws_jsonl(std::ostream& out, const PosteriorDraws& draws) {
  for (std::size_t i = 0; i < draws.count(); ++i) {
    out << json{{"draw_index", i}, {"K", draws.draws[i].size}, {"theta", draws.draws[i].theta}}.dump()
        << '\n';
  }
}

void write_k_posterior_csv(std::ostream& out, std::span<const KPosteriorRow> rows) {
  out << "j,K,prob\n";
  for (const auto& r : rows) out << r.j << ',' << r.k << ',' << format_double(r.prob) << '\n';
}

std::vector<KPosteriorRow> k_posterior_rows(int j, const MarginalK& pmf) {
  std::vector<KPosteriorRow> rows;
  rows.reserve(pmf.k_max());
  for (std::size_t k = 1; k <= pmf.k_max(); ++k) rows.push_back({j, k, pmf.prob(k)});
  return rows;
}

void write_band_csv(std::ostream& out, std::span<const double> grid,
                    std::optional<std::span<const double>> psi_true,
                    std::span<const double> psi_mean, std::span<const double> lower,
                    std::span<const double> upper) {
  const std::size_t n = grid.size();
  if (psi_mean.size() != n || lower.size() != n || upper.size() != n ||
      (psi_true && psi_true->size() != n)) {
    throw DimensionError("band columns have different lengths");
  }
  out << (psi_true ? "x,psi_true,psi_mean,band_lo,band_hi\n" : "x,psi_mean,band_lo,band_hi\n");
  for (std::size_t i = 0; i < n; ++i) {
    out << format_double(grid[i]) << ',';
    if (psi_true) out << format_double((*psi_true)[i]) << ',';
    out << format_double(psi_mean[i]) << ',' << format_double(lower[i]) << ','
        << format_double(upper[i]) << '\n';
  }
}

void write_errors_csv(std::ostream& out, std::span<const ErrorRow> rows) {
  out << "j,t_n,err_projection,err_postmean,eps_n,ratio\n";
  for (const auto& r : rows) {
    out << r.j << ',' << format_double(r.horizon) << ',' << format_double(r.err_projection) << ','
        << format_double(r.err_posterior_mean) << ',' << format_double(r.eps) << ','
        << format_double(r.ratio) << '\n';
  }
}

json to_json(const GibbsConfig& config) {
  json doc{{"omega", config.omega},
           {"sigma0", config.sigma0},
           {"beta", config.beta},
           {"D", {config.region.a, config.region.b}},
           {"D_prime", {config.basis_window.a, config.basis_window.b}},
           {"grid_points", config.grid_points}};
  doc["k_max"] = config.k_max ? json(*config.k_max) : json(nullptr);
  return doc;
}

json to_json(const ConfigDiagnostics& d) {
  return json{{"C_squared", d.c_squared},
              {"omega_C_squared", d.omega_c_squared},
              {"beta", d.beta},
              {"beta_margin", d.beta_margin},
              {"beta_condition", d.beta_condition},
              {"tau", d.tau},
              {"no_overfit_threshold", d.no_overfit_threshold},
              {"no_overfit_condition", d.no_overfit_condition},
              {"notes", d.notes}};
}

json to_json(const DeltaDiagnostics& d) {
  return json{{"case", to_string(d.complexity)},
              {"bound", d.bound},
              {"F1_squared_n_delta3", d.f1_squared_n_delta3},
              {"F2_delta", d.f2_delta},
              {"n_delta3", d.n_delta3},
              {"n_delta_5_3", d.n_delta_5_3},
              {"F1_pass", d.f1_pass},
              {"F2_pass", d.f2_pass},
              {"n_delta_5_3_pass", d.n_delta_5_3_pass},
              {"pass", d.pass}};
}

json to_json(const ExperimentReport& r) {
  const auto& o = r.options;
  json doc;
  doc["regime"] = {{"j", r.regime.j},
                   {"delta", r.regime.delta},
                   {"n", r.regime.n},
                   {"t_n", r.regime.horizon()}};
  doc["seed"] = r.seed;
  doc["seeds"] = {{"simulation", r.seeds.simulation}, {"draws", r.seeds.draws}};
  doc["config"] = {{"process", {{"mu", o.process.mu}, {"sigma", o.process.sigma}, {"nu", o.process.nu}}},
                   {"truth_exponent", o.truth_exponent == VgExponent::plus ? "plus" : "minus"},
                   {"gibbs", to_json(o.gibbs)},
                   {"num_draws", o.num_draws},
                   {"band_level", o.band_level},
                   {"band_metric", to_string(o.band_metric)},
                   {"radius_fraction", o.radius_fraction},
                   {"tau", o.tau}};
  doc["k_max"] = r.k_max;
  doc["in_window_count"] = r.in_window_count;
  doc["k_posterior"] = {{"mode", r.k_mode}, {"probs", r.k_posterior.probs}};
  doc["errors"] = {{"projection", r.err_projection},
                   {"projection_K", r.k_mode},
                   {"posterior_mean", r.err_posterior_mean}};
  doc["band_radius"] = r.band_radius;
  doc["concentration"] = {{"radius", r.concentration_radius}, {"prob_outside", r.concentration_prob}};
  doc["psi_sup"] = r.psi_sup;
  doc["config_check"] = to_json(r.config_check);
  doc["delta_check"] = to_json(r.delta_check);
  doc["theta_hat"] = to_json(r.theta_hat);
  return doc;
}

std::map<std::string, std::string> read_key_values(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  auto trim = [](std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return std::string();
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", line_no);
    std::string key = trim(line.substr(0, eq));
    while (!key.empty() && key.front() == '-') key.erase(0, 1);
    if (key.empty()) throw ParseError("empty key", line_no);
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

std::map<std::string, std::string> read_key_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'");
  return read_key_values(in);
}

}  // namespace levy::io
