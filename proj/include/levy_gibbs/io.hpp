#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "levy_gibbs/basis.hpp"
#include "levy_gibbs/experiment.hpp"
#include "levy_gibbs/gibbs_posterior.hpp"
#include "levy_gibbs/process_sim.hpp"

namespace levy::io {

// Shortest text that reads back to the same double, '.' decimal separator
// regardless of locale.
std::string format_double(double x);
// Strict, locale-free parse of a whole string (surrounding blanks and a
// leading '+' allowed); nullopt on any junk.
std::optional<double> parse_double(std::string_view text);

// One value per line, preceded by "# delta=<..> n=<..> seed=<..>" when
// `header` is set.
void write_increments(std::ostream& out, const IncrementSeries& series, bool header = true);
// Reads the format above. Without a header line the caller must supply
// delta (n is the number of values and seed is 0). Throws ParseError naming
// the offending line.
IncrementSeries read_increments(std::istream& in, std::optional<double> delta = std::nullopt);

nlohmann::json to_json(const BasisSystem& basis);
BasisSystem basis_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const CoefficientVector& theta);
CoefficientVector coefficients_from_json(const nlohmann::json& doc);

// {"draw_index":i,"K":k,"theta":[...]} per line.
void write_draws_jsonl(std::ostream& out, const PosteriorDraws& draws);

struct KPosteriorRow {
  int j;
  std::size_t k;
  double prob;
};
void write_k_posterior_csv(std::ostream& out, std::span<const KPosteriorRow> rows);
std::vector<KPosteriorRow> k_posterior_rows(int j, const MarginalK& pmf);

// Columns x, psi_true (only when given), psi_mean, band_lo, band_hi.
void write_band_csv(std::ostream& out, std::span<const double> grid,
                    std::optional<std::span<const double>> psi_true,
                    std::span<const double> psi_mean, std::span<const double> lower,
                    std::span<const double> upper);

struct ErrorRow {
  int j;
  double horizon;
  double err_projection;
  double err_posterior_mean;
  double eps;
  double ratio;
};
void write_errors_csv(std::ostream& out, std::span<const ErrorRow> rows);

nlohmann::json to_json(const GibbsConfig& config);
nlohmann::json to_json(const ConfigDiagnostics& diagnostics);
nlohmann::json to_json(const DeltaDiagnostics& diagnostics);
// Everything except wall-clock runtime, so files are byte-identical across
// repeated runs.
nlohmann::json to_json(const ExperimentReport& report);

// Flat "key = value" lines; '#' starts a comment, blank lines are skipped.
// Keys may be written with or without a leading "--".
std::map<std::string, std::string> read_key_values(std::istream& in);
std::map<std::string, std::string> read_key_value_file(const std::string& path);

}  // namespace levy::io
