#include "levy_gibbs/process_sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "levy_gibbs/errors.hpp"
#include "levy_gibbs/parallel.hpp"

namespace levy {

SamplingScheme::SamplingScheme(double delta, std::uint64_t n) : delta_(delta), n_(n) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw ParameterError("sampling scheme: delta must be positive and finite");
  }
  if (n == 0) throw ParameterError("sampling scheme: n must be at least 1");
  if (!std::isfinite(static_cast<double>(n) * delta)) {
    throw RangeError("sampling scheme: n * delta overflows");
  }
}

void VarianceGammaParams::validate() const {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw ParameterError("variance-gamma: nu must be > 0");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw ParameterError("variance-gamma: sigma must be >= 0");
  }
  if (!std::isfinite(mu)) throw ParameterError("variance-gamma: mu must be finite");
}

JumpDistribution::JumpDistribution(NormalJump n) : law_(n) {
  if (!(n.sd > 0.0) || !std::isfinite(n.mean)) {
    throw ParameterError("normal jump law: sd must be > 0 and mean finite");
  }
}

double JumpDistribution::sample(Engine& engine) const {
  if (const auto* p = std::get_if<PointMassJump>(&law_)) return p->at;
  const auto& n = std::get<NormalJump>(law_);
  return n.mean + n.sd * standard_normal(engine);
}

double JumpDistribution::mean() const noexcept {
  if (const auto* p = std::get_if<PointMassJump>(&law_)) return p->at;
  return std::get<NormalJump>(law_).mean;
}

double JumpDistribution::second_moment() const noexcept {
  if (const auto* p = std::get_if<PointMassJump>(&law_)) return p->at * p->at;
  const auto& n = std::get<NormalJump>(law_);
  return n.sd * n.sd + n.mean * n.mean;
}

double JumpDistribution::density(double x) const {
  if (is_point_mass()) throw DomainError("a point-mass jump law has no density");
  const auto& n = std::get<NormalJump>(law_);
  const double z = (x - n.mean) / n.sd;
  return std::exp(-0.5 * z * z) / (n.sd * std::sqrt(2.0 * std::numbers::pi));
}

std::string JumpDistribution::describe() const {
  std::ostringstream out;
  out.precision(17);
  if (const auto* p = std::get_if<PointMassJump>(&law_)) {
    out << "point:" << p->at;
  } else {
    const auto& n = std::get<NormalJump>(law_);
    out << "normal:" << n.mean << ',' << n.sd;
  }
  return out.str();
}

namespace {

double parse_number(std::string_view text, const std::string& context) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParameterError("cannot parse number '" + std::string(text) + "' in " + context);
  }
  return value;
}

}  // namespace

JumpDistribution JumpDistribution::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw ParameterError("jump law must look like point:<c> or normal:<mean>,<sd>, got '" +
                         text + "'");
  }
  const std::string kind = text.substr(0, colon);
  const std::string_view args = std::string_view(text).substr(colon + 1);
  if (kind == "point") return PointMassJump{parse_number(args, text)};
  if (kind == "normal") {
    const auto comma = args.find(',');
    if (comma == std::string_view::npos) {
      throw ParameterError("normal jump law needs <mean>,<sd>: '" + text + "'");
    }
    return NormalJump{parse_number(args.substr(0, comma), text),
                      parse_number(args.substr(comma + 1), text)};
  }
  throw ParameterError("unknown jump law '" + kind + "'");
}

void CompoundPoissonParams::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ParameterError("compound Poisson: lambda must be > 0");
  }
}

IncrementStream::IncrementStream(SamplingScheme scheme, std::uint64_t seed,
                                 ChunkGenerator generator, std::size_t chunk_size)
    : scheme_(scheme), seed_(seed), generator_(std::move(generator)), chunk_size_(chunk_size) {
  if (chunk_size_ == 0) throw ParameterError("increment stream: chunk size must be positive");
}

IncrementStream IncrementStream::from_series(const IncrementSeries& series,
                                             std::size_t chunk_size) {
  if (series.values.size() != series.scheme.n()) {
    throw DimensionError("increment series: value count differs from scheme n");
  }
  const std::vector<double>* values = &series.values;
  return IncrementStream(
      series.scheme, series.seed,
      [values, chunk_size](std::uint64_t chunk, std::span<double> out) {
        std::copy_n(values->begin() + static_cast<std::ptrdiff_t>(chunk * chunk_size), out.size(),
                    out.begin());
      },
      chunk_size);
}

std::uint64_t IncrementStream::chunk_count() const noexcept {
  return (scheme_.n() + chunk_size_ - 1) / chunk_size_;
}

void IncrementStream::for_each_chunk(const ChunkVisitor& visit, unsigned workers) const {
  if (workers == 0) workers = worker_count();
  const std::uint64_t chunks = chunk_count();
  const std::uint64_t batch = std::max<std::uint64_t>(1, 2ULL * workers);
  std::vector<std::vector<double>> buffers(static_cast<std::size_t>(std::min(batch, chunks)));

  for (std::uint64_t first = 0; first < chunks; first += batch) {
    const std::uint64_t count = std::min(batch, chunks - first);
    parallel_for(
        static_cast<std::size_t>(count),
        [&](std::size_t slot) {
          const std::uint64_t chunk = first + slot;
          const std::uint64_t begin = chunk * chunk_size_;
          const std::uint64_t len = std::min<std::uint64_t>(chunk_size_, scheme_.n() - begin);
          buffers[slot].resize(static_cast<std::size_t>(len));
          generator_(chunk, buffers[slot]);
        },
        workers);
    for (std::uint64_t slot = 0; slot < count; ++slot) {
      visit(first + slot, buffers[static_cast<std::size_t>(slot)]);
    }
  }
}

IncrementSeries IncrementStream::materialize(unsigned workers) const {
  IncrementSeries series{scheme_, {}, seed_};
  series.values.reserve(static_cast<std::size_t>(scheme_.n()));
  for_each_chunk(
      [&](std::uint64_t, std::span<const double> values) {
        series.values.insert(series.values.end(), values.begin(), values.end());
      },
      workers);
  return series;
}

IncrementStream vg_stream(const VarianceGammaParams& params, const SamplingScheme& scheme,
                          std::uint64_t seed) {
  params.validate();
  const double shape = scheme.delta() / params.nu;
  const double scale = params.nu;
  const double mu = params.mu;
  const double sigma = params.sigma;
  return IncrementStream(scheme, seed, [=](std::uint64_t chunk, std::span<double> out) {
    Engine engine = make_engine(seed, chunk);
    for (double& y : out) {
      const double u = gamma_variate(engine, shape, scale);
      y = u == 0.0 ? 0.0 : mu * u + sigma * std::sqrt(u) * standard_normal(engine);
    }
  });
}

IncrementStream compound_poisson_stream(const CompoundPoissonParams& params,
                                        const SamplingScheme& scheme, std::uint64_t seed) {
  params.validate();
  const double rate = params.lambda * scheme.delta();
  const JumpDistribution jump = params.jump;
  return IncrementStream(scheme, seed, [=](std::uint64_t chunk, std::span<double> out) {
    Engine engine = make_engine(seed, chunk);
    for (double& y : out) {
      const std::uint64_t jumps = poisson_variate(engine, rate);
      double sum = 0.0;
      for (std::uint64_t j = 0; j < jumps; ++j) sum += jump.sample(engine);
      y = sum;
    }
  });
}

IncrementSeries simulate_vg(const VarianceGammaParams& params, const SamplingScheme& scheme,
                            std::uint64_t seed) {
  return vg_stream(params, scheme, seed).materialize();
}

IncrementSeries simulate_compound_poisson(const CompoundPoissonParams& params,
                                          const SamplingScheme& scheme, std::uint64_t seed) {
  return compound_poisson_stream(params, scheme, seed).materialize();
}

TrueLevyDensity::TrueLevyDensity(Family family, std::string description,
                                 std::function<double(double)> eval)
    : family_(family), description_(std::move(description)), eval_(std::move(eval)) {}

double TrueLevyDensity::operator()(double x) const {
  if (x == 0.0 || !std::isfinite(x)) {
    throw DomainError("Levy density is defined on the real line minus the origin");
  }
  return eval_(x);
}

VgScales vg_scales(const VarianceGammaParams& p) noexcept {
  const double root = std::sqrt(p.mu * p.mu * p.nu * p.nu / 4.0 + p.sigma * p.sigma * p.nu / 2.0);
  return {root + p.mu * p.nu / 2.0, root - p.mu * p.nu / 2.0};
}

TrueLevyDensity true_density_vg(const VarianceGammaParams& params, VgExponent exponent) {
  params.validate();
  if (params.mu == 0.0 && params.sigma == 0.0) {
    throw ParameterError("variance-gamma density: mu and sigma cannot both be zero");
  }
  const auto [eta_plus, eta_minus] = vg_scales(params);
  const double inv_nu = 1.0 / params.nu;
  const double sign = exponent == VgExponent::plus ? 1.0 : -1.0;
  std::ostringstream desc;
  desc.precision(17);
  desc << "variance-gamma(mu=" << params.mu << ", sigma=" << params.sigma
       << ", nu=" << params.nu << ", exponent="
       << (exponent == VgExponent::plus ? "plus" : "minus") << ')';
  return TrueLevyDensity(TrueLevyDensity::Family::variance_gamma, desc.str(), [=](double x) {
    const double rate = x > 0.0 ? sign * x / eta_plus : x / eta_minus;
    return inv_nu / std::abs(x) * std::exp(rate);
  });
}

TrueLevyDensity true_density_compound_poisson(const CompoundPoissonParams& params) {
  params.validate();
  if (params.jump.is_point_mass()) {
    throw ParameterError("compound Poisson with a point-mass jump law has no Levy density");
  }
  const double lambda = params.lambda;
  const JumpDistribution jump = params.jump;
  return TrueLevyDensity(TrueLevyDensity::Family::compound_poisson, "compound-poisson(" + jump.describe() + ")",
                         [=](double x) { return lambda * jump.density(x); });
}

}  // namespace levy
