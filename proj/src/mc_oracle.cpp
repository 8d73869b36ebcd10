#include "mpp/mc_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mpp/errors.hpp"
#include "mpp/parallel.hpp"
#include "mpp/rng.hpp"
#include "mpp/stable_noise.hpp"

namespace mpp {

void SimulationConfig::validate() const {
  model.validate();
  if (!(dt > 0.0)) throw DomainError("oracle.dt must be positive");
  if (!(horizon > 0.0)) throw DomainError("oracle.T must be positive");
  const double steps = horizon / dt;
  if (std::abs(steps - std::round(steps)) > 1e-9 * steps) {
    throw DomainError("oracle.T / oracle.dt must be an integer");
  }
  if (n_paths == 0) throw DomainError("oracle.n_paths must be at least 1");
  if (!(escape_radius > 0.0)) throw DomainError("oracle.escape_radius must be positive");
  if (!(window >= 0.0)) throw DomainError("oracle.window must be nonnegative");
  if (!std::isfinite(x0) || std::abs(x0) > escape_radius) {
    throw DomainError("oracle.x0 must lie inside the escape radius");
  }
  if (!(sigma >= 0.0)) throw DomainError("oracle.sigma must be nonnegative");
}

std::size_t PathEnsemble::escaped_count() const {
  return static_cast<std::size_t>(std::count(escaped.begin(), escaped.end(), 1));
}

double PathEnsemble::escaped_fraction() const {
  return static_cast<double>(escaped_count()) / static_cast<double>(size());
}

double PathEnsemble::left_window_fraction() const {
  const auto n = std::count(left_window.begin(), left_window.end(), 1);
  return static_cast<double>(n) / static_cast<double>(size());
}

namespace {

double gaussian(CounterRng& rng) {
  // Box-Muller, one variate per pair of uniforms.
  const double u1 = rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

PathEnsemble simulate_endpoints(const SimulationConfig& config) {
  config.validate();
  const ModelSpec& m = config.model;
  const long steps = std::lround(config.horizon / config.dt);
  double scale = 0.0;
  if (m.noise == NoiseKind::levy) scale = increment_scale(m.alpha, config.dt);
  if (m.noise == NoiseKind::brownian) scale = std::sqrt(config.dt);

  PathEnsemble out;
  out.config = config;
  const std::size_t n = config.n_paths;
  out.endpoints.assign(n, 0.0);
  out.escaped.assign(n, 0);
  out.left_window.assign(n, 0);

  const auto run_path = [&](std::size_t k) {
    CounterRng rng(config.seed, k);
    double x = config.x0;
    bool left = config.window > 0.0 && std::abs(x) > config.window;
    for (long s = 0; s < steps; ++s) {
      double dx = config.include_drift ? m.drift(x) * config.dt : 0.0;
      if (m.noise != NoiseKind::none) {
        const double amp = config.scaling == NoiseScaling::state ? m.noise_amplitude(x) : config.sigma;
        double z;
        if (m.noise == NoiseKind::levy) {
          const double u1 = rng.uniform();
          const double u2 = rng.uniform();
          z = standard_stable_variate(m.alpha, u1, u2);
        } else {
          z = gaussian(rng);
        }
        dx += amp * scale * z;
      }
      x += dx;
      if (config.window > 0.0 && std::abs(x) > config.window) left = true;
      if (!(std::abs(x) <= config.escape_radius)) {
        out.escaped[k] = 1;
        break;
      }
    }
    out.endpoints[k] = x;
    out.left_window[k] = left ? 1 : 0;
  };

  // Contiguous chunks keep scheduling overhead negligible.
  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  parallel_for(chunks, resolve_thread_count(config.threads), [&](std::size_t c) {
    const std::size_t end = std::min(n, (c + 1) * kChunk);
    for (std::size_t k = c * kChunk; k < end; ++k) run_path(k);
  });

  if (out.escaped_count() == n) {
    throw SolverError("every Monte Carlo path escaped; check the model parameters");
  }
  return out;
}

PathEnsemble simulate_endpoints(const ModelSpec& model, double x0, double horizon, double dt,
                                std::size_t n_paths, std::uint64_t seed, double escape_radius) {
  SimulationConfig cfg;
  cfg.model = model;
  cfg.x0 = x0;
  cfg.horizon = horizon;
  cfg.dt = dt;
  cfg.n_paths = n_paths;
  cfg.seed = seed;
  cfg.escape_radius = escape_radius;
  return simulate_endpoints(cfg);
}

DensityField empirical_density(const PathEnsemble& ensemble, const Grid1D& grid) {
  if (ensemble.size() == 0) throw DomainError("empirical density of an empty ensemble");
  const std::size_t kept = ensemble.size() - ensemble.escaped_count();
  if (kept == 0) throw DomainError("empirical density needs at least one non-escaped path");
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t k = 0; k < ensemble.size(); ++k) {
    if (ensemble.escaped[k]) continue;
    counts[static_cast<Eigen::Index>(grid.nearest(ensemble.endpoints[k]))] += 1.0;
  }
  // Cell i has width weight(i); count / (n * width) integrates to count / n.
  const double n = static_cast<double>(ensemble.size());
  for (Eigen::Index i = 0; i < counts.size(); ++i) {
    counts[i] /= n * grid.weight(static_cast<std::size_t>(i));
  }
  return DensityField(grid, std::move(counts), ensemble.config.horizon);
}

double l1_distance(const DensityField& a, const DensityField& b) {
  if (!(a.grid == b.grid)) throw DomainError("l1 distance between densities on different grids");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.grid.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    sum += a.grid.weight(i) * std::abs(a.values[k] - b.values[k]);
  }
  return sum;
}

}  // namespace mpp
