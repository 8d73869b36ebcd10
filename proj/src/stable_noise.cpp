#include "mpp/stable_noise.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mpp/errors.hpp"
#include "mpp/rng.hpp"

namespace mpp {

void require_stable_index(double alpha, const char* what) {
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw DomainError(std::string(what) + " must lie in the open interval (0, 2), got " +
                      std::to_string(alpha));
  }
}

StableParams StableParams::symmetric(double alpha, double sigma_scale) {
  require_stable_index(alpha);
  if (!(sigma_scale >= 0.0)) throw DomainError("sigma_scale must be nonnegative");
  return StableParams{alpha, 0.0, sigma_scale, 0.0};
}

double c_alpha(double alpha) {
  require_stable_index(alpha);
  // Work in log space; tgamma(1 - alpha/2) stays well away from its poles.
  const double log_c = std::log(alpha) + std::lgamma(0.5 * (1.0 + alpha)) -
                       (1.0 - alpha) * std::numbers::ln2 - 0.5 * std::log(std::numbers::pi) -
                       std::lgamma(1.0 - 0.5 * alpha);
  return std::exp(log_c);
}

JumpMeasure::JumpMeasure(double a) : alpha(a), c_alpha(mpp::c_alpha(a)) {}

double JumpMeasure::density(double y) const {
  if (y == 0.0) throw DomainError("jump density is singular at y = 0");
  return c_alpha * std::pow(std::abs(y), -(1.0 + alpha));
}

double JumpMeasure::tail_mass(double radius) const {
  if (!(radius > 0.0)) throw DomainError("tail radius must be positive");
  return 2.0 * c_alpha * std::pow(radius, -alpha) / alpha;
}

double jump_density(double y, double alpha) { return JumpMeasure(alpha).density(y); }

double standard_stable_variate(double alpha, double u_angle, double u_exp) {
  const double v = std::numbers::pi * (u_angle - 0.5);
  if (alpha == 1.0) return std::tan(v);
  const double w = -std::log(u_exp);
  return std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
         std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
}

std::vector<double> sample_standard_stable(double alpha, std::size_t count, std::uint64_t seed) {
  require_stable_index(alpha);
  if (count == 0) throw DomainError("sample count must be positive");
  CounterRng rng(seed, 0);
  std::vector<double> out(count);
  for (auto& x : out) {
    const double u1 = rng.uniform();
    const double u2 = rng.uniform();
    x = standard_stable_variate(alpha, u1, u2);
  }
  return out;
}

double increment_scale(double alpha, double dt) {
  require_stable_index(alpha);
  if (!(dt > 0.0)) throw DomainError("time step dt must be positive");
  return std::pow(dt, 1.0 / alpha);
}

}  // namespace mpp
