#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace mpp {

/// Indices of a stable law S_alpha(sigma, beta, mu). Only the symmetric,
/// unshifted case (beta = mu = 0) is constructible.
struct StableParams {
  double alpha;
  double beta = 0.0;
  double sigma_scale = 1.0;
  double mu = 0.0;

  /// Throws DomainError unless 0 < alpha < 2 and sigma_scale >= 0.
  static StableParams symmetric(double alpha, double sigma_scale = 1.0);
};

/// Normalising constant of the symmetric alpha-stable jump measure,
///   C_alpha = alpha Gamma((1+alpha)/2) / (2^(1-alpha) sqrt(pi) Gamma(1-alpha/2)).
/// Throws DomainError for alpha outside the open interval (0, 2).
double c_alpha(double alpha);

/// Levy measure nu_alpha(dy) = C_alpha |y|^-(1+alpha) dy.
struct JumpMeasure {
  double alpha;
  double c_alpha;

  explicit JumpMeasure(double alpha);

  /// Density at y != 0.
  double density(double y) const;
  /// nu_alpha({|y| > radius}), both tails together.
  double tail_mass(double radius) const;
};

double jump_density(double y, double alpha);

/// Chambers-Mallows-Stuck transform for S_alpha(1, 0, 0) from a uniform
/// angle u_angle in (0,1) and a uniform u_exp in (0,1) feeding -log(u).
double standard_stable_variate(double alpha, double u_angle, double u_exp);

/// count independent S_alpha(1, 0, 0) draws; bit-identical for equal seeds.
std::vector<double> sample_standard_stable(double alpha, std::size_t count, std::uint64_t seed);

/// Scale dt^(1/alpha) of a stable increment over a time step dt.
double increment_scale(double alpha, double dt);

/// Throws DomainError naming `what` unless 0 < alpha < 2.
void require_stable_index(double alpha, const char* what = "alpha");

}  // namespace mpp
