#pragma once

#include <string>
#include <string_view>

namespace mpp {

enum class NoiseKind { none, brownian, levy };

std::string_view to_string(NoiseKind kind);
NoiseKind parse_noise_kind(std::string_view text);

/// dX = (r X - X^3) dt + X dL, with L a symmetric alpha-stable motion,
/// Brownian motion, or absent.
struct ModelSpec {
  double r = 0.0;
  NoiseKind noise = NoiseKind::levy;
  double alpha = 1.0;  // read only for NoiseKind::levy

  static ModelSpec levy(double r, double alpha);
  static ModelSpec brownian(double r);
  static ModelSpec deterministic(double r);

  double drift(double x) const noexcept { return r * x - x * x * x; }
  double noise_amplitude(double x) const noexcept { return x; }

  void validate() const;
  std::string describe() const;
};

}  // namespace mpp
