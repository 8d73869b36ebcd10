#include "mpp/model.hpp"

#include <cmath>
#include <cstdio>

#include "mpp/errors.hpp"
#include "mpp/stable_noise.hpp"

namespace mpp {

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::none: return "none";
    case NoiseKind::brownian: return "brownian";
    case NoiseKind::levy: return "levy";
  }
  return "unknown";
}

NoiseKind parse_noise_kind(std::string_view text) {
  if (text == "none") return NoiseKind::none;
  if (text == "brownian") return NoiseKind::brownian;
  if (text == "levy") return NoiseKind::levy;
  throw DomainError("model.noise must be one of none, brownian, levy; got '" +
                    std::string(text) + "'");
}

ModelSpec ModelSpec::levy(double r, double alpha) {
  ModelSpec m{r, NoiseKind::levy, alpha};
  m.validate();
  return m;
}

ModelSpec ModelSpec::brownian(double r) {
  ModelSpec m{r, NoiseKind::brownian, 2.0};
  m.validate();
  return m;
}

ModelSpec ModelSpec::deterministic(double r) {
  ModelSpec m{r, NoiseKind::none, 0.0};
  m.validate();
  return m;
}

void ModelSpec::validate() const {
  if (!std::isfinite(r)) throw DomainError("model.r must be finite");
  if (noise == NoiseKind::levy) require_stable_index(alpha, "model.alpha");
}

std::string ModelSpec::describe() const {
  char buf[96];
  if (noise == NoiseKind::levy) {
    std::snprintf(buf, sizeof buf, "levy(alpha=%.6g), r=%.6g", alpha, r);
  } else {
    std::snprintf(buf, sizeof buf, "%s, r=%.6g", std::string(to_string(noise)).c_str(), r);
  }
  return buf;
}

}  // namespace mpp
