#include "mpp/bifurcation.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "mpp/errors.hpp"
#include "mpp/parallel.hpp"

namespace mpp {

std::string_view to_string(Axis axis) { return axis == Axis::r ? "r" : "alpha"; }

Axis parse_axis(std::string_view text) {
  if (text == "r") return Axis::r;
  if (text == "alpha") return Axis::alpha;
  throw DomainError("sweep.axis must be \"r\" or \"alpha\", got \"" + std::string(text) + "\"");
}

void ParameterAxis::validate() const {
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw DomainError("sweep.range must be finite");
  if (!(lo < hi)) throw DomainError("sweep.range must be increasing: lo < hi");
  if (samples < 2) throw DomainError("sweep.samples must be at least 2");
  if (which == Axis::alpha && !(lo > 0.0 && hi < 2.0)) {
    throw DomainError("sweep.range must lie inside (0, 2) for the alpha axis");
  }
}

std::vector<double> ParameterAxis::values() const {
  validate();
  std::vector<double> out(static_cast<std::size_t>(samples));
  const double span = hi - lo;
  for (int k = 0; k < samples; ++k) {
    out[static_cast<std::size_t>(k)] = k == samples - 1 ? hi : lo + span * k / (samples - 1);
  }
  return out;
}

ModelSpec ModelFamily::at(double parameter) const {
  ModelSpec m = base;
  if (axis == Axis::r) {
    m.r = parameter;
  } else {
    if (m.noise != NoiseKind::levy) throw DomainError("an alpha family needs levy noise");
    m.alpha = parameter;
  }
  m.validate();
  return m;
}

Signature signature_of(const std::vector<EquilibriumState>& states) {
  Signature sig;
  bool has_zero = false;
  for (const auto& s : states) {
    if (s.location == 0.0) {
      has_zero = true;
      sig.zero = s.stability;
    } else if (s.location > 0.0 && s.stability == Stability::stable) {
      ++sig.stable_pairs;
    }
  }
  if (!has_zero) throw DomainError("equilibrium set has no state at 0");
  return sig;
}

std::string_view to_string(TransitionKind kind) {
  switch (kind) {
    case TransitionKind::forward_pitchfork: return "forward_pitchfork";
    case TransitionKind::backward_pitchfork: return "backward_pitchfork";
    case TransitionKind::collapsing: return "collapsing";
    case TransitionKind::none: return "none";
    case TransitionKind::other: return "other";
  }
  return "other";
}

TransitionKind classify_transition(Signature before, Signature after) {
  if (before == after) return TransitionKind::none;
  const Signature quiet{0, Stability::stable};
  const Signature split{1, Stability::unstable};
  if (before == quiet && after == split) return TransitionKind::forward_pitchfork;
  if (before == split && after == Signature{0, Stability::unstable}) {
    return TransitionKind::backward_pitchfork;
  }
  if (before == split && after == quiet) return TransitionKind::collapsing;
  return TransitionKind::other;
}

TransitionKind classify_transition(const std::vector<EquilibriumState>& before,
                                   const std::vector<EquilibriumState>& after) {
  return classify_transition(signature_of(before), signature_of(after));
}

std::vector<double> SweepConfig::probe_set() const {
  return probes.empty() ? default_probes(grid, tracker) : probes;
}

std::vector<EquilibriumState> equilibria_at(const ModelFamily& family, double parameter,
                                            const SweepConfig& config) {
  const ModelSpec model = family.at(parameter);
  try {
    return find_equilibria(model, config.probe_set(), config.grid, config.tracker);
  } catch (const UnresolvedEquilibria& e) {
    std::ostringstream ctx;
    ctx.precision(15);
    ctx << to_string(family.axis) << "=" << parameter << ", " << model.describe();
    throw UnresolvedEquilibria(e.offending(), ctx.str());
  }
}

namespace {

Signature signature_at(const ModelFamily& family, double p, const SweepConfig& config) {
  return signature_of(equilibria_at(family, p, config));
}

Refinement bisect(const ModelFamily& family, double lo, double hi, Signature lo_sig,
                  Signature hi_sig, const SweepConfig& config) {
  if (!(config.tol_p > 0.0)) throw DomainError("sweep.tol_p must be positive");
  if (lo_sig == hi_sig) {
    throw DomainError("bracket ends share an equilibrium signature; nothing to refine");
  }
  Refinement out{0.0, lo, hi, lo_sig, hi_sig, 0};
  while (out.hi - out.lo >= config.tol_p) {
    const double mid = 0.5 * (out.lo + out.hi);
    const Signature s = signature_at(family, mid, config);
    ++out.evaluations;
    // A third signature inside the bracket: follow the change nearest lo.
    if (s == out.lo_signature) {
      out.lo = mid;
    } else {
      out.hi = mid;
      out.hi_signature = s;
    }
  }
  out.value = 0.5 * (out.lo + out.hi);
  return out;
}

}  // namespace

Refinement refine_bifurcation_point(const ModelFamily& family, double lo, double hi,
                                    const SweepConfig& config) {
  if (!(lo < hi)) throw DomainError("refinement bracket needs lo < hi");
  const Signature a = signature_at(family, lo, config);
  const Signature b = signature_at(family, hi, config);
  Refinement out = bisect(family, lo, hi, a, b, config);
  out.evaluations += 2;
  return out;
}

std::vector<TransitionEvent> detect_events(const std::vector<double>& parameters,
                                           const std::vector<Signature>& signatures,
                                           double min_separation) {
  if (parameters.size() != signatures.size()) throw DomainError("one signature per parameter needed");
  if (min_separation < 0.0) throw DomainError("sweep.min_event_separation must be nonnegative");
  std::vector<TransitionEvent> events;
  for (std::size_t i = 1; i < parameters.size(); ++i) {
    if (signatures[i] == signatures[i - 1]) continue;
    TransitionEvent e;
    e.lo = parameters[i - 1];
    e.hi = parameters[i];
    e.before = signatures[i - 1];
    e.after = signatures[i];
    if (!events.empty() && min_separation > 0.0 && e.lo - events.back().hi < min_separation) {
      auto& prev = events.back();
      prev.hi = e.hi;
      prev.after = e.after;
      prev.kind = classify_transition(prev.before, prev.after);
      // a flicker that returns to where it started is no event at all
      if (prev.kind == TransitionKind::none) events.pop_back();
      continue;
    }
    e.kind = classify_transition(e.before, e.after);
    events.push_back(e);
  }
  return events;
}

BifurcationDiagram sweep_parameter(const ModelFamily& family, const ParameterAxis& axis,
                                   const SweepConfig& config) {
  if (family.axis != axis.which) throw DomainError("sweep axis differs from the model family axis");
  config.tracker.validate();
  if (config.min_event_separation < 0.0) {
    throw DomainError("sweep.min_event_separation must be nonnegative");
  }
  BifurcationDiagram out;
  out.axis = axis;
  out.parameters = axis.values();
  const std::size_t n = out.parameters.size();
  out.equilibria.resize(n);
  parallel_for(n, resolve_thread_count(config.threads), [&](std::size_t i) {
    out.equilibria[i] = equilibria_at(family, out.parameters[i], config);
  });

  std::vector<Signature> sigs(n);
  for (std::size_t i = 0; i < n; ++i) sigs[i] = signature_of(out.equilibria[i]);
  out.events = detect_events(out.parameters, sigs, config.min_event_separation);

  if (config.refine) {
    parallel_for(out.events.size(), resolve_thread_count(config.threads), [&](std::size_t k) {
      auto& e = out.events[k];
      e.refined = bisect(family, e.lo, e.hi, e.before, e.after, config).value;
    });
  }
  return out;
}

}  // namespace mpp
