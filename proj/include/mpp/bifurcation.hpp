#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "mpp/grid.hpp"
#include "mpp/model.hpp"
#include "mpp/tracker.hpp"

namespace mpp {

enum class Axis { r, alpha };
std::string_view to_string(Axis axis);
Axis parse_axis(std::string_view text);

struct ParameterAxis {
  Axis which = Axis::alpha;
  double lo = 0.1;
  double hi = 1.9;
  int samples = 40;

  void validate() const;
  /// Evenly spaced, strictly increasing, endpoints included.
  std::vector<double> values() const;
};

/// A model with one free parameter: r, or alpha (levy noise only).
struct ModelFamily {
  ModelSpec base;
  Axis axis = Axis::alpha;

  ModelSpec at(double parameter) const;
};

/// Equilibrium set reduced to (number of symmetric off-zero stable pairs,
/// stability of the state at 0).
struct Signature {
  int stable_pairs = 0;
  Stability zero = Stability::stable;

  bool operator==(const Signature&) const = default;
};

/// Throws DomainError when the set has no state at 0.
Signature signature_of(const std::vector<EquilibriumState>& states);

enum class TransitionKind { forward_pitchfork, backward_pitchfork, collapsing, none, other };
std::string_view to_string(TransitionKind kind);

/// Transition table, with S = stable, U = unstable:
///   (0, S) -> (1, U)   forward_pitchfork
///   (1, U) -> (0, U)   backward_pitchfork
///   (1, U) -> (0, S)   collapsing
///   X -> X             none
///   anything else      other
/// Reading an event right to left gives
///   forward_pitchfork  <-> collapsing
///   backward_pitchfork  -> other       ((0, U) -> (1, U) is not in the table)
///   none                -> none
TransitionKind classify_transition(Signature before, Signature after);
TransitionKind classify_transition(const std::vector<EquilibriumState>& before,
                                   const std::vector<EquilibriumState>& after);

struct SweepConfig {
  Grid1D grid{10.0, 1000};
  TrackerConfig tracker;
  /// Empty means default_probes(grid, tracker).
  std::vector<double> probes;
  bool refine = true;
  double tol_p = 0.01;
  /// Adjacent events closer than this are merged into one; 0 keeps them all.
  double min_event_separation = 0.0;
  /// Concurrent per-sample evaluations; 0 defers to resolve_thread_count().
  int threads = 0;

  std::vector<double> probe_set() const;
};

struct TransitionEvent {
  double lo = 0.0;
  double hi = 0.0;
  TransitionKind kind = TransitionKind::none;
  Signature before;
  Signature after;
  std::optional<double> refined;
};

struct BifurcationDiagram {
  ParameterAxis axis;
  std::vector<double> parameters;
  std::vector<std::vector<EquilibriumState>> equilibria;
  std::vector<TransitionEvent> events;
};

/// Equilibria at one parameter value; UnresolvedEquilibria messages carry
/// the parameter.
std::vector<EquilibriumState> equilibria_at(const ModelFamily& family, double parameter,
                                            const SweepConfig& config);

struct Refinement {
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  Signature lo_signature;
  Signature hi_signature;
  int evaluations = 0;
};

/// Bisection on the equilibrium signature until the bracket is narrower than
/// config.tol_p; returns the midpoint of the final bracket. Throws
/// DomainError when both ends share a signature.
Refinement refine_bifurcation_point(const ModelFamily& family, double lo, double hi,
                                    const SweepConfig& config);

/// Events between adjacent samples whose signatures differ. An event that
/// starts less than min_separation after the previous one ends is folded into
/// it (and both vanish if the combined transition is none).
std::vector<TransitionEvent> detect_events(const std::vector<double>& parameters,
                                           const std::vector<Signature>& signatures,
                                           double min_separation = 0.0);

BifurcationDiagram sweep_parameter(const ModelFamily& family, const ParameterAxis& axis,
                                   const SweepConfig& config);

}  // namespace mpp
