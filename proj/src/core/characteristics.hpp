#pragma once

#include <functional>
#include <string>
#include <vector>

#include "core/diagnostics.hpp"
#include "core/gridfn.hpp"

namespace peakon {

/// State of the nonlinear characteristic system in the frame moving with the
/// peak. Per-node fields are indexed like `s` (labels, fixed, excluding 0).
/// The peak carries its own value V0, one-sided slopes W0_plus/W0_minus and
/// one-sided Jacobians qs0_plus/qs0_minus.
struct CharacteristicEnsemble {
  std::vector<double> s;
  std::size_t first_right = 0;
  std::vector<double> q, V, W, qs;
  double V0 = 0.0;
  double W0_plus = 0.0, W0_minus = 0.0;
  double qs0_plus = 1.0, qs0_minus = 1.0;
  double a = 0.0;
  double t = 0.0;

  std::size_t size() const { return s.size(); }
};

CharacteristicEnsemble init_ensemble(const PeakedFunction& v0);

struct NonlocalTerms {
  std::vector<double> I, Q, P;  // per node
  double Q0 = 0.0, P0 = 0.0;    // at the peak
};

/// I(s) = int_0^s (V^2 + W^2) q_s ds' and the Q, P functionals, all by
/// quadrature in the labels. Throws JacobianDegenerate if some q_s is at or
/// below `jacobian_floor` or q is not increasing.
NonlocalTerms nonlocal_terms(const CharacteristicEnsemble& e, double jacobian_floor = 0.0);

/// Time derivative of every field, as an ensemble with the same labels
/// (t holds dt/dt = 1).
CharacteristicEnsemble vector_field(const CharacteristicEnsemble& e);

struct Thresholds {
  double slope_blowup = 1e6;
  double jacobian = 1e-30;
  /// A Jacobian failure with max|W| dt at or above this is classified as
  /// slope blow-up: the step can no longer follow W.
  double unresolved_slope_dt = 0.1;
};

enum class StepStatus { Ok, BreakdownBlowup, BreakdownJacobian };
const char* to_string(StepStatus s) noexcept;

struct StepOutcome {
  StepStatus status = StepStatus::Ok;
  std::string detail;
  double time = 0.0;  // breakdown time (midpoint of the failing step) when not Ok
};

/// One classical RK4 step. On breakdown `e` is left at its pre-step state.
StepOutcome step_rk4(CharacteristicEnsemble& e, double dt, const Thresholds& th = Thresholds{});

/// Lab-frame solution u = phi(x - a) + v(x - a) at x = q + a, peak at a.
PeakedFunction reconstruct(const CharacteristicEnsemble& e);
/// The perturbation v in the moving frame at x = q.
PeakedFunction perturbation(const CharacteristicEnsemble& e);

DiagnosticsRecord make_record(const CharacteristicEnsemble& e);

struct EvolveOptions {
  Thresholds thresholds;
  double record_interval = 0.1;
  /// Called with every recorded state (including t = 0 and the final one).
  std::function<void(const CharacteristicEnsemble&)> on_record;
};

struct EvolveResult {
  std::vector<DiagnosticsRecord> trajectory;
  StepOutcome outcome;
};

EvolveResult evolve(CharacteristicEnsemble& e, double t_end, double dt, const EvolveOptions& opt = EvolveOptions{});

}  // namespace peakon
