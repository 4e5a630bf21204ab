#pragma once

// Loss-rate feasibility for polarization-type erasers: when can a joint law
// with X ⊥ C reproduce the observed detected conditionals, given that all
// losses happen in the erase configuration?
//
// With q = P(C=erase) and p = P(D=LOSS) such a joint must have
//
//              D_erase   D_preserve   LOSS
//   erase       q - p        0          p
//   preserve      0        1 - q        0
//
// and for worst-case targets (the erase conditional vanishes on a bin set
// carrying half the preserve-channel mass) it exists iff q/2 <= p <= q.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dcqe/probkit.hpp"

namespace dcqe::feasibility {

inline constexpr std::string_view kDetectedErase = "D_erase";
inline constexpr std::string_view kDetectedPreserve = "D_preserve";

/// Binding-constraint tags reported in FeasibilityResult.
inline constexpr std::string_view kBindingNone = "none";
inline constexpr std::string_view kBindingLower = "loss_lower_bound";
inline constexpr std::string_view kBindingUpper = "loss_upper_bound";
inline constexpr std::string_view kBindingNonnegative = "loss_nonnegative";

struct LossBounds {
  double low = 0.0;
  double high = 0.0;
};

/// (q/2, q). Throws InvalidChoiceProbability unless 0 < q < 1.
LossBounds loss_bounds(double q);

struct LossFeasibilityProblem {
  double q = 0.5;
  std::size_t n_x = 4;
  /// Target p(x | D_erase); empty selects the worst-case profile.
  Distribution erase_conditional;
  /// Target p(x | D_preserve); empty selects the flat profile.
  Distribution preserve_conditional;
  double p = 0.25;
};

/// Zero on A and flat elsewhere. For even n_x, A is the upper half of the
/// bins; for odd n_x it is the dark side of a one-cycle full-visibility fringe.
Distribution worst_case_erase_conditional(std::size_t n_x);

/// Validates the problem and returns it with both targets filled in and
/// normalized.
LossFeasibilityProblem resolved(const LossFeasibilityProblem& problem);

/// Space {erase, preserve} x {D_erase, D_preserve, LOSS}.
OutcomeSpace loss_space(std::size_t n_x);

struct FeasibilityResult {
  bool feasible = false;
  std::optional<JointDistribution> witness;
  std::string binding_constraint = std::string(kBindingNone);
};

/// Closed-form witness: the preserve slice is (1−q)·P(x), the detected erase
/// slice (q−p)·p(x|D_erase) and the loss slice absorbs q·P(x) minus the
/// detected erase slice, which is the only shape keeping X ⊥ C. Under
/// independence P(x) equals the preserve conditional. Throws
/// InfeasibleLossRate when the loss slice would go negative or p > q.
FeasibilityResult construct_witness(const LossFeasibilityProblem& problem);

/// Exact linear-feasibility decision over the full table p(x, c, d): the X,C
/// product marginal, the C,D table and the detected conditionals are all
/// linear constraints. Never throws for an infeasible loss rate.
FeasibilityResult check_feasible(const LossFeasibilityProblem& problem);

/// check_feasible for each loss rate, in order.
std::vector<FeasibilityResult> feasibility_sweep(const LossFeasibilityProblem& problem,
                                                 std::span<const double> loss_rates);
std::vector<FeasibilityResult> feasibility_sweep_serial(const LossFeasibilityProblem& problem,
                                                        std::span<const double> loss_rates);

/// max over (x, c) of |P(x,c|D≠L) − P(x|D≠L) P(c|D≠L)|.
/// Throws NoLossOutcome or DegenerateLossMass.
double berkson_gap(const JointDistribution& joint);

}  // namespace dcqe::feasibility
