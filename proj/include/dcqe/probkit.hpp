#pragma once

// Exact discrete probability engine over detection position X, choice C and
// detection outcome D, with the four structural-property checks and the
// no-go audit built on top of them.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dcqe/error.hpp"

namespace dcqe {

inline constexpr std::string_view kLossLabel = "LOSS";
inline constexpr std::string_view kErase = "erase";
inline constexpr std::string_view kPreserve = "preserve";

/// Default tolerance for audits of analytically constructed joints.
inline constexpr double kAnalyticTolerance = 1e-9;
/// Normalization tolerance for exactly constructed joints.
inline constexpr double kNormalizationTolerance = 1e-12;

/// Audit tolerance for an empirical joint estimated from n events.
double empirical_tolerance(std::uint64_t n);

using Distribution = std::vector<double>;

/// Label sets of the three axes. X bins are the integers 0..n_x-1; the loss
/// label, when present, is spelled `LOSS` and may only appear on the D axis.
class OutcomeSpace {
 public:
  OutcomeSpace(std::size_t n_x, std::vector<std::string> c_values,
               std::vector<std::string> d_values);

  std::size_t n_x() const noexcept { return n_x_; }
  std::size_t n_c() const noexcept { return c_values_.size(); }
  std::size_t n_d() const noexcept { return d_values_.size(); }
  std::size_t cell_count() const noexcept { return n_x_ * n_c() * n_d(); }

  const std::vector<std::string>& c_values() const noexcept { return c_values_; }
  const std::vector<std::string>& d_values() const noexcept { return d_values_; }

  std::optional<std::size_t> loss_index() const noexcept { return loss_index_; }
  bool has_loss() const noexcept { return loss_index_.has_value(); }
  bool is_loss(std::size_t d) const noexcept { return loss_index_ == d; }

  std::optional<std::size_t> find_c(std::string_view label) const;
  std::optional<std::size_t> find_d(std::string_view label) const;
  /// Throws UnmappedLabel when the label is not on the axis.
  std::size_t c_index(std::string_view label) const;
  std::size_t d_index(std::string_view label) const;

  std::size_t index(std::size_t x, std::size_t c, std::size_t d) const noexcept {
    return (x * n_c() + c) * n_d() + d;
  }

  bool operator==(const OutcomeSpace&) const = default;

 private:
  std::size_t n_x_;
  std::vector<std::string> c_values_;
  std::vector<std::string> d_values_;
  std::optional<std::size_t> loss_index_;
};

/// Table p(x, c, d) over an OutcomeSpace, stored x-major then c then d.
/// Construction only checks the table shape; `validate` checks the
/// probability invariants. Empirical estimates carry their sample size.
class JointDistribution {
 public:
  JointDistribution(OutcomeSpace space, std::vector<double> p,
                    std::optional<std::uint64_t> sample_size = std::nullopt);

  const OutcomeSpace& space() const noexcept { return space_; }
  std::span<const double> values() const noexcept { return p_; }
  double operator()(std::size_t x, std::size_t c, std::size_t d) const noexcept {
    return p_[space_.index(x, c, d)];
  }
  std::optional<std::uint64_t> sample_size() const noexcept { return sample_size_; }

  bool operator==(const JointDistribution&) const = default;

 private:
  OutcomeSpace space_;
  std::vector<double> p_;
  std::optional<std::uint64_t> sample_size_;
};

/// Throws NegativeMass or NotNormalized on the first violated invariant.
void validate(const JointDistribution& joint, double tol = kNormalizationTolerance);

enum class Axis { X, C, D };

/// Marginal over a subset of axes. `axes` is kept in X, C, D order and
/// `values` is laid out row-major over `shape`.
struct MarginalTable {
  std::vector<Axis> axes;
  std::vector<std::size_t> shape;
  std::vector<double> values;

  double at(std::span<const std::size_t> indices) const;
  double at(std::initializer_list<std::size_t> indices) const {
    return at(std::span<const std::size_t>(indices.begin(), indices.size()));
  }
};

MarginalTable marginal(const JointDistribution& joint, std::span<const Axis> axes);
MarginalTable marginal(const JointDistribution& joint, std::initializer_list<Axis> axes);

Distribution marginal_x(const JointDistribution& joint);
Distribution marginal_c(const JointDistribution& joint);
Distribution marginal_d(const JointDistribution& joint);

/// p(x | D = d). Throws ZeroConditioningMass when P(D = d) is zero.
Distribution conditional_x_given_d(const JointDistribution& joint, std::size_t d);
Distribution conditional_x_given_d(const JointDistribution& joint, std::string_view d);

/// p(x | C = c), summed over every detection outcome including loss.
Distribution conditional_x_given_c(const JointDistribution& joint, std::size_t c);

/// Half the L1 distance. Throws ShapeMismatch on differing lengths.
double total_variation(std::span<const double> a, std::span<const double> b);

struct IndependenceVerdict {
  bool holds = false;
  double max_deviation = 0.0;
  std::optional<std::pair<std::size_t, std::size_t>> witness;  // (x, c)
  std::vector<std::size_t> skipped_choices;

  bool operator==(const IndependenceVerdict&) const = default;
};

struct LosslessVerdict {
  bool holds = false;
  double loss_mass = 0.0;

  bool operator==(const LosslessVerdict&) const = default;
};

/// Choice index -> detection index. Choices with zero mass are absent.
struct RoutingMap {
  std::vector<std::pair<std::size_t, std::size_t>> entries;

  std::optional<std::size_t> route(std::size_t c) const;
  bool operator==(const RoutingMap&) const = default;
};

struct RoutingCounterexample {
  std::size_t c = 0;
  std::size_t d = 0;
  std::size_t d_alt = 0;

  bool operator==(const RoutingCounterexample&) const = default;
};

struct RoutingVerdict {
  bool holds = false;
  std::optional<RoutingMap> routing;
  std::optional<RoutingCounterexample> counterexample;
  std::vector<std::size_t> skipped_choices;

  bool operator==(const RoutingVerdict&) const = default;
};

struct DistinctnessWitness {
  std::size_t d = 0;
  std::size_t d_alt = 0;
  double gap = 0.0;
  std::vector<std::size_t> bin_set;  // {x : p(x|d) − p(x|d_alt) > 1e-12}

  bool operator==(const DistinctnessWitness&) const = default;
};

struct DistinctnessVerdict {
  bool holds = false;
  std::optional<DistinctnessWitness> witness;
  /// Set by `audit` when fewer than two detected outcomes carry mass.
  bool insufficient_outcomes = false;

  bool operator==(const DistinctnessVerdict&) const = default;
};

enum class Property { Independence, Lossless, DeterministicRouting, DistinctConditionals };

std::string_view to_string(Property property) noexcept;

struct AuditReport {
  double tolerance = kAnalyticTolerance;
  IndependenceVerdict independence;
  LosslessVerdict lossless;
  RoutingVerdict deterministic_routing;
  DistinctnessVerdict distinct_conditionals;
  bool no_go_consistent = true;

  /// Properties whose `holds` flag is false, in declaration order.
  std::vector<Property> violations() const;
  bool operator==(const AuditReport&) const = default;
};

IndependenceVerdict check_independence(const JointDistribution& joint,
                                       double tol = kAnalyticTolerance);
LosslessVerdict check_lossless(const JointDistribution& joint);
/// Routing is judged on detected events only. Throws AllMassLost(c) when a
/// choice with positive mass is never detected.
RoutingVerdict check_deterministic_routing(const JointDistribution& joint,
                                           double tol = kAnalyticTolerance);
/// Throws InsufficientOutcomes when fewer than two detected outcomes carry mass.
DistinctnessVerdict check_distinct_conditionals(const JointDistribution& joint,
                                                double tol = kAnalyticTolerance);

/// Runs the four checks at `tol`. For empirical joints (sample_size set) the
/// distinctness threshold is tol·sqrt(n_x), since TV sums n_x noisy cells.
AuditReport audit(const JointDistribution& joint, double tol = kAnalyticTolerance);

/// Fine detection label -> coarse detection label. The loss label maps to
/// itself and may be omitted from the partition.
class CoarseGraining {
 public:
  explicit CoarseGraining(std::map<std::string, std::string> partition);

  const std::map<std::string, std::string>& partition() const noexcept { return partition_; }
  /// Throws UnmappedLabel for a non-loss label without an image.
  std::string image(std::string_view fine) const;

 private:
  std::map<std::string, std::string> partition_;
};

/// Coarse labels are ordered by first appearance along the fine D axis.
JointDistribution coarse_grain(const JointDistribution& joint, const CoarseGraining& g);

struct Event {
  std::uint64_t trial = 0;
  std::uint32_t x = 0;
  std::uint32_t c = 0;
  std::uint32_t d = 0;

  bool operator==(const Event&) const = default;
};

/// Per-trial detection records over a space, trial indices strictly increasing.
class EventLog {
 public:
  EventLog(OutcomeSpace space, std::vector<Event> records);

  const OutcomeSpace& space() const noexcept { return space_; }
  std::span<const Event> records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  bool operator==(const EventLog&) const = default;

 private:
  OutcomeSpace space_;
  std::vector<Event> records_;
};

}  // namespace dcqe
