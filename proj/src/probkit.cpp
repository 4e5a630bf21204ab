#include "dcqe/probkit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace dcqe {

namespace {

void check_labels(const std::vector<std::string>& labels, const char* axis) {
  std::set<std::string_view> seen;
  for (const auto& label : labels) {
    if (label.empty() || label.find_first_of(",\r\n\"") != std::string::npos) {
      throw Error(ErrorKind::InvalidSpace,
                  std::string("invalid label '") + label + "' on axis " + axis);
    }
    if (!seen.insert(label).second) {
      throw Error(ErrorKind::InvalidSpace,
                  std::string("duplicate label '") + label + "' on axis " + axis);
    }
  }
}

std::string cell_name(const OutcomeSpace& s, std::size_t x, std::size_t c, std::size_t d) {
  std::ostringstream os;
  os << "(" << x << ", " << s.c_values()[c] << ", " << s.d_values()[d] << ")";
  return os.str();
}

double choice_mass(const JointDistribution& j, std::size_t c) {
  const auto& s = j.space();
  double m = 0.0;
  for (std::size_t x = 0; x < s.n_x(); ++x)
    for (std::size_t d = 0; d < s.n_d(); ++d) m += j(x, c, d);
  return m;
}

double detection_mass(const JointDistribution& j, std::size_t d) {
  const auto& s = j.space();
  double m = 0.0;
  for (std::size_t x = 0; x < s.n_x(); ++x)
    for (std::size_t c = 0; c < s.n_c(); ++c) m += j(x, c, d);
  return m;
}

}  // namespace

double empirical_tolerance(std::uint64_t n) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "sample size must be positive");
  return 3.0 / std::sqrt(static_cast<double>(n));
}

OutcomeSpace::OutcomeSpace(std::size_t n_x, std::vector<std::string> c_values,
                           std::vector<std::string> d_values)
    : n_x_(n_x), c_values_(std::move(c_values)), d_values_(std::move(d_values)) {
  if (n_x_ < 2) throw Error(ErrorKind::InvalidSpace, "need at least 2 x bins");
  if (c_values_.size() < 2) throw Error(ErrorKind::InvalidSpace, "need at least 2 choice labels");
  if (d_values_.empty()) throw Error(ErrorKind::InvalidSpace, "need at least 1 detection label");
  check_labels(c_values_, "C");
  check_labels(d_values_, "D");
  if (std::find(c_values_.begin(), c_values_.end(), kLossLabel) != c_values_.end()) {
    throw Error(ErrorKind::InvalidSpace, "the loss label cannot be a choice");
  }
  loss_index_ = find_d(kLossLabel);
}

std::optional<std::size_t> OutcomeSpace::find_c(std::string_view label) const {
  auto it = std::find(c_values_.begin(), c_values_.end(), label);
  if (it == c_values_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - c_values_.begin());
}

std::optional<std::size_t> OutcomeSpace::find_d(std::string_view label) const {
  auto it = std::find(d_values_.begin(), d_values_.end(), label);
  if (it == d_values_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - d_values_.begin());
}

std::size_t OutcomeSpace::c_index(std::string_view label) const {
  if (auto i = find_c(label)) return *i;
  throw Error(ErrorKind::UnmappedLabel, "unknown choice label '" + std::string(label) + "'");
}

std::size_t OutcomeSpace::d_index(std::string_view label) const {
  if (auto i = find_d(label)) return *i;
  throw Error(ErrorKind::UnmappedLabel, "unknown detection label '" + std::string(label) + "'");
}

JointDistribution::JointDistribution(OutcomeSpace space, std::vector<double> p,
                                     std::optional<std::uint64_t> sample_size)
    : space_(std::move(space)), p_(std::move(p)), sample_size_(sample_size) {
  if (p_.size() != space_.cell_count()) {
    throw Error(ErrorKind::ShapeMismatch, "table has " + std::to_string(p_.size()) +
                                              " entries, space has " +
                                              std::to_string(space_.cell_count()) + " cells");
  }
}

void validate(const JointDistribution& joint, double tol) {
  const auto& s = joint.space();
  double total = 0.0;
  for (std::size_t x = 0; x < s.n_x(); ++x)
    for (std::size_t c = 0; c < s.n_c(); ++c)
      for (std::size_t d = 0; d < s.n_d(); ++d) {
        const double v = joint(x, c, d);
        if (!(v >= 0.0) || !std::isfinite(v)) {
          throw Error(ErrorKind::NegativeMass, "negative or non-finite mass " +
                                                   std::to_string(v) + " at " +
                                                   cell_name(s, x, c, d));
        }
        total += v;
      }
  if (std::abs(total - 1.0) > tol) {
    std::ostringstream os;
    os.precision(17);
    os << "table sums to " << total;
    throw Error(ErrorKind::NotNormalized, os.str());
  }
}

double MarginalTable::at(std::span<const std::size_t> indices) const {
  if (indices.size() != shape.size()) {
    throw Error(ErrorKind::ShapeMismatch, "index rank does not match marginal rank");
  }
  std::size_t flat = 0;
  for (std::size_t k = 0; k < shape.size(); ++k) {
    if (indices[k] >= shape[k]) throw Error(ErrorKind::ShapeMismatch, "marginal index out of range");
    flat = flat * shape[k] + indices[k];
  }
  return values[flat];
}

MarginalTable marginal(const JointDistribution& joint, std::span<const Axis> axes) {
  if (axes.empty()) throw Error(ErrorKind::InvalidArgument, "marginal needs at least one axis");
  const auto& s = joint.space();
  const bool keep_x = std::find(axes.begin(), axes.end(), Axis::X) != axes.end();
  const bool keep_c = std::find(axes.begin(), axes.end(), Axis::C) != axes.end();
  const bool keep_d = std::find(axes.begin(), axes.end(), Axis::D) != axes.end();

  MarginalTable out;
  if (keep_x) { out.axes.push_back(Axis::X); out.shape.push_back(s.n_x()); }
  if (keep_c) { out.axes.push_back(Axis::C); out.shape.push_back(s.n_c()); }
  if (keep_d) { out.axes.push_back(Axis::D); out.shape.push_back(s.n_d()); }
  const std::size_t size =
      std::accumulate(out.shape.begin(), out.shape.end(), std::size_t{1}, std::multiplies<>());
  out.values.assign(size, 0.0);

  double total = 0.0;
  for (std::size_t x = 0; x < s.n_x(); ++x)
    for (std::size_t c = 0; c < s.n_c(); ++c)
      for (std::size_t d = 0; d < s.n_d(); ++d) {
        std::size_t flat = 0;
        if (keep_x) flat = flat * s.n_x() + x;
        if (keep_c) flat = flat * s.n_c() + c;
        if (keep_d) flat = flat * s.n_d() + d;
        out.values[flat] += joint(x, c, d);
        total += joint(x, c, d);
      }
  // Already-normalized tables are returned bit-exact.
  if (total > 0.0 && std::abs(total - 1.0) > kNormalizationTolerance)
    for (auto& v : out.values) v /= total;
  return out;
}

MarginalTable marginal(const JointDistribution& joint, std::initializer_list<Axis> axes) {
  return marginal(joint, std::span<const Axis>(axes.begin(), axes.size()));
}

Distribution marginal_x(const JointDistribution& joint) { return marginal(joint, {Axis::X}).values; }
Distribution marginal_c(const JointDistribution& joint) { return marginal(joint, {Axis::C}).values; }
Distribution marginal_d(const JointDistribution& joint) { return marginal(joint, {Axis::D}).values; }

Distribution conditional_x_given_d(const JointDistribution& joint, std::size_t d) {
  const auto& s = joint.space();
  if (d >= s.n_d()) throw Error(ErrorKind::UnmappedLabel, "detection index out of range");
  Distribution out(s.n_x(), 0.0);
  double mass = 0.0;
  for (std::size_t x = 0; x < s.n_x(); ++x) {
    for (std::size_t c = 0; c < s.n_c(); ++c) out[x] += joint(x, c, d);
    mass += out[x];
  }
  if (!(mass > 0.0)) {
    throw Error(ErrorKind::ZeroConditioningMass,
                "P(D=" + s.d_values()[d] + ") is zero");
  }
  for (auto& v : out) v /= mass;
  return out;
}

Distribution conditional_x_given_d(const JointDistribution& joint, std::string_view d) {
  return conditional_x_given_d(joint, joint.space().d_index(d));
}

Distribution conditional_x_given_c(const JointDistribution& joint, std::size_t c) {
  const auto& s = joint.space();
  if (c >= s.n_c()) throw Error(ErrorKind::UnmappedLabel, "choice index out of range");
  Distribution out(s.n_x(), 0.0);
  double mass = 0.0;
  for (std::size_t x = 0; x < s.n_x(); ++x) {
    for (std::size_t d = 0; d < s.n_d(); ++d) out[x] += joint(x, c, d);
    mass += out[x];
  }
  if (!(mass > 0.0)) {
    throw Error(ErrorKind::ZeroConditioningMass, "P(C=" + s.c_values()[c] + ") is zero");
  }
  for (auto& v : out) v /= mass;
  return out;
}

double total_variation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::ShapeMismatch, "distributions have lengths " +
                                              std::to_string(a.size()) + " and " +
                                              std::to_string(b.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return 0.5 * sum;
}

std::string_view to_string(Property property) noexcept {
  switch (property) {
    case Property::Independence: return "independence";
    case Property::Lossless: return "lossless";
    case Property::DeterministicRouting: return "deterministic_routing";
    case Property::DistinctConditionals: return "distinct_conditionals";
  }
  return "unknown";
}

std::vector<Property> AuditReport::violations() const {
  std::vector<Property> out;
  if (!independence.holds) out.push_back(Property::Independence);
  if (!lossless.holds) out.push_back(Property::Lossless);
  if (!deterministic_routing.holds) out.push_back(Property::DeterministicRouting);
  if (!distinct_conditionals.holds) out.push_back(Property::DistinctConditionals);
  return out;
}

IndependenceVerdict check_independence(const JointDistribution& joint, double tol) {
  const auto& s = joint.space();
  const auto xc = marginal(joint, {Axis::X, Axis::C});
  const auto px = marginal_x(joint);
  const auto pc = marginal_c(joint);

  IndependenceVerdict v;
  for (std::size_t c = 0; c < s.n_c(); ++c)
    if (!(pc[c] > 0.0)) v.skipped_choices.push_back(c);

  std::pair<std::size_t, std::size_t> argmax{0, 0};
  for (std::size_t x = 0; x < s.n_x(); ++x)
    for (std::size_t c = 0; c < s.n_c(); ++c) {
      const double dev = std::abs(xc.values[x * s.n_c() + c] - px[x] * pc[c]);
      if (dev > v.max_deviation) {
        v.max_deviation = dev;
        argmax = {x, c};
      }
    }
  v.holds = v.max_deviation <= tol;
  if (!v.holds) v.witness = argmax;
  return v;
}

LosslessVerdict check_lossless(const JointDistribution& joint) {
  LosslessVerdict v;
  if (const auto loss = joint.space().loss_index()) v.loss_mass = detection_mass(joint, *loss);
  v.holds = v.loss_mass <= kNormalizationTolerance;
  return v;
}

std::optional<std::size_t> RoutingMap::route(std::size_t c) const {
  for (const auto& [choice, d] : entries)
    if (choice == c) return d;
  return std::nullopt;
}

RoutingVerdict check_deterministic_routing(const JointDistribution& joint, double tol) {
  const auto& s = joint.space();
  RoutingVerdict v;
  RoutingMap map;

  for (std::size_t c = 0; c < s.n_c(); ++c) {
    if (!(choice_mass(joint, c) > 0.0)) {
      v.skipped_choices.push_back(c);
      continue;
    }
    std::vector<double> mass(s.n_d(), 0.0);
    double detected = 0.0;
    for (std::size_t d = 0; d < s.n_d(); ++d) {
      if (s.is_loss(d)) continue;
      for (std::size_t x = 0; x < s.n_x(); ++x) mass[d] += joint(x, c, d);
      detected += mass[d];
    }
    if (!(detected > 0.0)) {
      throw Error(ErrorKind::AllMassLost,
                  "choice " + s.c_values()[c] + " is never detected");
    }

    std::vector<std::size_t> dominant;
    std::vector<std::size_t> order;
    for (std::size_t d = 0; d < s.n_d(); ++d) {
      if (s.is_loss(d)) continue;
      mass[d] /= detected;
      order.push_back(d);
      if (mass[d] >= 1.0 - tol) dominant.push_back(d);
    }

    if (dominant.size() == 1) {
      map.entries.emplace_back(c, dominant.front());
      continue;
    }
    if (!v.counterexample) {
      // First two labels reached with more than tol; by mass if that is ambiguous.
      std::vector<std::size_t> reached;
      for (std::size_t d : order)
        if (mass[d] > tol) reached.push_back(d);
      if (reached.size() < 2) {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return mass[a] > mass[b]; });
        reached = order;
      }
      // A single detected label always dominates, so there are two entries here.
      v.counterexample = RoutingCounterexample{c, reached[0], reached[1]};
    }
  }

  v.holds = !v.counterexample.has_value();
  if (v.holds) v.routing = std::move(map);
  return v;
}

DistinctnessVerdict check_distinct_conditionals(const JointDistribution& joint, double tol) {
  const auto& s = joint.space();
  std::vector<std::size_t> outcomes;
  for (std::size_t d = 0; d < s.n_d(); ++d)
    if (!s.is_loss(d) && detection_mass(joint, d) > 0.0) outcomes.push_back(d);
  if (outcomes.size() < 2) {
    throw Error(ErrorKind::InsufficientOutcomes,
                "fewer than two detected outcomes carry probability mass");
  }

  std::vector<Distribution> cond;
  cond.reserve(outcomes.size());
  for (auto d : outcomes) cond.push_back(conditional_x_given_d(joint, d));

  DistinctnessWitness best;
  bool first = true;
  for (std::size_t i = 0; i < outcomes.size(); ++i)
    for (std::size_t j = i + 1; j < outcomes.size(); ++j) {
      const double gap = total_variation(cond[i], cond[j]);
      if (first || gap > best.gap) {
        best.d = i;
        best.d_alt = j;
        best.gap = gap;
        first = false;
      }
    }
  const auto& a = cond[best.d];
  const auto& b = cond[best.d_alt];
  for (std::size_t x = 0; x < s.n_x(); ++x)
    if (a[x] - b[x] > kNormalizationTolerance) best.bin_set.push_back(x);
  best.d = outcomes[best.d];
  best.d_alt = outcomes[best.d_alt];

  DistinctnessVerdict v;
  v.holds = best.gap > tol;
  v.witness = std::move(best);
  return v;
}

AuditReport audit(const JointDistribution& joint, double tol) {
  validate(joint, joint.sample_size() ? 1e-9 : kNormalizationTolerance);
  AuditReport r;
  r.tolerance = tol;
  r.independence = check_independence(joint, tol);
  r.lossless = check_lossless(joint);
  r.deterministic_routing = check_deterministic_routing(joint, tol);
  try {
    // TV aggregates n_x per-cell deviations, so sampling noise in it grows
    // like sqrt(n_x) times the per-cell tolerance.
    const double tv_tol =
        joint.sample_size() ? tol * std::sqrt(static_cast<double>(joint.space().n_x())) : tol;
    r.distinct_conditionals = check_distinct_conditionals(joint, tv_tol);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InsufficientOutcomes) throw;
    // With a single detected outcome no two conditionals can differ.
    r.distinct_conditionals.holds = false;
    r.distinct_conditionals.insufficient_outcomes = true;
  }
  r.no_go_consistent = !(r.independence.holds && r.lossless.holds &&
                         r.deterministic_routing.holds && r.distinct_conditionals.holds);
  return r;
}

CoarseGraining::CoarseGraining(std::map<std::string, std::string> partition)
    : partition_(std::move(partition)) {
  for (const auto& [fine, coarse] : partition_) {
    if (coarse.empty()) {
      throw Error(ErrorKind::InvalidCoarseGraining, "empty coarse label for " + fine);
    }
    if ((fine == kLossLabel) != (coarse == kLossLabel)) {
      throw Error(ErrorKind::InvalidCoarseGraining,
                  "the loss label must map to itself and only to itself (" + fine +
                      " -> " + coarse + ")");
    }
  }
}

std::string CoarseGraining::image(std::string_view fine) const {
  if (fine == kLossLabel) return std::string(kLossLabel);
  auto it = partition_.find(std::string(fine));
  if (it == partition_.end()) {
    throw Error(ErrorKind::UnmappedLabel, "detection label '" + std::string(fine) +
                                              "' has no coarse image");
  }
  return it->second;
}

JointDistribution coarse_grain(const JointDistribution& joint, const CoarseGraining& g) {
  const auto& s = joint.space();
  std::vector<std::string> coarse_labels;
  std::vector<std::size_t> image(s.n_d());
  for (std::size_t d = 0; d < s.n_d(); ++d) {
    const auto label = g.image(s.d_values()[d]);
    auto it = std::find(coarse_labels.begin(), coarse_labels.end(), label);
    if (it == coarse_labels.end()) {
      image[d] = coarse_labels.size();
      coarse_labels.push_back(label);
    } else {
      image[d] = static_cast<std::size_t>(it - coarse_labels.begin());
    }
  }
  OutcomeSpace coarse(s.n_x(), s.c_values(), std::move(coarse_labels));
  std::vector<double> p(coarse.cell_count(), 0.0);
  for (std::size_t x = 0; x < s.n_x(); ++x)
    for (std::size_t c = 0; c < s.n_c(); ++c)
      for (std::size_t d = 0; d < s.n_d(); ++d) p[coarse.index(x, c, image[d])] += joint(x, c, d);
  return JointDistribution(std::move(coarse), std::move(p), joint.sample_size());
}

EventLog::EventLog(OutcomeSpace space, std::vector<Event> records)
    : space_(std::move(space)), records_(std::move(records)) {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    if (r.x >= space_.n_x() || r.c >= space_.n_c() || r.d >= space_.n_d()) {
      throw Error(ErrorKind::InvalidLog,
                  "record for trial " + std::to_string(r.trial) + " is outside the space");
    }
    if (i > 0 && r.trial <= records_[i - 1].trial) {
      throw Error(ErrorKind::InvalidLog, "trial indices must be strictly increasing (trial " +
                                             std::to_string(r.trial) + ")");
    }
  }
}

}  // namespace dcqe
