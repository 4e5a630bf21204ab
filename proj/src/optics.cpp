#include "dcqe/optics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace dcqe::optics {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_choice_probability(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    std::ostringstream os;
    os << "choice probability q=" << q << " must lie in (0, 1)";
    throw Error(ErrorKind::InvalidChoiceProbability, os.str());
  }
}

Distribution normalized(std::vector<double> w) {
  double total = 0.0;
  for (double v : w) total += v;
  if (!(total > 0.0)) throw Error(ErrorKind::InvalidModel, "fringe profile has zero total weight");
  for (auto& v : w) v /= total;
  return w;
}

JointDistribution finish(OutcomeSpace space, std::vector<double> p) {
  JointDistribution joint(std::move(space), std::move(p));
  validate(joint);
  return joint;
}

}  // namespace

FringeModel::FringeModel(std::size_t n_x, double fringe_cycles, double phase0,
                         double visibility, std::vector<double> envelope)
    : n_x_(n_x),
      fringe_cycles_(fringe_cycles),
      phase0_(phase0),
      visibility_(visibility),
      envelope_(std::move(envelope)) {
  if (n_x_ < 2) throw Error(ErrorKind::InvalidModel, "fringe model needs at least 2 bins");
  if (!std::isfinite(fringe_cycles_) || !std::isfinite(phase0_)) {
    throw Error(ErrorKind::InvalidModel, "fringe cycles and phase must be finite");
  }
  if (!(visibility_ >= 0.0 && visibility_ <= 1.0)) {
    throw Error(ErrorKind::InvalidModel, "visibility must lie in [0, 1]");
  }
  if (envelope_.empty()) envelope_.assign(n_x_, 1.0);
  if (envelope_.size() != n_x_) {
    throw Error(ErrorKind::InvalidModel, "envelope length does not match bin count");
  }
  if (std::any_of(envelope_.begin(), envelope_.end(),
                  [](double v) { return !(v >= 0.0) || !std::isfinite(v); })) {
    throw Error(ErrorKind::InvalidModel, "envelope weights must be finite and nonnegative");
  }
  envelope_ = normalized(std::move(envelope_));
}

double FringeModel::bin_phase(std::size_t x) const noexcept {
  return kTwoPi * fringe_cycles_ * (static_cast<double>(x) + 0.5) / static_cast<double>(n_x_) +
         phase0_;
}

double FringeModel::port_imbalance() const noexcept {
  double s = 0.0;
  for (std::size_t x = 0; x < n_x_; ++x) s += envelope_[x] * std::cos(bin_phase(x));
  return s;
}

FringeModel FringeModel::with_visibility(double visibility) const {
  return FringeModel(n_x_, fringe_cycles_, phase0_, visibility, envelope_);
}

FringeModel quarter_phase_model(double visibility) {
  return FringeModel(4, 1.0, -std::numbers::pi / 4.0, visibility);
}

Distribution fringe_profile(const FringeModel& m, double phase_offset) {
  std::vector<double> w(m.n_x());
  for (std::size_t x = 0; x < m.n_x(); ++x)
    w[x] = m.envelope()[x] * (1.0 + m.visibility() * std::cos(m.bin_phase(x) + phase_offset));
  return normalized(std::move(w));
}

void validate(const TwoPathState& s) {
  const double norm = std::norm(s.amp1) + std::norm(s.amp2);
  if (std::abs(norm - 1.0) > kNormalizationTolerance) {
    throw Error(ErrorKind::InvalidModel, "two-path amplitudes are not normalized");
  }
  if (std::abs(s.idler_overlap) > 1.0 + kNormalizationTolerance) {
    throw Error(ErrorKind::InvalidModel, "idler overlap must satisfy |gamma| <= 1");
  }
}

Distribution reduced_signal_distribution(const TwoPathState& s, const FringeModel& m) {
  validate(s);
  const double depth =
      2.0 * std::abs(s.amp1) * std::abs(s.amp2) * std::abs(s.idler_overlap) * m.visibility();
  double shift = 0.0;
  if (std::abs(s.amp1) > 0.0) shift += std::arg(s.amp1);
  if (std::abs(s.amp2) > 0.0) shift -= std::arg(s.amp2);
  if (std::abs(s.idler_overlap) > 0.0) shift -= std::arg(s.idler_overlap);

  std::vector<double> w(m.n_x());
  for (std::size_t x = 0; x < m.n_x(); ++x)
    w[x] = m.envelope()[x] * (1.0 + depth * std::cos(m.bin_phase(x) + shift));
  return normalized(std::move(w));
}

std::string_view to_string(ArchitectureKind kind) noexcept {
  switch (kind) {
    case ArchitectureKind::Kim: return "kim";
    case ArchitectureKind::MachZehnder: return "mach_zehnder";
    case ArchitectureKind::Polarization: return "polarization";
    case ArchitectureKind::PassiveChoice: return "passive_choice";
  }
  return "unknown";
}

ArchitectureKind parse_architecture(std::string_view name) {
  for (auto kind : {ArchitectureKind::Kim, ArchitectureKind::MachZehnder,
                    ArchitectureKind::Polarization, ArchitectureKind::PassiveChoice}) {
    if (name == to_string(kind)) return kind;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown architecture '" + std::string(name) + "'");
}

void validate(const ArchitectureSpec& spec) {
  switch (spec.kind) {
    case ArchitectureKind::MachZehnder:
    case ArchitectureKind::Polarization:
      if (!spec.q) {
        throw Error(ErrorKind::InvalidChoiceProbability,
                    std::string(to_string(spec.kind)) + " requires a choice probability q");
      }
      check_choice_probability(*spec.q);
      break;
    case ArchitectureKind::PassiveChoice:
      if (spec.q) {
        throw Error(ErrorKind::InvalidChoiceProbability,
                    "passive_choice has no external choice; q must not be given");
      }
      break;
    case ArchitectureKind::Kim:
      // The idler branch is fixed at 1/2; an explicit q must agree.
      if (spec.q && *spec.q != 0.5) {
        throw Error(ErrorKind::InvalidChoiceProbability, "kim fixes the arm probability at 0.5");
      }
      break;
  }
}

JointDistribution build_kim(const FringeModel& m) {
  OutcomeSpace space(m.n_x(), {std::string(kErase), std::string(kPreserve)},
                     {"D1", "D2", "D3", "D4"});
  const auto erase = space.c_index(kErase);
  const auto preserve = space.c_index(kPreserve);
  std::vector<double> p(space.cell_count(), 0.0);
  for (std::size_t x = 0; x < m.n_x(); ++x) {
    const double e = m.envelope()[x];
    const double mod = m.visibility() * std::cos(m.bin_phase(x));
    p[space.index(x, erase, 0)] = 0.25 * e * (1.0 + mod);
    p[space.index(x, erase, 1)] = 0.25 * e * (1.0 - mod);
    p[space.index(x, preserve, 2)] = 0.25 * e;
    p[space.index(x, preserve, 3)] = 0.25 * e;
  }
  return finish(std::move(space), std::move(p));
}

CoarseGraining kim_coarse_graining() {
  return CoarseGraining({{"D1", "D_erase"},
                         {"D2", "D_erase"},
                         {"D3", "D_preserve"},
                         {"D4", "D_preserve"}});
}

JointDistribution build_mach_zehnder(const FringeModel& m, double q) {
  check_choice_probability(q);
  OutcomeSpace space(m.n_x(), {std::string(kErase), std::string(kPreserve)}, {"D1", "D2"});
  const auto erase = space.c_index(kErase);
  const auto preserve = space.c_index(kPreserve);
  std::vector<double> p(space.cell_count(), 0.0);
  for (std::size_t x = 0; x < m.n_x(); ++x) {
    const double e = m.envelope()[x];
    const double mod = m.visibility() * std::cos(m.bin_phase(x));
    p[space.index(x, erase, 0)] = q * e * (1.0 + mod) / 2.0;
    p[space.index(x, erase, 1)] = q * e * (1.0 - mod) / 2.0;
    p[space.index(x, preserve, 0)] = (1.0 - q) * e / 2.0;
    p[space.index(x, preserve, 1)] = (1.0 - q) * e / 2.0;
  }
  return finish(std::move(space), std::move(p));
}

JointDistribution build_polarization(const FringeModel& m, double q) {
  check_choice_probability(q);
  OutcomeSpace space(m.n_x(), {std::string(kErase), std::string(kPreserve)},
                     {"D_erase", "D_preserve", std::string(kLossLabel)});
  const auto erase = space.c_index(kErase);
  const auto preserve = space.c_index(kPreserve);
  const auto loss = *space.loss_index();
  std::vector<double> p(space.cell_count(), 0.0);
  for (std::size_t x = 0; x < m.n_x(); ++x) {
    const double e = m.envelope()[x];
    const double success = (1.0 + m.visibility() * std::cos(m.bin_phase(x))) / 2.0;
    p[space.index(x, erase, 0)] = q * e * success;
    p[space.index(x, erase, loss)] = q * e * (1.0 - success);
    p[space.index(x, preserve, 1)] = (1.0 - q) * e;
  }
  return finish(std::move(space), std::move(p));
}

JointDistribution build_passive_choice(const FringeModel& m) {
  const double imbalance = m.visibility() * std::abs(m.port_imbalance());
  if (imbalance > kBalanceTolerance) {
    std::ostringstream os;
    os << "output ports differ in probability by " << imbalance;
    throw Error(ErrorKind::UnbalancedPorts, os.str());
  }
  OutcomeSpace space(m.n_x(), {"D1", "D2"}, {"D1", "D2"});
  std::vector<double> p(space.cell_count(), 0.0);
  for (std::size_t x = 0; x < m.n_x(); ++x) {
    const double e = m.envelope()[x];
    const double mod = m.visibility() * std::cos(m.bin_phase(x));
    p[space.index(x, 0, 0)] = e * (1.0 + mod) / 2.0;
    p[space.index(x, 1, 1)] = e * (1.0 - mod) / 2.0;
  }
  return finish(std::move(space), std::move(p));
}

JointDistribution build(const ArchitectureSpec& spec, bool coarse) {
  validate(spec);
  if (coarse && spec.kind != ArchitectureKind::Kim) {
    throw Error(ErrorKind::InvalidArgument, "coarse-graining is defined for kim only");
  }
  switch (spec.kind) {
    case ArchitectureKind::Kim: {
      auto joint = build_kim(spec.fringe);
      return coarse ? coarse_grain(joint, kim_coarse_graining()) : joint;
    }
    case ArchitectureKind::MachZehnder: return build_mach_zehnder(spec.fringe, *spec.q);
    case ArchitectureKind::Polarization: return build_polarization(spec.fringe, *spec.q);
    case ArchitectureKind::PassiveChoice: return build_passive_choice(spec.fringe);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown architecture");
}

}  // namespace dcqe::optics
