#pragma once

// Analytic forward models for the four eraser architectures. The optical
// physics is replaced by a parametric fringe law
//
//   p(x) ∝ envelope(x) · (1 + V cos θ(x)),  θ(x) = 2π f (x + 0.5) / n_x + φ0
//
// evaluated at bin centers.

#include <complex>
#include <numbers>
#include <optional>
#include <string_view>
#include <vector>

#include "dcqe/probkit.hpp"

namespace dcqe::optics {

inline constexpr std::size_t kDefaultBins = 64;
inline constexpr double kDefaultFringeCycles = 4.0;
inline constexpr double kDefaultChoiceProbability = 0.5;
/// Tolerance on |P(D1) − P(D2)| for the passive-choice interferometer.
inline constexpr double kBalanceTolerance = 1e-9;
inline constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

class FringeModel {
 public:
  /// Envelope weights are normalized on construction; an empty envelope is flat.
  FringeModel(std::size_t n_x = kDefaultBins, double fringe_cycles = kDefaultFringeCycles,
              double phase0 = 0.0, double visibility = 1.0, std::vector<double> envelope = {});

  std::size_t n_x() const noexcept { return n_x_; }
  double fringe_cycles() const noexcept { return fringe_cycles_; }
  double phase0() const noexcept { return phase0_; }
  double visibility() const noexcept { return visibility_; }
  const std::vector<double>& envelope() const noexcept { return envelope_; }

  double bin_phase(std::size_t x) const noexcept;
  /// Σ envelope(x) cos θ(x); zero for balanced output ports.
  double port_imbalance() const noexcept;

  FringeModel with_visibility(double visibility) const;

 private:
  std::size_t n_x_;
  double fringe_cycles_;
  double phase0_;
  double visibility_;
  std::vector<double> envelope_;
};

/// n_x=4, f=1 with φ0=−π/4, so the bin-center phases are exactly
/// {0, π/2, π, 3π/2}.
FringeModel quarter_phase_model(double visibility = 1.0);

/// envelope(x)·(1 + V cos(θ(x) + phase_offset)), normalized.
Distribution fringe_profile(const FringeModel& m, double phase_offset = 0.0);

/// Two-path signal/idler state α1|s1⟩|i1⟩ + α2|s2⟩|i2⟩ with γ = ⟨i1|i2⟩.
struct TwoPathState {
  std::complex<double> amp1{kInvSqrt2, 0.0};
  std::complex<double> amp2{kInvSqrt2, 0.0};
  std::complex<double> idler_overlap{1.0, 0.0};
};

void validate(const TwoPathState& s);

/// Signal-position distribution after tracing out the idler. The signal
/// path amplitudes in bin x are sqrt(envelope)·e^{±iθ(x)/2} and the model
/// visibility V scales the path coherence, so the fringe depth is
/// 2|α1 α2|·|γ|·V with phase θ(x) + arg(α1) − arg(α2) − arg(γ).
Distribution reduced_signal_distribution(const TwoPathState& s, const FringeModel& m);

enum class ArchitectureKind { Kim, MachZehnder, Polarization, PassiveChoice };

std::string_view to_string(ArchitectureKind kind) noexcept;
/// Accepts kim, mach_zehnder, polarization, passive_choice.
ArchitectureKind parse_architecture(std::string_view name);

struct ArchitectureSpec {
  ArchitectureKind kind = ArchitectureKind::Kim;
  FringeModel fringe;
  std::optional<double> q;
};

/// q present iff the architecture has an external biased choice.
void validate(const ArchitectureSpec& spec);

/// Four-detector eraser: C is the idler arm (erase/preserve, 1/2 each),
/// D ∈ {D1, D2, D3, D4}; D1/D2 carry the opposite-phase fringes.
JointDistribution build_kim(const FringeModel& m);
/// {D1, D2} -> D_erase, {D3, D4} -> D_preserve.
CoarseGraining kim_coarse_graining();

/// Final beam splitter inserted (erase, probability q) or removed (preserve).
JointDistribution build_mach_zehnder(const FringeModel& m, double q);

/// Erase branch projects the idler with per-bin success (1 + V cos θ)/2 and
/// loses the rest; D ∈ {D_erase, D_preserve, LOSS}.
JointDistribution build_polarization(const FringeModel& m, double q);

/// Passive beam splitter; the C axis equals D ∈ {D1, D2}. Throws
/// UnbalancedPorts when the ports are not equiprobable.
JointDistribution build_passive_choice(const FringeModel& m);

/// Builds the architecture; `coarse` applies kim_coarse_graining to kim.
JointDistribution build(const ArchitectureSpec& spec, bool coarse = false);

}  // namespace dcqe::optics
