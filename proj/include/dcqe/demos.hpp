#pragma once

// Classical-conditioning demo: a switch driven by the signal detection
// position routes the idler to D1 inside a figure and to D2 outside it.

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "dcqe/probkit.hpp"

namespace dcqe::demos {

class RegionMask {
 public:
  /// Needs at least one member and one non-member bin.
  explicit RegionMask(std::vector<bool> member);

  std::size_t n_x() const noexcept { return member_.size(); }
  bool contains(std::size_t x) const { return member_.at(x); }
  const std::vector<bool>& member() const noexcept { return member_; }

  /// First half of the bins.
  static RegionMask left_half(std::size_t n_x);

 private:
  std::vector<bool> member_;
};

/// One row of `0`/`1` characters (surrounding whitespace ignored).
RegionMask parse_mask_text(std::string_view text);
/// Plain PBM (P1), flattened row-major; `1` is a member (black) pixel.
RegionMask parse_mask_pbm(std::string_view text);
/// Dispatches on a leading `P1` magic.
RegionMask parse_mask(std::string_view text);

/// p(x, D1) = base(x)·[x ∈ mask], p(x, D2) = base(x)·[x ∉ mask], C ≡ D.
JointDistribution route_by_region(const RegionMask& mask, std::span<const double> base_x);

struct CoincidenceImage {
  std::vector<std::uint64_t> first;   // counts with the first detected label
  std::vector<std::uint64_t> second;  // counts with the second detected label
};

/// x-histograms conditioned on each of the log's two detected labels.
/// Throws EmptyLog and InvalidLog.
CoincidenceImage coincidence_image(const EventLog& log);

/// Exact conditioned x-masses of a joint, the counterpart of coincidence_image.
std::pair<Distribution, Distribution> coincidence_masses(const JointDistribution& joint);

}  // namespace dcqe::demos
