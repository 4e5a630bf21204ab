#pragma once

// Exact feasibility of { t >= 0 : A t = b } over the rationals.

#include <cstddef>
#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace dcqe::lp {

using Rational = boost::multiprecision::cpp_rational;

/// Exact value of a finite double.
Rational to_rational(double value);

struct LinearSystem {
  std::size_t variables = 0;
  std::vector<std::vector<Rational>> rows;  // each of length `variables`
  std::vector<Rational> rhs;

  /// Appends a zero row and returns its index.
  std::size_t add_row(Rational rhs_value);
};

/// Returns a nonnegative solution of the system, or nullopt when none exists.
/// Rows fixed by sign or by a single variable are eliminated first; the rest
/// goes through a phase-one simplex with Bland's rule, so the answer is exact.
std::optional<std::vector<Rational>> find_nonnegative_solution(const LinearSystem& system);

}  // namespace dcqe::lp
