#include "dcqe/exact_lp.hpp"

#include <cmath>
#include <cstdint>

#include "dcqe/error.hpp"

namespace dcqe::lp {

namespace {

using boost::multiprecision::cpp_int;

int sign(const Rational& r) { return r > 0 ? 1 : (r < 0 ? -1 : 0); }

bool phase_one(std::vector<std::vector<Rational>> a, std::vector<Rational> b,
               std::vector<Rational>& solution) {
  const std::size_t m = a.size();
  const std::size_t n = solution.size();
  if (m == 0) return true;
  const std::size_t cols = n + m;

  // Tableau rows: structural | artificial | rhs.
  std::vector<std::vector<Rational>> t(m, std::vector<Rational>(cols + 1));
  for (std::size_t i = 0; i < m; ++i) {
    const bool flip = b[i] < 0;
    for (std::size_t j = 0; j < n; ++j) t[i][j] = flip ? Rational(-a[i][j]) : a[i][j];
    t[i][n + i] = 1;
    t[i][cols] = flip ? Rational(-b[i]) : b[i];
  }
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;

  // Reduced costs of the phase-one objective (sum of artificials).
  std::vector<Rational> cost(cols + 1);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      if (t[i][j] != 0) cost[j] -= t[i][j];
    cost[cols] -= t[i][cols];
  }

  while (true) {
    std::size_t enter = cols;
    for (std::size_t j = 0; j < cols; ++j)
      if (cost[j] < 0) {
        enter = j;
        break;
      }
    if (enter == cols) break;

    std::size_t leave = m;
    Rational best;
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][enter] <= 0) continue;
      Rational ratio = t[i][cols] / t[i][enter];
      if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
        leave = i;
        best = ratio;
      }
    }
    // The phase-one objective is bounded below by zero.
    if (leave == m) break;

    const Rational pivot = t[leave][enter];
    for (auto& v : t[leave])
      if (v != 0) v /= pivot;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave || t[i][enter] == 0) continue;
      const Rational f = t[i][enter];
      for (std::size_t j = 0; j <= cols; ++j)
        if (t[leave][j] != 0) t[i][j] -= f * t[leave][j];
    }
    if (cost[enter] != 0) {
      const Rational f = cost[enter];
      for (std::size_t j = 0; j <= cols; ++j)
        if (t[leave][j] != 0) cost[j] -= f * t[leave][j];
    }
    basis[leave] = enter;
  }

  if (cost[cols] != 0) return false;
  for (auto& v : solution) v = 0;
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) solution[basis[i]] = t[i][cols];
  return true;
}

}  // namespace

Rational to_rational(double value) {
  if (!std::isfinite(value)) throw Error(ErrorKind::InvalidArgument, "non-finite coefficient");
  if (value == 0.0) return Rational(0);
  int exponent = 0;
  const double mantissa = std::frexp(value, &exponent);
  const auto integer = static_cast<std::int64_t>(std::ldexp(mantissa, 53));
  exponent -= 53;
  Rational r(integer);
  const cpp_int scale = cpp_int(1) << static_cast<unsigned>(std::abs(exponent));
  if (exponent > 0) r *= Rational(scale);
  else if (exponent < 0) r /= Rational(scale);
  return r;
}

std::size_t LinearSystem::add_row(Rational rhs_value) {
  rows.emplace_back(variables);
  rhs.push_back(std::move(rhs_value));
  return rows.size() - 1;
}

std::optional<std::vector<Rational>> find_nonnegative_solution(const LinearSystem& system) {
  const std::size_t n = system.variables;
  auto a = system.rows;
  auto b = system.rhs;
  const std::size_t m = a.size();
  if (b.size() != m) throw Error(ErrorKind::ShapeMismatch, "rhs length differs from row count");
  for (const auto& row : a)
    if (row.size() != n) throw Error(ErrorKind::ShapeMismatch, "row length differs from variables");

  std::vector<std::optional<Rational>> fixed(n);
  std::vector<bool> active(m, true);

  auto fix = [&](std::size_t j, const Rational& value) {
    fixed[j] = value;
    for (std::size_t i = 0; i < m; ++i) {
      if (!active[i] || a[i][j] == 0) continue;
      b[i] -= a[i][j] * value;
      a[i][j] = 0;
    }
  };

  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < m; ++i) {
      if (!active[i]) continue;
      std::size_t nonzeros = 0;
      std::size_t last = 0;
      bool positive = false;
      bool negative = false;
      for (std::size_t j = 0; j < n; ++j) {
        const int s = sign(a[i][j]);
        if (s == 0) continue;
        ++nonzeros;
        last = j;
        positive |= s > 0;
        negative |= s < 0;
      }
      if (nonzeros == 0) {
        if (b[i] != 0) return std::nullopt;
        active[i] = false;
        changed = true;
      } else if (nonzeros == 1) {
        const Rational value = b[i] / a[i][last];
        if (value < 0) return std::nullopt;
        active[i] = false;
        fix(last, value);
        changed = true;
      } else if (positive != negative) {
        const int s = positive ? 1 : -1;
        if (sign(b[i]) == -s) return std::nullopt;
        if (b[i] == 0) {
          active[i] = false;
          for (std::size_t j = 0; j < n; ++j)
            if (a[i][j] != 0) fix(j, Rational(0));
          changed = true;
        }
      }
    }
  }

  std::vector<std::size_t> free_vars;
  for (std::size_t j = 0; j < n; ++j)
    if (!fixed[j]) free_vars.push_back(j);
  std::vector<std::vector<Rational>> sub_a;
  std::vector<Rational> sub_b;
  for (std::size_t i = 0; i < m; ++i) {
    if (!active[i]) continue;
    std::vector<Rational> row(free_vars.size());
    for (std::size_t k = 0; k < free_vars.size(); ++k) row[k] = a[i][free_vars[k]];
    sub_a.push_back(std::move(row));
    sub_b.push_back(b[i]);
  }

  std::vector<Rational> sub_solution(free_vars.size());
  if (!phase_one(std::move(sub_a), std::move(sub_b), sub_solution)) return std::nullopt;

  std::vector<Rational> solution(n);
  for (std::size_t j = 0; j < n; ++j)
    if (fixed[j]) solution[j] = *fixed[j];
  for (std::size_t k = 0; k < free_vars.size(); ++k) solution[free_vars[k]] = sub_solution[k];
  return solution;
}

}  // namespace dcqe::lp
