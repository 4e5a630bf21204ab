#include "dcqe/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dcqe/exact_lp.hpp"
#include "dcqe/optics.hpp"

namespace dcqe::feasibility {

namespace {

using lp::Rational;

constexpr std::size_t kErase = 0;
constexpr std::size_t kPreserve = 1;
constexpr std::size_t kDetErase = 0;
constexpr std::size_t kDetPreserve = 1;
constexpr std::size_t kLoss = 2;

void check_choice_probability(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    std::ostringstream os;
    os << "choice probability q=" << q << " must lie in (0, 1)";
    throw Error(ErrorKind::InvalidChoiceProbability, os.str());
  }
}

Distribution normalized_target(Distribution target, std::size_t n_x, const char* name) {
  if (target.size() != n_x) {
    throw Error(ErrorKind::ShapeMismatch, std::string(name) + " has " +
                                              std::to_string(target.size()) + " bins, expected " +
                                              std::to_string(n_x));
  }
  double total = 0.0;
  for (double v : target) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorKind::NegativeMass, std::string(name) + " has a negative or non-finite bin");
    }
    total += v;
  }
  if (!(total > 0.0)) throw Error(ErrorKind::NotNormalized, std::string(name) + " has zero mass");
  for (auto& v : target) v /= total;
  return target;
}

std::vector<Rational> rational_distribution(const Distribution& d) {
  std::vector<Rational> out;
  out.reserve(d.size());
  Rational total = 0;
  for (double v : d) {
    out.push_back(lp::to_rational(v));
    total += out.back();
  }
  for (auto& v : out) v /= total;
  return out;
}

}  // namespace

LossBounds loss_bounds(double q) {
  check_choice_probability(q);
  return {q / 2.0, q};
}

Distribution worst_case_erase_conditional(std::size_t n_x) {
  if (n_x < 2) throw Error(ErrorKind::InvalidArgument, "need at least 2 bins");
  if (n_x % 2 == 0) {
    Distribution d(n_x, 0.0);
    std::fill(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(n_x / 2), 2.0 / static_cast<double>(n_x));
    return d;
  }
  return optics::fringe_profile(optics::FringeModel(n_x, 1.0, 0.0, 1.0));
}

LossFeasibilityProblem resolved(const LossFeasibilityProblem& problem) {
  check_choice_probability(problem.q);
  if (problem.n_x < 2) throw Error(ErrorKind::InvalidArgument, "need at least 2 bins");
  if (!std::isfinite(problem.p)) throw Error(ErrorKind::InvalidArgument, "loss rate must be finite");
  LossFeasibilityProblem out = problem;
  out.erase_conditional =
      problem.erase_conditional.empty()
          ? worst_case_erase_conditional(problem.n_x)
          : normalized_target(problem.erase_conditional, problem.n_x, "erase_conditional");
  out.preserve_conditional =
      problem.preserve_conditional.empty()
          ? Distribution(problem.n_x, 1.0 / static_cast<double>(problem.n_x))
          : normalized_target(problem.preserve_conditional, problem.n_x, "preserve_conditional");
  return out;
}

OutcomeSpace loss_space(std::size_t n_x) {
  return OutcomeSpace(n_x, {std::string(dcqe::kErase), std::string(dcqe::kPreserve)},
                      {std::string(kDetectedErase), std::string(kDetectedPreserve),
                       std::string(kLossLabel)});
}

FeasibilityResult construct_witness(const LossFeasibilityProblem& problem) {
  const auto prob = resolved(problem);
  const double q = prob.q;
  const double p = prob.p;
  const auto& erase = prob.erase_conditional;
  const auto& px = prob.preserve_conditional;

  double ratio = 1.0;
  for (std::size_t x = 0; x < prob.n_x; ++x)
    if (erase[x] > 0.0) ratio = std::min(ratio, px[x] / erase[x]);
  const double low = std::max(0.0, q * (1.0 - ratio));

  if (p < low || p > q) {
    std::ostringstream os;
    os.precision(17);
    os << "loss rate " << p << " outside feasible interval [" << low << ", " << q << "]";
    throw Error(ErrorKind::InfeasibleLossRate, os.str());
  }

  auto space = loss_space(prob.n_x);
  std::vector<double> t(space.cell_count(), 0.0);
  for (std::size_t x = 0; x < prob.n_x; ++x) {
    const double detected = (q - p) * erase[x];
    double lost = q * px[x] - detected;
    // Rounding at the lower endpoint.
    if (lost < 0.0 && lost > -kNormalizationTolerance) lost = 0.0;
    t[space.index(x, kErase, kDetErase)] = detected;
    t[space.index(x, kErase, kLoss)] = lost;
    t[space.index(x, kPreserve, kDetPreserve)] = (1.0 - q) * px[x];
  }
  JointDistribution witness(std::move(space), std::move(t));
  validate(witness);

  FeasibilityResult result;
  result.feasible = true;
  result.witness = std::move(witness);
  if (p == q) result.binding_constraint = kBindingUpper;
  else if (p == low) result.binding_constraint = kBindingLower;
  return result;
}

FeasibilityResult check_feasible(const LossFeasibilityProblem& problem) {
  const auto prob = resolved(problem);
  const std::size_t n_x = prob.n_x;
  const Rational q = lp::to_rational(prob.q);
  const Rational p = lp::to_rational(prob.p);
  const auto erase = rational_distribution(prob.erase_conditional);
  const auto preserve = rational_distribution(prob.preserve_conditional);

  const Rational choice[2] = {q, 1 - q};
  const Rational table[2][3] = {{q - p, 0, p}, {0, 1 - q, 0}};
  auto var = [](std::size_t x, std::size_t c, std::size_t d) { return (x * 2 + c) * 3 + d; };

  lp::LinearSystem sys;
  sys.variables = n_x * 6;

  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t d = 0; d < 3; ++d) {
      const auto r = sys.add_row(table[c][d]);
      for (std::size_t x = 0; x < n_x; ++x) sys.rows[r][var(x, c, d)] = 1;
    }

  // Σ_d t(x,c,d) − P(c)·Σ_{c',d} t(x,c',d) = 0
  for (std::size_t x = 0; x < n_x; ++x)
    for (std::size_t c = 0; c < 2; ++c) {
      const auto r = sys.add_row(0);
      for (std::size_t c2 = 0; c2 < 2; ++c2)
        for (std::size_t d = 0; d < 3; ++d)
          sys.rows[r][var(x, c2, d)] = (c2 == c ? Rational(1) : Rational(0)) - choice[c];
    }

  const Rational detected_mass[2] = {q - p, 1 - q};
  const std::vector<Rational>* targets[2] = {&erase, &preserve};
  for (std::size_t d = 0; d < 2; ++d) {
    if (detected_mass[d] <= 0) continue;  // conditional undefined
    for (std::size_t x = 0; x < n_x; ++x) {
      const auto r = sys.add_row(detected_mass[d] * (*targets[d])[x]);
      for (std::size_t c = 0; c < 2; ++c) sys.rows[r][var(x, c, d)] = 1;
    }
  }

  FeasibilityResult result;
  const auto solution = lp::find_nonnegative_solution(sys);
  if (!solution) {
    if (p > q) result.binding_constraint = kBindingUpper;
    else if (p < 0) result.binding_constraint = kBindingNonnegative;
    else result.binding_constraint = kBindingLower;
    return result;
  }

  auto space = loss_space(n_x);
  std::vector<double> t(space.cell_count());
  for (std::size_t x = 0; x < n_x; ++x)
    for (std::size_t c = 0; c < 2; ++c)
      for (std::size_t d = 0; d < 3; ++d)
        t[space.index(x, c, d)] = (*solution)[var(x, c, d)].convert_to<double>();
  JointDistribution witness(std::move(space), std::move(t));
  validate(witness);

  result.feasible = true;
  result.witness = std::move(witness);
  if (p == q) {
    result.binding_constraint = kBindingUpper;
  } else {
    // The lower bound binds when some bin's erase mass is entirely detected.
    for (std::size_t x = 0; x < n_x; ++x)
      if ((*solution)[var(x, kErase, kLoss)] == 0 && (*solution)[var(x, kErase, kDetErase)] > 0) {
        result.binding_constraint = kBindingLower;
        break;
      }
  }
  return result;
}

std::vector<FeasibilityResult> feasibility_sweep_serial(const LossFeasibilityProblem& problem,
                                                        std::span<const double> loss_rates) {
  std::vector<FeasibilityResult> out;
  out.reserve(loss_rates.size());
  for (double p : loss_rates) {
    auto prob = problem;
    prob.p = p;
    out.push_back(check_feasible(prob));
  }
  return out;
}

std::vector<FeasibilityResult> feasibility_sweep(const LossFeasibilityProblem& problem,
                                                 std::span<const double> loss_rates) {
  resolved(problem);  // surface argument errors outside the parallel region
  std::vector<FeasibilityResult> out(loss_rates.size());
  const auto n = static_cast<std::int64_t>(loss_rates.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    auto prob = problem;
    prob.p = loss_rates[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] = check_feasible(prob);
  }
  return out;
}

double berkson_gap(const JointDistribution& joint) {
  const auto& s = joint.space();
  const auto loss = s.loss_index();
  if (!loss) throw Error(ErrorKind::NoLossOutcome, "joint has no loss outcome");

  double lost = 0.0;
  for (std::size_t x = 0; x < s.n_x(); ++x)
    for (std::size_t c = 0; c < s.n_c(); ++c) lost += joint(x, c, *loss);
  if (!(lost > kNormalizationTolerance) || !(lost < 1.0 - kNormalizationTolerance)) {
    std::ostringstream os;
    os << "loss mass " << lost << " leaves nothing to condition on";
    throw Error(ErrorKind::DegenerateLossMass, os.str());
  }

  std::vector<double> xc(s.n_x() * s.n_c(), 0.0);
  double detected = 0.0;
  for (std::size_t x = 0; x < s.n_x(); ++x)
    for (std::size_t c = 0; c < s.n_c(); ++c)
      for (std::size_t d = 0; d < s.n_d(); ++d) {
        if (d == *loss) continue;
        xc[x * s.n_c() + c] += joint(x, c, d);
        detected += joint(x, c, d);
      }
  std::vector<double> px(s.n_x(), 0.0);
  std::vector<double> pc(s.n_c(), 0.0);
  for (auto& v : xc) v /= detected;
  for (std::size_t x = 0; x < s.n_x(); ++x)
    for (std::size_t c = 0; c < s.n_c(); ++c) {
      px[x] += xc[x * s.n_c() + c];
      pc[c] += xc[x * s.n_c() + c];
    }

  double gap = 0.0;
  for (std::size_t x = 0; x < s.n_x(); ++x)
    for (std::size_t c = 0; c < s.n_c(); ++c)
      gap = std::max(gap, std::abs(xc[x * s.n_c() + c] - px[x] * pc[c]));
  return gap;
}

}  // namespace dcqe::feasibility
