// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "dcqe/demos.hpp"
#include "dcqe/feasibility.hpp"
#include "dcqe/optics.hpp"
#include "dcqe/sampling.hpp"
#include "oracles.hpp"

using namespace dcqe;

namespace {

// Pinned tolerances.
constexpr double kExact = 1e-12;
constexpr double kSampledKimTv = 0.01;
constexpr double kEndpointStep = 1e-9;
constexpr double kBerksonFloor = 0.01;
constexpr double kNoGoSeconds = 10.0;
constexpr int kRandomJoints = 10000;
constexpr std::uint64_t kSamples = 1000000;
constexpr std::uint64_t kSeed = 20240607;

int failures = 0;
std::size_t audited = 0;
std::size_t inconsistent = 0;

AuditReport tracked_audit(const JointDistribution& j, double tol = kAnalyticTolerance) {
  auto r = audit(j, tol);
  ++audited;
  if (!r.no_go_consistent) ++inconsistent;
  return r;
}

void report(const char* name, bool ok, const std::string& detail) {
  std::printf("%s  %-28s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double max_detected_gap(const JointDistribution& j) {
  const auto& s = j.space();
  const auto pd = marginal_d(j);
  std::vector<Distribution> conds;
  for (std::size_t d = 0; d < s.n_d(); ++d)
    if (!s.is_loss(d) && pd[d] > 0.0) conds.push_back(conditional_x_given_d(j, d));
  double gap = 0.0;
  for (std::size_t a = 0; a < conds.size(); ++a)
    for (std::size_t b = a + 1; b < conds.size(); ++b) gap = std::max(gap, total_variation(conds[a], conds[b]));
  return gap;
}

feasibility::LossFeasibilityProblem worst_case(double q, double p) {
  feasibility::LossFeasibilityProblem prob;
  prob.q = q;
  prob.p = p;
  return prob;
}

double no_signaling_gap(const JointDistribution& j) {
  const auto& s = j.space();
  return oracle::max_abs_diff(conditional_x_given_c(j, s.c_index(kErase)),
                              conditional_x_given_c(j, s.c_index(kPreserve)));
}

void no_go_suite() {
  std::mt19937_64 rng(kSeed);
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::size_t consistent = 0;
  for (int i = 0; i < kRandomJoints; ++i) {
    const auto j = oracle::random_routed_joint(rng);
    worst = std::max(worst, max_detected_gap(j));
    if (tracked_audit(j).no_go_consistent) ++consistent;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool ok = worst <= kExact && consistent == static_cast<std::size_t>(kRandomJoints) && secs < kNoGoSeconds;
  report("no_go_suite", ok,
         fmt("max_tv=%.3g consistent=%.0f/10000 runtime=%.2fs", worst, static_cast<double>(consistent), secs));
}

void appendix_bounds() {
  const auto b = feasibility::loss_bounds(0.5);
  const bool exact = b.low == 0.25 && b.high == 0.5;
  const std::vector<double> probes{0.25 - kEndpointStep, 0.25, 0.25 + kEndpointStep,
                                   0.5 - kEndpointStep,  0.5,  0.5 + kEndpointStep};
  const std::vector<bool> expected{false, true, true, true, true, false};
  const auto results = feasibility::feasibility_sweep(worst_case(0.5, 0.25), probes);
  bool flips = true;
  for (std::size_t i = 0; i < probes.size(); ++i) flips = flips && results[i].feasible == expected[i];
  report("loss_bounds", exact && flips,
         fmt("bounds=(%.17g, %.17g) flips_at_endpoints=%.0f", b.low, b.high, flips ? 1.0 : 0.0));
}

void witness_validity() {
  const auto r = feasibility::construct_witness(worst_case(0.5, 0.25));
  const auto& w = *r.witness;
  const double dev = check_independence(w).max_deviation;
  const auto cd = marginal(w, {Axis::C, Axis::D});
  const double table[2][3] = {{0.25, 0.0, 0.25}, {0.0, 0.5, 0.0}};
  bool cells = true;
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t d = 0; d < 3; ++d) cells = cells && cd.at({c, d}) == table[c][d];
  tracked_audit(w);
  report("witness_validity", r.feasible && dev <= kExact && cells,
         fmt("independence_dev=%.3g cd_table_exact=%.0f", dev, cells ? 1.0 : 0.0));
}

void kim_cancellation() {
  const optics::FringeModel m;
  const auto coarse = coarse_grain(optics::build_kim(m), optics::kim_coarse_graining());
  const double analytic = total_variation(conditional_x_given_d(coarse, feasibility::kDetectedErase),
                                          conditional_x_given_d(coarse, feasibility::kDetectedPreserve));
  const auto est = estimate_from_events(sample_events(coarse, kSamples, kSeed));
  const double sampled = total_variation(conditional_x_given_d(est, feasibility::kDetectedErase),
                                         conditional_x_given_d(est, feasibility::kDetectedPreserve));
  const auto fine = optics::build_kim(optics::quarter_phase_model());
  const double fine_tv = total_variation(conditional_x_given_d(fine, "D1"), conditional_x_given_d(fine, "D2"));
  tracked_audit(coarse);
  tracked_audit(est, empirical_tolerance(kSamples));
  tracked_audit(fine);
  report("kim_cancellation", analytic <= kExact && sampled <= kSampledKimTv && fine_tv == 0.5,
         fmt("coarse_tv=%.3g sampled_tv=%.4f fine_tv=%.17g", analytic, sampled, fine_tv));
}

void violation_table() {
  using P = Property;
  const optics::FringeModel m;
  const std::size_t n = m.n_x();
  struct Case {
    const char* name;
    JointDistribution joint;
    P expected;
  };
  const std::vector<Case> cases{
      {"kim_coarse", coarse_grain(optics::build_kim(m), optics::kim_coarse_graining()), P::DistinctConditionals},
      {"kim_fine", optics::build_kim(m), P::DeterministicRouting},
      {"mach_zehnder", optics::build_mach_zehnder(m, 0.5), P::DeterministicRouting},
      {"polarization", optics::build_polarization(m, 0.5), P::Lossless},
      {"passive_choice", optics::build_passive_choice(m), P::Independence},
      {"route_by_region", demos::route_by_region(demos::RegionMask::left_half(n), Distribution(n, 1.0 / n)),
       P::Independence},
  };
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    const auto v = tracked_audit(c.joint).violations();
    const bool match = v == std::vector<P>{c.expected};
    ok = ok && match;
    detail += std::string(c.name) + "=" + (v.size() == 1 ? std::string(to_string(v[0])) : "?") + (match ? " " : "! ");
  }
  if (!detail.empty()) detail.pop_back();
  report("violation_table", ok, detail);
}

void no_signaling() {
  const optics::FringeModel m;
  const double mz = no_signaling_gap(optics::build_mach_zehnder(m, 0.5));
  const double pol = no_signaling_gap(optics::build_polarization(m, 0.5));
  report("no_signaling", mz <= kExact && pol <= kExact, fmt("mach_zehnder=%.3g polarization=%.3g", mz, pol));
}

void monte_carlo_loss() {
  const auto j = optics::build_polarization(optics::FringeModel(), 0.5);
  const auto est = estimate_from_events(sample_events(j, kSamples, kSeed));
  const double p = marginal_d(est)[*est.space().loss_index()];
  const double band = 3.0 * std::sqrt(0.25 * 0.75 / static_cast<double>(kSamples));
  tracked_audit(est, empirical_tolerance(kSamples));
  report("monte_carlo_loss", std::abs(p - 0.25) <= band, fmt("p_hat=%.6f band=%.6f", p, band));
}

void berkson() {
  const auto w = *feasibility::construct_witness(worst_case(0.5, 0.25)).witness;
  const double gap = feasibility::berkson_gap(w);
  const double dev = check_independence(w).max_deviation;
  report("berkson_gap", gap > kBerksonFloor && dev <= kExact, fmt("gap=%.6f independence_dev=%.3g", gap, dev));
}

void figure_demo() {
  std::mt19937_64 rng(kSeed);
  bool ok = true;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 8 + trial;
    auto base = oracle::random_simplex(rng, n, 0.15);
    std::vector<bool> member(n);
    for (std::size_t x = 0; x < n; ++x) member[x] = (rng() >> 7) & 1;
    member[0] = true;
    member[n - 1] = false;
    const demos::RegionMask mask(member);
    const auto j = demos::route_by_region(mask, base);
    const auto [first, second] = demos::coincidence_masses(j);
    for (std::size_t x = 0; x < n; ++x) {
      ok = ok && (mask.contains(x) ? second[x] == 0.0 : first[x] == 0.0);
      ok = ok && ((first[x] > 0.0 || second[x] > 0.0) == (base[x] > 0.0));
    }
    ok = ok && marginal_x(j) == base;
    ok = ok && tracked_audit(j).violations() == std::vector<Property>{Property::Independence};
  }
  report("figure_demo", ok, "partition_exact marginal_bin_exact over 50 masks");
}

}  // namespace

int main() {
  try {
    no_go_suite();
    appendix_bounds();
    witness_validity();
    kim_cancellation();
    violation_table();
    no_signaling();
    monte_carlo_loss();
    berkson();
    figure_demo();
  } catch (const std::exception& e) {
    std::printf("FAIL  unexpected error: %s\n", e.what());
    return 1;
  }
  const bool all_consistent = inconsistent == 0;
  std::printf("%s  %-28s %zu audited joints\n", all_consistent ? "PASS" : "FAIL", "no_go_consistent_everywhere",
              audited);
  if (!all_consistent) ++failures;
  std::printf("%d failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
