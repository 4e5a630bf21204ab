#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"

#include "dcqe/optics.hpp"
#include "dcqe/probkit.hpp"
#include "oracles.hpp"

using namespace dcqe;

namespace {

JointDistribution uniform_222() {
  return JointDistribution(OutcomeSpace(2, {"erase", "preserve"}, {"D1", "D2"}),
                           std::vector<double>(8, 0.125));
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("outcome space invariants") {
  CHECK_NOTHROW(OutcomeSpace(2, {"a", "b"}, {"D1", "LOSS"}));
  CHECK(kind_of([] { OutcomeSpace(1, {"a", "b"}, {"D1", "D2"}); }) == ErrorKind::InvalidSpace);
  CHECK(kind_of([] { OutcomeSpace(2, {"a"}, {"D1", "D2"}); }) == ErrorKind::InvalidSpace);
  CHECK(kind_of([] { OutcomeSpace(2, {"a", "a"}, {"D1", "D2"}); }) == ErrorKind::InvalidSpace);
  CHECK(kind_of([] { OutcomeSpace(2, {"a", "b"}, {"LOSS", "LOSS"}); }) == ErrorKind::InvalidSpace);
  CHECK(kind_of([] { OutcomeSpace(2, {"a", "LOSS"}, {"D1"}); }) == ErrorKind::InvalidSpace);
  CHECK(kind_of([] { OutcomeSpace(2, {"a", "b,c"}, {"D1"}); }) == ErrorKind::InvalidSpace);

  OutcomeSpace s(3, {"erase", "preserve"}, {"D_erase", "D_preserve", "LOSS"});
  CHECK(s.loss_index() == 2u);
  CHECK(s.c_index("preserve") == 1u);
  CHECK_FALSE(s.find_d("D9").has_value());
  CHECK(kind_of([&] { s.d_index("D9"); }) == ErrorKind::UnmappedLabel);
  CHECK(s.index(2, 1, 2) == s.cell_count() - 1);
}

TEST_CASE("validate") {
  CHECK_NOTHROW(validate(uniform_222()));

  std::vector<double> neg(8, 0.125);
  neg[3] = -0.1;
  neg[0] += 0.225;
  auto space = uniform_222().space();
  CHECK(kind_of([&] { validate(JointDistribution(space, neg)); }) == ErrorKind::NegativeMass);

  CHECK(kind_of([&] { validate(JointDistribution(space, std::vector<double>(8, 0.0))); }) ==
        ErrorKind::NotNormalized);
  CHECK(kind_of([&] { JointDistribution(space, std::vector<double>(7, 0.0)); }) ==
        ErrorKind::ShapeMismatch);
}

TEST_CASE("marginals") {
  const auto j = uniform_222();
  CHECK(marginal_c(j) == std::vector<double>{0.5, 0.5});

  const auto cd = marginal(j, {Axis::C, Axis::D});
  CHECK(cd.shape == std::vector<std::size_t>{2, 2});
  CHECK(cd.at({1, 0}) == 0.25);

  const auto kim = optics::build_kim(optics::quarter_phase_model());
  const auto px = marginal_x(kim);
  CHECK(oracle::max_abs_diff(px, {0.25, 0.25, 0.25, 0.25}) <= 1e-15);

  CHECK(kind_of([&] { marginal(j, std::span<const Axis>{}); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("conditioning on detection") {
  const auto kim = optics::build_kim(optics::quarter_phase_model());
  CHECK(oracle::max_abs_diff(conditional_x_given_d(kim, "D3"), {0.25, 0.25, 0.25, 0.25}) <= 1e-15);
  CHECK(oracle::max_abs_diff(conditional_x_given_d(kim, "D1"), oracle::kQuarterFringe) <= 1e-15);
  CHECK(oracle::max_abs_diff(conditional_x_given_d(kim, "D2"), oracle::kQuarterFringeShifted) <=
        1e-15);

  std::vector<double> p(8, 0.0);
  p[0] = 0.5;
  p[4] = 0.5;  // (x=1, erase, D1)
  JointDistribution j(uniform_222().space(), p);
  CHECK(kind_of([&] { conditional_x_given_d(j, "D2"); }) == ErrorKind::ZeroConditioningMass);
  CHECK(kind_of([&] { conditional_x_given_d(j, "D7"); }) == ErrorKind::UnmappedLabel);
}

TEST_CASE("total variation") {
  const std::vector<double> a{0.3, 0.7};
  CHECK(total_variation(a, a) == 0.0);
  CHECK(total_variation(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == 1.0);
  CHECK(total_variation(oracle::kQuarterFringe, oracle::kQuarterFringeShifted) == 0.5);
  CHECK(kind_of([&] { total_variation(a, std::vector<double>{1.0}); }) == ErrorKind::ShapeMismatch);
}

TEST_CASE("independence check") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    const auto v = check_independence(oracle::random_routed_joint(rng));
    CHECK(v.holds);
    CHECK(v.max_deviation <= 1e-15);
    CHECK_FALSE(v.witness.has_value());
  }

  const auto passive = optics::build_passive_choice(optics::quarter_phase_model());
  const auto v = check_independence(passive);
  CHECK_FALSE(v.holds);
  REQUIRE(v.witness.has_value());
  // P(x=0, D1) = 1/4·1 vs P(x=0)P(D1) = 1/8; first maximizer is (0, D1).
  CHECK(v.witness->first == 0u);
  CHECK(v.witness->second == 0u);
  CHECK(v.max_deviation == doctest::Approx(0.125).epsilon(1e-12));

  const auto pol = optics::build_polarization(optics::FringeModel(), 0.5);
  const auto vp = check_independence(pol);
  CHECK(vp.holds);
  CHECK(vp.max_deviation <= 1e-12);
}

TEST_CASE("zero-mass choices are skipped") {
  OutcomeSpace s(2, {"a", "b", "c"}, {"D1", "D2"});
  std::vector<double> p(s.cell_count(), 0.0);
  p[s.index(0, 0, 0)] = 0.25;
  p[s.index(1, 0, 0)] = 0.25;
  p[s.index(0, 2, 1)] = 0.25;
  p[s.index(1, 2, 1)] = 0.25;
  JointDistribution j(s, p);
  const auto iv = check_independence(j);
  CHECK(iv.holds);
  CHECK(iv.skipped_choices == std::vector<std::size_t>{1});
  const auto rv = check_deterministic_routing(j);
  CHECK(rv.holds);
  CHECK(rv.skipped_choices == std::vector<std::size_t>{1});
  REQUIRE(rv.routing.has_value());
  CHECK(rv.routing->route(0) == 0u);
  CHECK(rv.routing->route(2) == 1u);
  CHECK_FALSE(rv.routing->route(1).has_value());
}

TEST_CASE("lossless check") {
  const auto kim = check_lossless(optics::build_kim(optics::FringeModel()));
  CHECK(kim.holds);
  CHECK(kim.loss_mass == 0.0);

  const auto half = check_lossless(optics::build_polarization(optics::FringeModel(), 0.5));
  CHECK_FALSE(half.holds);
  CHECK(half.loss_mass == doctest::Approx(0.25).epsilon(1e-12));

  const auto eight = check_lossless(optics::build_polarization(optics::FringeModel(), 0.8));
  CHECK_FALSE(eight.holds);
  CHECK(eight.loss_mass == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("deterministic routing check") {
  const auto coarse = coarse_grain(optics::build_kim(optics::FringeModel()), optics::kim_coarse_graining());
  const auto c = check_deterministic_routing(coarse);
  CHECK(c.holds);
  REQUIRE(c.routing.has_value());
  CHECK(c.routing->route(coarse.space().c_index("erase")) == coarse.space().d_index("D_erase"));
  CHECK(c.routing->route(coarse.space().c_index("preserve")) == coarse.space().d_index("D_preserve"));

  const auto mz = optics::build_mach_zehnder(optics::FringeModel(), 0.5);
  const auto m = check_deterministic_routing(mz);
  CHECK_FALSE(m.holds);
  REQUIRE(m.counterexample.has_value());
  CHECK(m.counterexample->c == mz.space().c_index("erase"));
  CHECK(m.counterexample->d == mz.space().d_index("D1"));
  CHECK(m.counterexample->d_alt == mz.space().d_index("D2"));

  CHECK_FALSE(check_deterministic_routing(optics::build_kim(optics::FringeModel())).holds);

  OutcomeSpace s(2, {"a", "b"}, {"D1", "LOSS"});
  std::vector<double> p(s.cell_count(), 0.0);
  p[s.index(0, 0, 0)] = 0.5;
  p[s.index(0, 1, 1)] = 0.5;
  CHECK(kind_of([&] { check_deterministic_routing(JointDistribution(s, p)); }) ==
        ErrorKind::AllMassLost);
}

TEST_CASE("distinct conditionals check") {
  const auto coarse = coarse_grain(optics::build_kim(optics::FringeModel()), optics::kim_coarse_graining());
  const auto c = check_distinct_conditionals(coarse);
  CHECK_FALSE(c.holds);
  REQUIRE(c.witness.has_value());
  CHECK(c.witness->gap <= 1e-12);

  const auto fine = optics::build_kim(optics::quarter_phase_model());
  const auto f = check_distinct_conditionals(fine);
  CHECK(f.holds);
  REQUIRE(f.witness.has_value());
  CHECK(f.witness->d == 0u);
  CHECK(f.witness->d_alt == 1u);
  CHECK(f.witness->gap == 0.5);
  CHECK(f.witness->bin_set == std::vector<std::size_t>{0});

  CHECK(check_distinct_conditionals(optics::build_polarization(optics::FringeModel(), 0.5)).holds);

  OutcomeSpace s(2, {"a", "b"}, {"D1", "D2", "LOSS"});
  std::vector<double> p(s.cell_count(), 0.0);
  p[s.index(0, 0, 0)] = 0.5;
  p[s.index(1, 1, 0)] = 0.25;
  p[s.index(1, 1, 2)] = 0.25;
  JointDistribution one(s, p);
  CHECK(kind_of([&] { check_distinct_conditionals(one); }) == ErrorKind::InsufficientOutcomes);
  const auto r = audit(one);
  CHECK_FALSE(r.distinct_conditionals.holds);
  CHECK(r.distinct_conditionals.insufficient_outcomes);
  CHECK(r.no_go_consistent);
}

TEST_CASE("audit violation sets") {
  using P = Property;
  const optics::FringeModel m;
  CHECK(audit(optics::build_mach_zehnder(m, 0.5)).violations() == std::vector<P>{P::DeterministicRouting});
  CHECK(audit(optics::build_polarization(m, 0.5)).violations() == std::vector<P>{P::Lossless});
  CHECK(audit(optics::build_passive_choice(m)).violations() == std::vector<P>{P::Independence});
  CHECK(audit(optics::build_kim(m)).violations() == std::vector<P>{P::DeterministicRouting});
  CHECK(audit(coarse_grain(optics::build_kim(m), optics::kim_coarse_graining())).violations() ==
        std::vector<P>{P::DistinctConditionals});

  const auto pur = audit(optics::build_mach_zehnder(m, 0.3));
  CHECK(pur == audit(optics::build_mach_zehnder(m, 0.3)));
  CHECK(pur.no_go_consistent);
}

TEST_CASE("coarse graining") {
  const auto kim = optics::build_kim(optics::FringeModel(8, 1.0));
  CoarseGraining id({{"D1", "D1"}, {"D2", "D2"}, {"D3", "D3"}, {"D4", "D4"}});
  CHECK(coarse_grain(kim, id) == kim);

  const auto coarse = coarse_grain(kim, optics::kim_coarse_graining());
  CHECK(coarse.space().d_values() == std::vector<std::string>{"D_erase", "D_preserve"});
  CHECK(total_variation(conditional_x_given_d(coarse, "D_erase"),
                        conditional_x_given_d(coarse, "D_preserve")) <= 1e-12);

  CoarseGraining all({{"D1", "any"}, {"D2", "any"}, {"D3", "any"}, {"D4", "any"}});
  const auto merged = coarse_grain(kim, all);
  CHECK(merged.space().n_d() == 1);
  CHECK(conditional_x_given_d(merged, "any") == marginal_x(kim));

  CoarseGraining partial({{"D1", "a"}, {"D2", "a"}, {"D3", "b"}});
  CHECK(kind_of([&] { coarse_grain(kim, partial); }) == ErrorKind::UnmappedLabel);
  CHECK(kind_of([] { CoarseGraining(std::map<std::string, std::string>{{"LOSS", "D1"}}); }) == ErrorKind::InvalidCoarseGraining);
  CHECK(kind_of([] { CoarseGraining(std::map<std::string, std::string>{{"D1", "LOSS"}}); }) == ErrorKind::InvalidCoarseGraining);

  const auto pol = optics::build_polarization(optics::FringeModel(), 0.5);
  CoarseGraining det({{"D_erase", "det"}, {"D_preserve", "det"}});
  const auto pc = coarse_grain(pol, det);
  CHECK(pc.space().d_values() == std::vector<std::string>{"det", "LOSS"});
}

TEST_CASE("event log invariants") {
  OutcomeSpace s(2, {"a", "b"}, {"D1", "D2"});
  CHECK_NOTHROW(EventLog(s, {{0, 1, 0, 1}, {3, 0, 1, 0}}));
  CHECK(kind_of([&] { EventLog(s, {{1, 0, 0, 0}, {1, 0, 0, 0}}); }) == ErrorKind::InvalidLog);
  CHECK(kind_of([&] { EventLog(s, {{0, 2, 0, 0}}); }) == ErrorKind::InvalidLog);
  CHECK(kind_of([&] { EventLog(s, {{0, 0, 0, 2}}); }) == ErrorKind::InvalidLog);
}

TEST_CASE("empirical tolerance") {
  CHECK(empirical_tolerance(1000000) == doctest::Approx(0.003));
  CHECK(kind_of([] { empirical_tolerance(0); }) == ErrorKind::InvalidArgument);
}
