#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "dcqe/cli.hpp"
#include "dcqe/io.hpp"
#include "dcqe/optics.hpp"

using namespace dcqe;
using io::Json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int status = cli::dispatch(args, out, err);
  return {status, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("dcqe_cli_" + std::to_string(std::random_device{}()) + "_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Json json_file(const fs::path& p) { return Json::parse(slurp(p)); }

}  // namespace

TEST_CASE("bounds") {
  const auto r = run({"bounds", "--q", "0.5"});
  CHECK(r.status == cli::kExitOk);
  CHECK(r.out == "0.25 0.5\n");
  CHECK(run({"bounds", "--q", "0.8"}).out == "0.4 0.8\n");

  const auto bad = run({"bounds", "--q", "1.5"});
  CHECK(bad.status == cli::kExitDomainError);
  CHECK(Json::parse(bad.err)["error"]["kind"] == "InvalidChoiceProbability");
}

TEST_CASE("simulate then audit the coarse kim joint") {
  const auto dir = scratch("kim");
  const auto sim = run({"simulate", "--arch", "kim", "--coarse", "--out-dir", dir.string()});
  REQUIRE(sim.status == cli::kExitOk);
  CHECK(fs::exists(dir / "joint.csv"));
  CHECK(fs::exists(dir / "conditional_D_erase.csv"));
  CHECK(fs::exists(dir / "conditional_D_preserve.csv"));
  const auto manifest = json_file(dir / "simulate_manifest.json");
  CHECK(manifest["config"]["kind"] == "kim");
  CHECK(manifest["config"]["coarse"] == true);
  CHECK(manifest["artifacts"].size() == 3);

  const auto aud = run({"audit", "--input", (dir / "joint.csv").string(), "--out-dir", dir.string()});
  REQUIRE(aud.status == cli::kExitOk);
  const auto report = json_file(dir / "audit.json");
  CHECK(report["violations"] == Json::array({"distinct_conditionals"}));
  CHECK(report["distinct_conditionals"]["holds"] == false);
  CHECK(report["config"]["input_kind"] == "joint");
  CHECK(aud.out.find("violations: distinct_conditionals") != std::string::npos);

  // The written joint parses back to the in-memory one.
  std::istringstream in(slurp(dir / "joint.csv"));
  const auto back = io::read_joint(in);
  const auto expected = optics::build(optics::ArchitectureSpec{optics::ArchitectureKind::Kim, {}, {}}, true);
  REQUIRE(back.space() == expected.space());
  double worst = 0.0;
  for (std::size_t i = 0; i < back.values().size(); ++i)
    worst = std::max(worst, std::abs(back.values()[i] - expected.values()[i]));
  CHECK(worst <= 1e-12);
  fs::remove_all(dir);
}

TEST_CASE("sample polarization then audit the event log") {
  const auto dir = scratch("pol");
  const auto s = run({"sample", "--arch", "polarization", "--q", "0.5", "--n", "1000000", "--seed", "7",
                      "--out-dir", dir.string()});
  REQUIRE(s.status == cli::kExitOk);
  const auto a = run({"audit", "--input", (dir / "events.csv").string(), "--out-dir", dir.string()});
  REQUIRE(a.status == cli::kExitOk);
  const auto report = json_file(dir / "audit.json");
  CHECK(report["violations"] == Json::array({"lossless"}));
  CHECK(report["sample_size"] == 1000000);
  const double p = report["lossless"]["loss_mass"].get<double>();
  CHECK(std::abs(p - 0.25) <= 3 * std::sqrt(0.25 * 0.75 / 1e6));
  CHECK(report["config"]["tolerance"].get<double>() == doctest::Approx(0.003));
  fs::remove_all(dir);
}

TEST_CASE("identical runs write identical bytes") {
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  for (const auto& dir : {a, b}) {
    REQUIRE(run({"sample", "--arch", "mach_zehnder", "--q", "0.3", "--n", "70000", "--seed", "11", "--out-dir",
                 dir.string()})
                .status == 0);
    REQUIRE(run({"simulate", "--arch", "polarization", "--n-x", "16", "--out-dir", dir.string()}).status == 0);
  }
  for (const auto* name : {"events.csv", "joint.csv", "conditional_D_erase.csv"}) {
    CAPTURE(name);
    CHECK(slurp(a / name) == slurp(b / name));
  }
  CHECK(slurp(a / "events.csv") != "");
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("config file with flag overrides") {
  const auto dir = scratch("cfg");
  io::write_file((dir / "arch.json").string(), R"({"kind":"mach_zehnder","n_x":8,"q":0.7,"visibility":0.5})");
  const auto r = run({"simulate", "--config", (dir / "arch.json").string(), "--q", "0.2", "--out-dir",
                      dir.string()});
  REQUIRE(r.status == 0);
  const auto m = json_file(dir / "simulate_manifest.json");
  CHECK(m["config"]["q"] == 0.2);
  CHECK(m["config"]["n_x"] == 8);
  CHECK(m["config"]["visibility"] == 0.5);
  CHECK(m["config_sources"]["file_values"]["q"] == 0.7);
  CHECK(m["config_sources"]["flags"]["q"] == 0.2);

  io::write_file((dir / "broken.json").string(), "{not json");
  CHECK(run({"simulate", "--config", (dir / "broken.json").string(), "--out-dir", dir.string()}).status ==
        cli::kExitIoError);
  fs::remove_all(dir);
}

TEST_CASE("output directory from the environment") {
  const auto dir = scratch("env");
  ::setenv(cli::kOutDirEnv, dir.string().c_str(), 1);
  const auto r = run({"simulate", "--arch", "passive_choice"});
  ::unsetenv(cli::kOutDirEnv);
  CHECK(r.status == 0);
  CHECK(fs::exists(dir / "joint.csv"));
  CHECK(fs::exists(dir / "conditional_D1.csv"));
  fs::remove_all(dir);
}

TEST_CASE("witness and feasible") {
  const auto dir = scratch("feas");
  const auto w = run({"witness", "--q", "0.5", "--p", "0.25", "--out-dir", dir.string()});
  REQUIRE(w.status == 0);
  const auto wj = json_file(dir / "witness.json");
  CHECK(wj["feasible"] == true);
  CHECK(wj["loss_bounds"] == Json::array({0.25, 0.5}));
  CHECK(wj["witness"]["cells"].size() == 24);

  const auto bad = run({"witness", "--q", "0.5", "--p", "0.2", "--out-dir", dir.string()});
  CHECK(bad.status == cli::kExitDomainError);
  CHECK(Json::parse(bad.err)["error"]["kind"] == "InfeasibleLossRate");

  const auto f = run({"feasible", "--q", "0.5", "--p", "0.2", "0.25", "0.5", "0.51", "--out-dir", dir.string()});
  REQUIRE(f.status == 0);
  CHECK(f.out ==
        "0.2 infeasible loss_lower_bound\n0.25 feasible loss_lower_bound\n0.5 feasible loss_upper_bound\n"
        "0.51 infeasible loss_upper_bound\n");
  const auto fj = json_file(dir / "feasible.json");
  CHECK(fj["results"].size() == 4);
  CHECK(fj["config"]["loss_rates"].size() == 4);

  io::write_file((dir / "problem.json").string(),
                 R"({"q":0.4,"p":0.0,"n_x":3,"erase_conditional":[1,2,1],"preserve_conditional":[1,2,1]})");
  const auto g = run({"feasible", "--problem", (dir / "problem.json").string(), "--out-dir", dir.string()});
  CHECK(g.status == 0);
  CHECK(g.out == "0 feasible loss_lower_bound\n");
  CHECK(json_file(dir / "feasible.json")["feasible"] == true);
  fs::remove_all(dir);
}

TEST_CASE("figure demo") {
  const auto dir = scratch("fig");
  io::write_file((dir / "mask.txt").string(), "1111000011110000\n");
  const auto r = run({"figure", "--mask", (dir / "mask.txt").string(), "--n", "20000", "--seed", "3", "--out-dir",
                      dir.string()});
  REQUIRE(r.status == 0);
  std::istringstream d1(slurp(dir / "figure_D1.csv"));
  std::string line;
  std::getline(d1, line);
  CHECK(line == "x,count");
  std::size_t x = 0;
  std::uint64_t total = 0;
  while (std::getline(d1, line)) {
    const auto count = std::stoull(line.substr(line.find(',') + 1));
    const bool member = (x / 4) % 2 == 0;
    if (!member) CHECK(count == 0u);
    total += count;
    ++x;
  }
  CHECK(x == 16);
  CHECK(total > 0u);
  CHECK(json_file(dir / "figure_manifest.json")["config"]["seed"] == 3);

  io::write_file((dir / "mask.pbm").string(), "P1\n4 2\n1 1 0 0\n0 0 1 1\n");
  CHECK(run({"figure", "--mask", (dir / "mask.pbm").string(), "--out-dir", dir.string()}).status == 0);
  CHECK(run({"figure", "--mask", (dir / "mask.pbm").string(), "--n-x", "5", "--out-dir", dir.string()}).status ==
        cli::kExitDomainError);
  fs::remove_all(dir);
}

TEST_CASE("exit statuses") {
  const auto missing = run({"audit", "--input", "/nonexistent/events.csv", "--out-dir", scratch("x").string()});
  CHECK(missing.status == cli::kExitIoError);
  CHECK(Json::parse(missing.err)["error"]["kind"] == "IoError");

  CHECK(run({"frobnicate"}).status == cli::kExitIoError);
  CHECK(run({}).status == cli::kExitIoError);
  CHECK(run({"sample", "--arch", "kim", "--n", "abc"}).status == cli::kExitIoError);
  CHECK(run({"--help"}).status == cli::kExitOk);

  const auto dir = scratch("exit");
  CHECK(run({"simulate", "--arch", "sagnac", "--out-dir", dir.string()}).status == cli::kExitDomainError);
  CHECK(run({"simulate", "--arch", "passive_choice", "--q", "0.5", "--out-dir", dir.string()}).status ==
        cli::kExitDomainError);
  CHECK(run({"simulate", "--out-dir", dir.string()}).status == cli::kExitDomainError);

  io::write_file((dir / "garbage.csv").string(), "a,b\n1,2\n");
  const auto g = run({"audit", "--input", (dir / "garbage.csv").string(), "--out-dir", dir.string()});
  CHECK(g.status == cli::kExitIoError);
  CHECK(Json::parse(g.err)["error"]["kind"] == "ParseError");
  fs::remove_all(dir);
}
