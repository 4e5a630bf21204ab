#include "dcqe/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "dcqe/demos.hpp"
#include "dcqe/feasibility.hpp"
#include "dcqe/io.hpp"
#include "dcqe/optics.hpp"
#include "dcqe/sampling.hpp"

namespace dcqe::cli {

namespace {

namespace fs = std::filesystem;
using io::Json;

struct Context {
  const RunConfig& cfg;
  std::ostream& out;
  fs::path dir;
  std::vector<std::string> artifacts;

  void write(const std::string& name, const std::string& contents) {
    io::write_file((dir / name).string(), contents);
    artifacts.push_back(name);
  }
  void write_json(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }
};

Json parse_json_file(const std::string& path) {
  const auto text = io::read_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::ParseError, "'" + path + "': " + e.what());
  }
}

struct ResolvedArchitecture {
  optics::ArchitectureSpec spec;
  Json sources;
};

ResolvedArchitecture resolve_architecture(const RunConfig& cfg) {
  Json file_values = Json::object();
  if (cfg.config_path) file_values = parse_json_file(*cfg.config_path);
  Json flags = Json::object();
  if (cfg.arch) flags["kind"] = *cfg.arch;
  if (cfg.n_x) flags["n_x"] = *cfg.n_x;
  if (cfg.fringe_cycles) flags["fringe_cycles"] = *cfg.fringe_cycles;
  if (cfg.phase0) flags["phase0"] = *cfg.phase0;
  if (cfg.visibility) flags["visibility"] = *cfg.visibility;
  if (cfg.q) flags["q"] = *cfg.q;

  Json merged = file_values;
  for (const auto& [key, value] : flags.items()) merged[key] = value;
  if (!merged.contains("kind")) {
    throw Error(ErrorKind::InvalidArgument, "an architecture is required (--arch or config kind)");
  }
  ResolvedArchitecture r{io::architecture_from_json(merged), Json::object()};
  r.sources = Json{{"file", cfg.config_path ? Json(*cfg.config_path) : Json(nullptr)},
                   {"file_values", file_values},
                   {"flags", flags}};
  return r;
}

Json architecture_config(const ResolvedArchitecture& arch, bool coarse) {
  Json config = io::to_json(arch.spec);
  config["coarse"] = coarse;
  return config;
}

void write_manifest(Context& ctx, Json config, Json sources = nullptr) {
  Json manifest{{"schema_version", io::kSchemaVersion},
                {"command", ctx.cfg.command},
                {"config", std::move(config)},
                {"config_sources", std::move(sources)},
                {"artifacts", ctx.artifacts}};
  ctx.write_json(ctx.cfg.command + "_manifest.json", manifest);
}

int run_simulate(Context& ctx) {
  const auto arch = resolve_architecture(ctx.cfg);
  const auto joint = optics::build(arch.spec, ctx.cfg.coarse);
  std::ostringstream joint_csv;
  io::write_joint(joint_csv, joint);
  ctx.write("joint.csv", joint_csv.str());

  const auto pd = marginal_d(joint);
  const auto& s = joint.space();
  for (std::size_t d = 0; d < s.n_d(); ++d) {
    if (s.is_loss(d) || !(pd[d] > 0.0)) continue;
    std::ostringstream csv;
    io::write_distribution(csv, conditional_x_given_d(joint, d));
    ctx.write("conditional_" + s.d_values()[d] + ".csv", csv.str());
  }
  write_manifest(ctx, architecture_config(arch, ctx.cfg.coarse), arch.sources);
  ctx.out << "wrote " << ctx.artifacts.size() << " files to " << ctx.dir.string() << "\n";
  return kExitOk;
}

int run_sample(Context& ctx) {
  const auto arch = resolve_architecture(ctx.cfg);
  const auto joint = optics::build(arch.spec, ctx.cfg.coarse);
  const auto log = sample_events(joint, ctx.cfg.n, ctx.cfg.seed);
  std::ostringstream csv;
  io::write_event_log(csv, log);
  ctx.write("events.csv", csv.str());

  Json config = architecture_config(arch, ctx.cfg.coarse);
  config["n"] = ctx.cfg.n;
  config["seed"] = ctx.cfg.seed;
  write_manifest(ctx, std::move(config), arch.sources);
  ctx.out << "sampled " << log.size() << " events\n";
  return kExitOk;
}

int run_audit(Context& ctx) {
  if (!ctx.cfg.input) throw Error(ErrorKind::InvalidArgument, "audit requires --input");
  const auto text = io::read_file(*ctx.cfg.input);
  std::istringstream sniff(text);
  const auto kind = io::sniff_csv(sniff);

  std::istringstream in(text);
  std::optional<JointDistribution> joint;
  double tol = kAnalyticTolerance;
  if (kind == io::CsvKind::EventLog) {
    const auto log = io::read_event_log(in, ctx.cfg.n_x);
    joint = estimate_from_events(log);
    tol = empirical_tolerance(log.size());
  } else {
    joint = io::read_joint(in);
  }
  if (ctx.cfg.tol) tol = *ctx.cfg.tol;

  const auto report = audit(*joint, tol);
  Json j = io::to_json(report, joint->space(), joint->sample_size());
  j["config"] = {{"input", *ctx.cfg.input},
                 {"input_kind", kind == io::CsvKind::EventLog ? "event_log" : "joint"},
                 {"tolerance", tol},
                 {"n_x", ctx.cfg.n_x ? Json(*ctx.cfg.n_x) : Json(nullptr)}};
  ctx.write_json("audit.json", j);

  std::string violations;
  for (auto v : report.violations()) {
    if (!violations.empty()) violations += ",";
    violations += to_string(v);
  }
  ctx.out << "violations: " << (violations.empty() ? "none" : violations) << "\n"
          << "loss_mass: " << io::format_real(report.lossless.loss_mass) << "\n"
          << "no_go_consistent: " << (report.no_go_consistent ? "true" : "false") << "\n";
  return kExitOk;
}

int run_bounds(Context& ctx) {
  if (!ctx.cfg.q) throw Error(ErrorKind::InvalidArgument, "bounds requires --q");
  const auto b = feasibility::loss_bounds(*ctx.cfg.q);
  ctx.out << io::format_real(b.low) << ' ' << io::format_real(b.high) << "\n";
  return kExitOk;
}

feasibility::LossFeasibilityProblem resolve_problem(const RunConfig& cfg) {
  feasibility::LossFeasibilityProblem problem;
  if (cfg.problem_path) problem = io::problem_from_json(parse_json_file(*cfg.problem_path));
  if (cfg.q) problem.q = *cfg.q;
  if (cfg.n_x) problem.n_x = *cfg.n_x;
  if (!cfg.loss_rates.empty()) problem.p = cfg.loss_rates.front();
  return problem;
}

Json problem_config(const RunConfig& cfg, const feasibility::LossFeasibilityProblem& problem) {
  return {{"problem_file", cfg.problem_path ? Json(*cfg.problem_path) : Json(nullptr)},
          {"problem", io::to_json(problem)}};
}

int run_witness(Context& ctx) {
  const auto problem = resolve_problem(ctx.cfg);
  const auto result = feasibility::construct_witness(problem);
  Json j = io::to_json(result, problem);
  j["config"] = problem_config(ctx.cfg, problem);
  ctx.write_json("witness.json", j);
  ctx.out << "feasible binding=" << result.binding_constraint << "\n";
  return kExitOk;
}

int run_feasible(Context& ctx) {
  const auto problem = resolve_problem(ctx.cfg);
  std::vector<double> rates = ctx.cfg.loss_rates;
  if (rates.empty()) rates.push_back(problem.p);
  const auto results = feasibility::feasibility_sweep(problem, rates);

  Json j;
  if (results.size() == 1) {
    j = io::to_json(results.front(), problem);
  } else {
    Json list = Json::array();
    for (std::size_t i = 0; i < results.size(); ++i) {
      auto prob = problem;
      prob.p = rates[i];
      list.push_back(io::to_json(results[i], prob));
    }
    j = Json{{"schema_version", io::kSchemaVersion}, {"results", std::move(list)}};
  }
  j["config"] = problem_config(ctx.cfg, problem);
  j["config"]["loss_rates"] = rates;
  ctx.write_json("feasible.json", j);
  for (std::size_t i = 0; i < results.size(); ++i)
    ctx.out << io::format_real(rates[i]) << ' ' << (results[i].feasible ? "feasible" : "infeasible")
            << ' ' << results[i].binding_constraint << "\n";
  return kExitOk;
}

int run_figure(Context& ctx) {
  if (!ctx.cfg.mask_path) throw Error(ErrorKind::InvalidArgument, "figure requires --mask");
  const auto mask = demos::parse_mask(io::read_file(*ctx.cfg.mask_path));
  if (ctx.cfg.n_x && *ctx.cfg.n_x != mask.n_x()) {
    throw Error(ErrorKind::ShapeMismatch, "mask has " + std::to_string(mask.n_x()) + " bins");
  }
  const Distribution base(mask.n_x(), 1.0 / static_cast<double>(mask.n_x()));
  const auto joint = demos::route_by_region(mask, base);
  const auto log = sample_events(joint, ctx.cfg.n, ctx.cfg.seed);
  const auto image = demos::coincidence_image(log);

  std::ostringstream first;
  std::ostringstream second;
  io::write_histogram(first, image.first);
  io::write_histogram(second, image.second);
  ctx.write("figure_D1.csv", first.str());
  ctx.write("figure_D2.csv", second.str());

  Json config{{"mask", *ctx.cfg.mask_path}, {"n_x", mask.n_x()}, {"base", "flat"},
              {"n", ctx.cfg.n}, {"seed", ctx.cfg.seed}};
  write_manifest(ctx, std::move(config));
  ctx.out << "wrote figure histograms for " << log.size() << " events\n";
  return kExitOk;
}

void add_architecture_options(CLI::App* app, RunConfig& cfg) {
  app->add_option("--config", cfg.config_path, "Architecture JSON config");
  app->add_option("--arch", cfg.arch, "kim | mach_zehnder | polarization | passive_choice");
  app->add_option("--n-x", cfg.n_x, "Number of position bins");
  app->add_option("--fringe-cycles", cfg.fringe_cycles, "Fringes across the detector");
  app->add_option("--phase0", cfg.phase0, "Fringe phase offset (radians)");
  app->add_option("--visibility", cfg.visibility, "Fringe visibility in [0, 1]");
  app->add_option("--q", cfg.q, "P(C = erase)");
  app->add_flag("--coarse", cfg.coarse, "Coarse-grain kim detectors into erase/preserve channels");
}

void add_output_option(CLI::App* app, RunConfig& cfg) {
  app->add_option("--out-dir", cfg.out_dir, "Output directory");
}

void add_problem_options(CLI::App* app, RunConfig& cfg) {
  app->add_option("--problem", cfg.problem_path, "Feasibility problem JSON");
  app->add_option("--q", cfg.q, "P(C = erase)");
  app->add_option("--p", cfg.loss_rates, "Loss rate(s) P(D = LOSS)");
  app->add_option("--n-x", cfg.n_x, "Number of position bins");
}

int execute(RunConfig& cfg, std::ostream& out) {
  Context ctx{cfg, out, fs::path(cfg.out_dir), {}};
  if (cfg.command != "bounds") {
    std::error_code ec;
    fs::create_directories(ctx.dir, ec);
    if (ec) throw Error(ErrorKind::IoError, "cannot create '" + cfg.out_dir + "': " + ec.message());
  }
  if (cfg.command == "simulate") return run_simulate(ctx);
  if (cfg.command == "sample") return run_sample(ctx);
  if (cfg.command == "audit") return run_audit(ctx);
  if (cfg.command == "bounds") return run_bounds(ctx);
  if (cfg.command == "witness") return run_witness(ctx);
  if (cfg.command == "feasible") return run_feasible(ctx);
  if (cfg.command == "figure") return run_figure(ctx);
  throw Error(ErrorKind::InvalidArgument, "unknown command '" + cfg.command + "'");
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) cfg.out_dir = env;

  CLI::App app{"Delayed-choice quantum eraser simulator and auditor", "dcqe"};
  app.require_subcommand(1);

  auto* simulate = app.add_subcommand("simulate", "Write the exact joint and conditional fringes");
  add_architecture_options(simulate, cfg);
  add_output_option(simulate, cfg);

  auto* sample = app.add_subcommand("sample", "Write a sampled event log");
  add_architecture_options(sample, cfg);
  sample->add_option("--n", cfg.n, "Number of trials")->check(CLI::PositiveNumber);
  sample->add_option("--seed", cfg.seed, "Random seed");
  add_output_option(sample, cfg);

  auto* audit_cmd = app.add_subcommand("audit", "Audit an event log or joint CSV");
  audit_cmd->add_option("--input", cfg.input, "Event log or joint CSV")->required();
  audit_cmd->add_option("--tol", cfg.tol, "Audit tolerance");
  audit_cmd->add_option("--n-x", cfg.n_x, "Bin count for event logs");
  add_output_option(audit_cmd, cfg);

  auto* bounds = app.add_subcommand("bounds", "Print the admissible loss interval");
  bounds->add_option("--q", cfg.q, "P(C = erase)")->required();

  auto* witness = app.add_subcommand("witness", "Construct an explicit witness joint");
  add_problem_options(witness, cfg);
  add_output_option(witness, cfg);

  auto* feasible = app.add_subcommand("feasible", "Decide loss-rate feasibility exactly");
  add_problem_options(feasible, cfg);
  add_output_option(feasible, cfg);

  auto* figure = app.add_subcommand("figure", "Classical-conditioning figure demo");
  figure->add_option("--mask", cfg.mask_path, "Mask file (0/1 row or PBM P1)")->required();
  figure->add_option("--n-x", cfg.n_x, "Expected bin count");
  figure->add_option("--n", cfg.n, "Number of trials")->check(CLI::PositiveNumber);
  figure->add_option("--seed", cfg.seed, "Random seed");
  add_output_option(figure, cfg);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << io::error_json(Error(ErrorKind::ParseError, e.what())).dump() << "\n";
    return kExitIoError;
  }
  for (const auto* sub : app.get_subcommands()) cfg.command = sub->get_name();

  try {
    return execute(cfg, out);
  } catch (const Error& e) {
    err << io::error_json(e).dump() << "\n";
    return is_io_error(e.kind()) ? kExitIoError : kExitDomainError;
  } catch (const Json::exception& e) {
    err << io::error_json(Error(ErrorKind::ParseError, e.what())).dump() << "\n";
    return kExitIoError;
  }
}

}  // namespace dcqe::cli
