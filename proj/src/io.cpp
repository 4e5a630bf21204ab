#include "dcqe/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace dcqe::io {

namespace {

std::vector<std::string> split_row(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      fields.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return fields;
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + what);
}

template <typename T>
T parse_integer(const std::string& s, std::size_t line) {
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) parse_fail(line, "bad integer '" + s + "'");
  return value;
}

double parse_real(const std::string& s, std::size_t line) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) parse_fail(line, "bad number '" + s + "'");
  return value;
}

std::string read_header(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw Error(ErrorKind::ParseError, "missing CSV header");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  return header;
}

std::vector<std::string> infer_axis(const std::set<std::string>& seen,
                                    std::span<const std::vector<std::string>> families) {
  for (const auto& family : families) {
    if (std::all_of(seen.begin(), seen.end(), [&](const std::string& label) {
          return std::find(family.begin(), family.end(), label) != family.end();
        }))
      return family;
  }
  std::vector<std::string> out;
  for (const auto& label : seen)
    if (label != kLossLabel) out.push_back(label);
  if (seen.count(std::string(kLossLabel))) out.emplace_back(kLossLabel);
  return out;
}

struct RawEvent {
  std::uint64_t trial;
  std::uint32_t x;
  std::string c;
  std::string d;
};

std::vector<RawEvent> read_raw_events(std::istream& in) {
  if (read_header(in) != "trial,x,c,d") {
    throw Error(ErrorKind::ParseError, "event log header must be 'trial,x,c,d'");
  }
  std::vector<RawEvent> rows;
  std::size_t line_no = 1;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto f = split_row(line);
    if (f.size() != 4) parse_fail(line_no, "expected 4 fields");
    rows.push_back({parse_integer<std::uint64_t>(f[0], line_no),
                    parse_integer<std::uint32_t>(f[1], line_no), std::move(f[2]), std::move(f[3])});
  }
  return rows;
}

EventLog to_log(const std::vector<RawEvent>& rows, const OutcomeSpace& space) {
  std::vector<Event> records;
  records.reserve(rows.size());
  for (const auto& r : rows) {
    const auto c = space.find_c(r.c);
    const auto d = space.find_d(r.d);
    if (!c || !d) {
      throw Error(ErrorKind::ParseError, "trial " + std::to_string(r.trial) +
                                             " uses a label outside the space");
    }
    records.push_back({r.trial, r.x, static_cast<std::uint32_t>(*c), static_cast<std::uint32_t>(*d)});
  }
  try {
    return EventLog(space, std::move(records));
  } catch (const Error& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

Json label_list(const std::vector<std::string>& labels, std::span<const std::size_t> idx) {
  Json out = Json::array();
  for (auto i : idx) out.push_back(labels[i]);
  return out;
}

Json nullable(bool present, Json value) { return present ? std::move(value) : Json(nullptr); }

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return j.at(key).get<T>();
}

}  // namespace

std::string format_real(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

void write_event_log(std::ostream& out, const EventLog& log) {
  const auto& s = log.space();
  out << "trial,x,c,d\n";
  for (const auto& e : log.records())
    out << e.trial << ',' << e.x << ',' << s.c_values()[e.c] << ',' << s.d_values()[e.d] << '\n';
}

EventLog read_event_log(std::istream& in, std::optional<std::size_t> n_x) {
  const auto rows = read_raw_events(in);
  if (rows.empty()) throw Error(ErrorKind::EmptyLog, "event log has no records");
  std::set<std::string> cs;
  std::set<std::string> ds;
  std::size_t max_x = 0;
  for (const auto& r : rows) {
    cs.insert(r.c);
    ds.insert(r.d);
    max_x = std::max<std::size_t>(max_x, r.x);
  }
  static const std::vector<std::string> c_families[] = {{"erase", "preserve"}, {"D1", "D2"}};
  static const std::vector<std::string> d_families[] = {{"D1", "D2"},
                                                        {"D1", "D2", "D3", "D4"},
                                                        {"D_erase", "D_preserve"},
                                                        {"D_erase", "D_preserve", "LOSS"}};
  const std::size_t bins = n_x.value_or(std::max<std::size_t>(max_x + 1, 2));
  if (bins <= max_x) throw Error(ErrorKind::ParseError, "bin index exceeds the requested n_x");
  try {
    OutcomeSpace space(bins, infer_axis(cs, c_families), infer_axis(ds, d_families));
    return to_log(rows, space);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidSpace) throw Error(ErrorKind::ParseError, e.what());
    throw;
  }
}

EventLog read_event_log(std::istream& in, const OutcomeSpace& space) {
  return to_log(read_raw_events(in), space);
}

void write_joint(std::ostream& out, const JointDistribution& joint) {
  const auto& s = joint.space();
  out << "x,c,d,p\n";
  for (std::size_t x = 0; x < s.n_x(); ++x)
    for (std::size_t c = 0; c < s.n_c(); ++c)
      for (std::size_t d = 0; d < s.n_d(); ++d)
        out << x << ',' << s.c_values()[c] << ',' << s.d_values()[d] << ','
            << format_real(joint(x, c, d)) << '\n';
}

JointDistribution read_joint(std::istream& in) {
  if (read_header(in) != "x,c,d,p") throw Error(ErrorKind::ParseError, "joint header must be 'x,c,d,p'");
  struct Row {
    std::size_t x;
    std::string c, d;
    double p;
  };
  std::vector<Row> rows;
  std::vector<std::string> cs;
  std::vector<std::string> ds;
  std::size_t max_x = 0;
  std::size_t line_no = 1;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto f = split_row(line);
    if (f.size() != 4) parse_fail(line_no, "expected 4 fields");
    Row r{parse_integer<std::size_t>(f[0], line_no), f[1], f[2], parse_real(f[3], line_no)};
    if (std::find(cs.begin(), cs.end(), r.c) == cs.end()) cs.push_back(r.c);
    if (std::find(ds.begin(), ds.end(), r.d) == ds.end()) ds.push_back(r.d);
    max_x = std::max(max_x, r.x);
    rows.push_back(std::move(r));
  }
  try {
    OutcomeSpace space(max_x + 1, cs, ds);
    if (rows.size() != space.cell_count()) {
      throw Error(ErrorKind::ParseError, "joint CSV must list every cell exactly once");
    }
    std::vector<double> p(space.cell_count(), 0.0);
    std::vector<bool> seen(space.cell_count(), false);
    for (const auto& r : rows) {
      const auto i = space.index(r.x, space.c_index(r.c), space.d_index(r.d));
      if (seen[i]) throw Error(ErrorKind::ParseError, "duplicate joint cell");
      seen[i] = true;
      p[i] = r.p;
    }
    return JointDistribution(std::move(space), std::move(p));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidSpace) throw Error(ErrorKind::ParseError, e.what());
    throw;
  }
}

void write_distribution(std::ostream& out, std::span<const double> p) {
  out << "x,p\n";
  for (std::size_t x = 0; x < p.size(); ++x) out << x << ',' << format_real(p[x]) << '\n';
}

void write_histogram(std::ostream& out, std::span<const std::uint64_t> counts) {
  out << "x,count\n";
  for (std::size_t x = 0; x < counts.size(); ++x) out << x << ',' << counts[x] << '\n';
}

CsvKind sniff_csv(std::istream& in) {
  const auto header = read_header(in);
  if (header == "trial,x,c,d") return CsvKind::EventLog;
  if (header == "x,c,d,p") return CsvKind::Joint;
  throw Error(ErrorKind::ParseError, "unrecognized CSV header '" + header + "'");
}

Json to_json(const OutcomeSpace& space) {
  return Json{{"n_x", space.n_x()}, {"c_values", space.c_values()}, {"d_values", space.d_values()}};
}

Json joint_to_json(const JointDistribution& joint) {
  const auto& s = joint.space();
  Json cells = Json::array();
  for (std::size_t x = 0; x < s.n_x(); ++x)
    for (std::size_t c = 0; c < s.n_c(); ++c)
      for (std::size_t d = 0; d < s.n_d(); ++d)
        cells.push_back({{"x", x}, {"c", s.c_values()[c]}, {"d", s.d_values()[d]}, {"p", joint(x, c, d)}});
  return Json{{"space", to_json(s)}, {"cells", std::move(cells)}};
}

Json to_json(const AuditReport& r, const OutcomeSpace& s, std::optional<std::uint64_t> sample_size) {
  const auto& cl = s.c_values();
  const auto& dl = s.d_values();

  Json independence{
      {"holds", r.independence.holds},
      {"max_deviation", r.independence.max_deviation},
      {"witness", nullable(r.independence.witness.has_value(),
                           r.independence.witness
                               ? Json{{"x", r.independence.witness->first},
                                      {"c", cl[r.independence.witness->second]}}
                               : Json())},
      {"skipped_choices", label_list(cl, r.independence.skipped_choices)}};

  Json routing_map = nullptr;
  if (r.deterministic_routing.routing) {
    routing_map = Json::object();
    for (const auto& [c, d] : r.deterministic_routing.routing->entries) routing_map[cl[c]] = dl[d];
  }
  Json counterexample = nullptr;
  if (const auto& ce = r.deterministic_routing.counterexample)
    counterexample = {{"c", cl[ce->c]}, {"d", dl[ce->d]}, {"d_alt", dl[ce->d_alt]}};
  Json routing{{"holds", r.deterministic_routing.holds},
               {"routing", std::move(routing_map)},
               {"counterexample", std::move(counterexample)},
               {"skipped_choices", label_list(cl, r.deterministic_routing.skipped_choices)}};

  Json witness = nullptr;
  if (const auto& w = r.distinct_conditionals.witness)
    witness = {{"d", dl[w->d]}, {"d_alt", dl[w->d_alt]}, {"gap", w->gap}, {"bin_set", w->bin_set}};
  Json distinct{{"holds", r.distinct_conditionals.holds},
                {"witness", std::move(witness)},
                {"insufficient_outcomes", r.distinct_conditionals.insufficient_outcomes}};

  Json violations = Json::array();
  for (auto v : r.violations()) violations.push_back(std::string(to_string(v)));

  return Json{{"schema_version", kSchemaVersion},
              {"tolerance", r.tolerance},
              {"sample_size", sample_size ? Json(*sample_size) : Json(nullptr)},
              {"space", to_json(s)},
              {"independence", std::move(independence)},
              {"lossless", {{"holds", r.lossless.holds}, {"loss_mass", r.lossless.loss_mass}}},
              {"deterministic_routing", std::move(routing)},
              {"distinct_conditionals", std::move(distinct)},
              {"no_go_consistent", r.no_go_consistent},
              {"violations", std::move(violations)}};
}

Json to_json(const optics::ArchitectureSpec& spec) {
  Json j{{"schema_version", kSchemaVersion},
         {"kind", std::string(optics::to_string(spec.kind))},
         {"n_x", spec.fringe.n_x()},
         {"fringe_cycles", spec.fringe.fringe_cycles()},
         {"phase0", spec.fringe.phase0()},
         {"visibility", spec.fringe.visibility()},
         {"q", spec.q ? Json(*spec.q) : Json(nullptr)}};
  const auto& env = spec.fringe.envelope();
  const bool flat = std::all_of(env.begin(), env.end(), [&](double v) { return v == env.front(); });
  if (!flat) j["envelope"] = env;
  return j;
}

optics::ArchitectureSpec architecture_from_json(const Json& j) {
  try {
    optics::ArchitectureSpec spec;
    spec.kind = optics::parse_architecture(j.at("kind").get<std::string>());
    spec.fringe = optics::FringeModel(get_or<std::size_t>(j, "n_x", optics::kDefaultBins),
                                      get_or<double>(j, "fringe_cycles", optics::kDefaultFringeCycles),
                                      get_or<double>(j, "phase0", 0.0),
                                      get_or<double>(j, "visibility", 1.0),
                                      get_or<std::vector<double>>(j, "envelope", {}));
    if (j.contains("q") && !j.at("q").is_null()) {
      spec.q = j.at("q").get<double>();
    } else if (spec.kind == optics::ArchitectureKind::MachZehnder ||
               spec.kind == optics::ArchitectureKind::Polarization) {
      spec.q = optics::kDefaultChoiceProbability;
    }
    return spec;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("architecture config: ") + e.what());
  }
}

Json to_json(const feasibility::LossFeasibilityProblem& p) {
  Json j{{"schema_version", kSchemaVersion}, {"q", p.q}, {"p", p.p}, {"n_x", p.n_x}};
  if (!p.erase_conditional.empty()) j["erase_conditional"] = p.erase_conditional;
  if (!p.preserve_conditional.empty()) j["preserve_conditional"] = p.preserve_conditional;
  return j;
}

feasibility::LossFeasibilityProblem problem_from_json(const Json& j) {
  try {
    feasibility::LossFeasibilityProblem p;
    p.q = get_or<double>(j, "q", p.q);
    p.p = get_or<double>(j, "p", p.p);
    p.n_x = get_or<std::size_t>(j, "n_x", p.n_x);
    p.erase_conditional = get_or<std::vector<double>>(j, "erase_conditional", {});
    p.preserve_conditional = get_or<std::vector<double>>(j, "preserve_conditional", {});
    return p;
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("feasibility problem: ") + e.what());
  }
}

Json to_json(const feasibility::FeasibilityResult& result,
             const feasibility::LossFeasibilityProblem& problem) {
  Json j{{"schema_version", kSchemaVersion},
         {"feasible", result.feasible},
         {"binding_constraint", result.binding_constraint},
         {"problem", to_json(problem)}};
  if (problem.erase_conditional.empty() && problem.preserve_conditional.empty()) {
    const auto b = feasibility::loss_bounds(problem.q);
    j["loss_bounds"] = {b.low, b.high};
  }
  j["witness"] = result.witness ? joint_to_json(*result.witness) : Json(nullptr);
  return j;
}

Json error_json(const Error& e) {
  return Json{{"schema_version", kSchemaVersion},
              {"error", {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}}}};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path + "'");
  out << contents;
  if (!out) throw Error(ErrorKind::IoError, "failed writing '" + path + "'");
}

}  // namespace dcqe::io
