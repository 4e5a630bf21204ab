#pragma once

// File formats.
//
//   event log     CSV `trial,x,c,d`, labels as strings, loss spelled LOSS
//   joint         CSV `x,c,d,p`, every cell listed
//   distribution  CSV `x,p`
//   histogram     CSV `x,count`
//   JSON          audit reports, architecture configs, feasibility problems
//                 and results; every object carries `schema_version`.
//
// Reals are written in shortest round-trip form.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include "json.hpp"

#include "dcqe/feasibility.hpp"
#include "dcqe/optics.hpp"
#include "dcqe/probkit.hpp"

namespace dcqe::io {

inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::ordered_json;

std::string format_real(double value);

void write_event_log(std::ostream& out, const EventLog& log);
/// Without an explicit space the axes are inferred: labels matching a known
/// family ({erase, preserve}, {D1, D2}, {D1..D4}, {D_erase, D_preserve},
/// {D_erase, D_preserve, LOSS}) take the family order, otherwise labels are
/// sorted with LOSS last; n_x is one past the largest bin unless given.
EventLog read_event_log(std::istream& in, std::optional<std::size_t> n_x = std::nullopt);
EventLog read_event_log(std::istream& in, const OutcomeSpace& space);

void write_joint(std::ostream& out, const JointDistribution& joint);
/// Axis labels are ordered by first appearance.
JointDistribution read_joint(std::istream& in);

void write_distribution(std::ostream& out, std::span<const double> p);
void write_histogram(std::ostream& out, std::span<const std::uint64_t> counts);

enum class CsvKind { EventLog, Joint };
/// Reads the header line only.
CsvKind sniff_csv(std::istream& in);

Json to_json(const OutcomeSpace& space);
Json joint_to_json(const JointDistribution& joint);
Json to_json(const AuditReport& report, const OutcomeSpace& space,
             std::optional<std::uint64_t> sample_size = std::nullopt);

Json to_json(const optics::ArchitectureSpec& spec);
/// Missing fields take the builder defaults; q defaults to 0.5 where required.
optics::ArchitectureSpec architecture_from_json(const Json& j);

Json to_json(const feasibility::LossFeasibilityProblem& problem);
feasibility::LossFeasibilityProblem problem_from_json(const Json& j);
Json to_json(const feasibility::FeasibilityResult& result,
             const feasibility::LossFeasibilityProblem& problem);

Json error_json(const Error& e);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace dcqe::io
