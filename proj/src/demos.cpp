#include "dcqe/demos.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace dcqe::demos {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::size_t> detected_labels(const OutcomeSpace& s) {
  std::vector<std::size_t> out;
  for (std::size_t d = 0; d < s.n_d(); ++d)
    if (!s.is_loss(d)) out.push_back(d);
  if (out.size() != 2) {
    throw Error(ErrorKind::InvalidLog, "coincidence image needs exactly two detected labels, got " +
                                           std::to_string(out.size()));
  }
  return out;
}

}  // namespace

RegionMask::RegionMask(std::vector<bool> member) : member_(std::move(member)) {
  const bool any_in = std::find(member_.begin(), member_.end(), true) != member_.end();
  const bool any_out = std::find(member_.begin(), member_.end(), false) != member_.end();
  if (!any_in || !any_out) {
    throw Error(ErrorKind::InvalidMask, "mask needs at least one member and one non-member bin");
  }
}

RegionMask RegionMask::left_half(std::size_t n_x) {
  std::vector<bool> member(n_x, false);
  std::fill(member.begin(), member.begin() + static_cast<std::ptrdiff_t>(n_x / 2), true);
  return RegionMask(std::move(member));
}

RegionMask parse_mask_text(std::string_view text) {
  const auto row = trim(text);
  std::vector<bool> member;
  member.reserve(row.size());
  for (char ch : row) {
    if (ch != '0' && ch != '1') {
      throw Error(ErrorKind::ParseError,
                  std::string("mask text may only contain 0 and 1, found '") + ch + "'");
    }
    member.push_back(ch == '1');
  }
  return RegionMask(std::move(member));
}

RegionMask parse_mask_pbm(std::string_view text) {
  std::string cleaned;
  std::istringstream lines{std::string(text)};
  for (std::string line; std::getline(lines, line);) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    cleaned += line;
    cleaned += '\n';
  }
  std::istringstream in(cleaned);
  std::string magic;
  long width = 0;
  long height = 0;
  if (!(in >> magic) || magic != "P1") throw Error(ErrorKind::ParseError, "PBM mask must start with P1");
  if (!(in >> width >> height) || width <= 0 || height <= 0) {
    throw Error(ErrorKind::ParseError, "PBM mask has an invalid size header");
  }
  const auto pixels = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<bool> member;
  member.reserve(pixels);
  for (char ch; member.size() < pixels && in.get(ch);) {
    if (std::isspace(static_cast<unsigned char>(ch))) continue;
    if (ch != '0' && ch != '1') throw Error(ErrorKind::ParseError, "PBM pixels must be 0 or 1");
    member.push_back(ch == '1');
  }
  if (member.size() != pixels) throw Error(ErrorKind::ParseError, "PBM mask is truncated");
  return RegionMask(std::move(member));
}

RegionMask parse_mask(std::string_view text) {
  const auto body = trim(text);
  if (body.substr(0, 2) == "P1") return parse_mask_pbm(body);
  return parse_mask_text(body);
}

JointDistribution route_by_region(const RegionMask& mask, std::span<const double> base_x) {
  if (base_x.size() != mask.n_x()) {
    throw Error(ErrorKind::ShapeMismatch, "base distribution has " + std::to_string(base_x.size()) +
                                              " bins, mask has " + std::to_string(mask.n_x()));
  }
  OutcomeSpace space(mask.n_x(), {"D1", "D2"}, {"D1", "D2"});
  std::vector<double> p(space.cell_count(), 0.0);
  for (std::size_t x = 0; x < mask.n_x(); ++x) {
    const std::size_t route = mask.contains(x) ? 0 : 1;
    p[space.index(x, route, route)] = base_x[x];
  }
  JointDistribution joint(std::move(space), std::move(p));
  validate(joint);
  return joint;
}

CoincidenceImage coincidence_image(const EventLog& log) {
  if (log.empty()) throw Error(ErrorKind::EmptyLog, "cannot image an empty log");
  const auto& s = log.space();
  const auto labels = detected_labels(s);
  CoincidenceImage image{std::vector<std::uint64_t>(s.n_x(), 0),
                         std::vector<std::uint64_t>(s.n_x(), 0)};
  for (const auto& e : log.records()) {
    if (e.d == labels[0]) ++image.first[e.x];
    else if (e.d == labels[1]) ++image.second[e.x];
  }
  return image;
}

std::pair<Distribution, Distribution> coincidence_masses(const JointDistribution& joint) {
  const auto& s = joint.space();
  const auto labels = detected_labels(s);
  Distribution first(s.n_x(), 0.0);
  Distribution second(s.n_x(), 0.0);
  for (std::size_t x = 0; x < s.n_x(); ++x)
    for (std::size_t c = 0; c < s.n_c(); ++c) {
      first[x] += joint(x, c, labels[0]);
      second[x] += joint(x, c, labels[1]);
    }
  return {first, second};
}

}  // namespace dcqe::demos
