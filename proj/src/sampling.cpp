#include "dcqe/sampling.hpp"

#include <algorithm>
#include <random>

namespace dcqe {

namespace {

struct CellTable {
  std::vector<double> cdf;
  std::size_t last_positive = 0;
};

CellTable make_cell_table(const JointDistribution& joint) {
  const auto p = joint.values();
  CellTable t;
  t.cdf.resize(p.size());
  double run = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    run += p[i];
    t.cdf[i] = run;
    if (p[i] > 0.0) t.last_positive = i;
  }
  for (auto& v : t.cdf) v /= run;
  return t;
}

void fill_chunk(const CellTable& table, const OutcomeSpace& space, std::uint64_t seed,
                std::uint64_t chunk, std::uint64_t n, Event* out) {
  const std::uint64_t begin = chunk * kSampleChunk;
  const std::uint64_t end = std::min(n, begin + kSampleChunk);
  std::mt19937_64 engine(derive_chunk_seed(seed, chunk));
  const std::size_t per_x = space.n_c() * space.n_d();
  for (std::uint64_t t = begin; t < end; ++t) {
    const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
    auto idx = static_cast<std::size_t>(
        std::upper_bound(table.cdf.begin(), table.cdf.end(), u) - table.cdf.begin());
    if (idx >= table.cdf.size()) idx = table.last_positive;
    out[t] = Event{t, static_cast<std::uint32_t>(idx / per_x),
                   static_cast<std::uint32_t>((idx / space.n_d()) % space.n_c()),
                   static_cast<std::uint32_t>(idx % space.n_d())};
  }
}

std::uint64_t chunk_count(std::uint64_t n) { return (n + kSampleChunk - 1) / kSampleChunk; }

void check_sample_request(const JointDistribution& joint, std::uint64_t n) {
  validate(joint, joint.sample_size() ? 1e-9 : kNormalizationTolerance);
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "sample count must be at least 1");
}

JointDistribution from_counts(const EventLog& log, const std::vector<std::uint64_t>& counts) {
  const double n = static_cast<double>(log.size());
  std::vector<double> p(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) p[i] = static_cast<double>(counts[i]) / n;
  return JointDistribution(log.space(), std::move(p), log.size());
}

}  // namespace

std::uint64_t derive_chunk_seed(std::uint64_t seed, std::uint64_t chunk) noexcept {
  std::uint64_t z = seed + (chunk + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

EventLog sample_events_serial(const JointDistribution& joint, std::uint64_t n,
                              std::uint64_t seed) {
  check_sample_request(joint, n);
  const auto table = make_cell_table(joint);
  std::vector<Event> records(n);
  for (std::uint64_t k = 0; k < chunk_count(n); ++k)
    fill_chunk(table, joint.space(), seed, k, n, records.data());
  return EventLog(joint.space(), std::move(records));
}

EventLog sample_events(const JointDistribution& joint, std::uint64_t n, std::uint64_t seed) {
  check_sample_request(joint, n);
  const auto table = make_cell_table(joint);
  std::vector<Event> records(n);
  const auto chunks = static_cast<std::int64_t>(chunk_count(n));
  Event* out = records.data();
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < chunks; ++k)
    fill_chunk(table, joint.space(), seed, static_cast<std::uint64_t>(k), n, out);
  return EventLog(joint.space(), std::move(records));
}

JointDistribution estimate_from_events_serial(const EventLog& log) {
  if (log.empty()) throw Error(ErrorKind::EmptyLog, "cannot estimate from an empty log");
  const auto& s = log.space();
  std::vector<std::uint64_t> counts(s.cell_count(), 0);
  for (const auto& e : log.records()) ++counts[s.index(e.x, e.c, e.d)];
  return from_counts(log, counts);
}

JointDistribution estimate_from_events(const EventLog& log) {
  if (log.empty()) throw Error(ErrorKind::EmptyLog, "cannot estimate from an empty log");
  const auto& s = log.space();
  const auto records = log.records();
  const auto n = static_cast<std::int64_t>(records.size());
  std::vector<std::uint64_t> counts(s.cell_count(), 0);
#pragma omp parallel
  {
    std::vector<std::uint64_t> local(s.cell_count(), 0);
#pragma omp for schedule(static) nowait
    for (std::int64_t i = 0; i < n; ++i) {
      const auto& e = records[static_cast<std::size_t>(i)];
      ++local[s.index(e.x, e.c, e.d)];
    }
#pragma omp critical
    for (std::size_t i = 0; i < local.size(); ++i) counts[i] += local[i];
  }
  return from_counts(log, counts);
}

}  // namespace dcqe
