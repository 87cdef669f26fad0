#include "ifm/interferometer.hpp"

#include "ifm/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <thread>

namespace ifm::mzi {

namespace {

// SplitMix64 output function. Evaluated at seed + (index + 1) * gamma it gives
// the index-th output of a SplitMix64 stream, so any shot can be drawn
// without touching the others.
std::uint64_t splitmix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

unsigned resolve_parallelism(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Splits [0, n) into `parts` contiguous chunks and sums per-chunk tallies.
ShotCounts sample_parallel(const DetectionReport& report, std::uint64_t first,
                           std::uint64_t n, std::uint64_t seed, unsigned parallelism) {
  const std::uint64_t parts = std::min<std::uint64_t>(parallelism, std::max<std::uint64_t>(n, 1));
  if (parts <= 1) return sample_shots(report, first, n, seed);

  std::vector<ShotCounts> partial(parts);
  {
    std::vector<std::jthread> workers;
    workers.reserve(parts);
    const std::uint64_t chunk = n / parts;
    const std::uint64_t extra = n % parts;
    std::uint64_t begin = first;
    for (std::uint64_t k = 0; k < parts; ++k) {
      const std::uint64_t count = chunk + (k < extra ? 1 : 0);
      workers.emplace_back([&report, &partial, k, begin, count, seed] {
        partial[k] = sample_shots(report, begin, count, seed);
      });
      begin += count;
    }
  }
  ShotCounts total;
  for (const ShotCounts& c : partial) total += c;
  return total;
}

}  // namespace

ShotCounts& ShotCounts::operator+=(const ShotCounts& other) {
  d1 += other.d1;
  d2 += other.d2;
  absorbed += other.absorbed;
  return *this;
}

double shot_uniform(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t bits = splitmix64(seed + (index + 1) * kGamma);
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

ShotCounts sample_shots(const DetectionReport& report, std::uint64_t first,
                        std::uint64_t count, std::uint64_t seed) {
  const double total = report.p_d1 + report.p_d2 + report.p_absorbed;
  if (!(total > 0.0)) throw DomainError("detection report carries no probability");
  const double cut_d1 = report.p_d1 / total;
  const double cut_d2 = (report.p_d1 + report.p_d2) / total;

  ShotCounts counts;
  for (std::uint64_t i = first; i < first + count; ++i) {
    const double u = shot_uniform(seed, i);
    if (u < cut_d1) {
      ++counts.d1;
    } else if (u < cut_d2) {
      ++counts.d2;
    } else if (report.p_absorbed > 0.0) {
      ++counts.absorbed;
    } else if (report.p_d2 > 0.0) {
      // Rounding left a sliver above the last populated outcome.
      ++counts.d2;
    } else {
      ++counts.d1;
    }
  }
  return counts;
}

ShotCounts run_shots(const Layout& layout, std::uint64_t n_shots, std::uint64_t seed,
                     unsigned parallelism) {
  if (n_shots == 0) throw DomainError("shot count must be at least 1");
  const DetectionReport report = propagate_analytic(layout);
  return sample_parallel(report, 0, n_shots, seed, resolve_parallelism(parallelism));
}

std::vector<ShotCounts> run_shot_batches(const Layout& layout, std::uint64_t n_shots,
                                         std::uint64_t seed, std::uint64_t batch_size,
                                         unsigned parallelism) {
  if (n_shots == 0) throw DomainError("shot count must be at least 1");
  if (batch_size == 0) throw DomainError("batch size must be at least 1");
  const DetectionReport report = propagate_analytic(layout);
  const unsigned threads = resolve_parallelism(parallelism);

  std::vector<ShotCounts> batches;
  for (std::uint64_t first = 0; first < n_shots; first += batch_size) {
    const std::uint64_t count = std::min(batch_size, n_shots - first);
    batches.push_back(sample_parallel(report, first, count, seed, threads));
  }
  return batches;
}

}  // namespace ifm::mzi
