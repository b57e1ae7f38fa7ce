#include <algorithm>
#include <cmath>
#include <random>
#include <tuple>

#include <fmt/format.h>

#include "softqos/error.hpp"
#include "softqos/simulator.hpp"

namespace softqos {

namespace {

// Tag mixed into the seed of the holding-time stream so it never shares a
// sequence with an arrival stream.
constexpr std::uint64_t kHoldingStream = 0x686f6c64;

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

class HoldingSampler {
 public:
  HoldingSampler(const HoldingSpec& spec, std::uint64_t seed)
      : spec_(spec), engine_(make_engine(seed, kHoldingStream)) {
    if (spec_.type != HoldingSpec::Type::Infinite && !(spec_.ticks > 0.0)) {
      throw ValidationError(fmt::format("holding time must be positive, got {}", spec_.ticks));
    }
  }

  Tick next() {
    switch (spec_.type) {
      case HoldingSpec::Type::Infinite:
        return kInfiniteTime;
      case HoldingSpec::Type::Fixed:
        return spec_.ticks;
      case HoldingSpec::Type::Exponential:
        return std::exponential_distribution<double>(1.0 / spec_.ticks)(engine_);
    }
    return kInfiniteTime;
  }

 private:
  HoldingSpec spec_;
  std::mt19937_64 engine_;
};

}  // namespace

std::vector<CallRequest> generate_paper_sequence(std::size_t n, const WorkloadSpec& spec,
                                                 std::uint64_t seed) {
  if (spec.sequence_pattern.empty()) {
    throw ValidationError("sequence_pattern must not be empty");
  }
  HoldingSampler holding(spec.holding, seed);
  std::vector<CallRequest> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(CallRequest{
        .call_id = i + 1,
        .class_id = spec.sequence_pattern[i % spec.sequence_pattern.size()],
        .kind = spec.kind_pattern.kind_at(i),
        .arrival_time = static_cast<Tick>(i + 1),
        .holding_time = holding.next(),
    });
  }
  return out;
}

std::vector<CallRequest> generate_stochastic(const WorkloadSpec& spec, std::uint64_t seed) {
  if (spec.rates.empty()) {
    throw ValidationError("stochastic workload needs at least one class rate");
  }
  for (const auto& r : spec.rates) {
    if (!(r.rate > 0.0) || !std::isfinite(r.rate)) {
      throw ValidationError(
          fmt::format("arrival rate for class {} must be positive, got {}", r.class_id, r.rate));
    }
  }
  const Tick horizon = spec.horizon.value_or(kInfiniteTime);

  struct Arrival {
    Tick time;
    std::size_t stream;
    ClassId class_id;
  };
  std::vector<Arrival> arrivals;
  for (std::size_t s = 0; s < spec.rates.size(); ++s) {
    const auto& r = spec.rates[s];
    auto engine = make_engine(seed, static_cast<std::uint64_t>(s) + 1);
    std::exponential_distribution<double> gap(r.rate);
    Tick t = 0.0;
    for (std::size_t k = 0; k < spec.total_requests; ++k) {
      t += gap(engine);
      if (t > horizon) {
        break;
      }
      arrivals.push_back({t, s, r.class_id});
    }
  }
  std::sort(arrivals.begin(), arrivals.end(), [](const Arrival& a, const Arrival& b) {
    return std::tie(a.time, a.stream) < std::tie(b.time, b.stream);
  });
  if (arrivals.size() > spec.total_requests) {
    arrivals.resize(spec.total_requests);
  }

  HoldingSampler holding(spec.holding, seed);
  std::vector<CallRequest> out;
  out.reserve(arrivals.size());
  for (std::size_t i = 0; i < arrivals.size(); ++i) {
    out.push_back(CallRequest{
        .call_id = i + 1,
        .class_id = arrivals[i].class_id,
        .kind = spec.kind_pattern.kind_at(i),
        .arrival_time = arrivals[i].time,
        .holding_time = holding.next(),
    });
  }
  return out;
}

std::vector<CallRequest> generate_workload(const Scenario& scenario) {
  const auto& w = scenario.workload;
  const auto seed = scenario.seed.value_or(0);
  if (w.variant == WorkloadVariant::PaperSequence) {
    return generate_paper_sequence(w.total_requests, w, seed);
  }
  return generate_stochastic(w, seed);
}

}  // namespace softqos
