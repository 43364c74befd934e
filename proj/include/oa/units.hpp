#pragma once

// Unit conventions used throughout the library:
//   energy   pJ      latency  ns      area  mm^2
//   rates    symbols/ns (= Gsym/s)    throughput  MAC/s
// All conversions go through these constants so they can be audited in
// one place and round-tripped in tests.

namespace oa::units {

inline constexpr double kNsPerSecond = 1e9;   // ns -> s divisor
inline constexpr double kPjPerJoule = 1e12;   // pJ -> J divisor

constexpr double ns_to_seconds(double ns) { return ns / kNsPerSecond; }
constexpr double seconds_to_ns(double s) { return s * kNsPerSecond; }
constexpr double pj_to_joules(double pj) { return pj / kPjPerJoule; }
constexpr double joules_to_pj(double j) { return j * kPjPerJoule; }

// symbols/ns -> symbols/s
constexpr double per_ns_to_per_second(double r) { return r * kNsPerSecond; }

}  // namespace oa::units
