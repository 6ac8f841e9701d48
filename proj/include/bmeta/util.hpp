#ifndef BMETA_UTIL_HPP
#define BMETA_UTIL_HPP

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace bmeta {

inline constexpr const char* kVersion = "0.1.0";

inline double mean_of(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Sample variance, n-1 divisor.
inline double sample_variance(std::span<const double> v) {
  const double m = mean_of(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return v.size() > 1 ? s / static_cast<double>(v.size() - 1) : 0.0;
}

inline double sample_sd(std::span<const double> v) {
  return std::sqrt(sample_variance(v));
}

// Linear-interpolation quantile on a sorted copy (the "type 7" rule used by
// most statistical software).
double quantile_type7(std::span<const double> values, double p);

std::vector<double> linspace(double lo, double hi, int k);

// Strict full-token double parse. Underflow to subnormals is accepted;
// overflow and trailing garbage are not. Returns false on failure.
bool parse_double(const std::string& token, double& out);

// FNV-1a over raw bytes; used for config and dataset fingerprints.
inline std::uint64_t fnv1a64(std::span<const char> bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

std::string to_hex(std::uint64_t h);

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace bmeta

#endif
