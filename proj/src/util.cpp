#include "bmeta/util.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>

#include "bmeta/errors.hpp"

namespace bmeta {

bool parse_double(const std::string& token, double& out) {
  if (token.empty()) return false;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end != token.c_str() + token.size()) return false;
  if (errno == ERANGE && (v == HUGE_VAL || v == -HUGE_VAL)) return false;
  out = v;
  return true;
}

double quantile_type7(std::span<const double> values, double p) {
  if (values.empty()) throw InsufficientDataError("quantile of empty sample");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  if (v.size() == 1) return v[0];
  const double h = (static_cast<double>(v.size()) - 1.0) * p;
  const auto i = static_cast<std::size_t>(std::floor(h));
  if (i + 1 >= v.size()) return v.back();
  return v[i] + (h - std::floor(h)) * (v[i + 1] - v[i]);
}

std::vector<double> linspace(double lo, double hi, int k) {
  std::vector<double> g(static_cast<std::size_t>(k));
  if (k == 1) {
    g[0] = lo;
    return g;
  }
  const double step = (hi - lo) / static_cast<double>(k - 1);
  for (int i = 0; i < k; ++i) g[static_cast<std::size_t>(i)] = lo + step * i;
  g.back() = hi;
  return g;
}

std::string to_hex(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return s;
}

}  // namespace bmeta
