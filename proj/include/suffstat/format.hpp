#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace suffstat {

// printf-style %.<digits>g; the fixed digit count is what keeps reports
// byte-reproducible.
inline std::string format_double(double v, int digits = 12) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // fold -0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

}  // namespace suffstat
