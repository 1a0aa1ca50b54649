#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "dirtybench/dataset.hpp"
#include "dirtybench/random.hpp"

namespace dirtybench::testing {

inline Dataset table(std::string_view csv, LoadOptions options = {}) { return parse_dataset(csv, options); }

inline Dataset student_table(bool with_key = true) {
  LoadOptions o;
  o.no_target = true;
  if (with_key) o.entity_key = {"StudentNo", "Name"};
  return parse_dataset(
      "StudentNo,Name,City,Country\n"
      "170302,Alice,NYC,\n"
      "170302,Steven,,FR\n"
      "170304,Bob,NYC,U.S.A\n"
      "170304,Bob,LA,U.S.A\n",
      o);
}

inline double gauss(Rng& rng) {
  const double u1 = 1.0 - rng.uniform01();
  const double u2 = rng.uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

/// Numeric features around a per-class center, plus a categorical column
/// when `with_category` is set; the label column is last.
inline Dataset blobs(std::size_t n, std::size_t features, std::size_t classes, std::uint64_t seed,
                     double spread = 0.6, bool with_category = false) {
  Rng rng(seed);
  std::ostringstream s;
  for (std::size_t f = 0; f < features; ++f) s << "x" << f << ",";
  if (with_category) s << "colour,";
  s << "label\n";
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i % classes;
    for (std::size_t f = 0; f < features; ++f) {
      const double center = static_cast<double>((c * 7 + f * 3) % 5) * 2.0;
      s << format_number(std::round((center + spread * gauss(rng)) * 1e4) / 1e4) << ",";
    }
    if (with_category) s << (rng.uniform01() < 0.8 ? "c" + std::to_string(c) : "c" + std::to_string((c + 1) % classes)) << ",";
    s << "class" << c << "\n";
  }
  LoadOptions o;
  o.categorical_target = true;
  return parse_dataset(s.str(), o);
}

/// y = 1 + sum_f (f+1) x_f + noise.
inline Dataset linear_data(std::size_t n, std::size_t features, std::uint64_t seed, double noise = 0.1) {
  Rng rng(seed);
  std::ostringstream s;
  for (std::size_t f = 0; f < features; ++f) s << "x" << f << ",";
  s << "y\n";
  for (std::size_t i = 0; i < n; ++i) {
    double y = 1.0;
    for (std::size_t f = 0; f < features; ++f) {
      const double x = std::round(rng.uniform01() * 10.0 * 1e4) / 1e4;
      y += static_cast<double>(f + 1) * x;
      s << format_number(x) << ",";
    }
    y += noise * gauss(rng);
    s << format_number(y) << "\n";
  }
  return parse_dataset(s.str());
}

}  // namespace dirtybench::testing
