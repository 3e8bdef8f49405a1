#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace cms {

namespace detail {

// Thin typed wrapper so parameter, KPI and xApp names cannot be mixed up.
template <class Tag>
struct Id {
  std::string value;

  Id() = default;
  explicit Id(std::string v) : value(std::move(v)) {}

  auto operator<=>(const Id&) const = default;
  bool empty() const noexcept { return value.empty(); }
  const std::string& str() const noexcept { return value; }
};

}  // namespace detail

struct ParamTag {};
struct KpiTag {};
struct XAppTag {};

using ParamId = detail::Id<ParamTag>;
using KpiId = detail::Id<KpiTag>;
using XAppId = detail::Id<XAppTag>;

// Logical control-loop time.
using Tick = std::int64_t;

// Discrete permissible range of one parameter: min, min+step, ..., up to max.
struct ParamRange {
  double min = 0.0;
  double max = 0.0;
  double step = 1.0;

  // Throws ConfigError unless min <= max and step > 0.
  void validate() const;

  // floor((max-min)/step) + 1, with a tolerance so that exact multiples of
  // step are not dropped to rounding.
  std::size_t grid_size() const;

  double at(std::size_t i) const { return min + static_cast<double>(i) * step; }
  std::vector<double> grid() const;
};

// Orders identifiers like p2 < p10 instead of plain lexicographic order.
bool natural_less(const std::string& a, const std::string& b);

}  // namespace cms
