// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string_view>

namespace acmv {

enum class Weather : int { sunny = 0, cloudy = 1, rainy = 2 };

inline constexpr int kHoursPerDay = 24;
inline constexpr int kWeatherCategories = 3;
inline constexpr int kHolidayCategories = 2;

std::string_view to_string(Weather w);
Weather parse_weather(std::string_view text);

/// City-wide contextual variables for one time interval. One record is
/// shared by all regions.
struct ContextRecord {
  int hour = 0;
  Weather weather = Weather::sunny;
  bool holiday = false;

  friend bool operator==(const ContextRecord&, const ContextRecord&) = default;
};

/// Throws BoundsError when hour or weather fall outside their categories.
void validate(const ContextRecord& ctx);

}  // namespace acmv
