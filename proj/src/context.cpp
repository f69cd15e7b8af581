// SPDX-License-Identifier: Apache-2.0
#include "acmv/context.hpp"

#include <string>

#include "acmv/errors.hpp"

namespace acmv {

std::string_view to_string(Weather w) {
  switch (w) {
    case Weather::sunny:
      return "sunny";
    case Weather::cloudy:
      return "cloudy";
    case Weather::rainy:
      return "rainy";
  }
  throw BoundsError("invalid weather category " + std::to_string(static_cast<int>(w)));
}

Weather parse_weather(std::string_view text) {
  if (text == "sunny") return Weather::sunny;
  if (text == "cloudy") return Weather::cloudy;
  if (text == "rainy") return Weather::rainy;
  throw ParseError("unknown weather '" + std::string(text) +
                   "' (expected sunny, cloudy or rainy)");
}

void validate(const ContextRecord& ctx) {
  if (ctx.hour < 0 || ctx.hour >= kHoursPerDay) {
    throw BoundsError("hour " + std::to_string(ctx.hour) + " outside [0, 24)");
  }
  const int w = static_cast<int>(ctx.weather);
  if (w < 0 || w >= kWeatherCategories) {
    throw BoundsError("weather category " + std::to_string(w) + " outside [0, 3)");
  }
}

}  // namespace acmv
