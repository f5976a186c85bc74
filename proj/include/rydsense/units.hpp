#pragma once

#include <numbers>

namespace rydsense {

// All internal frequencies are angular (rad/s). External interfaces (configs,
// CSV, CLI) use linear frequency in Hz; the conversion happens once at ingest.
inline constexpr double two_pi = 2.0 * std::numbers::pi;

constexpr double angular_from_hz(double hz) { return two_pi * hz; }
constexpr double hz_from_angular(double omega) { return omega / two_pi; }

}  // namespace rydsense
