#pragma once

#include <numbers>

namespace rydsense::constants {

// CODATA 2018. eps0 carries the measured value; mu0 is derived from
// 1/(eps0 c^2) so that mu0 * eps0 * c^2 == 1 holds to rounding.
inline constexpr double speed_of_light = 299'792'458.0;  // m/s
inline constexpr double planck_h = 6.626'070'15e-34;     // J s
inline constexpr double hbar = planck_h / (2.0 * std::numbers::pi);
inline constexpr double vacuum_permittivity = 8.854'187'8128e-12;  // F/m
inline constexpr double vacuum_permeability =
    1.0 / (vacuum_permittivity * speed_of_light * speed_of_light);
inline constexpr double bohr_radius = 5.291'772'109'03e-11;    // m
inline constexpr double rydberg_energy = 2.179'872'361'1035e-18;  // J
inline constexpr double elementary_charge = 1.602'176'634e-19;    // C

}  // namespace rydsense::constants
