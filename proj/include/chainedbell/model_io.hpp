#pragma once

#include "chainedbell/decomposition.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

namespace chainedbell {

// Model file format (line oriented, '#' starts a comment line):
//
//   chainedbell-model 1
//   alpha <real>
//   n <N>
//   alice <theta_1> ... <theta_N>          radians
//   bob <theta'_1> ... <theta'_N>          radians
//   atoms <Z>
//   atom <z> weight <mu>                   repeated Z times, z = 0..Z-1, each
//   p <a> <b> <p00> <p01> <p10> <p11>        followed by N*N rows in (a, b) order
//   end
//
// Reals are written with 17 significant digits so a save/load round trip is
// exact. A weight takes exactly one value: per-setting weights are rejected.
// Schema violations (bad counts, weights not summing to 1, unnormalised rows)
// raise ParseError with the line and column of the offending token.

// Shortest form is not used; always 17 significant digits, '.' separator.
std::string format_real(double v);

void write_model(std::ostream& out, const DecompositionModel& model);
std::string serialize_model(const DecompositionModel& model);

DecompositionModel parse_model(std::istream& in, double tol = 1e-9);
DecompositionModel parse_model(std::string_view text, double tol = 1e-9);

DecompositionModel load_model(const std::filesystem::path& path, double tol = 1e-9);
void save_model(const std::filesystem::path& path, const DecompositionModel& model);

}  // namespace chainedbell
