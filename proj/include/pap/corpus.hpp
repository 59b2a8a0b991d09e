#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pap/term.hpp"

namespace pap {

/// Source of the GD counterexample program with learning-rate constant lr:
/// a recursive helper walks x up to 0 while counting steps, so the program
/// computes x^2 / (2 lr) but AD sees a different function on each piece.
std::string counterexample_source(double lr);

struct NamedProgram {
  std::string name;
  std::string source;
};

/// Builtin programs: sillyid, p (lr = 1), q, square, half_square, abs,
/// cantor, geometric, abs_kink, diag, pair2, mixture, uniform, scaled_uniform.
const std::vector<NamedProgram>& builtin_programs();

/// Throws std::out_of_range for unknown names.
const std::string& builtin_source(std::string_view name);
Term builtin(std::string_view name);

enum class Family { Analytic, Piecewise, Recursive };

const char* to_string(Family f);

struct AuditProgram {
  std::string name;
  Family family;
  std::string source;  // closed, real -> real
  double lo;           // sampling interval for audit points
  double hi;
};

const std::vector<AuditProgram>& audit_corpus();

}  // namespace pap
