#pragma once

#include <string>

#include "pap/term.hpp"

namespace pap {

/// Surface syntax for a term. `parse(print_term(t)) == t` for desugared terms
/// whose variables do not shadow primitive names.
std::string print_term(const Term& t);

}  // namespace pap
