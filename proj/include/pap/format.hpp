#pragma once

#include <string>

namespace pap {

/// Shortest decimal text that reads back to the same double. Always contains
/// a '.' or an exponent so it lexes as a real literal; non-finite values print
/// as `inf`, `-inf`, `nan`.
std::string format_real(double x);

}  // namespace pap
