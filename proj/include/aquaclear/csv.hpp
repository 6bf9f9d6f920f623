#pragma once

#include <string>
#include <vector>

namespace aqua {

// 17 significant digits: enough for exact double round-trips, which makes
// byte-level determinism of output files testable.
std::string fmt_double(double v);

// RFC 4180 field quoting.
std::string csv_escape(const std::string& field);
std::string csv_row(const std::vector<std::string>& fields);

}  // namespace aqua
