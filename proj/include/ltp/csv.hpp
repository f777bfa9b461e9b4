#pragma once

#include <iosfwd>
#include <string>

namespace ltp::csv {

/// Round-trip representation: 17 significant digits, '.' decimal point.
std::string number(double v);

/// Writes `v` followed by a comma.
void field(std::ostream& os, double v);
void field(std::ostream& os, const std::string& v);

}  // namespace ltp::csv
