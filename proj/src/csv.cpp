#include "ltp/csv.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace ltp::csv {

std::string number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void field(std::ostream& os, double v) { os << number(v) << ','; }

void field(std::ostream& os, const std::string& v) { os << v << ','; }

}  // namespace ltp::csv
