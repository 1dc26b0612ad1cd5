#include "fer/csv.hpp"

#include <cstdio>

namespace fer::csv {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.15g", x);
    return buf;
}

}  // namespace fer::csv
