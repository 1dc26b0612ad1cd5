#pragma once

#include <string>

namespace fer::csv {

/// Fixed decimal formatting so identical doubles always serialize to identical
/// bytes (the determinism contract compares CSV files).
std::string fmt(double x);

}  // namespace fer::csv
