#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace fer::cli {

/// Subcommand dispatcher behind the `fer` binary. Subcommands:
/// ergodic, risk, parity, dual-check, example, figures, selftest.
/// Returns 0 on success, 2 on config errors, 1 otherwise. Every CSV written
/// is paired with a `.manifest` file carrying the resolved configuration,
/// flags, seed and thread count needed to reproduce it byte for byte.
int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
        std::ostream& err = std::cerr);

}  // namespace fer::cli
