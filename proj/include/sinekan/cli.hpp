#pragma once

#include "sinekan/experiments.hpp"
#include "sinekan/svg_plot.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace sinekan::cli {

/// Entry point shared by the executable and the tests. args[0] is the
/// program name. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// One chart per function: log error against grid size, one series per model.
std::vector<std::pair<std::string, LineChart>> plots_from_1d_csv(const std::string& csv);

/// One two-panel chart per function: error against parameter count and
/// against FLOPs, one series per model family.
std::vector<std::pair<std::string, std::vector<LineChart>>> plots_from_2d_csv(const std::string& csv);

/// Target used by the construct subcommand: f1..f5 (extended to x = 0 by
/// their limit 0) or one of const1, identity, square, sin3.
/// Throws std::invalid_argument for unknown names.
std::function<double(double)> construct_target(const std::string& name, int k_terms = 5);

}  // namespace sinekan::cli
