#pragma once

#include "chnsd/common.hpp"

#include <string>
#include <vector>

namespace chnsd {

/// Error table over a refinement series in h or dt, with log-ratio orders.
struct ConvergenceTable {
    std::string step_label = "h"; // first CSV column header
    std::vector<std::string> field_names;
    std::vector<double> steps;               // h or dt per row
    std::vector<std::vector<double>> errors; // [row][field]

    /// orders[row][field]; row 0 has no predecessor and is filled with NaN.
    std::vector<std::vector<double>> orders() const;
    std::string to_csv() const;
};

/// Element-wise log(e_j / e_{j+1}) / log(s_j / s_{j+1}); an exact (zero)
/// error reports +infinity.
std::vector<double> convergence_order(const std::vector<double>& errors, const std::vector<double>& steps);

} // namespace chnsd
