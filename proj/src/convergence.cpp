#include "chnsd/convergence.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace chnsd {

std::vector<double> convergence_order(const std::vector<double>& errors, const std::vector<double>& steps) {
    if (errors.size() != steps.size()) throw ConfigError("convergence_order: size mismatch");
    if (errors.size() < 2) throw ConfigError("convergence_order needs at least two entries");
    std::vector<double> orders;
    for (std::size_t j = 0; j + 1 < errors.size(); ++j) {
        if (!(errors[j] >= 0.0) || !(errors[j + 1] >= 0.0))
            throw ConfigError("convergence_order: negative error");
        if (errors[j + 1] == 0.0) {
            orders.push_back(std::numeric_limits<double>::infinity()); // resolved exactly
            continue;
        }
        orders.push_back(std::log(errors[j] / errors[j + 1]) / std::log(steps[j] / steps[j + 1]));
    }
    return orders;
}

std::vector<std::vector<double>> ConvergenceTable::orders() const {
    std::vector<std::vector<double>> out(steps.size(),
                                         std::vector<double>(field_names.size(), std::numeric_limits<double>::quiet_NaN()));
    for (std::size_t f = 0; f < field_names.size(); ++f) {
        std::vector<double> e, s;
        for (std::size_t r = 0; r < steps.size(); ++r) {
            e.push_back(errors[r][f]);
            s.push_back(steps[r]);
        }
        const auto o = convergence_order(e, s);
        for (std::size_t r = 1; r < steps.size(); ++r) out[r][f] = o[r - 1];
    }
    return out;
}

std::string ConvergenceTable::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << step_label;
    for (const auto& n : field_names) os << ",err_" << n << ",order_" << n;
    os << "\n";
    const auto ord = orders();
    for (std::size_t r = 0; r < steps.size(); ++r) {
        os << steps[r];
        for (std::size_t f = 0; f < field_names.size(); ++f) {
            os << "," << errors[r][f] << ",";
            if (r == 0)
                os << "";
            else if (std::isinf(ord[r][f]))
                os << "exact";
            else
                os << ord[r][f];
        }
        os << "\n";
    }
    return os.str();
}

} // namespace chnsd
