#include "fdk/nonlinearity.hpp"

#include <cmath>
#include <stdexcept>

namespace fdk {

NonlinearSpec nl_sqrt1p() {
    return {"sqrt1p", [](double s) { return std::sqrt(1.0 + s * s); },
            [](double s) { return s / std::sqrt(1.0 + s * s); }, 1.0};
}

NonlinearSpec nl_zero() {
    // L must stay positive for the stability bound; 1e-30 makes the bound
    // astronomically large without ever rejecting a grid.
    return {"zero", [](double) { return 0.0; }, [](double) { return 0.0; }, 1e-30};
}

NonlinearSpec nl_linear(double lam) {
    return {"linear:" + std::to_string(lam), [lam](double s) { return lam * s; },
            [lam](double) { return lam; }, std::max(std::abs(lam), 1e-30)};
}

NonlinearSpec nonlinearity_by_name(const std::string& name) {
    if (name == "sqrt1p") return nl_sqrt1p();
    if (name == "zero") return nl_zero();
    if (name.rfind("linear:", 0) == 0) return nl_linear(std::stod(name.substr(7)));
    throw std::invalid_argument("nonlinearity_by_name: unknown nonlinearity " + name);
}

}  // namespace fdk
