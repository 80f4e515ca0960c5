// Reaction-term catalog: f, f', and a Lipschitz constant for the step gate.
#pragma once

#include <functional>
#include <string>

namespace fdk {

struct NonlinearSpec {
    std::string name;
    std::function<double(double)> f;
    std::function<double(double)> fprime;
    double L = 1.0;  // Lipschitz constant of f (sup |f'|)
};

NonlinearSpec nl_sqrt1p();              // f(s) = sqrt(1+s^2), L = 1
NonlinearSpec nl_zero();                // f = 0 (L taken negligibly small)
NonlinearSpec nl_linear(double lam);    // f(s) = lam*s, L = |lam|

// "sqrt1p", "zero", or "linear:<coefficient>". Throws std::invalid_argument.
NonlinearSpec nonlinearity_by_name(const std::string& name);

}  // namespace fdk
