#include "ssreg/constants.hpp"

#include <cmath>
#include <stdexcept>

namespace ssreg {

void RegularityConstants::validate() const {
    auto check = [](double v, const char* name) {
        if (!(v > 0.0))
            throw std::invalid_argument(std::string("constant ") + name + " must be positive");
    };
    check(A1, "A1");
    check(A2, "A2");
    check(A3, "A3");
    check(K, "K");
    check(M1, "M1");
    check(M2, "M2");
    check(M3, "M3");
    check(eta, "eta");
}

bool RegularityConstants::premise_contraction() const { return A1 + A3 + 1.0 < A2 * K; }

bool RegularityConstants::m12_large_enough() const {
    double bar = std::sqrt(8.0 * std::max(A2, 1.0) * K);
    return M1 > bar && M2 > bar;
}

bool RegularityConstants::m3_large_enough() const { return M3 > std::sqrt(8.0 * A3 * K); }

std::string RegularityConstants::describe_premises() const {
    std::string s;
    s += "A1+A3+1<A2*K: ";
    s += premise_contraction() ? "yes" : "no";
    s += "; M1,M2 bound: ";
    s += m12_large_enough() ? "yes" : "no";
    s += "; M3 bound: ";
    s += m3_large_enough() ? "yes" : "no";
    return s;
}

} // namespace ssreg
