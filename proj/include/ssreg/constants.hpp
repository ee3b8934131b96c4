#pragma once

#include <string>

namespace ssreg {

//! The constants appearing in the prior assumptions and the contraction /
//! selection statements. All must be strictly positive.
struct RegularityConstants {
    double A1 = 1.0;
    double A2 = 1.0;
    double A3 = 0.5;
    double K = 2.0;
    double M1 = 6.0;
    double M2 = 6.0;
    double M3 = 4.0;
    double eta = 0.1;

    void validate() const;  // throws on nonpositive entries

    //! A1 + A3 + 1 < A2*K.
    bool premise_contraction() const;
    //! M1, M2 > sqrt(8*max(A2,1)*K).
    bool m12_large_enough() const;
    //! M3 > sqrt(8*A3*K).
    bool m3_large_enough() const;

    std::string describe_premises() const;
};

} // namespace ssreg
