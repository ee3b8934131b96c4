#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ssreg/constants.hpp"
#include "ssreg/eigenvals.hpp"
#include "ssreg/instance.hpp"
#include "ssreg/model_index.hpp"
#include "ssreg/priors.hpp"

namespace ssreg {

//! One analytic bound next to its exact (or Monte-Carlo) counterpart.
struct BoundComparison {
    double bound_value = 0.0;
    double exact_or_mc_value = 0.0;
    bool holds = false;
    std::string context;  // the inputs, as "key=value" pairs
};

//! Chi-square upper tail: P(chi2_d >= t) <= exp(-(sqrt(2t-d)-sqrt(d))^2/4),
//! compared against the exact regularized-incomplete-gamma tail.
//! Requires 2t >= d so the square root is real; the edge 2t = d is allowed
//! (the bound degenerates to exp(-d/4)).
BoundComparison chi2_tail_bound(int d, double t);

//! Deviation bounds for a normalized chi-square with n - d degrees of
//! freedom. Returns {upper, lower}:
//!   P(chi2_{n-d}/n >= 1+eps) <= exp(-min{(n eps+d)^2/(8(n-d)), (n eps+d)/8})
//!   P(chi2_{n-d}/n <= 1-eps) <= exp(-min{(n eps-d)^2/(8(n-d)), (n eps-d)/8})
//! Requires n > d and n*eps > d.
std::pair<BoundComparison, BoundComparison> chi2_norm_bounds(int n, int d, double eps);

//! Binomial upper-tail formula mu^{2(tt+1)}/2 * C(p,tt+1)/C(t,tt+1) with
//! tt = floor((t - p mu)/(1 - mu)), next to the exact tail P(T >= t) for
//! T ~ Binomial(p, mu). Requires p*mu < t <= p-1. The verdict is reported
//! only: this formula fails as an upper bound on some inputs (see README),
//! so callers must not assert `holds`.
BoundComparison pelekis_bound(int p, double mu, int t);

//! One test statistic: the extremum of a scan over candidate models, the
//! threshold it is compared against, and the model achieving the extremum.
struct PhiStatistic {
    bool triggered = false;
    double statistic = 0.0;
    double threshold = 0.0;
    ModelIndex witness;
};

//! The three test functions underlying the recovery analysis, evaluated by
//! exact enumeration over {full-rank xi : |xi \ xi_star| <= K s}.
//!   phi1: max |Y'(I - P_{xi u xi_star})Y / (n sigma_star^2) - 1| > M1 eps_n
//!   phi2: max ||pinv(X_{xi u xi_star}) Y - beta_star(union)|| > M2 sigma_star eps_n / (2 sqrt(lambda))
//!   phi3: min over xi not containing xi_star of ||(P_{xi u xi_star} - P_xi) Y||
//!         < M3 sigma_star sqrt(n) eps_n / 2
struct PhiReport {
    PhiStatistic phi1;
    PhiStatistic phi2;
    PhiStatistic phi3;
    double eps_n = 0.0;
    double z0n = 0.0;  // recorded for downstream reporting
    std::uint64_t unions_scanned = 0;
};

PhiReport phi_statistics(const ProblemInstance& instance, const RegularityConstants& consts,
                         double z0n, double lambda, std::uint64_t cap = kDefaultSubsetCap);

//! The overfitting-rate quantity r_n = max_j (size factor_j) * slab factor,
//!   size factor_j = [pi(|xi| = s+j) / pi(xi_star)]^{1/j},  j = 1..floor(K s)
//!   slab factor  = sup h1 * p^{1+eta} / sqrt(n lambda)
//! Strong selection needs r_n < 1.
struct SelectionRateReport {
    double r_n = 0.0;
    std::vector<double> size_factors;  // entry j-1 holds factor_j
    double slab_factor = 0.0;
    bool passes = false;  // r_n < 1
};

//! pi(|xi| = s+j) is the total prior mass on size-(s+j) models by default;
//! per_model = true uses the mass of a single size-(s+j) model instead.
SelectionRateReport selection_rate(const PriorSpec& prior, int n, int p, int s, double lambda,
                                   double eta, double K, bool per_model = false);

//! Upper bound 2 (sqrt(2 pi/(n lambda)) * sup_h1 * p^{1+eta})^{t-s} on the
//! posterior mass ratio of overfitted models at excess size t - s.
double posterior_ratio_bound(int t_minus_s, int n, int p, double lambda, double eta,
                             double sup_h1);

//! Monte-Carlo frequency of the bad-noise event
//!   Omega = Omega1 u Omega2,
//!   Omega1 = exists full-rank xi >= xi_star, |xi| <= (K+1)s, with
//!            ||(P_xi - P_{xi_star}) eps||^2 >= (2+eta)(|xi|-s) log p,
//!   Omega2 = ||eps|| >= 2 sqrt(n),
//! over standard-normal draws, against the chi-square union bound
//!   sum_t p^{t-s} P(chi2_{t-s} >= (2+eta)(t-s) log p) + P(chi2_n >= 4n).
//! holds means frequency <= bound + 3 binomial standard errors.
BoundComparison omega_event_frequency(const Eigen::MatrixXd& X, const ModelIndex& xi_star,
                                      double K, double eta, int draws, std::uint64_t seed,
                                      std::uint64_t cap = kDefaultSubsetCap);

} // namespace ssreg
