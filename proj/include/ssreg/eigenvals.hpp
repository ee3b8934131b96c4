#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "ssreg/model_index.hpp"

namespace ssreg {

inline constexpr std::uint64_t kDefaultSubsetCap = 1000000;

//! Value of a local eigenvalue functional together with the minimizing model.
struct FunctionalResult {
    double value = 0.0;
    ModelIndex witness;
};

struct MrevEstimate {
    double value = 0.0;
    std::string method;              // "dense-grid" or "randomized"
    double grid_resolution_deg = 0.0;  // dense-grid only, 0 otherwise
    Eigen::VectorXd beta;            // unit-norm feasible witness
};

struct SchurCheck {
    double lhs = 0.0;  // smallest eigenvalue of the Schur complement
    double rhs = 0.0;  // smallest eigenvalue of the whole matrix
    bool holds = false;
};

struct EigenReport {
    int t = 0;
    double alpha = 1.0;
    FunctionalResult muev;
    FunctionalResult msev;
    FunctionalResult mnev;
    MrevEstimate mrev;
    bool mnev_premise_holds = false;
    //! MUEV((K+1)s); NaN unless the report was built with regularity constants.
    double lambda = std::numeric_limits<double>::quiet_NaN();
};

//! Minimum united eigenvalue of order t: exact minimum over full-rank models
//! xi with |xi ∪ xi_star| <= t of the smallest eigenvalue of the united
//! normalized Gram matrix. The witness is the minimal such model (a subset of
//! the complement of xi_star).
FunctionalResult muev(const Eigen::MatrixXd& X, const ModelIndex& xi_star, int t,
                      std::uint64_t cap = kDefaultSubsetCap, int workers = 1);

//! Monte Carlo upper bound for muev when exact enumeration exceeds the cap:
//! evaluates the united eigenvalue on `samples` random complement subsets of
//! the largest admissible size (plus the bare true model).
FunctionalResult muev_sampled(const Eigen::MatrixXd& X, const ModelIndex& xi_star, int t,
                              int samples, std::uint64_t seed);

//! Minimum sparse eigenvalue of order t: exact minimum over all |xi| <= t of
//! the smallest eigenvalue of X_xi' X_xi / n (0 for rank-deficient models).
FunctionalResult msev(const Eigen::MatrixXd& X, int t, std::uint64_t cap = kDefaultSubsetCap,
                      int workers = 1);

//! Minimum nonzero eigenvalue of order t over all |xi| <= t; zero eigenvalues
//! are identified with the shared rank threshold.
FunctionalResult mnev(const Eigen::MatrixXd& X, int t, std::uint64_t cap = kDefaultSubsetCap,
                      int workers = 1);

//! Estimates the minimum restricted eigenvalue of order t with cone parameter
//! alpha: the smallest Rayleigh quotient of the normalized Gram matrix over
//! unit vectors beta admitting a support xi, |xi| <= t, with
//! ||beta_{xi^c}||_1 <= alpha ||beta_xi||_1. The estimate upper-bounds the
//! true infimum. method: "auto" (dense grid for p <= 6, randomized above),
//! "dense-grid", or "randomized". seed_vector, when given, joins the
//! candidate starts (used to anchor the estimate at the sparse minimizer).
MrevEstimate mrev(const Eigen::MatrixXd& X, int t, double alpha,
                  const std::string& method = "auto", int restarts = 64,
                  std::uint64_t seed = 0, const Eigen::VectorXd* seed_vector = nullptr);

//! True iff every model xi with |xi| <= t that does not contain xi_star
//! leaves a nonzero residual of X_{xi_star} off its column space.
bool mnev_premise(const Eigen::MatrixXd& X, const ModelIndex& xi_star, int t,
                  std::uint64_t cap = kDefaultSubsetCap);

//! Compares the smallest eigenvalue of the Schur complement of the block
//! indexed by block1 (1-based) against the smallest eigenvalue of S itself.
SchurCheck schur_bound_check(const Eigen::MatrixXd& S, const ModelIndex& block1);

//! Runs all four functionals plus the premise check and assembles a report.
EigenReport audit_eigen(const Eigen::MatrixXd& X, const ModelIndex& xi_star, int t, double alpha,
                        std::uint64_t cap = kDefaultSubsetCap, int workers = 1, int restarts = 64,
                        std::uint64_t seed = 0);

} // namespace ssreg
