#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ssreg/instance.hpp"
#include "ssreg/model_index.hpp"
#include "ssreg/priors.hpp"

namespace ssreg {

//! Gaussian-collapse of the regression coefficients for one model: with
//! per-coordinate prior variances d_j on the z = beta/sigma scale, the
//! response marginal is Y | sigma^2 ~ N(0, sigma^2 M), M = I + X_sel D X_sel'.
//! All pieces needed downstream are carried here.
struct CollapsedGaussian {
    double logdet_M = 0.0;   // log|M| via the k x k (or p x p) dual determinant
    double quad = 0.0;       // Y' M^{-1} Y
    Eigen::VectorXd mean;    // posterior mean of beta_sel given sigma^2 (free of sigma^2)
    Eigen::MatrixXd chol_A;  // lower Cholesky factor of A = X_sel'X_sel + D^{-1}
};

//! Collapses the selected coordinates. gram_sel = X_sel'X_sel, c = X_sel'Y,
//! yty = Y'Y, d = prior variances of z_sel (all positive).
CollapsedGaussian collapse_gaussian(const Eigen::MatrixXd& gram_sel, const Eigen::VectorXd& c,
                                    double yty, const std::vector<double>& d);

//! log N(Y | 0, sigma^2 M) given a collapse and sigma^2.
double collapsed_loglik_given_sigma2(const CollapsedGaussian& cg, int n, double sigma2);

//! Marginalizes sigma^2 under an untruncated inverse-gamma prior.
double collapsed_log_evidence(const CollapsedGaussian& cg, int n, const VariancePrior& variance);

//! Closed-form log evidence of a model under a conjugate prior configuration
//! (dirac or gaussian spike, gaussian slab, untruncated inverse-gamma
//! variance). Throws NonConjugateError otherwise and RankDeficiencyError for
//! rank-deficient models.
double log_model_evidence(const ModelIndex& xi, const ProblemInstance& instance,
                          const PriorSpec& prior);

//! Upper bound on log evidence valid for every model: |M| >= 1 and the
//! quadratic form is nonnegative, so the bound drops both. Used to bound the
//! posterior mass lost to truncation.
double log_evidence_upper_bound(int n, const VariancePrior& variance);

//! Per-coordinate prior variances of z for the selected coordinate set.
//! Dirac spike: sel must equal xi (off-model coordinates carry no variance).
//! Continuous spike: sel is all of 1..p and off-model coordinates get the
//! spike variance.
std::vector<double> z_prior_variances(const ModelIndex& xi, const PriorSpec& prior, int p,
                                      bool full_dimension);

} // namespace ssreg
