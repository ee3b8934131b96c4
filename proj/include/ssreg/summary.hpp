#pragma once

#include <cstdint>
#include <limits>

#include <Eigen/Dense>

#include "ssreg/constants.hpp"
#include "ssreg/instance.hpp"
#include "ssreg/mcmc.hpp"
#include "ssreg/posterior.hpp"
#include "ssreg/priors.hpp"

namespace ssreg {

//! Posterior probabilities of the concentration events asserted by the
//! contraction and selection theorems, plus point summaries.
struct PosteriorSummary {
    double prob_true_model = 0.0;

    // individual clauses
    double freq_sigma = 0.0;          // sigma^2/sigma_star^2 inside the M1 interval
    double freq_overfit = 0.0;        // |xi \ xi_star| <= K s (full-rank models only)
    double freq_supset = 0.0;         // xi contains xi_star
    double freq_spike = 0.0;          // max_{j not in xi} |beta_j| <= sigma z0n
    double freq_l2_full = 0.0;        // ||beta - beta_star|| <= M2 sigma_star eps_n / sqrt(lambda)
    double freq_l2_restricted = 0.0;  // same radius, restricted to the xi coordinates

    // joint events
    double freq_theta_hat = 0.0;         // contraction set (sigma, overfit, spike, full l2)
    double freq_theta_hat_supset = 0.0;  // contraction set intersected with supset
    double freq_theta_tilde = 0.0;       // selection set (supset + restricted l2 variant)

    Eigen::VectorXd post_mean_beta;
    double ess = std::numeric_limits<double>::quiet_NaN();  // NaN in exact mode
};

struct SummaryOptions {
    int draws_per_model = 1000;  // conditional Monte Carlo draws (exact mode)
    std::uint64_t seed = 0;
};

//! Exact-mode summary: clause probabilities are mixtures over enumerated
//! models, with beta- and sigma-dependent clauses evaluated by conditional
//! Monte Carlo inside each model. One shared draw set serves every clause, so
//! set inclusions between events hold exactly in the output.
PosteriorSummary summarize(const ModelPosterior& post, const ProblemInstance& instance,
                           const PriorSpec& prior, const RegularityConstants& consts,
                           double lambda, double z0n, const SummaryOptions& opts = {});

//! Chain-mode summary over kept MCMC states.
PosteriorSummary summarize(const ChainResult& chain, const ProblemInstance& instance,
                           const RegularityConstants& consts, double lambda, double z0n);

} // namespace ssreg
