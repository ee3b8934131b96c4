#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "ssreg/instance.hpp"
#include "ssreg/model_index.hpp"
#include "ssreg/priors.hpp"

namespace ssreg {

struct SamplerConfig {
    int sweeps = 10000;
    int burn_in = 5000;
    int thin = 1;
    //! Move mix for the model update; must be nonnegative and sum to 1.
    double w_add = 0.4;
    double w_delete = 0.4;
    double w_swap = 0.2;

    enum class Init { Empty, Truth, Screen };
    Init init = Init::Empty;
    //! Screen init keeps this many top marginal-correlation columns
    //! (0 = automatic, about sqrt(n)).
    int screen_size = 0;

    std::uint64_t seed = 0;

    void validate() const;
};

struct ChainState {
    ModelIndex xi;
    double sigma2 = 1.0;
    Eigen::VectorXd beta;  // full length-p draw; exact zeros off-model under a dirac spike
};

struct ChainResult {
    std::vector<ChainState> states;  // post burn-in, thinned
    std::vector<int> size_series;    // |xi| after every sweep, from sweep 0
    int burn_in = 0;
    double accept_rate_add = 0.0;
    double accept_rate_delete = 0.0;
    double accept_rate_swap = 0.0;
    ModelIndex init_model;
};

//! Metropolis-within-Gibbs sampler for the spike-and-slab posterior: MH on
//! the model (add/delete/swap, coefficients marginalized), Gibbs on sigma^2,
//! and conjugate draws of the coefficients. Laplace components are handled by
//! exponential scale-mixture augmentation; proposals to rank-deficient models
//! are rejected outright.
ChainResult mcmc_sample(const ProblemInstance& instance, const PriorSpec& prior,
                        const SamplerConfig& config);

//! Occupancy frequency per model over the kept states.
std::unordered_map<ModelIndex, double, ModelIndexHash> model_frequencies(
    const std::vector<ChainState>& states);

//! Effective sample size of a scalar series (initial positive sequence rule).
double effective_sample_size(const std::vector<double>& series);

} // namespace ssreg
